import cmath
import itertools
from fractions import Fraction

import networkx as nx
import pytest

from wittingqkd import WittingConfiguration
from wittingqkd.configuration import (
    Card,
    SUITS,
    canonical_phase,
    scaled_inner,
)
from wittingqkd.eisenstein import Eisenstein, I_SQRT3, UNITS, ZERO

W = cmath.exp(2j * cmath.pi / 3)


def embed(vec):
    return tuple(x.a + x.b * W for x in vec)


def float_inner(u, v):
    return sum(a.conjugate() * b for a, b in zip(u, v))


# -- states and numbering -------------------------------------------------------


def test_forty_distinct_states(config):
    assert len(config.states) == 40
    assert len({s.vector for s in config.states}) == 40
    for s in config.states:
        assert sum(x.norm_sq() for x in s.vector) == 3


def test_block_card_bijection(config):
    blocks = {s.block for s in config.states}
    assert blocks == {(c, r) for c in range(4) for r in range(10)}
    # suit <-> block column is fixed
    for s in config.states:
        assert s.block[0] == SUITS.index(s.card.suit)


def test_table_anchor_rows(config):
    # S1 is projectively (sqrt(3),0,0,0): the unit orbit of (1+2w) e0.
    s1 = config.state_of(Card("S", 1))
    assert s1.vector == canonical_phase((I_SQRT3, ZERO, ZERO, ZERO))
    assert s1.block == (0, 0)

    c2 = config.state_of(Card("C", 2))
    one = Eisenstein(1, 0)
    assert c2.vector == canonical_phase((one, one, one, ZERO))
    assert c2.block == (3, 1)

    h10 = config.state_of(Card("H", 10))
    assert h10.vector == canonical_phase(
        (one, ZERO, Eisenstein(-1, 0), Eisenstein(0, -1))
    )
    assert h10.block == (1, 4)


def test_canonicalisation_idempotent_and_phase_free(config):
    for s in config.states:
        assert canonical_phase(s.vector) == s.vector
        for u in UNITS:
            assert canonical_phase(tuple(u * x for x in s.vector)) == s.vector


def test_vertex_expansion_matches_direct_enumeration(config):
    vertices = config.expand_vertices()
    assert len(vertices) == 240
    got = {tuple(x.key() for x in v) for v in vertices}

    # Independent oracle: enumerate the polytope's vertex families directly.
    w_pow = [Eisenstein(1, 0), Eisenstein(0, 1), Eisenstein(-1, -1)]
    expected = set()
    for m, n, l in itertools.product(range(3), repeat=3):
        families = [
            (ZERO, w_pow[m], -w_pow[n], w_pow[l]),
            (w_pow[m], ZERO, -w_pow[n], -w_pow[l]),
            (w_pow[m], -w_pow[n], ZERO, w_pow[l]),
            (w_pow[m], w_pow[n], w_pow[l], ZERO),
        ]
        for fam in families:
            expected.add(tuple(x.key() for x in fam))
            expected.add(tuple((-x).key() for x in fam))
    for pos in range(4):
        for l in range(3):
            for sign in (1, -1):
                vec = [ZERO] * 4
                vec[pos] = I_SQRT3 * w_pow[l] * sign
                expected.add(tuple(x.key() for x in vec))
    assert len(expected) == 240
    assert got == expected


def test_axis_vertex_present(config):
    keys = {tuple(x.key() for x in v) for v in config.expand_vertices()}
    assert ((1, 2), (0, 0), (0, 0), (0, 0)) in keys


# -- inner products --------------------------------------------------------------


def test_scaled_inner_examples(config):
    s1 = config.state_of(Card("S", 1))
    h1 = config.state_of(Card("H", 1))
    assert scaled_inner(s1.vector, s1.vector).norm_sq() == 9
    assert scaled_inner(s1.vector, h1.vector).is_zero()
    # S2 and C2 share the rank-2 tetrad, hence are orthogonal.
    s2 = config.state_of(Card("S", 2))
    c2 = config.state_of(Card("C", 2))
    assert scaled_inner(s2.vector, c2.vector).norm_sq() == 0


def test_transition_spectrum_exact_and_vs_float(config):
    third = Fraction(1, 3)
    for s, t in itertools.combinations(config.states, 2):
        p = config.transition_prob(s, t)
        assert p in (0, third)
        f = abs(float_inner(embed(s.vector), embed(t.vector))) ** 2 / 9
        assert abs(float(p) - f) < 1e-9
    for s in config.states:
        assert config.transition_prob(s, s) == 1


# -- the orthogonality graph and its tetrads -------------------------------------


def test_graph_regularity(config):
    assert all(len(a) == 12 for a in config.adjacency)
    assert sum(len(a) for a in config.adjacency) // 2 == 240
    s1 = config.state_of(Card("S", 1))
    h1 = config.state_of(Card("H", 1))
    assert h1.index in config.adjacency[s1.index]


def test_bases_against_networkx_oracle(config):
    g = nx.Graph()
    g.add_nodes_from(range(40))
    for i, nbrs in enumerate(config.adjacency):
        g.add_edges_from((i, j) for j in nbrs if j > i)
    oracle = {frozenset(c) for c in nx.find_cliques(g)}
    assert all(len(c) == 4 for c in oracle)
    assert len(oracle) == 40
    ours = {
        frozenset(config.state_of(c).index for c in basis.members)
        for basis in config.bases
    }
    assert ours == oracle


def test_every_state_in_four_bases(config):
    for s in config.states:
        assert len(config.bases_of(s.card)) == 4


def test_tags_and_counts(config):
    tags = [b.tag for b in config.bases]
    assert tags.count("rank-tetrad") == 10
    assert tags.count("mixed-suit") == 18
    assert tags.count("mono-suit") == 12
    # one card of each suit in 28 tetrads total
    one_per_suit = sum(
        1 for b in config.bases if len({c.suit for c in b.members}) == 4
    )
    assert one_per_suit == 28


def test_basis_ordering_rules(config):
    for b in config.bases:
        if b.tag == "mono-suit":
            ranks = [c.rank for c in b.members]
            assert ranks == sorted(ranks)
            assert len({c.suit for c in b.members}) == 1
        else:
            assert [c.suit for c in b.members] == list(SUITS)
    # canonical id layout: rank tetrads 0..9 in rank order, then mixed, then mono
    for i in range(10):
        assert config.bases[i].tag == "rank-tetrad"
        assert config.bases[i].members[0].rank == i + 1
    assert all(config.bases[i].tag == "mixed-suit" for i in range(10, 28))
    assert all(config.bases[i].tag == "mono-suit" for i in range(28, 40))


def test_members_mutually_orthogonal(config):
    for b in config.bases:
        for x, y in itertools.combinations(b.members, 2):
            assert config.transition_prob(x, y) == 0


def test_orthogonal_pair_has_unique_basis(config):
    for s, t in itertools.combinations(config.states, 2):
        common = [
            b.id
            for b in config.bases
            if s.card in b.members and t.card in b.members
        ]
        if scaled_inner(s.vector, t.vector).is_zero():
            assert len(common) == 1
            assert config.common_basis(s.card, t.card) == common[0]
        else:
            assert not common
            assert config.common_basis(s.card, t.card) is None


def test_common_basis_tie_break_for_equal_cards(config):
    for s in config.states:
        assert config.common_basis(s.card, s.card) == min(config.bases_of(s.card))


def test_common_basis_examples(config):
    # S2 and C2 share the rank-2 tetrad (canonical id 1)
    rank2 = config.common_basis(Card("S", 2), Card("C", 2))
    assert rank2 == 1
    assert config.bases[rank2].tag == "rank-tetrad"
    assert {c.rank for c in config.bases[rank2].members} == {2}
    # a non-orthogonal pair shares nothing
    assert config.transition_prob(
        config.state_of(Card("S", 2)), config.state_of(Card("D", 3))
    ) != 0
    assert config.common_basis(Card("S", 2), Card("D", 3)) is None


# -- conjugation -----------------------------------------------------------------


def test_conjugate_card_examples(config):
    assert config.conjugate_card(Card("S", 3)) == Card("S", 4)
    assert config.conjugate_card(Card("D", 1)) == Card("D", 1)
    assert config.conjugate_card(Card("H", 6)) == Card("H", 10)


def test_conjugate_card_involution_and_vectors(config):
    for s in config.states:
        image = config.conjugate_card(s.card)
        assert config.conjugate_card(image) == s.card
        assert image.suit == s.card.suit
        conj_vec = canonical_phase(x.conj() for x in s.vector)
        assert conj_vec == config.state_of(image).vector


# -- MUB slices ------------------------------------------------------------------


@pytest.mark.parametrize("k", range(4))
def test_mub_triads(config, k):
    triads = config.mub_triads(k)
    assert len(triads) == 4
    cards = [c for t in triads for c in t]
    assert len(cards) == 12
    for card in cards:
        assert config.state_of(card).vector[k].is_zero()
    third = Fraction(1, 3)
    for t1, t2 in itertools.combinations(triads, 2):
        for a in t1:
            for b in t2:
                assert config.transition_prob(a, b) == third
    for t in triads:
        for a, b in itertools.combinations(t, 2):
            assert config.transition_prob(a, b) == 0


def test_mub_triads_last_slice_blocks(config):
    # The coordinate-3 slice consists of the first three axis states plus the
    # last block column, grouped as rows {1,2,3}, {4,5,6}, {7,8,9}.
    triads = config.mub_triads(3)
    blocks = [{config.state_of(c).block for c in t} for t in triads]
    assert {(0, 0), (1, 0), (2, 0)} in blocks
    assert {(3, 1), (3, 2), (3, 3)} in blocks
    assert {(3, 4), (3, 5), (3, 6)} in blocks
    assert {(3, 7), (3, 8), (3, 9)} in blocks


# -- block column structure ------------------------------------------------------


def test_columns_monomially_equivalent(config):
    columns = {c: set() for c in range(4)}
    for s in config.states:
        columns[s.block[0]].add(s.vector)

    def attempt(c1, c2):
        source = columns[c1]
        for k in range(1, 4):
            for phases in itertools.product(range(6), repeat=3):
                us = (Eisenstein(1, 0),) + tuple(UNITS[p] for p in phases)
                image = {
                    canonical_phase(
                        tuple(
                            u * v[(i - k) % 4] for i, u in enumerate(us)
                        )
                    )
                    for v in source
                }
                if image == columns[c2]:
                    return True
        return False

    for c1, c2 in itertools.permutations(range(4), 2):
        assert attempt(c1, c2), (c1, c2)
