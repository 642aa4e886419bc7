"""The 40-state configuration in C^4: states, numbering schemes, and bases.

The configuration consists of 40 projective states whose sqrt(3)-scaled
coordinates are Eisenstein integers.  Two numbering schemes coexist:

* ``block`` numbering, (column 0..3, row 0..9): row 0 holds the four axis
  states, and each column's rows 1..9 run through one of the four
  nine-state families ``(0,1,-w^m,w^n)``, ``(1,0,-w^m,-w^n)``,
  ``(1,-w^m,0,w^n)``, ``(1,w^m,w^n,0)``.
* ``card`` numbering, (suit in S,H,D,C; rank 1..10): rows are arranged so
  that the four cards of each rank are mutually orthogonal.

Both tables are embedded below as literal constants and cross-validated on
construction: against each other (the bracketed block index carried by the
card table) and against the generative families.  Any mismatch raises
:class:`ConfigurationError` — the data is a load-bearing part of the build,
not documentation.

Projective equivalence throughout means equality up to the six units of
Z[w]; the canonical representative of a state is the unit multiple whose
first nonzero coordinate has the lexicographically smallest (a, b) pair.
The axis states are stored via the in-ring multiple i*sqrt(3) = 1 + 2w, so
e.g. (sqrt(3),0,0,0) is represented by the class of ((1,2),0,0,0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .eisenstein import Eisenstein, UNITS, ZERO

SUITS = ("S", "H", "D", "C")  # spades, hearts, diamonds, clubs: ascending order
RANKS = tuple(range(1, 11))

# Complex conjugation maps each state to another configuration state with the
# same suit and the rank swapped by this involution (ranks 1 and 2 are real).
RANK_CONJUGATION = {1: 1, 2: 2, 3: 4, 4: 3, 5: 8, 8: 5, 7: 9, 9: 7, 6: 10, 10: 6}


class ConfigurationError(RuntimeError):
    """Raised when the embedded tables fail a structural self-check."""


class Card(NamedTuple):
    suit: str
    rank: int

    @property
    def label(self) -> str:
        return f"{self.suit}{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "Card":
        suit, rank = text[0].upper(), int(text[1:])
        if suit not in SUITS or rank not in RANKS:
            raise ValueError(f"not a card label: {text!r}")
        return cls(suit, rank)


# Vector tokens: w = omega, W = conj(omega) = omega^2, R = i*sqrt(3) = 1 + 2w.
_TOKENS = {
    "0": (0, 0),
    "1": (1, 0),
    "-1": (-1, 0),
    "w": (0, 1),
    "-w": (0, -1),
    "W": (-1, -1),
    "-W": (1, 1),
    "R": (1, 2),
}

# Block numbering: per column, rows 0..9 (sqrt(3)-scaled coordinates).
_BLOCK_TABLE = (
    ("R 0 0 0", "0 1 -1 1", "0 1 -w W", "0 1 -W w", "0 1 -w 1",
     "0 1 -W W", "0 1 -1 w", "0 1 -W 1", "0 1 -1 W", "0 1 -w w"),
    ("0 R 0 0", "1 0 -1 -1", "1 0 -w -W", "1 0 -W -w", "1 0 -1 -w",
     "1 0 -w -1", "1 0 -W -W", "1 0 -1 -W", "1 0 -w -w", "1 0 -W -1"),
    ("0 0 R 0", "1 -1 0 1", "1 -w 0 W", "1 -W 0 w", "1 -W 0 W",
     "1 -1 0 w", "1 -w 0 1", "1 -w 0 w", "1 -W 0 1", "1 -1 0 W"),
    ("0 0 0 R", "1 1 1 0", "1 w W 0", "1 W w 0", "1 w 1 0",
     "1 W W 0", "1 1 w 0", "1 W 1 0", "1 1 W 0", "1 w w 0"),
)

# Card numbering: rank -> per-suit (vector, block row within the suit's
# column).  Suit S maps to block column 0, H to 1, D to 2, C to 3.
_CARD_TABLE = {
    1: (("R 0 0 0", 0), ("0 R 0 0", 0), ("0 0 R 0", 0), ("0 0 0 R", 0)),
    2: (("0 1 -1 1", 1), ("1 0 -1 -1", 1), ("1 -1 0 1", 1), ("1 1 1 0", 1)),
    3: (("0 1 -w W", 2), ("1 0 -W -1", 9), ("1 -w 0 1", 6), ("1 w W 0", 2)),
    4: (("0 1 -W w", 3), ("1 0 -w -1", 5), ("1 -W 0 1", 8), ("1 W w 0", 3)),
    5: (("0 1 -1 w", 6), ("1 0 -w -W", 2), ("1 -w 0 W", 2), ("1 w w 0", 9)),
    6: (("0 1 -w 1", 4), ("1 0 -1 -W", 7), ("1 -W 0 W", 4), ("1 W 1 0", 7)),
    7: (("0 1 -W W", 5), ("1 0 -W -W", 6), ("1 -1 0 W", 9), ("1 1 W 0", 8)),
    8: (("0 1 -1 W", 8), ("1 0 -W -w", 3), ("1 -W 0 w", 3), ("1 W W 0", 5)),
    9: (("0 1 -w w", 9), ("1 0 -w -w", 8), ("1 -1 0 w", 5), ("1 1 w 0", 6)),
    10: (("0 1 -W 1", 7), ("1 0 -1 -w", 4), ("1 -w 0 w", 7), ("1 w 1 0", 4)),
}

Vector = tuple[Eisenstein, Eisenstein, Eisenstein, Eisenstein]


def parse_vector(text: str) -> Vector:
    return tuple(Eisenstein(*_TOKENS[t]) for t in text.split())  # type: ignore[return-value]


def canonical_phase(vector: Iterable[Eisenstein]) -> Vector:
    """Canonical representative among the six unit multiples of ``vector``.

    The chosen multiple is the one whose first nonzero coordinate has the
    smallest (a, b) pair; the unit group acts freely on nonzero ring
    elements, so the minimum is unique.
    """
    vec = tuple(vector)
    lead = next((x for x in vec if not x.is_zero()), None)
    if lead is None:
        raise ValueError("cannot canonicalise the zero vector")
    best = min(UNITS, key=lambda u: (u * lead).key())
    return tuple(best * x for x in vec)  # type: ignore[return-value]


def scaled_inner(s: Iterable[Eisenstein], t: Iterable[Eisenstein]) -> Eisenstein:
    """Hermitian inner product sum(conj(s_i) * t_i) of sqrt(3)-scaled vectors."""
    acc = ZERO
    for x, y in zip(s, t):
        acc = acc + x.conj() * y
    return acc


def plain_dot(s: Iterable[Eisenstein], t: Iterable[Eisenstein]) -> Eisenstein:
    """Bilinear sum(s_i * t_i), no conjugation (used by the entangled pair)."""
    acc = ZERO
    for x, y in zip(s, t):
        acc = acc + x * y
    return acc


@dataclass(frozen=True)
class ProjectiveState:
    """One configuration state: canonical vector plus both index schemes."""

    vector: Vector
    card: Card
    block: tuple[int, int]  # (column, row)

    @property
    def index(self) -> int:
        return SUITS.index(self.card.suit) * 10 + self.card.rank - 1


@dataclass(frozen=True)
class Basis:
    """An orthogonal tetrad of configuration states.

    ``members`` is ordered: by suit for tetrads with one card per suit
    (rank tetrads included), by ascending rank for mono-suit tetrads.  The
    position of a card inside ``members`` is the outcome index announced by
    the protocols.
    """

    id: int
    tag: str  # "rank-tetrad" | "mixed-suit" | "mono-suit"
    members: tuple[Card, Card, Card, Card]


def _sorted_members(cards: Iterable[Card]) -> tuple[Card, ...]:
    # (suit, rank) ordering covers both rules: one-card-per-suit tetrads sort
    # by suit, mono-suit tetrads by rank.
    return tuple(sorted(cards, key=lambda c: (SUITS.index(c.suit), c.rank)))


def _tag_of(cards: tuple[Card, ...]) -> str:
    nsuits = len({c.suit for c in cards})
    if nsuits == 1:
        return "mono-suit"
    if nsuits == 4:
        if len({c.rank for c in cards}) == 1:
            return "rank-tetrad"
        return "mixed-suit"
    raise ConfigurationError(f"tetrad with {nsuits} suits: {cards}")


class WittingConfiguration:
    """The full 40-state configuration, verified on construction.

    Construction parses both embedded tables, cross-checks them against each
    other and the generative families, builds the orthogonality graph,
    enumerates the 40 orthogonal tetrads and checks every structural count.
    The resulting object is immutable and safe to share between threads.
    """

    def __init__(self) -> None:
        states: list[ProjectiveState] = []
        for si, suit in enumerate(SUITS):
            for rank in RANKS:
                text, row = _CARD_TABLE[rank][si]
                if _BLOCK_TABLE[si][row] != text:
                    raise ConfigurationError(
                        f"card table {suit}{rank} disagrees with block ({si},{row})"
                    )
                vec = parse_vector(text)
                if sum(x.norm_sq() for x in vec) != 3:
                    raise ConfigurationError(f"state {suit}{rank} has norm^2 != 3")
                states.append(
                    ProjectiveState(canonical_phase(vec), Card(suit, rank), (si, row))
                )
        self.states: tuple[ProjectiveState, ...] = tuple(states)
        self._by_card = {s.card: s for s in states}
        self._by_vector = {s.vector: s for s in states}
        if len(self._by_vector) != 40:
            raise ConfigurationError("states are not projectively distinct")
        self._check_families()

        self.adjacency: tuple[frozenset[int], ...] = self._build_graph()
        self.bases: tuple[Basis, ...] = self._enumerate_bases()
        self._bases_by_card: dict[Card, tuple[int, ...]] = {}
        for basis in self.bases:
            for card in basis.members:
                ids = self._bases_by_card.get(card, ())
                self._bases_by_card[card] = ids + (basis.id,)
        if any(len(v) != 4 for v in self._bases_by_card.values()):
            raise ConfigurationError("some state is not in exactly 4 tetrads")
        self._pair_basis: dict[frozenset[Card], int] = {}
        for basis in self.bases:
            for a, b in itertools.combinations(basis.members, 2):
                key = frozenset((a, b))
                if key in self._pair_basis:
                    raise ConfigurationError(f"pair {a},{b} lies in two tetrads")
                self._pair_basis[key] = basis.id
        if len(self._pair_basis) != 240:
            raise ConfigurationError("orthogonal pairs do not cover 240 edges")
        self._check_conjugation()

    # -- construction helpers -------------------------------------------------

    def _check_families(self) -> None:
        """Block columns must reproduce the four generative nine-state families."""
        w_pow = [Eisenstein(1, 0), Eisenstein(0, 1), Eisenstein(-1, -1)]
        patterns = {
            0: lambda m, n: (ZERO, w_pow[0], -w_pow[m], w_pow[n]),
            1: lambda m, n: (w_pow[0], ZERO, -w_pow[m], -w_pow[n]),
            2: lambda m, n: (w_pow[0], -w_pow[m], ZERO, w_pow[n]),
            3: lambda m, n: (w_pow[0], w_pow[m], w_pow[n], ZERO),
        }
        for col in range(4):
            axis = [ZERO] * 4
            axis[col] = Eisenstein(1, 2)
            if parse_vector(_BLOCK_TABLE[col][0]) != tuple(axis):
                raise ConfigurationError(f"block ({col},0) is not the axis state")
            expected = {
                canonical_phase(patterns[col](m, n))
                for m in range(3)
                for n in range(3)
            }
            got = {canonical_phase(parse_vector(_BLOCK_TABLE[col][r])) for r in range(1, 10)}
            if got != expected:
                raise ConfigurationError(f"block column {col} mismatches its family")

    def _build_graph(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(40)]
        for s, t in itertools.combinations(self.states, 2):
            n = scaled_inner(s.vector, t.vector).norm_sq()
            if n not in (0, 3):
                raise ConfigurationError(
                    f"|<{s.card.label}|{t.card.label}>|^2 outside {{0, 3}}: {n}"
                )
            if n == 0:
                adj[s.index].add(t.index)
                adj[t.index].add(s.index)
        degrees = {len(a) for a in adj}
        if degrees != {12}:
            raise ConfigurationError(f"orthogonality graph not 12-regular: {degrees}")
        return tuple(frozenset(a) for a in adj)

    def _enumerate_bases(self) -> tuple[Basis, ...]:
        masks = [sum(1 << j for j in adj) for adj in self.adjacency]
        quads: list[tuple[Card, ...]] = []
        for a in range(40):
            for b in _bits_above(masks[a], a):
                mab = masks[a] & masks[b]
                for c in _bits_above(mab, b):
                    mabc = mab & masks[c]
                    for d in _bits_above(mabc, c):
                        if masks[a] & masks[b] & masks[c] & masks[d]:
                            raise ConfigurationError("5-clique found; not maximal")
                        quads.append(tuple(self.states[i].card for i in (a, b, c, d)))
        if len(quads) != 40:
            raise ConfigurationError(f"expected 40 tetrads, found {len(quads)}")

        tagged = [(_tag_of(_sorted_members(q)), _sorted_members(q)) for q in quads]
        rank_tetrads = sorted(
            (m for t, m in tagged if t == "rank-tetrad"), key=lambda m: m[0].rank
        )
        mixed = sorted(
            (m for t, m in tagged if t == "mixed-suit"),
            key=lambda m: tuple(c.rank for c in m),
        )
        mono = sorted(
            (m for t, m in tagged if t == "mono-suit"),
            key=lambda m: (SUITS.index(m[0].suit), tuple(c.rank for c in m)),
        )
        if (len(rank_tetrads), len(mixed), len(mono)) != (10, 18, 12):
            raise ConfigurationError(
                f"tetrad tags off: {len(rank_tetrads)}/{len(mixed)}/{len(mono)}"
            )
        bases = []
        for members in rank_tetrads:
            bases.append(Basis(len(bases), "rank-tetrad", members))
        for members in mixed:
            bases.append(Basis(len(bases), "mixed-suit", members))
        for members in mono:
            bases.append(Basis(len(bases), "mono-suit", members))
        return tuple(bases)

    def _check_conjugation(self) -> None:
        for state in self.states:
            image = self.conjugate_card(state.card)
            conj_vec = canonical_phase(x.conj() for x in state.vector)
            if conj_vec != self._by_card[image].vector:
                raise ConfigurationError(
                    f"conjugate of {state.card.label} is not {image.label}"
                )

    # -- queries ---------------------------------------------------------------

    def state_of(self, card: Card) -> ProjectiveState:
        return self._by_card[card]

    def state_by_vector(self, vector: Vector) -> ProjectiveState | None:
        return self._by_vector.get(vector)

    def transition_prob(self, s: ProjectiveState | Card, t: ProjectiveState | Card) -> Fraction:
        """Born probability |<s|t>|^2: exactly 0, 1/3, or 1."""
        sv = self._vec(s)
        tv = self._vec(t)
        return Fraction(scaled_inner(sv, tv).norm_sq(), 9)

    def _vec(self, s: ProjectiveState | Card) -> Vector:
        return (s if isinstance(s, ProjectiveState) else self._by_card[s]).vector

    def conjugate_card(self, card: Card) -> Card:
        return Card(card.suit, RANK_CONJUGATION[card.rank])

    def bases_of(self, card: Card) -> tuple[int, ...]:
        return self._bases_by_card[card]

    def common_basis(self, a: Card, b: Card) -> int | None:
        """The tetrad shared by two cards.

        Distinct orthogonal cards lie in exactly one common tetrad; equal
        cards resolve to the lowest of their four tetrad ids (a public
        tie-break both protocol parties can apply without communicating);
        non-orthogonal pairs share none.
        """
        if a == b:
            return min(self._bases_by_card[a])
        return self._pair_basis.get(frozenset((a, b)))

    def expand_vertices(self) -> list[Vector]:
        """All unit multiples of the 40 states: the 240 polytope vertices."""
        seen: dict[tuple[tuple[int, int], ...], Vector] = {}
        for state in self.states:
            for u in UNITS:
                vec = tuple(u * x for x in state.vector)
                seen[tuple(x.key() for x in vec)] = vec  # type: ignore[arg-type]
        if len(seen) != 240:
            raise ConfigurationError(f"vertex expansion produced {len(seen)}")
        return list(seen.values())

    def mub_triads(self, zero_coordinate: int) -> tuple[tuple[Card, ...], ...]:
        """The 12 states with a zero at the given coordinate, as 4 orthogonal triads.

        Restricted to such a slice the configuration is a set of four
        mutually unbiased bases of the 3-dimensional subspace: triads are
        internally orthogonal and cross-triad transition probabilities all
        equal 1/3.
        """
        slice_states = [
            s for s in self.states if s.vector[zero_coordinate].is_zero()
        ]
        if len(slice_states) != 12:
            raise ConfigurationError(
                f"coordinate {zero_coordinate} slice has {len(slice_states)} states"
            )
        cards = [s.card for s in slice_states]
        index = {c: i for i, c in enumerate(cards)}
        neighbours: dict[Card, set[Card]] = {c: set() for c in cards}
        for s, t in itertools.combinations(slice_states, 2):
            if scaled_inner(s.vector, t.vector).is_zero():
                neighbours[s.card].add(t.card)
                neighbours[t.card].add(s.card)
        triads: list[tuple[Card, ...]] = []
        unused = set(cards)
        while unused:
            seed = min(unused, key=lambda c: index[c])
            group = {seed} | neighbours[seed]
            if len(group) != 3 or not group <= unused:
                raise ConfigurationError("slice does not split into triads")
            for x, y in itertools.combinations(group, 2):
                if y not in neighbours[x]:
                    raise ConfigurationError("triad is not mutually orthogonal")
            triads.append(_sorted_members(group))
            unused -= group
        triads.sort(key=lambda t: index[t[0]])
        return tuple(triads)


def _bits_above(mask: int, threshold: int) -> list[int]:
    out = []
    mask >>= threshold + 1
    i = threshold + 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# -- serialisation -------------------------------------------------------------


def states_payload(config: WittingConfiguration) -> list[dict]:
    return [
        {
            "card": s.card.label,
            "block": list(s.block),
            "vector": [[x.a, x.b] for x in s.vector],
        }
        for s in config.states
    ]


def bases_payload(config: WittingConfiguration) -> list[dict]:
    return [
        {"id": b.id, "tag": b.tag, "members": [c.label for c in b.members]}
        for b in config.bases
    ]
