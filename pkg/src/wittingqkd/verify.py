"""Invariant suite behind the ``verify`` subcommand.

Each check recomputes one family of structural claims from scratch and
returns a short human-readable detail string; any exception or failed
predicate marks the check failed.  ``quick=True`` skips the two expensive
checks (group closure and the exhaustive marking scan).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .configuration import Card, SUITS, WittingConfiguration, canonical_phase, scaled_inner
from .eisenstein import Eisenstein, UNITS
from .marking import (
    ALL_SPADES,
    MAX_SCORE_EXAMPLE,
    exhaustive_scan,
    rank_tetrad_partition_ok,
    score_marking,
)
from .measurement import (
    QuquartState,
    compose_branches,
    joint_distribution,
    one_step_distribution,
    toffoli_report,
    two_step_distribution,
    two_step_joint_branches,
)
from .protocol import announcement_leakage_free
from .symmetry import generate_group, generators, orbit_of_first_basis_state


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_counts(config: WittingConfiguration) -> str:
    assert len(config.states) == 40
    assert len(config.expand_vertices()) == 240
    degrees = {len(a) for a in config.adjacency}
    assert degrees == {12}, degrees
    edges = sum(len(a) for a in config.adjacency) // 2
    assert edges == 240, edges
    assert len(config.bases) == 40
    per_state = {len(config.bases_of(s.card)) for s in config.states}
    assert per_state == {4}, per_state
    return "40 states, 240 vertices, 12-regular graph, 40 tetrads, 4 per state"


def _check_spectrum(config: WittingConfiguration) -> str:
    third = Fraction(1, 3)
    for s, t in itertools.combinations(config.states, 2):
        assert config.transition_prob(s, t) in (0, third)
    for s in config.states:
        assert config.transition_prob(s, s) == 1
    return "all 780 off-diagonal pairs in {0, 1/3}; diagonal exactly 1"


def _check_basis_structure(config: WittingConfiguration) -> str:
    tags = {"rank-tetrad": 0, "mixed-suit": 0, "mono-suit": 0}
    for basis in config.bases:
        tags[basis.tag] += 1
    assert tags == {"rank-tetrad": 10, "mixed-suit": 18, "mono-suit": 12}, tags
    assert rank_tetrad_partition_ok(config)
    return "10 rank tetrads + 18 other one-per-suit (28 total) + 12 mono-suit"


def _check_mub_slices(config: WittingConfiguration) -> str:
    third = Fraction(1, 3)
    for k in range(4):
        triads = config.mub_triads(k)
        assert len(triads) == 4
        for t1, t2 in itertools.combinations(triads, 2):
            for a in t1:
                for b in t2:
                    assert config.transition_prob(a, b) == third
    return "each coordinate slice splits into 4 triads, cross-probability 1/3"


def _check_conjugate_coordination(config: WittingConfiguration) -> str:
    for basis in config.bases:
        assert joint_distribution(config, basis.id, basis.id).is_quarter_diagonal()
    return "joint distribution is (1/4)I for all 40 conjugate-coordinated tetrads"


def _check_column_shifts(config: WittingConfiguration) -> str:
    """Every block column maps onto every other by a monomial map: a cyclic
    coordinate shift composed with per-coordinate unit phases."""
    columns: dict[int, set] = {c: set() for c in range(4)}
    for state in config.states:
        columns[state.block[0]].add(state.vector)

    def shifted(vec, k):
        return tuple(vec[(i - k) % 4] for i in range(4))

    for c1, c2 in itertools.permutations(range(4), 2):
        found = False
        for k in range(1, 4):
            if found:
                break
            for phases in itertools.product(range(6), repeat=3):
                units = (Eisenstein(1, 0),) + tuple(UNITS[p] for p in phases)
                image = {
                    canonical_phase(
                        tuple(u * x for u, x in zip(units, shifted(v, k)))
                    )
                    for v in columns[c1]
                }
                if image == columns[c2]:
                    found = True
                    break
        assert found, f"no monomial shift maps column {c1} to column {c2}"
    return "block columns related by shift + per-coordinate unit phases"


def _check_pair_bases(config: WittingConfiguration) -> str:
    count = 0
    for s, t in itertools.combinations(config.states, 2):
        if scaled_inner(s.vector, t.vector).is_zero():
            assert config.common_basis(s.card, t.card) is not None
            count += 1
    assert count == 240
    agree = sum(
        1
        for s in config.states
        for t in config.states
        if config.common_basis(s.card, t.card) is not None
    )
    assert Fraction(agree, 1600) == Fraction(13, 40), agree
    return "each orthogonal pair in exactly 1 tetrad; common-tetrad rate 13/40"


def _check_deferred_measurement(config: WittingConfiguration) -> str:
    checked = 0
    for state in config.states:
        for basis_id in config.bases_of(state.card):
            for probe_input in (QuquartState.from_state(config.states[0]),
                                QuquartState.from_state(config.states[17])):
                breakdown = two_step_distribution(
                    config, state.card, basis_id, probe_input
                )
                direct = one_step_distribution(config, basis_id, probe_input)
                assert breakdown.composed() == direct
            checked += 1
    assert checked == 160
    return "two-step branches recompose to one-step exactly for all 160 pairs"


def _check_joint_two_step(config: WittingConfiguration) -> str:
    basis = config.bases[2]
    for pa in basis.members:
        for pb in basis.members:
            branches = two_step_joint_branches(config, pa, basis.id, pb, basis.id)
            assert compose_branches(branches).is_quarter_diagonal()
    return "joint two-step branches compose to (1/4)I on a shared tetrad"


def _check_toffoli(config: WittingConfiguration) -> str:
    report = toffoli_report()
    assert report["is_toffoli"] and report["involutive"] and report["probe0_differs"]
    return "query gate at probe |3> is exactly the Toffoli permutation"


def _check_leakage(config: WittingConfiguration) -> str:
    assert announcement_leakage_free(config)
    return "announcement transcripts leave outcomes exactly uniform"


def _check_group(config: WittingConfiguration) -> str:
    table = generate_group(config)
    assert table.raw_order == 51840, table.raw_order
    assert table.order_mod_pm1 == 25920
    assert table.projective_order == 25920
    orbit = orbit_of_first_basis_state(config, generators(config))
    assert len(orbit) == 40
    return "closure 51840; mod {+-1} and mod units both 25920; orbit 40"


def _check_scan(config: WittingConfiguration) -> str:
    result = exhaustive_scan(config)
    assert not result.exists_perfect
    assert result.max_correct == 34
    assert result.count_at_max == 720
    assert Fraction(56, 100) < result.mean_correct_fraction < Fraction(58, 100)
    assert result.frac_above_28 < Fraction(4, 100)
    assert result.frac_at_max < Fraction(7, 10000)
    assert score_marking(config, ALL_SPADES).correct == 28
    example = score_marking(config, MAX_SCORE_EXAMPLE)
    assert (example.correct, example.double_marked, example.unmarked) == (34, 3, 3)
    return "no perfect marking; max 34 (720 markings); mean ~57%; >28 under 4%"


CHECKS: tuple[tuple[str, Callable[[WittingConfiguration], str], bool], ...] = (
    ("configuration-counts", _check_counts, False),
    ("transition-spectrum", _check_spectrum, False),
    ("basis-structure", _check_basis_structure, False),
    ("mub-embedding", _check_mub_slices, False),
    ("conjugate-coordination", _check_conjugate_coordination, False),
    ("column-shifts", _check_column_shifts, False),
    ("pair-bases", _check_pair_bases, False),
    ("deferred-measurement", _check_deferred_measurement, False),
    ("joint-two-step", _check_joint_two_step, False),
    ("toffoli-gate", _check_toffoli, False),
    ("announcement-leakage", _check_leakage, False),
    ("symmetry-group", _check_group, True),
    ("classical-scan", _check_scan, True),
)


def run_checks(quick: bool = False) -> list[CheckResult]:
    config = WittingConfiguration()
    results = []
    for name, fn, slow in CHECKS:
        if quick and slow:
            continue
        try:
            detail = fn(config)
            results.append(CheckResult(name, True, detail))
        except Exception as exc:  # noqa: BLE001 - report, don't crash the suite
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results
