"""Exhaustive refutation of non-contextual card-marking models.

A non-contextual model pre-marks cards so that every one of the 40 tetrads
contains exactly one marked card.  The ten rank tetrads partition the deck,
forcing any candidate model to mark exactly one suit per rank: 4**10 =
1048576 candidates, few enough to score them all.  None is correct on all
40 tetrads; the best reach 34.  A per-tetrad (contextual) mark table, by
contrast, trivially reproduces the quantum statistics, and any such
complete table necessarily marks some card in one of its tetrads but not
in another.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from random import Random

import numpy as np

from .configuration import Card, SUITS, WittingConfiguration

N_MARKINGS = 4**10


@dataclass(frozen=True)
class Marking:
    """One marked suit per rank tetrad: a candidate non-contextual model."""

    choice: tuple[int, ...]  # suit index for ranks 1..10

    def __post_init__(self) -> None:
        if len(self.choice) != 10 or not all(0 <= s < 4 for s in self.choice):
            raise ValueError("marking needs ten suit indices in 0..3")

    def cards(self) -> tuple[Card, ...]:
        return tuple(Card(SUITS[s], r + 1) for r, s in enumerate(self.choice))

    def marks(self, card: Card) -> bool:
        return self.choice[card.rank - 1] == SUITS.index(card.suit)

    @classmethod
    def from_index(cls, index: int) -> "Marking":
        return cls(tuple((index >> (2 * r)) & 3 for r in range(10)))

    @property
    def index(self) -> int:
        return sum(s << (2 * r) for r, s in enumerate(self.choice))


ALL_SPADES = Marking((0,) * 10)

# One of the 720 markings attaining the 34-correct-tetrad maximum:
# S1 S2 H3 H4 H5 C6 D7 D8 D9 C10.
MAX_SCORE_EXAMPLE = Marking((0, 0, 1, 1, 1, 3, 2, 2, 2, 3))


@dataclass(frozen=True)
class MarkingScore:
    """Tetrads classified by how many of their members the marking marks."""

    by_count: tuple[int, int, int, int, int]

    @property
    def correct(self) -> int:
        return self.by_count[1]

    @property
    def unmarked(self) -> int:
        return self.by_count[0]

    @property
    def double_marked(self) -> int:
        return self.by_count[2]

    @property
    def other_multiplicity(self) -> int:
        return self.by_count[3] + self.by_count[4]


def _member_keys(config: WittingConfiguration) -> list[list[tuple[int, int]]]:
    return [
        [(c.rank - 1, SUITS.index(c.suit)) for c in basis.members]
        for basis in config.bases
    ]


def score_marking(config: WittingConfiguration, marking: Marking) -> MarkingScore:
    counts = [0] * 5
    for members in _member_keys(config):
        k = sum(1 for r, s in members if marking.choice[r] == s)
        counts[k] += 1
    return MarkingScore(tuple(counts))  # type: ignore[arg-type]


@dataclass(frozen=True)
class ScanResult:
    """Aggregate statistics over all 4**10 candidate markings."""

    histogram: tuple[int, ...]  # index = number of correct tetrads, 0..40
    max_correct: int
    count_at_max: int
    mean_correct_fraction: Fraction
    frac_above_28: Fraction
    frac_at_max: Fraction
    exists_perfect: bool
    maximizer_indices: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "maxCorrect": self.max_correct,
            "countAtMax": self.count_at_max,
            "mean": float(self.mean_correct_fraction),
            "meanExact": f"{self.mean_correct_fraction.numerator}/{self.mean_correct_fraction.denominator}",
            "fracAbove70pct": float(self.frac_above_28),
            "fracAtMax": float(self.frac_at_max),
            "existsPerfect": self.exists_perfect,
            "histogram": list(self.histogram),
        }


def _scan_chunk(
    member_keys: list[list[tuple[int, int]]], start: int, stop: int
) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(start, stop, dtype=np.int32)
    digits = ((idx[:, None] >> (2 * np.arange(10))) & 3).astype(np.int8)
    correct = np.zeros(stop - start, dtype=np.int8)
    for members in member_keys:
        (r0, s0), *rest = members
        cnt = (digits[:, r0] == s0).astype(np.int8)
        for r, s in rest:
            cnt = cnt + (digits[:, r] == s)
        correct += cnt == 1
    hist = np.bincount(correct, minlength=41)
    return hist, start + np.nonzero(correct == correct.max())[0]


def exhaustive_scan(config: WittingConfiguration, threads: int = 1) -> ScanResult:
    """Score every candidate marking; exact counts, no sampling.

    The scan vectorises over markings (numpy int8 arithmetic on base-4
    digit arrays) and optionally splits the index range across threads;
    partial histograms merge deterministically.
    """
    member_keys = _member_keys(config)
    threads = max(1, threads)
    bounds = [
        (N_MARKINGS * i // threads, N_MARKINGS * (i + 1) // threads)
        for i in range(threads)
    ]
    if threads == 1:
        parts = [_scan_chunk(member_keys, *bounds[0])]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda se: _scan_chunk(member_keys, *se), bounds)
            )
    hist = np.zeros(41, dtype=np.int64)
    for h, _ in parts:
        hist += h
    max_correct = int(np.nonzero(hist)[0].max())
    maximizers: list[int] = []
    for (h, idx), (start, stop) in zip(parts, bounds):
        chunk_max = int(np.nonzero(h)[0].max())
        if chunk_max == max_correct:
            maximizers.extend(int(i) for i in idx)
    count_at_max = int(hist[max_correct])
    if len(maximizers) != count_at_max:
        raise AssertionError("maximizer collection disagrees with histogram")
    total_correct = int((np.arange(41, dtype=np.int64) * hist).sum())
    return ScanResult(
        histogram=tuple(int(h) for h in hist),
        max_correct=max_correct,
        count_at_max=count_at_max,
        mean_correct_fraction=Fraction(total_correct, N_MARKINGS * 40),
        frac_above_28=Fraction(int(hist[29:].sum()), N_MARKINGS),
        frac_at_max=Fraction(count_at_max, N_MARKINGS),
        exists_perfect=bool(hist[40] > 0),
        maximizer_indices=tuple(sorted(maximizers)),
    )


# -- contextual (per-tetrad) models ---------------------------------------------


def build_contextual_deck_model(
    config: WittingConfiguration, seed: int
) -> tuple[int, ...]:
    """Mark one member position in each of the 40 tetrads (seeded, shared).

    Both participants holding the same table always pick the same card for
    any tetrad, reproducing the quantum agreement statistics; the price is
    contextuality, witnessed by :func:`contextuality_witness`.
    """
    rng = Random(seed)
    return tuple(rng.randrange(4) for _ in config.bases)


def contextuality_witness(
    config: WittingConfiguration, table: tuple[int, ...]
) -> tuple[Card, int, int] | None:
    """A (card, marked tetrad, unmarked tetrad) triple exhibited by the table.

    Every complete per-tetrad table has one: were some table witness-free,
    its marks would define a global marking correct on all 40 tetrads,
    which the exhaustive scan rules out.
    """
    marked: dict[Card, list[int]] = {}
    unmarked: dict[Card, list[int]] = {}
    for basis, position in zip(config.bases, table):
        for i, card in enumerate(basis.members):
            (marked if i == position else unmarked).setdefault(card, []).append(
                basis.id
            )
    for card in sorted(marked, key=lambda c: (SUITS.index(c.suit), c.rank)):
        if card in unmarked:
            return (card, marked[card][0], unmarked[card][0])
    return None


def spade_preference_table(config: WittingConfiguration) -> tuple[int, ...]:
    """Per-tetrad table marking each tetrad's spade when it has exactly one."""
    table = []
    for basis in config.bases:
        spades = [i for i, c in enumerate(basis.members) if c.suit == "S"]
        table.append(spades[0] if len(spades) == 1 else 0)
    return tuple(table)


def rank_tetrad_partition_ok(config: WittingConfiguration) -> bool:
    """The ten rank tetrads cover each of the 40 cards exactly once."""
    seen: list[Card] = []
    for basis in config.bases:
        if basis.tag == "rank-tetrad":
            seen.extend(basis.members)
    return sorted(seen) == sorted(
        Card(s, r) for s, r in itertools.product(SUITS, range(1, 11))
    )
