"""Exact Born-rule computations for the two-ququart entangled pair.

The shared state is the maximally entangled pair (|00> + |11> + |22> + |33>)/2.
Rewriting it over any orthonormal basis {x_k} pairs each |x_k> on one side
with the componentwise-conjugated |x_k*> on the other, so when Bob measures
the conjugated copy of Alice's tetrad the outcome indices agree with
certainty.  All probabilities here are exact ``Fraction`` values; vectors
are kept unnormalised over Z[w] with an explicit power-of-sqrt(3) scale so
no irrational number ever appears.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from random import Random

from .eisenstein import Eisenstein, ZERO
from .configuration import (
    Basis,
    Card,
    ProjectiveState,
    Vector,
    WittingConfiguration,
    plain_dot,
    scaled_inner,
)


@dataclass(frozen=True)
class QuquartState:
    """A (possibly unnormalised) 4-vector amps / sqrt(3)**scale over Z[w]."""

    amps: Vector
    scale: int = 0

    @property
    def norm_sq(self) -> Fraction:
        return Fraction(sum(x.norm_sq() for x in self.amps), 3**self.scale)

    def conjugated(self) -> "QuquartState":
        return QuquartState(tuple(x.conj() for x in self.amps), self.scale)

    @classmethod
    def from_state(cls, state: ProjectiveState) -> "QuquartState":
        return cls(state.vector, 1)  # scaled vectors have norm^2 3


@dataclass(frozen=True)
class JointDistribution:
    """Exact 4x4 outcome distribution (Alice outcome x Bob outcome)."""

    p: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        total = sum(x for row in self.p for x in row)
        if total != 1:
            raise ValueError(f"joint distribution sums to {total}, not 1")

    def row_marginals(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.p)

    def col_marginals(self) -> tuple[Fraction, ...]:
        return tuple(sum(col, Fraction(0)) for col in zip(*self.p))

    def mismatch_probability(self) -> Fraction:
        return sum(
            (self.p[a][b] for a in range(4) for b in range(4) if a != b),
            Fraction(0),
        )

    def is_quarter_diagonal(self) -> bool:
        q = Fraction(1, 4)
        return all(
            self.p[a][b] == (q if a == b else 0)
            for a in range(4)
            for b in range(4)
        )

    def flattened(self) -> tuple[Fraction, ...]:
        return tuple(x for row in self.p for x in row)

    def as_strings(self) -> list[list[str]]:
        return [
            [f"{x.numerator}/{x.denominator}" for x in row] for row in self.p
        ]


def basis_vectors(
    config: WittingConfiguration, basis: Basis | int, conjugated: bool = False
) -> tuple[Vector, ...]:
    """Member vectors of a tetrad, in announcement order.

    With ``conjugated`` the componentwise conjugates are returned: the
    states Bob actually measures.  (Each conjugate is again a configuration
    state, with the same suit and the conjugation-partner rank.)
    """
    if isinstance(basis, int):
        basis = config.bases[basis]
    vecs = tuple(config.state_of(c).vector for c in basis.members)
    if conjugated:
        vecs = tuple(tuple(x.conj() for x in v) for v in vecs)
    return vecs


def joint_distribution(
    config: WittingConfiguration,
    alice_basis: Basis | int,
    bob_basis: Basis | int,
    bob_conjugated: bool = True,
) -> JointDistribution:
    """Exact outcome distribution when both sides measure the entangled pair.

    The amplitude for outcomes (a, b) is half the plain (bilinear) dot
    product of the two measured vectors; with Bob conjugate-coordinated to
    Alice's own tetrad this is (1/4) I exactly.
    """
    av = basis_vectors(config, alice_basis)
    bv = basis_vectors(config, bob_basis, conjugated=bob_conjugated)
    rows = []
    for va in av:
        rows.append(
            tuple(Fraction(plain_dot(va, vb).norm_sq(), 36) for vb in bv)
        )
    return JointDistribution(tuple(rows))


def intercept_resend_distribution(
    config: WittingConfiguration,
    alice_basis: Basis | int,
    bob_basis: Basis | int,
    eve_basis: Basis | int,
) -> JointDistribution:
    """Outcome distribution with an intercept-resend attacker on Bob's channel.

    Eve measures Bob's particle in her own conjugate-coordinated tetrad and
    forwards the eigenstate she observed; Bob then measures the resent state
    in his conjugate-coordinated tetrad.
    """
    av = basis_vectors(config, alice_basis)
    bv = basis_vectors(config, bob_basis, conjugated=True)
    ev = basis_vectors(config, eve_basis, conjugated=True)
    # P1[a][e]: Alice x Eve on the pair;  P2[e][b]: Bob on the resent state.
    p1 = [[plain_dot(va, ve).norm_sq() for ve in ev] for va in av]
    p2 = [[scaled_inner(vb, ve).norm_sq() for vb in bv] for ve in ev]
    rows = []
    for a in range(4):
        rows.append(
            tuple(
                Fraction(sum(p1[a][e] * p2[e][b] for e in range(4)), 36 * 9)
                for b in range(4)
            )
        )
    return JointDistribution(tuple(rows))


# -- delayed queries and two-step measurement ----------------------------------


@dataclass(frozen=True)
class DelayedQueryResult:
    """Outcome of asking "is the system in this state?" without destroying it.

    Post-measurement branch states are unnormalised; their exact squared
    norms are available on the states themselves.  A branch of probability
    zero carries no post-state.
    """

    p_yes: Fraction
    post_yes: QuquartState | None
    post_no: QuquartState | None

    @property
    def p_no(self) -> Fraction:
        return 1 - self.p_yes


def delayed_query(state: QuquartState, probe: ProjectiveState) -> DelayedQueryResult:
    """Apply the query projector for a configuration state to ``state``."""
    v = probe.vector
    c = scaled_inner(v, state.amps)  # sqrt(3)^(scale+1) times <probe|state>
    norm = state.norm_sq
    if norm == 0:
        raise ValueError("cannot query the zero state")
    p_yes = Fraction(c.norm_sq(), 3 ** (state.scale + 1)) / norm
    post_yes = post_no = None
    if p_yes != 0:
        post_yes = QuquartState(tuple(c * x for x in v), state.scale + 2)
    if p_yes != 1:
        post_no = QuquartState(
            tuple(x * 3 - c * y for x, y in zip(state.amps, v)),
            state.scale + 2,
        )
    return DelayedQueryResult(p_yes, post_yes, post_no)


def one_step_distribution(
    config: WittingConfiguration, basis: Basis | int, state: QuquartState
) -> tuple[Fraction, ...]:
    """Born distribution of a direct tetrad measurement on ``state``."""
    norm = state.norm_sq
    out = []
    for v in basis_vectors(config, basis):
        c = scaled_inner(v, state.amps)
        out.append(Fraction(c.norm_sq(), 3 ** (state.scale + 1)) / norm)
    return tuple(out)


@dataclass(frozen=True)
class TwoStepBreakdown:
    """Branch probabilities of query-then-measure, and their recomposition."""

    probe_position: int
    p_yes: Fraction
    dist_yes: tuple[Fraction, ...] | None
    dist_no: tuple[Fraction, ...] | None

    def composed(self) -> tuple[Fraction, ...]:
        total = [Fraction(0)] * 4
        if self.dist_yes is not None:
            for k in range(4):
                total[k] += self.p_yes * self.dist_yes[k]
        if self.dist_no is not None:
            for k in range(4):
                total[k] += (1 - self.p_yes) * self.dist_no[k]
        return tuple(total)


def two_step_distribution(
    config: WittingConfiguration,
    probe: Card,
    basis: Basis | int,
    state: QuquartState,
) -> TwoStepBreakdown:
    """Query a state first, then finish the measurement in a tetrad holding it.

    Because the query projector is one of the tetrad's own projectors, the
    composition reproduces the direct measurement distribution exactly.
    """
    b = config.bases[basis] if isinstance(basis, int) else basis
    if probe not in b.members:
        raise ValueError(f"{probe.label} is not a member of tetrad {b.id}")
    position = b.members.index(probe)
    q = delayed_query(state, config.state_of(probe))
    dist_yes = None
    if q.post_yes is not None:
        dist_yes = tuple(
            Fraction(1) if k == position else Fraction(0) for k in range(4)
        )
    dist_no = (
        one_step_distribution(config, b, q.post_no)
        if q.post_no is not None
        else None
    )
    return TwoStepBreakdown(position, q.p_yes, dist_yes, dist_no)


# -- the entangled pair under two-step measurement -----------------------------


@dataclass(frozen=True)
class JointState:
    """Unnormalised two-ququart state sum_jk amps[j][k] |j>|k> / sqrt(3)**scale."""

    amps: tuple[Vector, ...]
    scale: int = 0

    @classmethod
    def entangled_pair(cls) -> "JointState":
        one = Eisenstein(1, 0)
        rows = tuple(
            tuple(one if j == k else ZERO for k in range(4)) for j in range(4)
        )
        return cls(rows, 0)

    @property
    def norm_sq(self) -> Fraction:
        return Fraction(
            sum(x.norm_sq() for row in self.amps for x in row), 3**self.scale
        )

    def _project(self, v: Vector, side: str, complement: bool) -> "JointState":
        # Projector v v^dag / 3 applied to one side; complement is 1 - that.
        new = [[ZERO] * 4 for _ in range(4)]
        if side == "alice":
            coef = [scaled_inner(v, col) for col in zip(*self.amps)]
            for j in range(4):
                for k in range(4):
                    new[j][k] = v[j] * coef[k]
        else:
            coef = [scaled_inner(v, row) for row in self.amps]
            for j in range(4):
                for k in range(4):
                    new[j][k] = coef[j] * v[k]
        if complement:
            for j in range(4):
                for k in range(4):
                    new[j][k] = self.amps[j][k] * 3 - new[j][k]
        return JointState(tuple(tuple(row) for row in new), self.scale + 2)

    def query_alice(self, probe: Vector) -> tuple["JointState", "JointState"]:
        return self._project(probe, "alice", False), self._project(probe, "alice", True)

    def query_bob(self, probe: Vector) -> tuple["JointState", "JointState"]:
        return self._project(probe, "bob", False), self._project(probe, "bob", True)

    def measurement_distribution(
        self, alice_vectors: tuple[Vector, ...], bob_vectors: tuple[Vector, ...]
    ) -> JointDistribution:
        """Exact conditional joint distribution in the given product tetrads."""
        norm = self.norm_sq
        if norm == 0:
            raise ValueError("cannot measure a zero branch")
        rows = []
        for va in alice_vectors:
            row = []
            for vb in bob_vectors:
                amp = ZERO
                for j in range(4):
                    cj = va[j].conj()
                    if cj.is_zero():
                        continue
                    for k in range(4):
                        x = self.amps[j][k]
                        if not x.is_zero():
                            amp = amp + cj * vb[k].conj() * x
                row.append(
                    Fraction(amp.norm_sq(), 3 ** (self.scale + 2)) / norm
                )
            rows.append(tuple(row))
        return JointDistribution(tuple(rows))


@dataclass(frozen=True)
class TwoStepBranch:
    label: str  # "yy", "yn", "ny", "nn"
    probability: Fraction
    conditional: JointDistribution | None  # None only for zero-probability branches


def two_step_joint_branches(
    config: WittingConfiguration,
    alice_probe: Card,
    alice_basis: Basis | int,
    bob_probe: Card,
    bob_basis: Basis | int,
) -> tuple[TwoStepBranch, ...]:
    """Exact branch structure of both parties measuring the pair in two steps.

    Alice queries her probe then completes her tetrad; Bob does the same
    with conjugated states.  The four (yes/no x yes/no) branches recompose
    exactly to the one-step joint distribution, whatever the probes are.
    """
    ab = config.bases[alice_basis] if isinstance(alice_basis, int) else alice_basis
    bb = config.bases[bob_basis] if isinstance(bob_basis, int) else bob_basis
    if alice_probe not in ab.members:
        raise ValueError(f"{alice_probe.label} not in tetrad {ab.id}")
    if bob_probe not in bb.members:
        raise ValueError(f"{bob_probe.label} not in tetrad {bb.id}")
    av = basis_vectors(config, ab)
    bv = basis_vectors(config, bb, conjugated=True)
    pa = config.state_of(alice_probe).vector
    pb = tuple(x.conj() for x in config.state_of(bob_probe).vector)

    start = JointState.entangled_pair()
    total = start.norm_sq
    a_yes, a_no = start.query_alice(pa)
    branches = []
    for alice_branch, a_state in (("y", a_yes), ("n", a_no)):
        b_yes, b_no = a_state.query_bob(pb)
        for bob_branch, state in (("y", b_yes), ("n", b_no)):
            prob = state.norm_sq / total
            cond = (
                state.measurement_distribution(av, bv) if prob != 0 else None
            )
            branches.append(TwoStepBranch(alice_branch + bob_branch, prob, cond))
    if sum(b.probability for b in branches) != 1:
        raise AssertionError("branch probabilities do not sum to 1")
    return tuple(branches)


def compose_branches(branches: tuple[TwoStepBranch, ...]) -> JointDistribution:
    rows = [[Fraction(0)] * 4 for _ in range(4)]
    for branch in branches:
        if branch.conditional is None:
            continue
        for a in range(4):
            for b in range(4):
                rows[a][b] += branch.probability * branch.conditional.p[a][b]
    return JointDistribution(tuple(tuple(row) for row in rows))


# -- exact sampling -------------------------------------------------------------


class CumulativeSampler:
    """Draws an index with exact rational probabilities via one randrange call."""

    def __init__(self, probs: tuple[Fraction, ...]):
        den = lcm(*(p.denominator for p in probs))
        acc = 0
        self.cuts: list[int] = []
        for p in probs:
            acc += p.numerator * (den // p.denominator)
            self.cuts.append(acc)
        if acc != den:
            raise ValueError("probabilities do not sum to 1")
        self.den = den

    def sample(self, rng: Random) -> int:
        r = rng.randrange(self.den)
        for i, cut in enumerate(self.cuts):
            if r < cut:
                return i
        raise AssertionError("unreachable")


class TwoStepSampler:
    """Samples (alice, bob) outcomes through the genuine branch structure."""

    def __init__(self, branches: tuple[TwoStepBranch, ...]):
        self.branches = branches
        self.branch_sampler = CumulativeSampler(
            tuple(b.probability for b in branches)
        )
        self.outcome_samplers = [
            CumulativeSampler(b.conditional.flattened())
            if b.conditional is not None
            else None
            for b in branches
        ]

    def sample(self, rng: Random) -> tuple[int, int]:
        i = self.branch_sampler.sample(rng)
        sampler = self.outcome_samplers[i]
        assert sampler is not None  # zero-probability branches are never drawn
        flat = sampler.sample(rng)
        return divmod(flat, 4)


def two_step_measure_pair(
    rng: Random,
    config: WittingConfiguration,
    alice_probe: Card,
    alice_basis: Basis | int,
    bob_probe: Card,
    bob_basis: Basis | int,
) -> tuple[int, int]:
    """One sampled round of the two-step joint measurement."""
    sampler = TwoStepSampler(
        two_step_joint_branches(
            config, alice_probe, alice_basis, bob_probe, bob_basis
        )
    )
    return sampler.sample(rng)


# -- the query gate on qubits ----------------------------------------------------


def toffoli_report() -> dict:
    """Check the query gate at probe |3>: on two qubits plus ancilla it is Toffoli.

    The gate flips the ancilla exactly on the probe's component; for probe
    |3> = |11> that is the permutation swapping |110> and |111>, i.e. the
    Toffoli gate.  Returns a small report of exact matrix identities.
    """

    def query_gate(probe_index: int) -> list[list[int]]:
        # basis order |ququart j, ancilla a> -> index 2j + a
        gate = [[0] * 8 for _ in range(8)]
        for j in range(4):
            for anc in (0, 1):
                source = 2 * j + anc
                target = 2 * j + (anc ^ 1 if j == probe_index else anc)
                gate[target][source] = 1
        return gate

    t3 = query_gate(3)
    # Toffoli on qubits (q1, q0, ancilla) with j = 2*q1 + q0: flips the
    # ancilla exactly when q1 = q0 = 1, i.e. swaps indices 6 and 7.
    toffoli = [[1 if i == j else 0 for j in range(8)] for i in range(8)]
    toffoli[6][6] = toffoli[7][7] = 0
    toffoli[6][7] = toffoli[7][6] = 1
    square = [
        [sum(t3[i][k] * t3[k][j] for k in range(8)) for j in range(8)]
        for i in range(8)
    ]
    identity = [[1 if i == j else 0 for j in range(8)] for i in range(8)]
    return {
        "is_toffoli": t3 == toffoli,
        "involutive": square == identity,
        "probe0_differs": query_gate(0) != toffoli,
    }
