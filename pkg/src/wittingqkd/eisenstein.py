"""Exact arithmetic over the Eisenstein integers Z[w], w = exp(2*pi*i/3).

Once state vectors are scaled by sqrt(3), every amplitude appearing in the
40-state configuration is an Eisenstein integer, so the whole package can
compute with pairs of Python ints instead of floats.  Exact probabilities
are plain ``fractions.Fraction`` values built from the integer norms
produced here.
"""

from __future__ import annotations

from dataclasses import dataclass

# Everything in this package stays tiny; a breach means a reduction step was
# skipped upstream, so fail loudly instead of letting values grow.
MAGNITUDE_BOUND = 1 << 20


@dataclass(frozen=True, slots=True)
class Eisenstein:
    """The element a + b*w of Z[w]; w satisfies w**2 = -1 - w."""

    a: int
    b: int = 0

    def __post_init__(self) -> None:
        if abs(self.a) > MAGNITUDE_BOUND or abs(self.b) > MAGNITUDE_BOUND:
            raise OverflowError(
                f"Eisenstein component exceeds 2**20: ({self.a}, {self.b})"
            )

    def __add__(self, other: "Eisenstein") -> "Eisenstein":
        return Eisenstein(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Eisenstein") -> "Eisenstein":
        return Eisenstein(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "Eisenstein":
        return Eisenstein(-self.a, -self.b)

    def __mul__(self, other: "Eisenstein | int") -> "Eisenstein":
        if isinstance(other, int):
            return Eisenstein(self.a * other, self.b * other)
        # (a + b w)(c + d w) = ac - bd + (ad + bc - bd) w, using w^2 = -1 - w.
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        return Eisenstein(a * c - bd, a * d + b * c - bd)

    __rmul__ = __mul__

    def conj(self) -> "Eisenstein":
        """Complex conjugate: conj(w) = w**2, so a + b*w -> (a - b) - b*w."""
        return Eisenstein(self.a - self.b, -self.b)

    def norm_sq(self) -> int:
        """x * conj(x) = a**2 - a*b + b**2; zero only for x = 0."""
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def key(self) -> tuple[int, int]:
        """Lexicographic sort key; fixes the canonical-phase convention."""
        return (self.a, self.b)

    def to_complex(self) -> complex:
        return complex(self.a - 0.5 * self.b, 0.8660254037844386 * self.b)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        wpart = "w" if abs(self.b) == 1 else f"{abs(self.b)}w"
        sign = "-" if self.b < 0 else ("+" if self.a != 0 else "")
        if self.a == 0:
            return f"{sign}{wpart}"
        return f"{self.a}{sign}{wpart}"


ZERO = Eisenstein(0, 0)
ONE = Eisenstein(1, 0)
OMEGA = Eisenstein(0, 1)
OMEGA2 = Eisenstein(-1, -1)
# i*sqrt(3) = 1 + 2w; the in-ring stand-in for the sqrt(3) scale of axis states.
I_SQRT3 = Eisenstein(1, 2)

# The six elements of norm 1, in the fixed public order (1, -1, w, -w, w^2, -w^2).
# Canonicalisation and serialisation depend on this order; do not reorder.
UNITS = (ONE, -ONE, OMEGA, -OMEGA, OMEGA2, -OMEGA2)


def units() -> tuple[Eisenstein, ...]:
    """The unit group of Z[w] in its documented order."""
    return UNITS
