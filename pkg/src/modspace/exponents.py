"""Exact index calculus for mixed Lebesgue exponents.

Everything in this module is arithmetic on the reciprocals ``u = 1/p`` and
``v = 1/q`` of an exponent pair ``(p, q)`` with ``1 <= p, q <= inf``.  The unit
square ``(u, v) in [0,1]^2`` splits into six (overlapping) closed regions

    I1  : max(u, 1-u) <= v          I1* : min(u, 1-u) >= v
    I2  : max(v, 1/2) <= 1-u        I2* : min(v, 1/2) >= 1-u
    I3  : max(v, 1/2) <= u          I3* : min(v, 1/2) >= u

and the two index functions

    nu1 = max(0, v - min(u, 1-u)),      nu2 = min(0, v - max(u, 1-u)),
    mu1 = nu1 - u,                      mu2 = nu2 - u.

``mu1`` (resp. ``mu2``) is, per dimension, the sharp growth exponent of the
modulation norm of ``f(lambda .)`` as ``lambda -> inf`` (resp. ``lambda -> 0``),
and ``nu1 >= 0 >= nu2`` are the sharp Besov embedding thresholds.  On the
starred/unstarred regions the max/min expressions collapse to the piecewise
table

    nu1 = 0 on I1*,   1/p + 1/q - 1 on I2*,   -1/p + 1/q on I3*,
    nu2 = 0 on I1,    1/p + 1/q - 1 on I2,    -1/p + 1/q on I3,

which the closed forms above reproduce on every overlap.  All values are exact
`fractions.Fraction` instances whenever the inputs are rational (``p = inf``
is exact: its reciprocal is 0); irrational float inputs degrade to float
arithmetic with a 1e-12 comparison tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "ExponentPair",
    "RegionSet",
    "IndexValues",
    "conjugate_exponent",
    "nu_indices",
    "mu_indices",
    "index_values",
    "classify_region",
    "sharp_dilation_exponent",
    "embedding_thresholds",
    "REGION_NAMES",
]

ExponentLike = Union[int, float, str, Fraction]
Scalar = Union[Fraction, float]

#: Comparison tolerance used only when a reciprocal is an irrational float.
FLOAT_TOL = 1e-12

REGION_NAMES = ("I1", "I1*", "I2", "I2*", "I3", "I3*")


def _reciprocal(p: ExponentLike, name: str) -> Scalar:
    """Reciprocal of an exponent in [1, inf], exact where possible."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return Fraction(0)
        p = Fraction(s)
    if isinstance(p, float):
        if math.isinf(p) and p > 0:
            return Fraction(0)
        if math.isnan(p):
            raise ValueError(f"{name} must be a number in [1, inf], got nan")
        if p.is_integer():
            p = int(p)
    if isinstance(p, (int, Fraction)):
        if p < 1:
            raise ValueError(f"{name} must satisfy {name} >= 1, got {p}")
        return Fraction(1, 1) / Fraction(p)
    # Irrational float exponent: keep float reciprocal, tolerance applies.
    if p < 1.0 - FLOAT_TOL:
        raise ValueError(f"{name} must satisfy {name} >= 1, got {p}")
    return 1.0 / p


def _as_exponent(u: Scalar) -> Scalar:
    """Inverse of :func:`_reciprocal`: reciprocal -> exponent, 0 -> inf."""
    if u == 0:
        return math.inf
    if isinstance(u, Fraction):
        return Fraction(1, 1) / u
    return 1.0 / u


@dataclass(frozen=True)
class ExponentPair:
    """A pair of Lebesgue exponents stored through exact reciprocals.

    ``u = 1/p`` and ``v = 1/q`` live in [0, 1]; ``u == 0`` encodes ``p = inf``.
    Construct with :meth:`from_pq`, which accepts ints, `Fraction`s, strings
    like ``"4/3"`` or ``"inf"``, and floats (integral floats are treated as
    exact).
    """

    u: Scalar
    v: Scalar

    @staticmethod
    def from_pq(p: ExponentLike, q: ExponentLike) -> "ExponentPair":
        return ExponentPair(_reciprocal(p, "p"), _reciprocal(q, "q"))

    @property
    def p(self) -> Scalar:
        return _as_exponent(self.u)

    @property
    def q(self) -> Scalar:
        return _as_exponent(self.v)

    @property
    def exact(self) -> bool:
        return isinstance(self.u, Fraction) and isinstance(self.v, Fraction)

    def conjugate(self) -> "ExponentPair":
        """The dual pair (p', q') with 1/p + 1/p' = 1/q + 1/q' = 1."""
        return ExponentPair(1 - self.u, 1 - self.v)

    def __str__(self) -> str:
        return f"({_fmt_exponent(self.p)}, {_fmt_exponent(self.q)})"


def _fmt_exponent(p: Scalar) -> str:
    if isinstance(p, float) and math.isinf(p):
        return "inf"
    return str(p)


@dataclass(frozen=True)
class RegionSet:
    """Membership flags for the six closed regions of the unit square.

    Boundary points belong to every region whose inequalities they satisfy,
    so several flags are typically set at once; (1/2, 1/2) lies in all six.
    """

    i1: bool
    i1_star: bool
    i2: bool
    i2_star: bool
    i3: bool
    i3_star: bool

    def labels(self) -> tuple[str, ...]:
        flags = (self.i1, self.i1_star, self.i2, self.i2_star, self.i3, self.i3_star)
        return tuple(name for name, flag in zip(REGION_NAMES, flags) if flag)

    def __contains__(self, name: str) -> bool:
        return name in self.labels()


@dataclass(frozen=True)
class IndexValues:
    """The four dilation/embedding indices of an exponent pair.

    Satisfies ``nu2 <= 0 <= nu1`` and ``mu_i = nu_i - 1/p`` exactly.
    """

    nu1: Scalar
    nu2: Scalar
    mu1: Scalar
    mu2: Scalar


def conjugate_exponent(p: ExponentLike) -> Scalar:
    """Hoelder conjugate p' with 1/p + 1/p' = 1; exact for rational p.

    ``1 <-> inf`` and ``2 -> 2``; raises ValueError for p < 1.
    """
    return _as_exponent(1 - _reciprocal(p, "p"))


def nu_indices(pq: ExponentPair) -> tuple[Scalar, Scalar]:
    """(nu1, nu2) = (max(0, v - min(u, 1-u)), min(0, v - max(u, 1-u)))."""
    u, v = pq.u, pq.v
    nu1 = max(0 * u, v - min(u, 1 - u))
    nu2 = min(0 * u, v - max(u, 1 - u))
    return nu1, nu2


def mu_indices(pq: ExponentPair) -> tuple[Scalar, Scalar]:
    """(mu1, mu2) = (nu1 - 1/p, nu2 - 1/p)."""
    nu1, nu2 = nu_indices(pq)
    return nu1 - pq.u, nu2 - pq.u


def index_values(pq: ExponentPair) -> IndexValues:
    """All four indices of a pair, exact on rational input."""
    nu1, nu2 = nu_indices(pq)
    return IndexValues(nu1=nu1, nu2=nu2, mu1=nu1 - pq.u, mu2=nu2 - pq.u)


def _leq(a: Scalar, b: Scalar) -> bool:
    # Exact comparison for Fractions; tolerance when a float slipped in.
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a <= b
    return float(a) <= float(b) + FLOAT_TOL


def classify_region(pq: ExponentPair) -> RegionSet:
    """All regions containing (1/p, 1/q), boundaries included."""
    u, v = pq.u, pq.v
    half = Fraction(1, 2)
    return RegionSet(
        i1=_leq(max(u, 1 - u), v),
        i1_star=_leq(v, min(u, 1 - u)),
        i2=_leq(max(v, half), 1 - u),
        i2_star=_leq(1 - u, min(v, half)),
        i3=_leq(max(v, half), u),
        i3_star=_leq(u, min(v, half)),
    )


def sharp_dilation_exponent(pq: ExponentPair, regime: str) -> Scalar:
    """Per-dimension sharp dilation exponent: mu1 for ``"expand"`` (the
    lambda -> inf regime), mu2 for ``"shrink"`` (lambda -> 0).

    The norm of ``f(lambda .)`` in M^{p,q}(R^n) scales at worst like
    ``lambda ** (n * exponent)``, and the rate is attained.
    """
    values = index_values(pq)
    if regime == "expand":
        return values.mu1
    if regime == "shrink":
        return values.mu2
    raise ValueError(f"regime must be 'expand' or 'shrink', got {regime!r}")


def embedding_thresholds(pq: ExponentPair) -> tuple[Scalar, Scalar]:
    """(nu1, nu2): per-dimension Besov smoothness thresholds such that
    B^{p,q}_{n*nu1} embeds into M^{p,q} embeds into B^{p,q}_{n*nu2},
    both sharply."""
    return nu_indices(pq)
