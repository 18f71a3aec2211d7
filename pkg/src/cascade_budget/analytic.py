"""Cascade probabilities: the irrational-constant series, the rational closed
form, the correct-cascade probability and the rational-gap census.

All series are written as ``sum_i u**i * v**k_i`` with
``(u, v) = (1-p1, p1)`` for truth G and ``(u, v) = (p2, 1-p2)`` for truth B,
so that a single kernel serves both conditionals.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

from . import _backend
from .core import (
    CascadeConstant,
    SignalQualities,
    TruthState,
    best_convergent,
    cascade_constant,
    validate_qualities,
)
from .errors import (
    CascadeError,
    ConstantMismatch,
    NearIntegerAmbiguity,
    NoSolution,
    NotRational,
    ToleranceUnreachable,
)

DEFAULT_TOL = 1e-12
MAX_TERMS = 10**7
SYMMETRIC_TOL = 1e-12
FRACTION_MATCH_TOL = 1e-9
BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200
P2_CEILING = 1.0 - 1e-12


class Mode(enum.Enum):
    AUTO = "auto"
    IRRATIONAL = "irrational"
    RATIONAL = "rational"


class Formula(enum.Enum):
    IRRATIONAL_SERIES = "irrational_series"
    RATIONAL_CLOSED_FORM = "rational_closed_form"


class SeriesValue(NamedTuple):
    value: float
    truncation_index: int
    tail_bound: float


@dataclass(frozen=True)
class CascadeProbabilities:
    ycas_g: float
    ycas_b: float
    ncas_b: float
    pcc: float
    mode: Formula
    a: float
    truncation_index: int | None = None
    tail_bound: float | None = None
    r: int | None = None
    q: int | None = None
    swapped: bool = False

    def as_dict(self) -> dict:
        return {
            "ycas_g": self.ycas_g,
            "ycas_b": self.ycas_b,
            "ncas_b": self.ncas_b,
            "pcc": self.pcc,
            "mode": self.mode.value,
            "a": self.a,
            "truncation_index": self.truncation_index,
            "tail_bound": self.tail_bound,
            "r": self.r,
            "q": self.q,
            "swapped": self.swapped,
        }


def _uv(q: SignalQualities, truth: TruthState) -> tuple[float, float]:
    if truth is TruthState.G:
        return 1.0 - q.p1, q.p1
    return q.p2, 1.0 - q.p2


def _require_canonical(q: SignalQualities) -> None:
    if not q.canonical:
        raise CascadeError(f"expected p1 <= p2, got p1={q.p1!r}, p2={q.p2!r}")


def ycas_irrational(
    q: SignalQualities,
    truth: TruthState,
    tol: float = DEFAULT_TOL,
    cc: CascadeConstant | None = None,
) -> SeriesValue:
    """Yes-cascade probability from the series valid for irrational ``a``.

    Summation stops at the first index whose geometric tail bound is below
    ``tol``.  Two bounds are valid for the tail past index I: the crude
    ``u**(I+1) / (1-u)`` and, because ``k_i > (i+1)/a``, the sharper
    ``v**(1/a) * rho**(I+1) / (1-rho)`` with ``rho = u * v**(1/a) < 1``.  The
    smaller is used and reported.  If ``cc`` carries a fraction, ``k_i`` is
    computed on integers (exact floor at rational points).
    """
    _require_canonical(q)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if cc is None:
        cc = cascade_constant(q)
    u, v = _uv(q, truth)
    total, last, tail, ambiguous = _backend.series_sum(
        u, v, cc.a, cc.r, cc.q, tol, MAX_TERMS
    )
    if last < 0:
        raise ToleranceUnreachable(
            f"tail bound still {tail!r} after {MAX_TERMS} terms (tol={tol!r})"
        )
    if ambiguous:
        warnings.warn(
            f"{ambiguous} k_i values for a={cc.a!r} sit within rounding of an integer",
            NearIntegerAmbiguity,
            stacklevel=2,
        )
    return SeriesValue(total, last, tail)


def _closed_form(u: float, v: float, r: int, q: int) -> float:
    numerator = _backend.finite_sum(u, v, r / q, r, q, r)
    return numerator / (1.0 - 2.0 * v**q * u**r)


def ycas_rational(q: SignalQualities, r: int, qden: int, truth: TruthState) -> float:
    """Yes-cascade probability for ``a = r/qden`` exactly (finite closed form)."""
    _require_canonical(q)
    if r < 1 or qden < 1 or math.gcd(r, qden) != 1:
        raise ConstantMismatch(f"{r}/{qden} is not a reduced positive fraction")
    a = cascade_constant(q).a
    if abs(a - r / qden) > FRACTION_MATCH_TOL:
        raise ConstantMismatch(f"a={a!r} does not match {r}/{qden}")
    u, v = _uv(q, truth)
    return _closed_form(u, v, r, qden)


def _canonical_pcc(q: SignalQualities, mode: Mode, tol: float) -> CascadeProbabilities:
    cc = cascade_constant(q)
    if mode is Mode.AUTO:
        rational = abs(q.p1 - q.p2) <= SYMMETRIC_TOL
        if rational:
            r, qden = 1, 1
    elif mode is Mode.RATIONAL:
        if not cc.is_rational:
            raise NotRational(f"a={cc.a!r} has no matching fraction; use the irrational series")
        rational = True
        r, qden = cc.r, cc.q
    else:
        rational = False

    if rational:
        ycas_g = _closed_form(1.0 - q.p1, q.p1, r, qden)
        ycas_b = _closed_form(q.p2, 1.0 - q.p2, r, qden)
        ncas_b = 1.0 - ycas_b
        return CascadeProbabilities(
            ycas_g, ycas_b, ncas_b, 0.5 * (ycas_g + ncas_b),
            Formula.RATIONAL_CLOSED_FORM, cc.a, r=r, q=qden,
        )
    g = ycas_irrational(q, TruthState.G, tol, cc)
    b = ycas_irrational(q, TruthState.B, tol, cc)
    ncas_b = 1.0 - b.value
    return CascadeProbabilities(
        g.value, b.value, ncas_b, 0.5 * (g.value + ncas_b),
        Formula.IRRATIONAL_SERIES, cc.a,
        truncation_index=max(g.truncation_index, b.truncation_index),
        tail_bound=max(g.tail_bound, b.tail_bound),
        r=cc.r or None, q=cc.q or None,
    )


def _relabel(c: CascadeProbabilities) -> CascadeProbabilities:
    # Swapping p1 and p2 exchanges G<->B and Y<->N, so the correct-cascade
    # events map onto each other and only the conditionals are relabeled.
    return CascadeProbabilities(
        ycas_g=c.ncas_b,
        ycas_b=1.0 - c.ycas_g,
        ncas_b=c.ycas_g,
        pcc=c.pcc,
        mode=c.mode,
        a=1.0 / c.a,
        truncation_index=c.truncation_index,
        tail_bound=c.tail_bound,
        r=c.q,
        q=c.r,
        swapped=True,
    )


def pcc(
    q: SignalQualities, mode: Mode | str = Mode.AUTO, tol: float = DEFAULT_TOL
) -> CascadeProbabilities:
    """Probability of a correct cascade, ``(P(Ycas|G) + P(Ncas|B)) / 2``.

    ``auto`` uses the rational closed form only on the symmetric line
    ``p1 == p2`` and the irrational series everywhere else.
    Non-canonical inputs (p1 > p2) are evaluated on the swapped pair and
    relabeled; ``swapped`` is set on the result.
    """
    mode = Mode(mode)
    if q.canonical:
        return _canonical_pcc(q, mode, tol)
    return _relabel(_canonical_pcc(q.swapped(), mode, tol))


def pcc_rational_approximation(q: SignalQualities, max_den: int = 1000) -> CascadeProbabilities:
    """Closed form evaluated at the best convergent r/q of ``a`` with q <= ``max_den``.

    Used to draw the rational-formula curve across a sweep, where most
    constants have no exact small fraction.
    """
    canon = q if q.canonical else q.swapped()
    if canon.p1 == canon.p2:
        frac_r, frac_q = 1, 1
        a = 1.0
    else:
        a = cascade_constant(canon).a
        frac = best_convergent(a, max_den)
        frac_r, frac_q = frac.numerator, frac.denominator
    ycas_g = _closed_form(1.0 - canon.p1, canon.p1, frac_r, frac_q)
    ycas_b = _closed_form(canon.p2, 1.0 - canon.p2, frac_r, frac_q)
    res = CascadeProbabilities(
        ycas_g, ycas_b, 1.0 - ycas_b, 0.5 * (ycas_g + 1.0 - ycas_b),
        Formula.RATIONAL_CLOSED_FORM, a, r=frac_r, q=frac_q,
    )
    return res if q.canonical else _relabel(res)


def _a_of(p1: float, p2: float) -> float:
    return math.log(p1 / (1.0 - p2)) / math.log(p2 / (1.0 - p1))


def solve_p2_for_a(p1: float, a_target: float, tol: float = BISECTION_TOL) -> float:
    """Quality p2 >= p1 whose cascade constant with ``p1`` equals ``a_target``.

    Bisection on p2; ``a`` increases with p2, so the root is unique.  Near
    p2 = 1 the constant moves faster than double spacing allows, and the
    closest representable p2 is returned even if it misses ``tol``.
    """
    validate_qualities(p1, p1)
    if a_target < 1.0:
        raise NoSolution(f"a_target={a_target!r} < 1 needs p2 < p1")
    if a_target == 1.0:
        return float(p1)
    lo, hi = float(p1), P2_CEILING
    if _a_of(p1, hi) < a_target:
        raise NoSolution(f"a={a_target!r} is not reachable for p1={p1!r} below p2=1-1e-12")
    a_lo, a_hi = 1.0, _a_of(p1, hi)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        a_mid = _a_of(p1, mid)
        if abs(a_mid - a_target) <= tol:
            return mid
        if a_mid < a_target:
            lo, a_lo = mid, a_mid
        else:
            hi, a_hi = mid, a_mid
    return lo if a_target - a_lo <= a_hi - a_target else hi


class Gap(NamedTuple):
    p2: float
    gap_g: float
    gap_b: float
    gap_pcc: float


def rational_gap(p1: float, r: int, qden: int, tol: float = DEFAULT_TOL) -> Gap:
    """Differences between the closed form and the series at ``a = r/qden``.

    Both formulas are evaluated at the same solved p2 and use the exact
    fraction for every ``k_i``.
    """
    if math.gcd(r, qden) != 1 or r < qden or qden < 1:
        raise ConstantMismatch(f"need a reduced fraction r/q >= 1, got {r}/{qden}")
    p2 = solve_p2_for_a(p1, r / qden)
    q = SignalQualities(p1, p2)
    cc = CascadeConstant.exact(r, qden)
    ra_g = _closed_form(1.0 - p1, p1, r, qden)
    ra_b = _closed_form(p2, 1.0 - p2, r, qden)
    irr_g = ycas_irrational(q, TruthState.G, tol, cc).value
    irr_b = ycas_irrational(q, TruthState.B, tol, cc).value
    gap_g = abs(ra_g - irr_g)
    gap_b = abs(ra_b - irr_b)
    gap_pcc = abs(0.5 * (ra_g + 1.0 - ra_b) - 0.5 * (irr_g + 1.0 - irr_b))
    return Gap(p2, gap_g, gap_b, gap_pcc)


class CensusEntry(NamedTuple):
    r: int
    q: int
    p2: float
    gap_g: float
    gap_b: float
    gap_pcc: float


@dataclass
class CensusReport:
    p1: float
    epsilon: float
    max_den: int
    entries: list[CensusEntry] = field(default_factory=list)
    skipped: list[tuple[int, int]] = field(default_factory=list)

    @property
    def theoretical_bound(self) -> float:
        return (math.log2(1.0 / self.epsilon) + 1.0) ** 2

    @property
    def exceed_count(self) -> int:
        return sum(max(e.gap_g, e.gap_b) > self.epsilon for e in self.entries)

    @property
    def exceed_count_g(self) -> int:
        return sum(e.gap_g > self.epsilon for e in self.entries)

    @property
    def exceed_count_b(self) -> int:
        return sum(e.gap_b > self.epsilon for e in self.entries)

    @property
    def within_bound(self) -> bool:
        bound = self.theoretical_bound
        return self.exceed_count_g <= bound and self.exceed_count_b <= bound


def rational_census(p1: float, epsilon: float, max_den: int) -> CensusReport:
    """Gaps for every reduced r/q with q <= r <= ``max_den`` reachable from ``p1``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if max_den < 1:
        raise ValueError("max_den must be at least 1")
    validate_qualities(p1, p1)
    report = CensusReport(float(p1), float(epsilon), int(max_den))
    for r in range(1, max_den + 1):
        for qden in range(1, r + 1):
            if math.gcd(r, qden) != 1:
                continue
            try:
                gap = rational_gap(p1, r, qden)
            except NoSolution:
                report.skipped.append((r, qden))
                continue
            report.entries.append(CensusEntry(r, qden, *gap))
    return report


__all__ = [
    "CascadeProbabilities",
    "CensusEntry",
    "CensusReport",
    "Formula",
    "Gap",
    "Mode",
    "SeriesValue",
    "pcc",
    "pcc_rational_approximation",
    "rational_census",
    "rational_gap",
    "solve_p2_for_a",
    "ycas_irrational",
    "ycas_rational",
]
