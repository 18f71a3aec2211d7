"""Domain types and exact walk dynamics of the sufficient statistic h.

Before any cascade every agent follows its own signal, and the history is
summarised by ``h = n_no - a * n_yes`` with cascade constant
``a = log(p1/(1-p2)) / log(p2/(1-p1))``.  The walk stays in play on
``[-1, a]``; leaving below -1 starts a Yes cascade, leaving above ``a`` a No
cascade.  When ``a = r/q`` the integer ``s = q*n_no - r*n_yes`` carries the
same information without rounding.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import NearIntegerAmbiguity, OutOfRange, SteppedAfterCascade

RATIONAL_TOL = 1e-12
RATIONAL_MAX_DEN = 10**6
BOUNDARY_BAND = 1e-12
AMBIGUITY_BAND = 1e-12


class TruthState(enum.Enum):
    G = "G"
    B = "B"


class Action(enum.Enum):
    Y = "Y"
    N = "N"


class Signal(enum.Enum):
    H = "H"
    L = "L"


class Status(enum.Enum):
    IN_PLAY = "in_play"
    Y_CASCADE = "y_cascade"
    N_CASCADE = "n_cascade"


class Region(enum.Enum):
    LOWER = "lower"  # [-1, a-1): only N keeps the walk in play
    PIVOT = "pivot"  # exactly a-1: both actions keep it in play
    UPPER = "upper"  # (a-1, a]: only Y keeps it in play


@dataclass(frozen=True)
class SignalQualities:
    """Channel pair ``p1 = P(H|G)`` and ``p2 = P(L|B)``, both in (0.5, 1)."""

    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not 0.5 < value < 1.0:
                raise OutOfRange(f"{name}={value!r} must lie in the open interval (0.5, 1)")
        object.__setattr__(self, "p1", float(self.p1))
        object.__setattr__(self, "p2", float(self.p2))

    @property
    def canonical(self) -> bool:
        return self.p1 <= self.p2

    def swapped(self) -> SignalQualities:
        return SignalQualities(self.p2, self.p1)


def validate_qualities(p1: float, p2: float) -> SignalQualities:
    """Validate a quality pair; ``.canonical`` records whether p1 <= p2."""
    try:
        p1 = float(p1)
        p2 = float(p2)
    except (TypeError, ValueError) as exc:
        raise OutOfRange(f"qualities must be numbers, got {p1!r}, {p2!r}") from exc
    return SignalQualities(p1, p2)


@dataclass(frozen=True)
class CascadeConstant:
    """Cascade constant ``a`` and, when detected, its reduced fraction."""

    a: float
    fraction: Fraction | None = None

    @property
    def is_rational(self) -> bool:
        return self.fraction is not None

    @property
    def r(self) -> int:
        return self.fraction.numerator if self.fraction is not None else 0

    @property
    def q(self) -> int:
        return self.fraction.denominator if self.fraction is not None else 0

    @classmethod
    def exact(cls, r: int, q: int) -> CascadeConstant:
        """Constant known to be exactly r/q (used for the rational census)."""
        frac = Fraction(r, q)
        return cls(frac.numerator / frac.denominator, frac)


def classify_rationality(
    a: float, tol: float = RATIONAL_TOL, max_den: int = RATIONAL_MAX_DEN
) -> Fraction | None:
    """Smallest-denominator continued-fraction convergent within ``tol`` of ``a``.

    Returns ``None`` (irrational) when no convergent with denominator up to
    ``max_den`` is close enough.
    """
    if tol <= 0 or max_den < 1:
        raise ValueError("tol must be positive and max_den at least 1")
    num, den = float(a).as_integer_ratio()
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while den:
        c, rem = divmod(num, den)
        h_prev, h = h, c * h + h_prev
        k_prev, k = k, c * k + k_prev
        if k > max_den:
            break
        if abs(a - h / k) <= tol:
            return Fraction(h, k)
        num, den = den, rem
    return None


def best_convergent(a: float, max_den: int) -> Fraction:
    """Last continued-fraction convergent of ``a`` with denominator <= ``max_den``."""
    num, den = float(a).as_integer_ratio()
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    best = Fraction(math.floor(a))
    while den:
        c, rem = divmod(num, den)
        h_prev, h = h, c * h + h_prev
        k_prev, k = k, c * k + k_prev
        if k > max_den:
            break
        best = Fraction(h, k)
        num, den = den, rem
    return best


def cascade_constant(
    q: SignalQualities, tol: float = RATIONAL_TOL, max_den: int = RATIONAL_MAX_DEN
) -> CascadeConstant:
    if q.p1 == q.p2:
        return CascadeConstant(1.0, Fraction(1))
    a = math.log(q.p1 / (1.0 - q.p2)) / math.log(q.p2 / (1.0 - q.p1))
    return CascadeConstant(a, classify_rationality(a, tol, max_den))


def k_index(i: int, cc: CascadeConstant) -> int:
    """Number of Yes actions in the Yes-cascading history with ``i`` No actions."""
    if i < 0:
        raise ValueError("i must be non-negative")
    if cc.is_rational:
        return (i + 1) * cc.q // cc.r + 1
    x = (i + 1) / cc.a
    if abs(x - round(x)) <= AMBIGUITY_BAND:
        warnings.warn(
            f"(i+1)/a = {x!r} is within {AMBIGUITY_BAND} of an integer although "
            f"a = {cc.a!r} was classified irrational",
            NearIntegerAmbiguity,
            stacklevel=2,
        )
    return math.floor(x) + 1


@dataclass(frozen=True)
class WalkState:
    n_yes: int = 0
    n_no: int = 0
    h: float = 0.0
    status: Status = Status.IN_PLAY
    s: int | None = None  # q*n_no - r*n_yes, rational constants only

    @classmethod
    def start(cls, cc: CascadeConstant) -> WalkState:
        return cls(s=0 if cc.is_rational else None)

    def likelihood_ratio(self, q: SignalQualities) -> float:
        """Public likelihood ratio P(history|B) / P(history|G)."""
        return (q.p2 / (1.0 - q.p1)) ** self.h


def _status_of(h: float, s: int | None, cc: CascadeConstant) -> Status:
    if s is not None:
        if s < -cc.q:
            return Status.Y_CASCADE
        if s > cc.r:
            return Status.N_CASCADE
        return Status.IN_PLAY
    if h < -1.0 - BOUNDARY_BAND:
        return Status.Y_CASCADE
    if h > cc.a + BOUNDARY_BAND:
        return Status.N_CASCADE
    return Status.IN_PLAY


def step(state: WalkState, action: Action, cc: CascadeConstant) -> WalkState:
    """Apply one observed action; boundary equality keeps the walk in play."""
    if state.status is not Status.IN_PLAY:
        raise SteppedAfterCascade("once a cascade starts it lasts forever")
    if action is Action.Y:
        n_yes, n_no, h = state.n_yes + 1, state.n_no, state.h - cc.a
        s = None if state.s is None else state.s - cc.r
    else:
        n_yes, n_no, h = state.n_yes, state.n_no + 1, state.h + 1.0
        s = None if state.s is None else state.s + cc.q
    return WalkState(n_yes, n_no, h, _status_of(h, s, cc), s)


def region_of(state: WalkState, cc: CascadeConstant) -> Region:
    if state.status is not Status.IN_PLAY:
        raise SteppedAfterCascade("region is defined only while the walk is in play")
    if state.s is not None:
        # h = a - 1  <=>  s = r - q
        pivot = cc.r - cc.q
        if state.s == pivot:
            return Region.PIVOT
        return Region.LOWER if state.s < pivot else Region.UPPER
    gap = state.h - (cc.a - 1.0)
    if abs(gap) <= BOUNDARY_BAND:
        return Region.PIVOT
    return Region.LOWER if gap < 0 else Region.UPPER
