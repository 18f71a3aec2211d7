"""Budget allocation between the two signal qualities.

With ``b < 1 - p2`` the optimum is one of two candidates: spend everything
on p2 ("concentrate"), or lift both qualities to ``(p1 + p2 + b) / 2``
("equalize") and collect the jump the correct-cascade probability makes on
the symmetric line.  ``grid_search`` is an exhaustive check of that claim,
not an optimizer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .analytic import Formula, Mode, pcc
from .core import SignalQualities
from .errors import CascadeError, DomainViolation, InfeasibleEqualize, RegimeViolation

CAP_EPSILON = 1e-6
GRID_SLACK = 1e-12
VERIFY_TOL = 1e-9
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class BudgetProblem:
    p1: float
    p2: float
    b: float

    def __post_init__(self):
        SignalQualities(self.p1, self.p2)
        if self.p1 > self.p2:
            raise CascadeError("BudgetProblem expects canonical qualities p1 <= p2")
        if not self.b >= 0 or math.isinf(self.b):
            raise CascadeError(f"budget must be a finite non-negative number, got {self.b!r}")

    @property
    def theorem_regime(self) -> bool:
        return self.b < 1.0 - self.p2

    @property
    def equalize_feasible(self) -> bool:
        return self.b >= self.p2 - self.p1


@dataclass(frozen=True)
class Allocation:
    name: str
    c1: float
    c2: float
    p1: float
    p2: float
    pcc: float
    mode: Formula
    capped: bool = False

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "c1": self.c1,
            "c2": self.c2,
            "p1": self.p1,
            "p2": self.p2,
            "pcc": self.pcc,
            "mode": self.mode.value,
            "capped": self.capped,
        }


@dataclass
class AllocationDecision:
    problem: BudgetProblem
    candidates: list[Allocation]
    chosen: str
    grid_best: Allocation | None = None
    grid_step: float | None = None

    @property
    def best(self) -> Allocation:
        return next(c for c in self.candidates if c.name == self.chosen)

    @property
    def verified_by_grid(self) -> bool | None:
        if self.grid_best is None:
            return None
        return self.grid_best.pcc <= self.best.pcc + VERIFY_TOL


def _allocate(name: str, prob: BudgetProblem, c1: float, c2: float, capped=False) -> Allocation:
    p1, p2 = prob.p1 + c1, prob.p2 + c2
    res = pcc(SignalQualities(p1, p2), Mode.AUTO)
    return Allocation(name, c1, c2, p1, p2, res.pcc, res.mode, capped)


def symmetric_pcc(p: float) -> float:
    """Correct-cascade probability on the symmetric line p1 = p2 = p."""
    return 0.5 * (1.0 + (2.0 * p - 1.0) / (1.0 - 2.0 * p * (1.0 - p)))


def strategy_concentrate(prob: BudgetProblem) -> Allocation:
    """Whole budget to p2."""
    if not prob.theorem_regime:
        raise RegimeViolation(f"b={prob.b!r} must be below 1 - p2 = {1.0 - prob.p2!r}")
    return _allocate("concentrate", prob, 0.0, prob.b)


def _equalize(prob: BudgetProblem, ceiling: float = 1.0) -> Allocation:
    if not prob.equalize_feasible:
        raise InfeasibleEqualize(
            f"b={prob.b!r} < p2 - p1 = {prob.p2 - prob.p1!r}; equalizing needs c2 < 0"
        )
    p = 0.5 * (prob.p1 + prob.p2 + prob.b)
    capped = p >= ceiling
    if capped:
        p = 1.0 - CAP_EPSILON
    return Allocation(
        "equalize", p - prob.p1, p - prob.p2, p, p, symmetric_pcc(p),
        Formula.RATIONAL_CLOSED_FORM, capped,
    )


def strategy_equalize(prob: BudgetProblem) -> Allocation:
    """Both qualities to (p1 + p2 + b) / 2."""
    return _equalize(prob)


def optimize(prob: BudgetProblem) -> AllocationDecision:
    """Evaluate the candidate strategies and pick the best.

    Outside ``b < 1 - p2`` the candidates become: raise p2 as far as allowed
    and give the rest to p1; equalize; and, once ``b >= 1 - p1``, raise p1
    first instead.  Qualities stop at ``1 - CAP_EPSILON`` because a fully
    revealing signal is excluded.
    """
    candidates = []
    if prob.theorem_regime:
        candidates.append(strategy_concentrate(prob))
        if prob.equalize_feasible:
            candidates.append(strategy_equalize(prob))
    else:
        top = 1.0 - CAP_EPSILON
        c2 = top - prob.p2
        c1 = min(prob.b - c2, top - prob.p1)
        candidates.append(_allocate("cap_p2_then_p1", prob, max(c1, 0.0), c2, capped=True))
        if prob.equalize_feasible:
            candidates.append(_equalize(prob, ceiling=top))
        if prob.b >= 1.0 - prob.p1:
            c1 = top - prob.p1
            c2 = min(prob.b - c1, top - prob.p2)
            candidates.append(_allocate("cap_p1_then_p2", prob, c1, max(c2, 0.0), capped=True))
    chosen = max(candidates, key=lambda c: c.pcc)
    return AllocationDecision(prob, candidates, chosen.name)


def grid_search(prob: BudgetProblem, step: float) -> Allocation:
    """Exhaustive maximum over the feasible lattice of (c1, c2) multiples of ``step``.

    The exact equalize point (when feasible) and the concentrate corner (when
    p2 + b < 1) are added to the lattice so the discontinuity on the
    symmetric line is sampled where it matters.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    points = []
    n = int(math.floor(prob.b / step + GRID_SLACK))
    for i in range(n + 1):
        c1 = i * step
        if prob.p1 + c1 >= 1.0:
            break
        for j in range(n + 1 - i):
            c2 = j * step
            if c1 + c2 > prob.b + GRID_SLACK or prob.p2 + c2 >= 1.0:
                break
            points.append((c1, c2))
    if prob.p2 + prob.b < 1.0:
        points.append((0.0, prob.b))
    best = None
    for c1, c2 in points:
        alloc = _allocate("grid", prob, c1, c2)
        if best is None or alloc.pcc > best.pcc:
            best = alloc
    if prob.equalize_feasible and 0.5 * (prob.p1 + prob.p2 + prob.b) < 1.0:
        eq = strategy_equalize(prob)
        if eq.pcc > best.pcc:
            best = Allocation("grid", eq.c1, eq.c2, eq.p1, eq.p2, eq.pcc, eq.mode)
    return best


def verify(decision: AllocationDecision, step: float) -> AllocationDecision:
    """Attach the grid maximum to a decision (see ``verified_by_grid``)."""
    decision.grid_best = grid_search(decision.problem, step)
    decision.grid_step = step
    return decision


class SweepKind(enum.Enum):
    P2 = "p2"  # (p1, p2 + c)
    P1 = "p1"  # (p1 + c, p2)
    SPREAD = "spread"  # (p - c, p + c) around p = base.p1 = base.p2


@dataclass
class MonotonicityReport:
    kind: SweepKind
    c: list[float]
    values: list[float]
    tail_bounds: list[float] = field(repr=False)
    max_decrease: float
    max_jump: float
    step: float

    @property
    def passed(self) -> bool:
        for k in range(len(self.values) - 1):
            drop = self.values[k] - self.values[k + 1]
            if drop > MONOTONE_TOL + self.tail_bounds[k] + self.tail_bounds[k + 1]:
                return False
        return self.max_jump <= 10.0 * self.step


def _sweep_point(kind: SweepKind, base: SignalQualities, c: float) -> tuple[float, float]:
    if kind is SweepKind.P2:
        p1, p2 = base.p1, base.p2 + c
        ok = 0.5 < p1 < p2 < 1.0
    elif kind is SweepKind.P1:
        p1, p2 = base.p1 + c, base.p2
        ok = 0.5 < p1 < p2 < 1.0
    else:
        if base.p1 != base.p2:
            raise DomainViolation("a spread sweep starts from p1 == p2")
        p1, p2 = base.p1 - c, base.p1 + c
        ok = 0.5 < p1 < p2 < 1.0
    if not ok:
        raise DomainViolation(f"{kind.value} sweep at c={c!r} gives ({p1!r}, {p2!r}) outside 1/2 < p1 < p2 < 1")
    return p1, p2


def monotonicity_check(
    kind: SweepKind | str,
    base: SignalQualities,
    c_start: float,
    c_stop: float,
    step: float,
) -> MonotonicityReport:
    """Sweep the irrational-series correct-cascade probability along ``kind``.

    Passes when no adjacent decrease exceeds 1e-9 plus the two truncation
    bounds, and no adjacent change exceeds ``10 * step``.
    """
    kind = SweepKind(kind)
    if not step > 0 or c_stop < c_start:
        raise ValueError("need step > 0 and c_stop >= c_start")
    count = int(math.floor((c_stop - c_start) / step + 1e-9)) + 1
    cs = [round(c_start + k * step, 12) for k in range(count)]
    points = [_sweep_point(kind, base, c) for c in cs]
    values, tails = [], []
    for p1, p2 in points:
        res = pcc(SignalQualities(p1, p2), Mode.IRRATIONAL)
        values.append(res.pcc)
        tails.append(res.tail_bound)
    diffs = [b - a for a, b in zip(values, values[1:])]
    max_decrease = max([0.0] + [-d for d in diffs])
    max_jump = max([0.0] + [abs(d) for d in diffs])
    return MonotonicityReport(kind, cs, values, tails, max_decrease, max_jump, step)
