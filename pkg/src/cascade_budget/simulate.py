"""Seeded Monte-Carlo simulation of the agent sequence.

Each path gets its own SplitMix64 stream, derived by mixing the batch seed
with the path index.  Results are therefore identical for any split of the
paths across workers, and the compiled and pure-Python kernels agree bit for
bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import _backend
from ._fallback import CAP_EXCEEDED, GOLDEN, INV_2_53, MASK64, N_CASCADE, Y_CASCADE, mix64, path_state
from .core import (
    Action,
    CascadeConstant,
    SignalQualities,
    Status,
    TruthState,
    WalkState,
    cascade_constant,
    region_of,
    step,
)
from .errors import StepCapExceeded

STEP_CAP = 10**6
SEED_MAX = (1 << 64) - 1


class PathStream:
    """Uniform draws in [0, 1) for one path; the same stream the kernels use."""

    def __init__(self, seed: int, index: int):
        self._state = path_state(seed, index)

    def __iter__(self) -> Iterator[float]:
        return self

    def __next__(self) -> float:
        self._state = (self._state + GOLDEN) & MASK64
        return (mix64(self._state) >> 11) * INV_2_53


@dataclass(frozen=True)
class PathOutcome:
    status: Status
    n_yes: int
    n_no: int

    @property
    def steps(self) -> int:
        return self.n_yes + self.n_no


def _p_yes(q: SignalQualities, truth: TruthState) -> float:
    # agents follow their signal until a cascade, so P(Y) = P(H | truth)
    return q.p1 if truth is TruthState.G else 1.0 - q.p2


def simulate_path(
    q: SignalQualities,
    truth: TruthState,
    stream: Iterable[float],
    cc: CascadeConstant | None = None,
    step_cap: int = STEP_CAP,
    trace: list | None = None,
) -> PathOutcome:
    """Walk one path from h = 0 until it cascades.

    ``stream`` yields uniforms; a draw below P(H | truth) is a high signal and
    hence a Yes action.  If ``trace`` is a list, ``(state, action)`` pairs are
    appended for every step taken.
    """
    if cc is None:
        cc = cascade_constant(q)
    p_yes = _p_yes(q, truth)
    state = WalkState.start(cc)
    draws = iter(stream)
    for _ in range(step_cap):
        action = Action.Y if next(draws) < p_yes else Action.N
        if trace is not None:
            trace.append((state, action))
        state = step(state, action, cc)
        if state.status is not Status.IN_PLAY:
            return PathOutcome(state.status, state.n_yes, state.n_no)
    raise StepCapExceeded(f"path still in play after {step_cap} steps")


@dataclass(frozen=True)
class BatchEstimate:
    paths: int
    successes: int
    seed: int

    @property
    def estimate(self) -> float:
        return self.successes / self.paths

    @property
    def std_error(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.paths)

    @property
    def ci95(self) -> tuple[float, float]:
        half = 1.96 * self.std_error
        return self.estimate - half, self.estimate + half

    def as_dict(self) -> dict:
        lo, hi = self.ci95
        return {
            "paths": self.paths,
            "successes": self.successes,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "ci95_low": lo,
            "ci95_high": hi,
            "seed": self.seed,
        }


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def simulate_batch(
    q: SignalQualities,
    truth: TruthState,
    paths: int,
    seed: int,
    offset: int = 0,
    workers: int = 1,
    step_cap: int = STEP_CAP,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Outcomes of paths ``offset .. offset+paths-1``: (status, n_yes, n_no).

    Status codes are 1 for a Yes cascade and 2 for a No cascade.
    """
    if paths < 1:
        raise ValueError("paths must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    seed = _check_seed(seed)
    cc = cascade_constant(q)
    p_yes = _p_yes(q, truth)

    def run(bounds):
        start, stop = bounds
        return _backend.simulate_batch(p_yes, cc.a, cc.r, cc.q, seed, start, stop, step_cap)

    edges = np.linspace(offset, offset + paths, min(workers, paths) + 1).astype(np.int64)
    chunks = [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]
    if len(chunks) == 1:
        parts = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(run, chunks))
    status, n_yes, n_no = (np.concatenate(col) for col in zip(*parts))
    if np.any(status == CAP_EXCEEDED):
        raise StepCapExceeded(
            f"{int(np.sum(status == CAP_EXCEEDED))} paths still in play after {step_cap} steps"
        )
    return status, n_yes, n_no


def _target_code(target: Status) -> int:
    if target is Status.Y_CASCADE:
        return Y_CASCADE
    if target is Status.N_CASCADE:
        return N_CASCADE
    raise ValueError("target must be a Yes or No cascade")


def estimate(
    q: SignalQualities,
    truth: TruthState,
    target: Status,
    paths: int,
    seed: int,
    workers: int = 1,
) -> BatchEstimate:
    """Fraction of ``paths`` simulated histories that end in ``target``."""
    code = _target_code(target)
    status, _, _ = simulate_batch(q, truth, paths, seed, workers=workers)
    return BatchEstimate(paths, int(np.count_nonzero(status == code)), _check_seed(seed))


def estimate_pcc(q: SignalQualities, paths: int, seed: int, workers: int = 1) -> BatchEstimate:
    """Correct-cascade probability from equal G and B halves.

    Paths ``0 .. paths/2-1`` run under G and count Yes cascades; the rest run
    under B and count No cascades.  With equal halves the pooled fraction is
    the average of the two conditional estimates.
    """
    if paths < 2 or paths % 2:
        raise ValueError("paths must be a positive even number")
    half = paths // 2
    good, _, _ = simulate_batch(q, TruthState.G, half, seed, offset=0, workers=workers)
    bad, _, _ = simulate_batch(q, TruthState.B, half, seed, offset=half, workers=workers)
    successes = int(np.count_nonzero(good == Y_CASCADE)) + int(np.count_nonzero(bad == N_CASCADE))
    return BatchEstimate(paths, successes, _check_seed(seed))


def audit_action_regions(
    q: SignalQualities, truth: TruthState, paths: int, seed: int
) -> list[tuple[int, WalkState, Action]]:
    """Replay paths step by step and collect non-terminal steps that were taken
    from a region that forbids them.  An empty list means no violation."""
    cc = cascade_constant(q)
    allowed = {
        Action.Y: {"pivot", "upper"},
        Action.N: {"pivot", "lower"},
    }
    violations = []
    for index in range(paths):
        trace: list = []
        simulate_path(q, truth, PathStream(seed, index), cc, trace=trace)
        # the last step is the one that triggered the cascade
        for state, action in trace[:-1]:
            if region_of(state, cc).value not in allowed[action]:
                violations.append((index, state, action))
    return violations
