"""Pure-Python/numpy implementations of the hot kernels.

Every function here mirrors one in ``_kernels.pyx`` operation for operation so
that both backends return bit-identical results.  Keep them in lockstep.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
SEED_SALT = 0xD1B54A32D192ED03
MIX_M1 = 0xBF58476D1CE4E5B9
MIX_M2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / 9007199254740992.0

BOUNDARY_BAND = 1e-12
AMBIGUITY_BAND = 1e-12

# terminal codes shared with the compiled kernel
IN_PLAY = 0
Y_CASCADE = 1
N_CASCADE = 2
CAP_EXCEEDED = 3


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_M2) & MASK64
    return z ^ (z >> 31)


def path_state(seed: int, index: int) -> int:
    """Initial generator state for path ``index`` of a batch seeded by ``seed``."""
    key = mix64(seed ^ SEED_SALT)
    return mix64(key + (index + 1) * GOLDEN)


def series_sum(u, v, a, r, q, tol, max_terms):
    """Adaptive sum of ``u**i * v**k_i`` with a geometric tail bound below ``tol``.

    ``k_i = floor((i+1)/a) + 1``, computed on integers when ``q > 0`` (then
    ``a == r/q``).  Returns ``(total, last_index, tail_bound, ambiguous)``;
    ``last_index`` is -1 if ``max_terms`` terms did not reach ``tol``.
    """
    rational = q > 0
    inv_a = q / r if rational else 1.0 / a
    c = math.pow(v, inv_a)
    rho = u * c
    one_minus_u = 1.0 - u
    one_minus_rho = 1.0 - rho
    ui = 1.0
    u_next = u
    rho_next = rho
    total = 0.0
    tail = math.inf
    ambiguous = 0
    for i in range(max_terms):
        if rational:
            k = (i + 1) * q // r + 1
        else:
            x = (i + 1) / a
            k = int(math.floor(x)) + 1
            if abs(x - round(x)) <= AMBIGUITY_BAND:
                ambiguous += 1
        total += ui * math.pow(v, k)
        tail = min(u_next / one_minus_u, c * rho_next / one_minus_rho)
        if tail < tol:
            return total, i, tail, ambiguous
        ui *= u
        u_next *= u
        rho_next *= rho
    return total, -1, tail, ambiguous


def finite_sum(u, v, a, r, q, n_terms):
    """Sum of the first ``n_terms`` terms of the same series."""
    rational = q > 0
    ui = 1.0
    total = 0.0
    for i in range(n_terms):
        if rational:
            k = (i + 1) * q // r + 1
        else:
            k = int(math.floor((i + 1) / a)) + 1
        total += ui * math.pow(v, k)
        ui *= u
    return total


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_M2)
    return z ^ (z >> np.uint64(31))


def simulate_batch(p_yes, a, r, q, seed, start, stop, step_cap):
    """Run paths ``start..stop-1`` to absorption, vectorized across paths.

    Returns ``(status, n_yes, n_no)`` arrays; status uses the terminal codes
    above, with CAP_EXCEEDED for a path still in play after ``step_cap`` steps.
    """
    n = stop - start
    key = mix64(seed ^ SEED_SALT)
    idx = np.arange(start, stop, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = _mix64_array(np.uint64(key) + (idx + np.uint64(1)) * np.uint64(GOLDEN))
    status = np.zeros(n, dtype=np.int8)
    n_yes = np.zeros(n, dtype=np.int32)
    n_no = np.zeros(n, dtype=np.int32)
    rational = q > 0
    if rational:
        pos = np.zeros(n, dtype=np.int64)
    else:
        pos = np.zeros(n, dtype=np.float64)
        lower = -1.0 - BOUNDARY_BAND
        upper = a + BOUNDARY_BAND

    active = np.arange(n)
    steps = 0
    golden = np.uint64(GOLDEN)
    while active.size:
        if steps >= step_cap:
            status[active] = CAP_EXCEEDED
            break
        st = state[active] + golden
        state[active] = st
        u = (_mix64_array(st) >> np.uint64(11)).astype(np.float64) * INV_2_53
        yes = u < p_yes
        p = pos[active]
        if rational:
            p = np.where(yes, p - r, p + q)
        else:
            p = np.where(yes, p - a, p + 1.0)
        pos[active] = p
        n_yes[active] += yes
        n_no[active] += ~yes
        steps += 1
        if rational:
            ycas = p < -q
            ncas = p > r
        else:
            ycas = p < lower
            ncas = p > upper
        status[active[ycas]] = Y_CASCADE
        status[active[ncas]] = N_CASCADE
        active = active[~(ycas | ncas)]
    return status, n_yes, n_no
