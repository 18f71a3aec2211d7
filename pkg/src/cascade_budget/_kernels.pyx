# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: cascade series sums and batched walk simulation.

Mirrors ``_fallback.py`` operation for operation; results are bit-identical.
"""

import numpy as np

from libc.math cimport floor, fabs, round, pow, INFINITY
from libc.stdint cimport uint64_t, int64_t, int32_t, int8_t

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t SEED_SALT = <uint64_t>0xD1B54A32D192ED03
cdef uint64_t MIX_M1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MIX_M2 = <uint64_t>0x94D049BB133111EB
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef double BOUNDARY_BAND = 1e-12
cdef double AMBIGUITY_BAND = 1e-12

cdef enum:
    IN_PLAY = 0
    Y_CASCADE = 1
    N_CASCADE = 2
    CAP_EXCEEDED = 3


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX_M1
    z = (z ^ (z >> 27)) * MIX_M2
    return z ^ (z >> 31)


def series_sum(double u, double v, double a, long long r, long long q,
               double tol, long long max_terms):
    cdef bint rational = q > 0
    cdef double inv_a = (<double>q / <double>r) if rational else 1.0 / a
    cdef double c = pow(v, inv_a)
    cdef double rho = u * c
    cdef double one_minus_u = 1.0 - u
    cdef double one_minus_rho = 1.0 - rho
    cdef double ui = 1.0, u_next = u, rho_next = rho
    cdef double total = 0.0, tail = INFINITY, x, t1, t2
    cdef long long i, k, ambiguous = 0
    for i in range(max_terms):
        if rational:
            k = (i + 1) * q // r + 1
        else:
            x = <double>(i + 1) / a
            k = <long long>floor(x) + 1
            if fabs(x - round(x)) <= AMBIGUITY_BAND:
                ambiguous += 1
        total += ui * pow(v, <double>k)
        t1 = u_next / one_minus_u
        t2 = c * rho_next / one_minus_rho
        tail = t1 if t1 <= t2 else t2
        if tail < tol:
            return total, i, tail, ambiguous
        ui *= u
        u_next *= u
        rho_next *= rho
    return total, -1, tail, ambiguous


def finite_sum(double u, double v, double a, long long r, long long q,
               long long n_terms):
    cdef bint rational = q > 0
    cdef double ui = 1.0, total = 0.0
    cdef long long i, k
    for i in range(n_terms):
        if rational:
            k = (i + 1) * q // r + 1
        else:
            k = <long long>floor(<double>(i + 1) / a) + 1
        total += ui * pow(v, <double>k)
        ui *= u
    return total


cdef void _run_paths(double p_yes, double a, long long r, long long q,
                     uint64_t key, long long start, long long stop,
                     long long step_cap, int8_t[::1] status,
                     int32_t[::1] n_yes, int32_t[::1] n_no) noexcept nogil:
    cdef long long j, steps
    cdef uint64_t state
    cdef double u, h
    cdef long long s
    cdef int32_t ny, nn
    cdef int8_t code
    cdef bint rational = q > 0
    cdef double lower = -1.0 - BOUNDARY_BAND
    cdef double upper = a + BOUNDARY_BAND
    for j in range(stop - start):
        state = _mix64(key + <uint64_t>(start + j + 1) * GOLDEN)
        h = 0.0
        s = 0
        ny = 0
        nn = 0
        code = IN_PLAY
        steps = 0
        while True:
            if steps >= step_cap:
                code = CAP_EXCEEDED
                break
            state = state + GOLDEN
            u = <double>(_mix64(state) >> 11) * INV_2_53
            steps += 1
            if u < p_yes:
                ny += 1
                if rational:
                    s -= r
                else:
                    h = h - a
            else:
                nn += 1
                if rational:
                    s += q
                else:
                    h = h + 1.0
            if rational:
                if s < -q:
                    code = Y_CASCADE
                    break
                if s > r:
                    code = N_CASCADE
                    break
            else:
                if h < lower:
                    code = Y_CASCADE
                    break
                if h > upper:
                    code = N_CASCADE
                    break
        status[j] = code
        n_yes[j] = ny
        n_no[j] = nn


def simulate_batch(double p_yes, double a, long long r, long long q,
                   seed, long long start, long long stop, long long step_cap):
    cdef long long n = stop - start
    cdef uint64_t key = _mix64(<uint64_t>seed ^ SEED_SALT)
    status = np.zeros(n, dtype=np.int8)
    n_yes = np.zeros(n, dtype=np.int32)
    n_no = np.zeros(n, dtype=np.int32)
    cdef int8_t[::1] st_view = status
    cdef int32_t[::1] y_view = n_yes
    cdef int32_t[::1] n_view = n_no
    with nogil:
        _run_paths(p_yes, a, r, q, key, start, stop, step_cap,
                   st_view, y_view, n_view)
    return status, n_yes, n_no
