"""Independent reference computations in extended precision.

Nothing here imports the package: the cascade constant, the series and the
absorbing chain are rebuilt from the model definition with mpmath.
"""

import mpmath as mp

mp.mp.dps = 50


def a_of(p1, p2):
    p1, p2 = mp.mpf(p1), mp.mpf(p2)
    return mp.log(p1 / (1 - p2)) / mp.log(p2 / (1 - p1))


def series(p1, p2, n_terms=4000, k=None):
    """(ycas_G, ycas_B, pcc) from the first-passage series, summed far past
    double precision.  ``k(i)`` overrides the default floor((i+1)/a) + 1."""
    p1, p2 = mp.mpf(p1), mp.mpf(p2)
    a = a_of(p1, p2)
    g = b = mp.mpf(0)
    for i in range(n_terms):
        ki = k(i) if k else int(mp.floor((i + 1) / a)) + 1
        g += (1 - p1) ** i * p1**ki
        b += p2**i * (1 - p2) ** ki
    return g, b, (g + 1 - b) / 2


def absorbing_chain(p_yes, r, q):
    """Probability of a Yes cascade for a walk on the integer state
    s = q*n_N - r*n_Y, absorbed below -q (Yes) or above r (No)."""
    states = list(range(-q, r + 1))
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    A = mp.eye(n)
    rhs = mp.matrix(n, 1)
    p_yes = mp.mpf(p_yes)
    for s in states:
        i = idx[s]
        for ds, pr in ((-r, p_yes), (q, 1 - p_yes)):
            t = s + ds
            if t < -q:
                rhs[i] += pr
            elif t <= r:
                A[i, idx[t]] -= pr
    return mp.lu_solve(A, rhs)[idx[0]]


def solve_p2(p1, a_target):
    p1 = mp.mpf(p1)
    return mp.findroot(
        lambda p2: a_of(p1, p2) - a_target,
        (p1 + mp.mpf("1e-9"), 1 - mp.mpf("1e-15")),
        solver="bisect",
    )


def chain_pcc(p1, p2, r, q):
    g = absorbing_chain(p1, r, q)
    b = absorbing_chain(1 - mp.mpf(p2), r, q)
    return g, b, (g + 1 - b) / 2
