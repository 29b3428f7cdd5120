"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's solver: a dense
Gauss-Jordan inverse of ``I - Q`` and a truncated-horizon propagation of the
state distribution.
"""

from fractions import Fraction

import pytest

from pickleball_markov.solver import AbsorbingChain


def dense_inverse(A):
    """Textbook Gauss-Jordan inverse over the rationals."""
    size = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(int(r == c)) for c in range(size)]
           for r, row in enumerate(A)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        lead = aug[col][col]
        aug[col] = [v / lead for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def dense_lemma(Q, S):
    """Absorption matrix, mean and variance vectors via an explicit fundamental matrix."""
    m = len(Q)
    I_minus_Q = [[Fraction(int(r == c)) - Q[r][c] for c in range(m)] for r in range(m)]
    M = dense_inverse(I_minus_Q)
    MS = [[sum(M[r][k] * S[k][c] for k in range(m)) for c in range(2)] for r in range(m)]
    t = [sum(M[r]) for r in range(m)]
    Mt = [sum(M[r][k] * t[k] for k in range(m)) for r in range(m)]
    var = [2 * Mt[r] - t[r] - t[r] ** 2 for r in range(m)]
    return MS, t, var


def truncated_horizon(Q, S, start, horizon):
    """Propagate the distribution ``horizon`` steps; exact partial sums.

    Returns (P(absorbed in A by K), P(absorbed in B by K), E[min(T, K)],
    E[min(T, K)^2], P(T > K)).
    """
    m = len(Q)
    dist = [Fraction(0)] * m
    dist[start] = Fraction(1)
    hit_a = hit_b = mean = second = Fraction(0)
    for step in range(1, horizon + 1):
        new = [Fraction(0)] * m
        for r, mass in enumerate(dist):
            if mass == 0:
                continue
            for c in range(m):
                if Q[r][c]:
                    new[c] += mass * Q[r][c]
            a, b = mass * S[r][0], mass * S[r][1]
            hit_a += a
            hit_b += b
            mean += step * (a + b)
            second += step * step * (a + b)
        dist = new
    alive = sum(dist)
    return hit_a, hit_b, mean + horizon * alive, second + horizon**2 * alive, alive


def walk_chain(p, size=5):
    """Random walk on ``{0..size-1}`` absorbed at both ends.

    Transient states are ``1..size-2``; absorbing column 0 is the top end
    (``size-1``), column 1 the bottom end (0).  Steps up with probability p.
    """
    p = Fraction(p)
    m = size - 2
    Q = [[Fraction(0)] * m for _ in range(m)]
    S = [[Fraction(0)] * 2 for _ in range(m)]
    for r in range(m):
        if r + 1 < m:
            Q[r][r + 1] = p
        else:
            S[r][0] = p
        if r - 1 >= 0:
            Q[r][r - 1] = 1 - p
        else:
            S[r][1] = 1 - p
    return Q, S


@pytest.fixture
def gamblers_ruin():
    Q, S = walk_chain(Fraction(1, 2))
    return Q, S, AbsorbingChain.from_dense(Q, S, labels=[1, 2, 3])
