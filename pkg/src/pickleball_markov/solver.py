"""Exact absorption probabilities, expected duration and duration variance.

With ``M = (I - Q)^{-1}`` the quantities of interest from transient state
``s`` are ``(M S)[s]``, ``t[s] = (M 1)[s]`` and
``Var[s] = 2 u[s] - t[s] - t[s]^2`` where ``u = M t``.  ``M`` is never
formed.  Instead the transient states are split into strongly connected
components, which for the scoring chains are single states, server-rotation
cycles inside one score, or the deuce/advantage cluster.  Components are
solved sink-first as small dense exact systems, each one only needing the
already-known values of the components it feeds into.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import DegenerateChainError, DomainError
from .rational import as_fraction
from .states import Absorbed, index_of

try:  # gmpy2 rationals are an order of magnitude faster than Fraction
    from gmpy2 import mpq as _num
except ImportError:  # pragma: no cover
    _num = Fraction

__all__ = [
    "AbsorbingChain",
    "ChainSummary",
    "solve",
    "absorption_probabilities",
    "expected_duration",
    "duration_variance",
    "chain_summary",
    "strongly_connected_components",
    "solve_float",
]

QUANTITIES = ("A", "B", "t", "u")


class AbsorbingChain:
    """A general absorbing chain with two absorbing states.

    ``rows[r]`` is a list of ``(column, probability)`` pairs; columns
    ``0..m-1`` are transient and ``m``, ``m + 1`` are the two absorbing
    states.  :class:`~pickleball_markov.transitions.TransitionModel` has
    the same shape.
    """

    def __init__(self, rows: Sequence[Sequence[tuple[int, Fraction]]], labels=None):
        self.rows = [[(c, as_fraction(v)) for c, v in row if v != 0] for row in rows]
        self.labels = list(labels) if labels is not None else list(range(len(rows)))

    @classmethod
    def from_dense(cls, Q, S, labels=None) -> "AbsorbingChain":
        m = len(Q)
        rows = []
        for r in range(m):
            row = [(c, Q[r][c]) for c in range(m) if Q[r][c] != 0]
            row += [(m + c, S[r][c]) for c in range(2) if S[r][c] != 0]
            rows.append(row)
        return cls(rows, labels)

    @property
    def m(self) -> int:
        return len(self.rows)

    def index(self, state) -> int:
        return self.labels.index(state)


@dataclass(frozen=True)
class ChainSummary:
    start: object
    absorb_prob_A: Fraction
    absorb_prob_B: Fraction
    mean_duration: Fraction
    duration_variance: Fraction

    @property
    def second_moment(self) -> Fraction:
        return self.duration_variance + self.mean_duration**2


def strongly_connected_components(adjacency: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative.

    Components come out in reverse topological order: every edge leaving a
    component points into a component listed earlier.
    """
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            succ = adjacency[v]
            if pos < len(succ):
                work[-1] = (v, pos + 1)
                w = succ[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                out.append(comp)
    return out


class _Structure:
    """Component decomposition of a chain's transient graph."""

    def __init__(self, rows):
        m = len(rows)
        self.m = m
        adjacency = [[c for c, _ in row if c < m] for row in rows]
        self.adjacency = adjacency
        self.components = strongly_connected_components(adjacency)
        self.component_of = [0] * m
        for ci, comp in enumerate(self.components):
            for v in comp:
                self.component_of[v] = ci

    def reachable(self, starts: Iterable[int]) -> list[bool]:
        seen = [False] * self.m
        todo = list(starts)
        for s in todo:
            seen[s] = True
        while todo:
            v = todo.pop()
            for w in self.adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    todo.append(w)
        return seen


_STRUCTURES: dict = {}


def _structure(chain) -> _Structure:
    skel = getattr(chain, "skeleton", None)
    if skel is not None:
        # Every parameter point of one (system, n) shares its skeleton, whose
        # edge set is a superset of any instantiation's nonzero pattern.
        key = ("skeleton", skel.system)
        if key not in _STRUCTURES:
            _STRUCTURES[key] = _Structure(skel.rows)
        return _STRUCTURES[key]
    cached = getattr(chain, "_structure_cache", None)
    if cached is None:
        cached = _Structure(chain.rows)
        chain._structure_cache = cached
    return cached


def _check_live(chain) -> None:
    params = getattr(chain, "params", None)
    if params is not None:
        params.require_live()


def _resolve_start(chain, start) -> int:
    if isinstance(start, Absorbed):
        raise DomainError("start state is absorbing; no transient summary exists")
    if isinstance(start, int) and not isinstance(start, bool):
        if not 0 <= start < chain.m:
            raise DomainError(f"start index {start} is not a transient state")
        return start
    system = getattr(chain, "system", None)
    if system is not None:
        return index_of(system, start)
    try:
        return chain.index(start)
    except ValueError:
        raise DomainError(f"unknown start state {start!r}") from None


def _dense_solve(A: list[list], B: list[list]) -> list[list]:
    """Solve ``A X = B`` exactly by Gauss-Jordan elimination, in place."""
    size = len(A)
    width = len(B[0]) if B else 0
    for col in range(size):
        pivot = next((r for r in range(col, size) if A[r][col] != 0), None)
        if pivot is None:
            raise DegenerateChainError("I - Q is singular: absorption is unreachable")
        if pivot != col:
            A[col], A[pivot] = A[pivot], A[col]
            B[col], B[pivot] = B[pivot], B[col]
        inv = 1 / A[col][col]
        rowA, rowB = A[col], B[col]
        for c in range(col, size):
            rowA[c] *= inv
        for c in range(width):
            rowB[c] *= inv
        for r in range(size):
            if r == col:
                continue
            factor = A[r][col]
            if factor == 0:
                continue
            ra, rb = A[r], B[r]
            for c in range(col, size):
                if rowA[c] != 0:
                    ra[c] -= factor * rowA[c]
            for c in range(width):
                if rowB[c] != 0:
                    rb[c] -= factor * rowB[c]
    return B


def solve(chain, starts: Iterable, quantities: Sequence[str] = QUANTITIES) -> dict:
    """Solve the requested quantities for every state reachable from ``starts``.

    ``quantities`` is any subset of ``"A"`` (absorption into the first
    absorbing state), ``"B"`` (the second), ``"t"`` (expected steps) and
    ``"u"`` (``M t``, needed for the variance; implies ``"t"``).  Returns a
    mapping ``quantity -> {state index -> Fraction}`` restricted to the
    requested starts.
    """
    _check_live(chain)
    start_idx = [_resolve_start(chain, s) for s in starts]
    quantities = list(quantities)
    for q in quantities:
        if q not in QUANTITIES:
            raise DomainError(f"unknown quantity {q!r}")
    if "u" in quantities and "t" not in quantities:
        quantities.append("t")
    first = [q for q in ("A", "B", "t") if q in quantities]
    want_u = "u" in quantities

    m = chain.m
    structure = _structure(chain)
    live = structure.reachable(start_idx)
    rows = [[(c, _num(v)) for c, v in row] for row in chain.rows] if _num is not Fraction else chain.rows
    values = {q: [None] * m for q in first}
    if want_u:
        values["u"] = [None] * m
    zero, one = _num(0), _num(1)
    for comp in structure.components:
        if not live[comp[0]]:
            continue
        local = {v: pos for pos, v in enumerate(comp)}
        size = len(comp)
        A = [[zero] * size for _ in range(size)]
        B = [[zero] * len(first) for _ in range(size)]
        for pos, v in enumerate(comp):
            A[pos][pos] += one
            rb = B[pos]
            for c, p in rows[v]:
                if c in local:
                    A[pos][local[c]] -= p
                elif c < m:
                    for qi, q in enumerate(first):
                        rb[qi] += p * values[q][c]
                else:
                    absorbed = "A" if c == m else "B"
                    for qi, q in enumerate(first):
                        if q == absorbed:
                            rb[qi] += p
            if "t" in first:
                rb[first.index("t")] += one
        if want_u:
            A_copy = [row[:] for row in A]
        X = _dense_solve(A, B)
        for pos, v in enumerate(comp):
            for qi, q in enumerate(first):
                values[q][v] = X[pos][qi]
        if want_u:
            Bu = [[zero] for _ in range(size)]
            for pos, v in enumerate(comp):
                acc = values["t"][v]
                for c, p in rows[v]:
                    if c < m and c not in local:
                        acc += p * values["u"][c]
                Bu[pos][0] = acc
            Xu = _dense_solve(A_copy, Bu)
            for pos, v in enumerate(comp):
                values["u"][v] = Xu[pos][0]
    return {
        q: {s: as_fraction(values[q][s]) for s in start_idx}
        for q in quantities
    }


def absorption_probabilities(chain, start) -> tuple[Fraction, Fraction]:
    s = _resolve_start(chain, start)
    out = solve(chain, [s], ("A", "B"))
    return out["A"][s], out["B"][s]


def expected_duration(chain, start) -> Fraction:
    s = _resolve_start(chain, start)
    return solve(chain, [s], ("t",))["t"][s]


def duration_variance(chain, start) -> Fraction:
    s = _resolve_start(chain, start)
    out = solve(chain, [s], ("t", "u"))
    t, u = out["t"][s], out["u"][s]
    return 2 * u - t - t * t


def chain_summary(chain, start) -> ChainSummary:
    s = _resolve_start(chain, start)
    out = solve(chain, [s])
    t, u = out["t"][s], out["u"][s]
    return ChainSummary(
        start=start,
        absorb_prob_A=out["A"][s],
        absorb_prob_B=out["B"][s],
        mean_duration=t,
        duration_variance=2 * u - t - t * t,
    )


def solve_float(chain, starts: Iterable) -> dict:
    """Double-precision mirror of :func:`solve` via a sparse LU factorization.

    Suitable for bulk tables of win probabilities and durations.  Never use
    it for first-server advantages, whose size is far below the rounding
    error of the two probabilities being subtracted.
    """
    import numpy as np
    from scipy.sparse import csc_matrix, identity
    from scipy.sparse.linalg import splu

    _check_live(chain)
    start_idx = [_resolve_start(chain, s) for s in starts]
    m = chain.m
    r_idx, c_idx, vals = [], [], []
    rhs = np.zeros((m, 2))
    for r, row in enumerate(chain.rows):
        for c, p in row:
            if c < m:
                r_idx.append(r)
                c_idx.append(c)
                vals.append(float(p))
            else:
                rhs[r, c - m] += float(p)
    Q = csc_matrix((vals, (r_idx, c_idx)), shape=(m, m))
    lu = splu((identity(m, format="csc") - Q).tocsc())
    absorb = lu.solve(rhs)
    t = lu.solve(np.ones(m))
    u = lu.solve(t)
    return {
        "A": {s: float(absorb[s, 0]) for s in start_idx},
        "B": {s: float(absorb[s, 1]) for s in start_idx},
        "t": {s: float(t[s]) for s in start_idx},
        "u": {s: float(u[s]) for s in start_idx},
    }
