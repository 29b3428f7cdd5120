"""Exact one-step transition blocks ``(Q, S)`` for the three scoring systems.

Each system's table is written as a handful of block generators that mirror
the natural layout: interior scores, rows with Team B on ``n-1``, rows
with Team A on ``n-1``, and the deuce/advantage cluster.  A generator yields
``(from_state, to_state, weight)`` triples where ``weight`` is one of the
symbols ``"pA"``, ``"qA"``, ``"pB"``, ``"qB"``.  The symbolic skeleton is
built once per ``(system, n)`` and instantiated for each parameter point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .exceptions import DegenerateChainError, DomainError
from .rational import as_fraction, format_fraction
from .states import (
    WIN_A,
    WIN_B,
    GameState,
    ScoringSystem,
    System,
    Transient,
    state_label,
)

__all__ = [
    "RallyParams",
    "SparseRationalMatrix",
    "TransitionModel",
    "Skeleton",
    "skeleton",
    "build_model",
    "build_side_out",
    "build_modified_rally",
    "build_hybrid",
    "dump_model",
]

T = Transient
Entry = tuple[GameState, GameState, str]


@dataclass(frozen=True)
class RallyParams:
    """Probabilities that Team A / Team B win a rally on their own serve."""

    p_A: Fraction
    p_B: Fraction

    def __post_init__(self):
        for name in ("p_A", "p_B"):
            value = as_fraction(getattr(self, name))
            if not 0 <= value <= 1:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")
            object.__setattr__(self, name, value)

    @property
    def q_A(self) -> Fraction:
        return 1 - self.p_A

    @property
    def q_B(self) -> Fraction:
        return 1 - self.p_B

    @property
    def degenerate(self) -> bool:
        return self.p_A + self.p_B == 0

    def require_live(self) -> None:
        if self.degenerate:
            raise DegenerateChainError(
                "p_A = p_B = 0: the serving team never wins a rally, so no "
                "team can ever win and I - Q is singular"
            )

    def swapped(self) -> "RallyParams":
        return RallyParams(self.p_B, self.p_A)

    def weights(self) -> dict[str, Fraction]:
        return {"pA": self.p_A, "qA": self.q_A, "pB": self.p_B, "qB": self.q_B}


# -- side-out ---------------------------------------------------------------


def _side_out_interior(n: int) -> Iterator[Entry]:
    for i in range(n - 1):
        for j in range(n - 1):
            yield T(i, j, 1), T(i + 1, j, 1), "pA"
            yield T(i, j, 1), T(i, j, 2), "qA"
            yield T(i, j, 2), T(i + 1, j, 2), "pA"
            yield T(i, j, 2), T(i, j, 3), "qA"
            yield T(i, j, 3), T(i, j + 1, 3), "pB"
            yield T(i, j, 3), T(i, j, 4), "qB"
            yield T(i, j, 4), T(i, j + 1, 4), "pB"
            yield T(i, j, 4), T(i, j, 1), "qB"


def _side_out_b_at_game_point(n: int) -> Iterator[Entry]:
    j = n - 1
    for i in range(n - 1):
        yield T(i, j, 1), T(i + 1, j, 1), "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), T(i + 1, j, 2), "pA"
        yield T(i, j, 2), T(i, j, 3), "qA"
        yield T(i, j, 3), WIN_B, "pB"
        yield T(i, j, 3), T(i, j, 4), "qB"
        yield T(i, j, 4), WIN_B, "pB"
        yield T(i, j, 4), T(i, j, 1), "qB"


def _side_out_a_at_game_point(n: int) -> Iterator[Entry]:
    i = n - 1
    for j in range(n - 1):
        yield T(i, j, 1), WIN_A, "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), WIN_A, "pA"
        yield T(i, j, 2), T(i, j, 3), "qA"
        yield T(i, j, 3), T(i, j + 1, 3), "pB"
        yield T(i, j, 3), T(i, j, 4), "qB"
        yield T(i, j, 4), T(i, j + 1, 4), "pB"
        yield T(i, j, 4), T(i, j, 1), "qB"


def _four_server_deuce(n: int) -> Iterator[Entry]:
    # Shared verbatim by side-out and hybrid scoring.
    d, adv_b, adv_a = (n - 1, n - 1), (n - 1, n), (n, n - 1)
    yield T(*d, 1), T(*adv_a, 1), "pA"
    yield T(*d, 1), T(*d, 2), "qA"
    yield T(*d, 2), T(*adv_a, 2), "pA"
    yield T(*d, 2), T(*d, 3), "qA"
    yield T(*d, 3), T(*adv_b, 3), "pB"
    yield T(*d, 3), T(*d, 4), "qB"
    yield T(*d, 4), T(*adv_b, 4), "pB"
    yield T(*d, 4), T(*d, 1), "qB"

    yield T(*adv_b, 1), T(*d, 1), "pA"
    yield T(*adv_b, 1), T(*adv_b, 2), "qA"
    yield T(*adv_b, 2), T(*d, 2), "pA"
    yield T(*adv_b, 2), T(*adv_b, 3), "qA"
    yield T(*adv_b, 3), WIN_B, "pB"
    yield T(*adv_b, 3), T(*adv_b, 4), "qB"
    yield T(*adv_b, 4), WIN_B, "pB"
    yield T(*adv_b, 4), T(*adv_b, 1), "qB"

    yield T(*adv_a, 1), WIN_A, "pA"
    yield T(*adv_a, 1), T(*adv_a, 2), "qA"
    yield T(*adv_a, 2), WIN_A, "pA"
    yield T(*adv_a, 2), T(*adv_a, 3), "qA"
    yield T(*adv_a, 3), T(*d, 3), "pB"
    yield T(*adv_a, 3), T(*adv_a, 4), "qB"
    yield T(*adv_a, 4), T(*d, 4), "pB"
    yield T(*adv_a, 4), T(*adv_a, 1), "qB"


SIDE_OUT_BLOCKS = (
    _side_out_interior,
    _side_out_b_at_game_point,
    _side_out_a_at_game_point,
    _four_server_deuce,
)


# -- modified rally -----------------------------------------------------------


def _rally_interior(n: int) -> Iterator[Entry]:
    for i in range(n - 1):
        for j in range(n - 1):
            yield T(i, j, 1), T(i + 1, j, 1), "pA"
            yield T(i, j, 1), T(i, j + 1, 2), "qA"
            yield T(i, j, 2), T(i, j + 1, 2), "pB"
            yield T(i, j, 2), T(i + 1, j, 1), "qB"


def _rally_b_at_game_point(n: int) -> Iterator[Entry]:
    j = n - 1
    # Team A still scores on B's faults while it trails by enough.
    for i in range(n - 3):
        yield T(i, j, 1), T(i + 1, j, 1), "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), WIN_B, "pB"
        yield T(i, j, 2), T(i + 1, j, 1), "qB"
    # From n-3 on, Team A scores only when serving.
    for i in (n - 3, n - 2):
        yield T(i, j, 1), T(i + 1, j, 1), "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), WIN_B, "pB"
        yield T(i, j, 2), T(i, j, 1), "qB"


def _rally_a_at_game_point(n: int) -> Iterator[Entry]:
    i = n - 1
    for j in range(n - 3):
        yield T(i, j, 1), WIN_A, "pA"
        yield T(i, j, 1), T(i, j + 1, 2), "qA"
        yield T(i, j, 2), T(i, j + 1, 2), "pB"
        yield T(i, j, 2), T(i, j, 1), "qB"
    for j in (n - 3, n - 2):
        yield T(i, j, 1), WIN_A, "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), T(i, j + 1, 2), "pB"
        yield T(i, j, 2), T(i, j, 1), "qB"


def _rally_deuce(n: int) -> Iterator[Entry]:
    d, adv_b, adv_a = (n - 1, n - 1), (n - 1, n), (n, n - 1)
    yield T(*d, 1), T(*adv_a, 1), "pA"
    yield T(*d, 1), T(*d, 2), "qA"
    yield T(*d, 2), T(*adv_b, 2), "pB"
    yield T(*d, 2), T(*d, 1), "qB"

    yield T(*adv_b, 1), T(*d, 1), "pA"
    yield T(*adv_b, 1), T(*adv_b, 2), "qA"
    yield T(*adv_b, 2), WIN_B, "pB"
    yield T(*adv_b, 2), T(*adv_b, 1), "qB"

    yield T(*adv_a, 1), WIN_A, "pA"
    yield T(*adv_a, 1), T(*adv_a, 2), "qA"
    yield T(*adv_a, 2), T(*d, 2), "pB"
    yield T(*adv_a, 2), T(*adv_a, 1), "qB"


MODIFIED_RALLY_BLOCKS = (
    _rally_interior,
    _rally_b_at_game_point,
    _rally_a_at_game_point,
    _rally_deuce,
)


# -- hybrid rally -------------------------------------------------------------


def _hybrid_interior(n: int) -> Iterator[Entry]:
    for i in range(n - 1):
        for j in range(n - 1):
            yield T(i, j, 1), T(i + 1, j, 1), "pA"
            yield T(i, j, 1), T(i, j + 1, 2), "qA"
            yield T(i, j, 2), T(i + 1, j, 2), "pA"
            yield T(i, j, 2), T(i, j + 1, 3), "qA"
            yield T(i, j, 3), T(i, j + 1, 3), "pB"
            yield T(i, j, 3), T(i + 1, j, 4), "qB"
            yield T(i, j, 4), T(i, j + 1, 4), "pB"
            yield T(i, j, 4), T(i + 1, j, 1), "qB"


def _hybrid_b_at_game_point(n: int) -> Iterator[Entry]:
    j = n - 1
    for i in range(n - 3):
        yield T(i, j, 1), T(i + 1, j, 1), "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), T(i + 1, j, 2), "pA"
        yield T(i, j, 2), T(i, j, 3), "qA"
        yield T(i, j, 3), WIN_B, "pB"
        yield T(i, j, 3), T(i + 1, j, 4), "qB"
        yield T(i, j, 4), WIN_B, "pB"
        yield T(i, j, 4), T(i + 1, j, 1), "qB"
    for i in (n - 3, n - 2):
        yield T(i, j, 1), T(i + 1, j, 1), "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), T(i + 1, j, 2), "pA"
        yield T(i, j, 2), T(i, j, 3), "qA"
        yield T(i, j, 3), WIN_B, "pB"
        yield T(i, j, 3), T(i, j, 4), "qB"
        yield T(i, j, 4), WIN_B, "pB"
        yield T(i, j, 4), T(i, j, 1), "qB"


def _hybrid_a_at_game_point(n: int) -> Iterator[Entry]:
    i = n - 1
    for j in range(n - 3):
        yield T(i, j, 1), WIN_A, "pA"
        yield T(i, j, 1), T(i, j + 1, 2), "qA"
        yield T(i, j, 2), WIN_A, "pA"
        yield T(i, j, 2), T(i, j + 1, 3), "qA"
        yield T(i, j, 3), T(i, j + 1, 3), "pB"
        yield T(i, j, 3), T(i, j, 4), "qB"
        yield T(i, j, 4), T(i, j + 1, 4), "pB"
        yield T(i, j, 4), T(i, j, 1), "qB"
    for j in (n - 3, n - 2):
        yield T(i, j, 1), WIN_A, "pA"
        yield T(i, j, 1), T(i, j, 2), "qA"
        yield T(i, j, 2), WIN_A, "pA"
        yield T(i, j, 2), T(i, j, 3), "qA"
        yield T(i, j, 3), T(i, j + 1, 3), "pB"
        yield T(i, j, 3), T(i, j, 4), "qB"
        yield T(i, j, 4), T(i, j + 1, 4), "pB"
        yield T(i, j, 4), T(i, j, 1), "qB"


HYBRID_BLOCKS = (
    _hybrid_interior,
    _hybrid_b_at_game_point,
    _hybrid_a_at_game_point,
    _four_server_deuce,
)

BLOCKS = {
    System.SIDE_OUT: SIDE_OUT_BLOCKS,
    System.MODIFIED_RALLY: MODIFIED_RALLY_BLOCKS,
    System.HYBRID_RALLY: HYBRID_BLOCKS,
}


# -- assembled models ---------------------------------------------------------


@dataclass(frozen=True)
class Skeleton:
    """Parameter-free transition structure of one ``(system, n)``.

    ``rows[r]`` lists ``(column, symbol)`` pairs for transient row ``r``;
    columns ``>= m`` address the absorbing states (``m`` for WIN_A,
    ``m + 1`` for WIN_B).
    """

    system: ScoringSystem
    rows: tuple[tuple[tuple[int, str], ...], ...]

    @property
    def m(self) -> int:
        return len(self.rows)


def collect_entries(blocks: Iterable, n: int) -> dict[tuple[GameState, GameState], str]:
    """Merge block generators, refusing to write any cell twice."""
    table: dict[tuple[GameState, GameState], str] = {}
    for block in blocks:
        for src, dst, sym in block(n):
            key = (src, dst)
            if key in table:
                raise AssertionError(
                    f"{block.__name__} rewrites Q[{state_label(src)}, {state_label(dst)}]"
                )
            table[key] = sym
    return table


@lru_cache(maxsize=64)
def skeleton(system: ScoringSystem) -> Skeleton:
    table = collect_entries(BLOCKS[system.kind], system.n)
    index = system._index
    m = system.n_transient
    rows: list[list[tuple[int, str]]] = [[] for _ in range(m)]
    for (src, dst), sym in table.items():
        r = index[src]
        if r >= m:
            raise AssertionError(f"absorbing row {src} in table")
        rows[r].append((index[dst], sym))
    for r, row in enumerate(rows):
        if not row:
            raise AssertionError(f"row {state_label(system.states[r])} left empty")
        row.sort()
    return Skeleton(system, tuple(tuple(row) for row in rows))


@dataclass
class SparseRationalMatrix:
    n_rows: int
    n_cols: int
    entries: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def row(self, r: int) -> dict[int, Fraction]:
        return {c: v for (rr, c), v in self.entries.items() if rr == r}

    def nnz(self) -> int:
        return len(self.entries)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def to_dense(self) -> list[list[Fraction]]:
        dense = [[Fraction(0)] * self.n_cols for _ in range(self.n_rows)]
        for (r, c), v in self.entries.items():
            dense[r][c] = v
        return dense


class TransitionModel:
    """Instantiated chain: sparse ``Q`` (m x m) and ``S`` (m x 2)."""

    def __init__(self, system: ScoringSystem, params: RallyParams):
        self.system = system
        self.params = params
        self.skeleton = skeleton(system)
        weights = params.weights()
        self.rows: list[list[tuple[int, Fraction]]] = [
            [(c, weights[sym]) for c, sym in row if weights[sym] != 0]
            for row in self.skeleton.rows
        ]
        self._Q = None
        self._S = None

    @property
    def m(self) -> int:
        return self.skeleton.m

    @property
    def states(self):
        return self.system.states

    def _split(self):
        m = self.m
        Q = SparseRationalMatrix(m, m)
        S = SparseRationalMatrix(m, 2)
        for r, row in enumerate(self.rows):
            for c, v in row:
                if c < m:
                    Q.entries[(r, c)] = v
                else:
                    S.entries[(r, c - m)] = v
        self._Q, self._S = Q, S

    @property
    def Q(self) -> SparseRationalMatrix:
        if self._Q is None:
            self._split()
        return self._Q

    @property
    def S(self) -> SparseRationalMatrix:
        if self._S is None:
            self._split()
        return self._S

    def __repr__(self) -> str:
        return f"TransitionModel({self.system}, p_A={self.params.p_A}, p_B={self.params.p_B})"


def _coerce_params(params) -> RallyParams:
    if isinstance(params, RallyParams):
        return params
    p_A, p_B = params
    return RallyParams(p_A, p_B)


def build_model(system: ScoringSystem, params) -> TransitionModel:
    return TransitionModel(system, _coerce_params(params))


def build_side_out(n: int, params) -> TransitionModel:
    return build_model(ScoringSystem(System.SIDE_OUT, n), params)


def build_modified_rally(n: int, params) -> TransitionModel:
    return build_model(ScoringSystem(System.MODIFIED_RALLY, n), params)


def build_hybrid(n: int, params) -> TransitionModel:
    return build_model(ScoringSystem(System.HYBRID_RALLY, n), params)


def dump_model(model: TransitionModel) -> str:
    """Text dump, one ``row_state col_state value`` triple per line."""
    states = model.states
    lines = []
    for r, row in enumerate(model.rows):
        for c, v in row:
            lines.append(f"{state_label(states[r])} {state_label(states[c])} {format_fraction(v)}")
    return "\n".join(lines) + "\n"
