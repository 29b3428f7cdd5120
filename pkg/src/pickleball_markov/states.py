"""State spaces of the three scoring systems.

A live state is a score ``(i, j)`` for Teams A and B plus a server code
``k``.  Side-out and hybrid scoring use four codes (A's first and second
server, B's first and second server); modified rally scoring uses two
(A serving, B serving).  Scores run over ``{0..n-1}^2`` plus the two
advantage scores ``(n-1, n)`` and ``(n, n-1)``, which together with
``(n-1, n-1)`` keep the win-by-two rule on a finite space.

Transient states are ordered lexicographically by ``(i, j, k)`` and are
followed by ``WIN_A`` and ``WIN_B``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Union

from .exceptions import DomainError

__all__ = [
    "System",
    "Team",
    "ScoringSystem",
    "Transient",
    "Absorbed",
    "GameState",
    "WIN_A",
    "WIN_B",
    "enumerate_states",
    "index_of",
    "state_of",
    "initial_state",
    "state_label",
    "parse_state_label",
    "MIN_TARGET",
]

MIN_TARGET = 4


class System(enum.Enum):
    SIDE_OUT = "side-out"
    MODIFIED_RALLY = "modified-rally"
    HYBRID_RALLY = "hybrid-rally"

    @classmethod
    def parse(cls, value: Union[str, "System"]) -> "System":
        if isinstance(value, System):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {
            "sideout": "side-out",
            "so": "side-out",
            "modified": "modified-rally",
            "mr": "modified-rally",
            "rally": "modified-rally",
            "hybrid": "hybrid-rally",
            "hr": "hybrid-rally",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown scoring system {value!r}") from None

    @property
    def server_codes(self) -> tuple[int, ...]:
        return (1, 2) if self is System.MODIFIED_RALLY else (1, 2, 3, 4)


class Team(enum.Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Team":
        return Team.B if self is Team.A else Team.A


class Transient(NamedTuple):
    i: int
    j: int
    k: int


class Absorbed(NamedTuple):
    winner: Team


GameState = Union[Transient, Absorbed]

WIN_A = Absorbed(Team.A)
WIN_B = Absorbed(Team.B)


@dataclass(frozen=True)
class ScoringSystem:
    """A scoring system together with its target score ``n``."""

    kind: System
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", System.parse(self.kind))
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise DomainError(f"target score must be an integer, got {self.n!r}")
        if self.n < MIN_TARGET:
            raise DomainError(f"target score must be at least {MIN_TARGET}, got {self.n}")

    @property
    def server_codes(self) -> tuple[int, ...]:
        return self.kind.server_codes

    @cached_property
    def scores(self) -> tuple[tuple[int, int], ...]:
        n = self.n
        cells = [(i, j) for i in range(n) for j in range(n)]
        cells += [(n - 1, n), (n, n - 1)]
        return tuple(sorted(cells))

    @cached_property
    def states(self) -> tuple[GameState, ...]:
        live = [Transient(i, j, k) for i, j in self.scores for k in self.server_codes]
        return tuple(live) + (WIN_A, WIN_B)

    @cached_property
    def _index(self) -> dict:
        return {s: idx for idx, s in enumerate(self.states)}

    @property
    def n_transient(self) -> int:
        return len(self.states) - 2

    def __str__(self) -> str:
        return f"{self.kind.value}-{self.n}"


def enumerate_states(system: ScoringSystem) -> list[GameState]:
    """All states in canonical order: transient ``(i, j, k)`` then WIN_A, WIN_B.

    >>> len(enumerate_states(ScoringSystem(System.SIDE_OUT, 11)))
    494
    """
    return list(system.states)


def index_of(system: ScoringSystem, state: GameState) -> int:
    try:
        return system._index[state]
    except (KeyError, TypeError):
        raise DomainError(f"{state!r} is not a state of {system}") from None


def state_of(system: ScoringSystem, index: int) -> GameState:
    if not 0 <= index < len(system.states):
        raise DomainError(f"index {index} out of range for {system}")
    return system.states[index]


def initial_state(system: ScoringSystem, first_server: Team) -> Transient:
    """Opening state.

    Side-out and hybrid games open on the first server's *second* server
    code, since the first serving team only gets one fault.
    """
    first_server = Team(first_server)
    if system.kind is System.MODIFIED_RALLY:
        return Transient(0, 0, 1 if first_server is Team.A else 2)
    return Transient(0, 0, 2 if first_server is Team.A else 4)


def state_label(state: GameState) -> str:
    if isinstance(state, Absorbed):
        return f"WIN_{state.winner.value}"
    return f"{state.i}-{state.j}-{state.k}"


def parse_state_label(text: str) -> GameState:
    text = text.strip()
    if text in ("WIN_A", "WIN_B"):
        return WIN_A if text == "WIN_A" else WIN_B
    try:
        i, j, k = (int(part) for part in text.split("-"))
    except ValueError:
        raise DomainError(f"bad state label {text!r}") from None
    return Transient(i, j, k)
