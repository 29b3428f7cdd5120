"""Monte Carlo playout of pickleball doubles games.

Games are played from the rules themselves (who serves, who may score,
when the serve passes) and never from the transition tables, so agreement
with the exact solver is an independent check on both.

Randomness is counter-based: the uniform variate for rally ``r`` of game
``g`` under seed ``s`` is a SplitMix64 hash of ``(s, g, r)``.  Results are
therefore identical however the games are split into chunks or workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import DegenerateChainError, DomainError, RunawayGameError
from .states import ScoringSystem, System, Team

__all__ = [
    "SimConfig",
    "SimEstimate",
    "simulate",
    "simulate_advantage",
    "splitmix64",
    "uniforms",
    "MAX_RALLIES",
    "FAIR_COIN",
]

MAX_RALLIES = 10**7
FAIR_COIN = "coin"
CHUNK = 1 << 16

_MASK = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_COIN_SALT = np.uint64(0xD1B54A32D192ED03)


def splitmix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 output function (Steele, Lea & Flood 2014) on uint64 arrays."""
    with np.errstate(over="ignore"):
        z = x + _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _game_keys(seed: int, games: np.ndarray) -> np.ndarray:
    root = splitmix64(np.array([seed & _MASK], dtype=np.uint64))[0]
    with np.errstate(over="ignore"):
        return splitmix64(root ^ (games.astype(np.uint64) * _GAMMA))


def uniforms(keys: np.ndarray, rally: Union[int, np.ndarray]) -> np.ndarray:
    """Doubles in ``[0, 1)`` from the top 53 bits of ``hash(key + rally * gamma)``."""
    with np.errstate(over="ignore"):
        bits = splitmix64(keys + np.asarray(rally, dtype=np.uint64) * _GAMMA)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class SimConfig:
    system: ScoringSystem
    p_A: float
    p_B: float
    first_server: Union[Team, str] = Team.A
    num_games: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p_A", float(self.p_A))
        object.__setattr__(self, "p_B", float(self.p_B))
        if not (0 <= self.p_A <= 1 and 0 <= self.p_B <= 1):
            raise DomainError("rally probabilities must lie in [0, 1]")
        if self.p_A + self.p_B == 0:
            raise DegenerateChainError("p_A = p_B = 0: simulated games would never end")
        if self.num_games < 1:
            raise DomainError("num_games must be at least 1")
        if self.first_server != FAIR_COIN:
            object.__setattr__(self, "first_server", Team(self.first_server))


@dataclass(frozen=True)
class SimEstimate:
    games: int
    wins_A: int
    duration_sum: int
    duration_sq_sum: int

    @property
    def win_freq_A(self) -> float:
        return self.wins_A / self.games

    @property
    def mean_duration(self) -> float:
        return self.duration_sum / self.games

    @property
    def sd_duration(self) -> float:
        if self.games < 2:
            return 0.0
        # exact integer arithmetic until the final division
        num = self.games * self.duration_sq_sum - self.duration_sum**2
        return math.sqrt(num / (self.games * (self.games - 1)))

    @property
    def standard_error_win(self) -> float:
        w = self.win_freq_A
        return math.sqrt(w * (1 - w) / self.games)

    @property
    def standard_error_duration(self) -> float:
        return self.sd_duration / math.sqrt(self.games)

    def as_dict(self) -> dict:
        return {
            "games": self.games,
            "wins_A": self.wins_A,
            "win_freq_A": self.win_freq_A,
            "standard_error_win": self.standard_error_win,
            "mean_duration": self.mean_duration,
            "sd_duration": self.sd_duration,
            "standard_error_duration": self.standard_error_duration,
        }


def _play(config: SimConfig, start: int, stop: int) -> tuple[int, int, int]:
    """Play games ``start..stop-1``; returns (A wins, sum T, sum T^2)."""
    kind, n = config.system.kind, config.system.n
    two_servers = kind is not System.MODIFIED_RALLY
    rally_scoring = kind is not System.SIDE_OUT

    ids = np.arange(start, stop, dtype=np.int64)
    keys = _game_keys(config.seed, ids)
    size = len(ids)
    if config.first_server == FAIR_COIN:
        with np.errstate(over="ignore"):
            serving = (splitmix64(keys ^ _COIN_SALT) & np.uint64(1)).astype(np.int8)
    else:
        serving = np.full(size, 0 if config.first_server is Team.A else 1, dtype=np.int8)
    # Two-server systems open on the second server: one fault passes the serve.
    server = np.full(size, 2 if two_servers else 1, dtype=np.int8)
    score = np.zeros((2, size), dtype=np.int64)
    p_serve = np.array([config.p_A, config.p_B])

    wins_A = dur_sum = dur_sq = 0
    rally = 0
    while size:
        if rally >= MAX_RALLIES:
            raise RunawayGameError(f"{size} games still running after {MAX_RALLIES} rallies")
        u = uniforms(keys, rally)
        rally += 1
        server_won = u < p_serve[serving]
        winner = np.where(server_won, serving, 1 - serving)
        idx = np.arange(size)
        own = score[winner, idx]
        opp = score[1 - winner, idx]
        if rally_scoring:
            # A receiving team on game point, or within three of a team on
            # game point, cannot score on the serving team's fault.
            frozen = (own >= n - 1) | ((opp >= n - 1) & (own >= n - 3))
            scores = server_won | ~frozen
        else:
            scores = server_won
        score[winner[scores], idx[scores]] += 1

        fault = ~server_won
        if two_servers:
            first_turn = fault & (server == 1)
            side_out = fault & (server == 2)
            server[first_turn] = 2
            serving[side_out] = 1 - serving[side_out]
            server[side_out] = 1
        else:
            serving[fault] = 1 - serving[fault]

        a, b = score[0], score[1]
        over = (np.maximum(a, b) >= n) & (np.abs(a - b) >= 2)
        if over.any():
            wins_A += int(np.count_nonzero(a[over] > b[over]))
            finished = int(np.count_nonzero(over))
            dur_sum += rally * finished
            dur_sq += rally * rally * finished
            keep = ~over
            keys, serving, server = keys[keep], serving[keep], server[keep]
            score = score[:, keep]
            size = len(keys)
    return wins_A, dur_sum, dur_sq


def _play_chunk(job):
    config, start, stop = job
    return _play(config, start, stop)


def simulate(config: SimConfig, workers: int = 1) -> SimEstimate:
    """Play ``config.num_games`` games and tally wins and durations.

    Game ``g`` always draws the same variates, so the tallies (exact
    integer sums) do not depend on ``workers`` or chunking.
    """
    bounds = list(range(0, config.num_games, CHUNK)) + [config.num_games]
    jobs = [(config, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_play_chunk, jobs))
    else:
        parts = [_play_chunk(job) for job in jobs]
    wins, s1, s2 = (sum(col) for col in zip(*parts))
    return SimEstimate(config.num_games, wins, s1, s2)


def _substream_seed(seed: int, stream: int) -> int:
    x = np.array([(seed * 0x100000001B3 + stream) & _MASK], dtype=np.uint64)
    return int(splitmix64(x)[0])


def simulate_advantage(
    system: ScoringSystem,
    p_A: float,
    p_B: float,
    games_per_condition: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float, SimEstimate, SimEstimate]:
    """Estimate ``P(A wins | A first) - P(A wins | B first)``.

    The two conditions run on independent substreams of ``seed``.  Returns
    ``(estimate, standard_error, estimate_A_first, estimate_B_first)``.
    """
    est = {}
    for stream, team in enumerate((Team.A, Team.B), start=1):
        cfg = SimConfig(system, p_A, p_B, team, games_per_condition, _substream_seed(seed, stream))
        est[team] = simulate(cfg, workers)
    a, b = est[Team.A], est[Team.B]
    diff = a.win_freq_A - b.win_freq_A
    se = math.hypot(a.standard_error_win, b.standard_error_win)
    return diff, se, a, b
