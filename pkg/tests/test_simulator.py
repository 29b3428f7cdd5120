import math
from fractions import Fraction

import numpy as np
import pytest

from pickleball_markov import simulator
from pickleball_markov.analytics import comparison_row, first_server_advantage, win_probability
from pickleball_markov.exceptions import DegenerateChainError, DomainError, RunawayGameError
from pickleball_markov.simulator import SimConfig, SimEstimate, simulate, simulate_advantage, uniforms
from pickleball_markov.states import ScoringSystem, System, Team

SO11 = ScoringSystem(System.SIDE_OUT, 11)


def test_uniforms_in_unit_interval():
    u = uniforms(np.arange(10_000, dtype=np.uint64), 3)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.02


@pytest.mark.parametrize("kind", list(System))
def test_certain_rallies(kind):
    system = ScoringSystem(kind, 11)
    est = simulate(SimConfig(system, 1.0, 1.0, Team.A, 50, seed=1))
    assert est.wins_A == 50
    assert est.mean_duration == 11 and est.sd_duration == 0


def test_first_server_always_wins_when_unbeatable():
    diff, se, a, b = simulate_advantage(SO11, 1.0, 1.0, 100, seed=0)
    assert diff == 1.0 and se == 0.0
    assert (a.wins_A, b.wins_A) == (100, 0)


@pytest.mark.parametrize("workers", [1, 2, 8])
def test_worker_count_does_not_change_tallies(workers):
    config = SimConfig(ScoringSystem(System.MODIFIED_RALLY, 7), 0.45, 0.5, "coin", simulator.CHUNK + 500, 99)
    assert simulate(config, workers=workers) == simulate(config)


def test_chunking_does_not_change_tallies(monkeypatch):
    config = SimConfig(SO11, 0.44, 0.47, Team.B, 3000, 5)
    whole = simulate(config)
    monkeypatch.setattr(simulator, "CHUNK", 128)
    assert simulate(config) == whole


def test_seeds_differ():
    a = simulate(SimConfig(SO11, 0.44, 0.44, Team.A, 2000, 1))
    b = simulate(SimConfig(SO11, 0.44, 0.44, Team.A, 2000, 2))
    assert a != b


@pytest.mark.parametrize("kind, n", [(System.SIDE_OUT, 7), (System.MODIFIED_RALLY, 11), (System.HYBRID_RALLY, 9)])
@pytest.mark.parametrize("first", [Team.A, Team.B])
def test_agrees_with_exact_solution(kind, n, first):
    system = ScoringSystem(kind, n)
    params = (Fraction(2, 5), Fraction(11, 20))
    exact = win_probability(system, None, params, first)
    est = simulate(SimConfig(system, 0.4, 0.55, first, 40_000, seed=11))
    assert abs(est.win_freq_A - float(exact)) < 4 * est.standard_error_win


def test_duration_moments_agree_with_exact():
    system = ScoringSystem(System.SIDE_OUT, 7)
    row = comparison_row(system, None, (Fraction(1, 2), Fraction(1, 2)))
    est = simulate(SimConfig(system, 0.5, 0.5, "coin", 40_000, seed=3))
    assert abs(est.mean_duration - float(row.mean_duration)) < 4 * est.standard_error_duration
    assert est.sd_duration == pytest.approx(float(row.sd_duration), rel=0.03)


def test_advantage_estimate_consistent():
    system = ScoringSystem(System.MODIFIED_RALLY, 11)
    exact = first_server_advantage(system, None, (Fraction(3, 10), Fraction(3, 10))).value
    diff, se, _, _ = simulate_advantage(system, 0.3, 0.3, 40_000, seed=8)
    assert abs(diff - float(exact)) < 4 * se


def test_estimate_statistics():
    est = SimEstimate(games=4, wins_A=1, duration_sum=40, duration_sq_sum=420)
    assert est.win_freq_A == 0.25
    assert est.mean_duration == 10
    assert est.sd_duration == pytest.approx(math.sqrt((420 - 400) / 3))
    assert est.standard_error_win == pytest.approx(math.sqrt(0.25 * 0.75 / 4))
    assert set(est.as_dict()) >= {"games", "win_freq_A", "sd_duration"}


def test_config_validation():
    with pytest.raises(DegenerateChainError):
        SimConfig(SO11, 0, 0)
    with pytest.raises(DomainError):
        SimConfig(SO11, 1.2, 0.5)
    with pytest.raises(DomainError):
        SimConfig(SO11, 0.5, 0.5, num_games=0)


def test_runaway_guard(monkeypatch):
    monkeypatch.setattr(simulator, "MAX_RALLIES", 5)
    with pytest.raises(RunawayGameError):
        simulate(SimConfig(SO11, 0.5, 0.5, Team.A, 10, 0))
