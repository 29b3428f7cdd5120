import pytest

from pickleball_markov.exceptions import DomainError
from pickleball_markov.states import (
    WIN_A,
    WIN_B,
    ScoringSystem,
    System,
    Team,
    Transient,
    enumerate_states,
    index_of,
    initial_state,
    parse_state_label,
    state_label,
    state_of,
)


@pytest.mark.parametrize("n", range(4, 26))
@pytest.mark.parametrize("kind, codes", [(System.SIDE_OUT, 4), (System.MODIFIED_RALLY, 2),
                                         (System.HYBRID_RALLY, 4)])
def test_state_counts(kind, codes, n):
    states = enumerate_states(ScoringSystem(kind, n))
    assert len(states) == codes * (n * n + 2) + 2
    assert states[-2:] == [WIN_A, WIN_B]


def test_side_out_11_has_494_states():
    assert len(enumerate_states(ScoringSystem(System.SIDE_OUT, 11))) == 494


def test_canonical_order_is_lexicographic():
    system = ScoringSystem(System.MODIFIED_RALLY, 5)
    live = enumerate_states(system)[:-2]
    assert live == sorted(live)
    assert Transient(4, 5, 1) in live and Transient(5, 4, 2) in live
    assert Transient(5, 5, 1) not in live


def test_index_round_trip():
    system = ScoringSystem(System.HYBRID_RALLY, 7)
    for idx, state in enumerate(system.states):
        assert index_of(system, state) == idx
        assert state_of(system, idx) == state


def test_unknown_state_is_domain_error():
    system = ScoringSystem(System.SIDE_OUT, 11)
    with pytest.raises(DomainError):
        index_of(system, Transient(11, 11, 1))
    with pytest.raises(DomainError):
        index_of(system, Transient(0, 0, 5))
    with pytest.raises(DomainError):
        state_of(system, 494)


@pytest.mark.parametrize("n", [3, 0, -1])
def test_small_targets_rejected(n):
    with pytest.raises(DomainError):
        ScoringSystem(System.SIDE_OUT, n)


def test_system_aliases():
    assert System.parse("side-out") is System.SIDE_OUT
    assert System.parse(System.HYBRID_RALLY) is System.HYBRID_RALLY
    with pytest.raises(DomainError):
        System.parse("tennis")


def test_initial_states():
    so = ScoringSystem(System.SIDE_OUT, 11)
    mr = ScoringSystem(System.MODIFIED_RALLY, 21)
    hr = ScoringSystem(System.HYBRID_RALLY, 21)
    assert initial_state(so, Team.A) == Transient(0, 0, 2)
    assert initial_state(so, Team.B) == Transient(0, 0, 4)
    assert initial_state(hr, Team.A) == Transient(0, 0, 2)
    assert initial_state(mr, Team.A) == Transient(0, 0, 1)
    assert initial_state(mr, Team.B) == Transient(0, 0, 2)


def test_labels_round_trip():
    for state in ScoringSystem(System.SIDE_OUT, 4).states:
        assert parse_state_label(state_label(state)) == state
    assert state_label(WIN_B) == "WIN_B"
    with pytest.raises(DomainError):
        parse_state_label("a-b")
