import pytest
from hypothesis import given, strategies as st

from ipdsaw.polymer import Trajectory, contact, enumerate_all, hamiltonian, iter_trajectories

stretch_lists = st.lists(st.integers(-6, 6), min_size=1, max_size=12)


def test_hamiltonian_examples():
    assert hamiltonian(Trajectory([3, -2])) == 2
    assert hamiltonian([3, 2]) == 0
    assert hamiltonian([0, -5]) == 0
    assert hamiltonian([2, -1, 0, 3]) == 1


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_contact_identity(x, y):
    # for opposite signs min(|x|,|y|) = (|x| + |y| - |x + y|) / 2
    expected = (abs(x) + abs(y) - abs(x + y)) // 2 if x * y < 0 else 0
    assert contact(x, y) == expected


@given(stretch_lists)
def test_trajectory_length(stretches):
    t = Trajectory(stretches)
    assert t.length == sum(abs(s) for s in stretches) + len(stretches)
    assert t.horizontal_extension == len(stretches)


def test_empty_trajectory_rejected():
    with pytest.raises(ValueError):
        Trajectory([])


def test_enumerate_small():
    assert enumerate_all(1) == {0: 1}
    assert enumerate_all(2) == {0: 3}
    assert enumerate_all(4) == {0: 15, 1: 2}


def test_enumerate_size_limit():
    with pytest.raises(ValueError):
        enumerate_all(15)
    with pytest.raises(ValueError):
        enumerate_all(0)


def test_enumerate_total_count():
    # at beta = 0 the number of trajectories has generating function (1-z)/(1-2z-z^2)
    counts = [1, 1]
    for _ in range(2, 13):
        counts.append(2 * counts[-1] + counts[-2])
    for L in range(1, 13):
        assert sum(enumerate_all(L).values()) == counts[L]


@pytest.mark.parametrize("L", [3, 6, 9])
def test_enumerate_matches_iteration(L):
    trajs = list(iter_trajectories(L))
    assert len(set(trajs)) == len(trajs)
    assert all(Trajectory(t).length == L for t in trajs)
    tally = {}
    for t in trajs:
        tally[hamiltonian(t)] = tally.get(hamiltonian(t), 0) + 1
    assert tally == enumerate_all(L)
