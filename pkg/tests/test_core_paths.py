import io

import numpy as np
import pytest

from doobsim.core_paths import (
    DomainError,
    Path,
    TimeGrid,
    balayage_transform,
    ito_sum,
    last_zero_index,
    read_path_csv,
    running_infimum,
    running_supremum,
    skorokhod_reflection,
    write_path_csv,
)


def test_grid_basics():
    g = TimeGrid.from_horizon(1.0, 0.25)
    assert g.n_points == 5
    np.testing.assert_allclose(g.times, [0, 0.25, 0.5, 0.75, 1.0])
    assert g.horizon == 1.0
    assert g.index_at(0.6) == 2
    assert g.index_at(5.0) == 4
    assert g.index_at(0.5) == 2


@pytest.mark.parametrize("args", [(0.0, 0.0, 3), (0.0, 0.1, 1), (-1.0, 0.1, 3)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(DomainError):
        TimeGrid(*args)


def test_path_checks_length_and_absorption():
    g = TimeGrid(0.0, 1.0, 3)
    with pytest.raises(DomainError):
        Path(g, [1.0, 2.0])
    with pytest.raises(DomainError):
        Path(g, [1.0, 0.0, 0.5], stopped_at=1)
    p = Path(g, [1.0, 0.0, 0.0], stopped_at=1)
    assert p.values.flags.writeable is False


def test_running_extrema():
    np.testing.assert_array_equal(running_supremum([1, 0.5, 2]), [1, 1, 2])
    np.testing.assert_array_equal(running_infimum([1, 0.5, 2]), [1, 0.5, 0.5])
    with pytest.raises(DomainError):
        running_supremum([])


def test_ito_sum_left_point():
    g = TimeGrid.from_horizon(1.0, 0.5)
    x = Path(g, g.times)
    out = ito_sum(x, x)
    np.testing.assert_allclose(out.values, [0.0, 0.0, 0.25])
    assert isinstance(out, Path)


def test_ito_sum_grid_mismatch():
    a = Path(TimeGrid(0.0, 1.0, 3), [0, 1, 2])
    b = Path(TimeGrid(0.0, 0.5, 3), [0, 1, 2])
    with pytest.raises(DomainError):
        ito_sum(a, b)
    with pytest.raises(DomainError):
        ito_sum([1, 2], [1, 2, 3])


def test_skorokhod_example():
    z, a = skorokhod_reflection([0, -1, 0.5, -2])
    np.testing.assert_allclose(a, [0, 1, 1, 2])
    np.testing.assert_allclose(z, [0, 0, 1.5, 0])
    with pytest.raises(DomainError):
        skorokhod_reflection([1.0, 0.0])


def test_last_zero_and_balayage():
    y = np.array([0.0, 1.0, 0.0, 2.0, 3.0])
    np.testing.assert_array_equal(last_zero_index(y), [0, 0, 2, 2, 2])
    k = np.array([5.0, 6.0, 7.0, 8.0, 9.0])
    lhs, rhs = balayage_transform(k, y)
    np.testing.assert_allclose(lhs, rhs)
    np.testing.assert_allclose(lhs, [0, 5, 0, 14, 21])


def test_csv_roundtrip(tmp_path):
    p = Path(TimeGrid(0.0, 0.1, 4), [1.0, 1.5, 0.25, 1e-9])
    f = tmp_path / "p.csv"
    write_path_csv(p, f)
    q = read_path_csv(f)
    np.testing.assert_array_equal(q.values, p.values)
    np.testing.assert_allclose(q.times, p.times)


@pytest.mark.parametrize("text", [
    "0,1\n1,2\n",
    "t,value\n0,1\n",
    "t,value\n0,1\n1,x\n",
    "t,value\n0,1\n1,2\n3,4\n",
    "t,value\n0,1\n1,nan\n",
    "",
])
def test_csv_rejects_malformed(text):
    with pytest.raises(DomainError):
        read_path_csv(io.StringIO(text))
