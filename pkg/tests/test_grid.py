import math

import pytest

from modlab import GridTooSmall, NonAdmissibleCarrier, TorusGrid, make_grid


def test_carrier_index_example():
    g = make_grid(256, 256, 64 * math.pi, 64 * math.pi, k=1.0)
    assert g.carrier_index == 32
    assert g.k == pytest.approx(1.0, abs=0)


def test_non_admissible_carrier():
    # 0.3 * 64pi / 2pi = 9.6 is not an integer
    with pytest.raises(NonAdmissibleCarrier):
        make_grid(256, 256, 64 * math.pi, 64 * math.pi, k=0.3)


def test_power_of_two_required():
    with pytest.raises(ValueError):
        TorusGrid(12, 16, 1.0, 1.0, 1)
    with pytest.raises(ValueError):
        make_grid(12, 16, 64 * math.pi, 64 * math.pi, k=1.0)


def test_grid_too_small():
    # k = 8 on a 16pi torus needs index 64 >= 64 = nx/2
    with pytest.raises(GridTooSmall):
        make_grid(128, 128, 16 * math.pi, 16 * math.pi, k=8.0)


def test_minimum_size():
    with pytest.raises(ValueError):
        TorusGrid(8, 8, 1.0, 1.0, 1)


def test_frequency_spacing_positive(grid64):
    assert grid64.dxi1 > 0 and grid64.dxi2 > 0
    assert grid64.dxi1 == pytest.approx(2 * math.pi / grid64.lx, rel=1e-15)


def test_mesh_and_lattice_shapes(grid64):
    X, Y = grid64.mesh
    K1, K2 = grid64.xi
    assert X.shape == Y.shape == K1.shape == K2.shape == (64, 64)
    assert X[1, 0] - X[0, 0] == pytest.approx(grid64.dx)


def test_scaled_slow_grid(grid64):
    slow = grid64.scaled(0.1)
    assert slow.lx == pytest.approx(0.1 * grid64.lx)
    assert slow.nx == grid64.nx
