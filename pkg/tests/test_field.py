import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modlab import (Field2D, GridMismatch, carrier_wave, gaussian,
                    inner_product, make_grid, modulate, norm, norm_hs,
                    norm_hseps, norm_l1hat, norm_l2, norm_linf,
                    pointwise_power, to_physical, to_spectral)
from conftest import random_field


def test_round_trip(grid64, rng):
    f = random_field(grid64, rng)
    back = to_physical(to_spectral(f))
    err = np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values))
    assert err < 1e-12


def test_idempotent_representations(grid64, rng):
    f = random_field(grid64, rng)
    assert to_physical(f) is f
    fh = to_spectral(f)
    assert to_spectral(fh) is fh


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 31))
def test_plancherel_property(seed):
    grid = make_grid(32, 32, 8 * math.pi, 8 * math.pi, k=2.0)
    f = random_field(grid, np.random.default_rng(seed))
    a = norm_l2(f)
    b = norm_l2(to_spectral(f))
    assert abs(a - b) <= 1e-12 * a


def test_inner_product_definitions(grid64, rng):
    f = random_field(grid64, rng)
    assert inner_product(f, f) == pytest.approx(norm_l2(f) ** 2, rel=1e-12)
    i_f = Field2D(grid64, 1j * np.asarray(f.values), "physical")
    assert abs(inner_product(f, i_f)) <= 1e-12 * norm_l2(f) ** 2


def test_inner_product_gaussians_vs_direct_summation(grid64):
    f = gaussian(grid64, sigma=2.0)
    g = gaussian(grid64, sigma=3.0, chirp=0.5)
    got = inner_product(f, g)
    # independent oracle: pairwise-summed quadrature with math.fsum
    vals = (np.asarray(f.values) * np.conj(np.asarray(g.values))).real
    want = grid64.cell_area * math.fsum(vals.ravel().tolist())
    assert got == pytest.approx(want, rel=1e-12)


def test_inner_product_grid_mismatch(grid64, grid32, rng):
    with pytest.raises(GridMismatch):
        inner_product(random_field(grid64, rng), random_field(grid32, rng))


def test_zero_field_all_norms(grid64):
    z = Field2D(grid64, np.zeros((64, 64), dtype=complex), "physical")
    for kind, params in (("l2", {}), ("linf", {}), ("l1hat", {}),
                         ("hs", {"s": 1.0}),
                         ("hseps", {"s": 1.0, "eps": 0.1, "k": 2.0})):
        assert norm(z, kind, **params) == 0.0


def test_plane_wave_l2(grid64):
    pw = Field2D(grid64, carrier_wave(grid64, grid64.k), "physical")
    assert norm_l2(pw) == pytest.approx(math.sqrt(grid64.lx * grid64.ly),
                                        rel=1e-12)


def test_plane_wave_single_coefficient(grid64):
    pw = to_spectral(Field2D(grid64, carrier_wave(grid64, grid64.k), "physical"))
    vals = np.abs(np.asarray(pw.values))
    m = grid64.carrier_index
    peak = vals[m, 0]
    vals_masked = vals.copy()
    vals_masked[m, 0] = 0.0
    assert peak == pytest.approx(grid64.npoints, rel=1e-12)
    assert np.max(vals_masked) <= 1e-10 * peak


def test_constant_field_spectral_mass_at_origin(grid64):
    c = Field2D(grid64, np.full((64, 64), 2.0 + 1.0j), "physical")
    ch = np.abs(np.asarray(to_spectral(c).values))
    assert ch[0, 0] > 0
    ch[0, 0] = 0.0
    assert np.max(ch) <= 1e-12


def test_l1hat_plane_wave(grid64):
    pw = Field2D(grid64, carrier_wave(grid64, grid64.k), "physical")
    # single unit-modulus coefficient: sum |fhat| / (nx ny) = 1
    assert norm_l1hat(pw) == pytest.approx(1.0, rel=1e-12)


def test_hseps_packet_identity(grid64):
    """HsEps of A(eps x) e^{ikx} equals Hs(A) on the slow grid / eps.

    This is the discrete form of the commutation identity; the 1/eps is the
    fast-vs-slow quadrature measure (cell areas differ by eps^2).
    """
    eps, s, k = 0.125, 1.5, grid64.k
    slow = grid64.scaled(eps)
    A = gaussian(slow, sigma=1.0)
    packet = modulate(A, grid64, k)
    got = norm_hseps(packet, s, eps, k)
    want = norm_hs(A, s) / eps
    assert got == pytest.approx(want, rel=1e-8)


def test_pointwise_power_matches_plain_product_when_resolved(grid64, rng):
    f = random_field(grid64, rng, band_limit=1.0)
    a = pointwise_power(f, 3, dealias=True)
    b = pointwise_power(f, 3, dealias=False)
    diff = norm_l2(Field2D(grid64, np.asarray(to_spectral(a).values)
                           - np.asarray(to_spectral(b).values), "spectral"))
    assert diff <= 1e-12 * norm_l2(a)


def test_pointwise_power_rejects_even_degree(grid64, rng):
    with pytest.raises(ValueError):
        pointwise_power(random_field(grid64, rng), 2)


def test_norm_dispatch_unknown(grid64, rng):
    with pytest.raises(ValueError):
        norm(random_field(grid64, rng), "h1")
