import math

import numpy as np
import pytest

from modlab import (Field2D, apply_multiplier, apply_semigroup, bessel_power,
                    carrier_wave, fit_loglog_order, gaussian, inner_product,
                    make_grid, mode_filter, modulate, norm_l2, rescaled_bessel,
                    rescaled_solid, semi_cos, semi_dsin, semi_sinc,
                    solid_power, symbol, to_physical, to_spectral, algebraic_tail)
from conftest import random_field


def plane_wave(grid):
    return Field2D(grid, carrier_wave(grid, grid.k), "physical")


def test_symbols_real_and_filter_binary(grid64):
    for spec in (solid_power(1.0), bessel_power(2.0),
                 rescaled_solid(1.0, 0.1, grid64.k),
                 rescaled_bessel(1.0, 0.1, grid64.k),
                 semi_cos(1.0, 0.3), semi_sinc(1.0, 0.3), semi_dsin(1.0, 0.3)):
        sym = symbol(spec, grid64)
        assert sym.dtype == np.float64
    filt = symbol(mode_filter(grid64.k), grid64)
    assert set(np.unique(filt)).issubset({0.0, 1.0})


def test_mode_filter_keeps_carrier(grid64):
    pw = plane_wave(grid64)
    out = to_physical(apply_multiplier(pw, mode_filter(grid64.k)))
    assert np.max(np.abs(out.values - pw.values)) < 1e-12


def test_mode_filter_idempotent_bit_exact(grid64, rng):
    f = to_spectral(random_field(grid64, rng))
    once = apply_multiplier(f, mode_filter(grid64.k))
    twice = apply_multiplier(once, mode_filter(grid64.k))
    assert np.array_equal(np.asarray(once.values), np.asarray(twice.values))


def test_mode_filter_self_adjoint(grid64, rng):
    f = random_field(grid64, rng)
    g = random_field(grid64, rng)
    filt = mode_filter(grid64.k)
    lhs = inner_product(apply_multiplier(f, filt), g)
    rhs = inner_product(f, apply_multiplier(g, filt))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_solid_power_on_plane_wave(grid64):
    p = 1.0
    out = to_physical(apply_multiplier(plane_wave(grid64), solid_power(p)))
    expect = grid64.k ** p * carrier_wave(grid64, grid64.k)
    assert np.max(np.abs(out.values - expect)) < 1e-12 * grid64.k ** p


def test_rescaled_bessel_fixes_carrier(grid64):
    # exact spectral plane wave: a single unit coefficient at the carrier
    vals = np.zeros((grid64.nx, grid64.ny), dtype=complex)
    vals[grid64.carrier_index, 0] = grid64.npoints
    pw = Field2D(grid64, vals, "spectral")
    out = apply_multiplier(pw, rescaled_bessel(1.7, 0.1, grid64.k))
    assert np.max(np.abs(np.asarray(out.values) - vals)) < 1e-12 * grid64.npoints


def test_semi_sinc_zero_mode_is_t(grid64):
    t = 0.37
    assert symbol(semi_sinc(1.0, t), grid64)[0, 0] == pytest.approx(t, rel=1e-15)


def test_packet_commutation_identity(grid64):
    """M_eps(F(eps x, eps y) e^{ikx}) = (M F)(eps x, eps y) e^{ikx}."""
    eps, k = 0.125, grid64.k
    slow = grid64.scaled(eps)
    F = gaussian(slow, sigma=1.0, chirp=0.3)
    packet = modulate(F, grid64, k)
    for M_eps, M in ((rescaled_bessel(1.5, eps, k), bessel_power(1.5)),
                     (rescaled_solid(2.0, eps, k), solid_power(2.0))):
        lhs = to_physical(apply_multiplier(packet, M_eps))
        rhs = modulate(apply_multiplier(F, M), grid64, k)
        num = norm_l2(Field2D(grid64, np.asarray(lhs.values)
                              - np.asarray(to_physical(rhs).values), "physical"))
        assert num <= 1e-8 * norm_l2(lhs)


def test_semigroup_phase_advance_exact(grid64):
    p, k = 1.0, grid64.k
    w = k ** (p / 2)
    z = plane_wave(grid64)
    zt = Field2D(grid64, 1j * w * np.asarray(z.values), "physical")
    dt = 0.7
    zn, _ = apply_semigroup(z, zt, p, dt)
    expect = np.exp(1j * w * dt) * np.asarray(z.values)
    err = np.max(np.abs(np.asarray(to_physical(zn).values) - expect))
    assert err < 1e-10


def test_semigroup_conserves_linear_energy(grid64, rng):
    p = 1.0
    z = random_field(grid64, rng, band_limit=2.0)
    zt = random_field(grid64, rng, band_limit=2.0)

    def energy(a, b):
        half = apply_multiplier(a, solid_power(p / 2))
        return 0.5 * norm_l2(b) ** 2 + 0.5 * norm_l2(half) ** 2

    e0 = energy(z, zt)
    zn, ztn = apply_semigroup(z, zt, p, 1.3)
    e1 = energy(zn, ztn)
    assert abs(e1 - e0) <= 1e-12 * e0


def test_semigroup_identity_at_zero(grid64, rng):
    z = random_field(grid64, rng)
    zt = random_field(grid64, rng)
    zn, ztn = apply_semigroup(z, zt, 1.0, 0.0)
    assert np.max(np.abs(np.asarray(to_physical(zn).values)
                         - np.asarray(z.values))) < 1e-14
    assert np.max(np.abs(np.asarray(to_physical(ztn).values)
                         - np.asarray(zt.values))) < 1e-14


def test_mode_filter_leakage_slopes():
    """Leakage of (I - B_k) on packets falls like eps^(m-1) for envelopes of
    sharp Sobolev order m.

    Probes with algebraic spectral tails <eta>^-(m+1) realize the rate; an
    analytic envelope decays faster than any power and cannot show it.
    """
    grid = make_grid(256, 256, 64 * math.pi, 64 * math.pi, k=2.0)
    k = grid.k
    eps_list = (0.1, 0.05, 0.025)
    for m in (2, 3, 4):
        pts = []
        for eps in eps_list:
            slow = grid.scaled(eps)
            F = algebraic_tail(slow, order=m)
            packet = modulate(F, grid, k)
            filt = apply_multiplier(packet, mode_filter(k))
            out = Field2D(grid, np.asarray(to_spectral(packet).values)
                          - np.asarray(filt.values), "spectral")
            pts.append((eps, norm_l2(out)))
        slope = fit_loglog_order(pts).slope
        assert abs(slope - (m - 1)) <= 0.3, (m, slope, pts)
