"""Complex fields on a torus and the norms used throughout.

A :class:`Field2D` is an immutable pairing of a grid with complex samples in
either the physical or the spectral representation.  The spectral values are
raw unnormalized DFT coefficients (``scipy.fft.fft2`` of the physical
samples), so the round trip is exact up to rounding and Plancherel reads

    cell_area * sum |f|^2  ==  cell_area / (nx*ny) * sum |fhat|^2.

All integrals are the plain cell quadrature ``cell_area * sum``; on the
frequency side the continuum measure ``dxi1 dxi2`` turns the hat-L1 norm into
``sum |fhat| / (nx*ny)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.fft as _fft

from .errors import GridMismatch
from .grid import TorusGrid

Rep = Literal["physical", "spectral"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Field2D:
    """Complex samples on a :class:`TorusGrid` in one representation."""

    grid: TorusGrid
    values: np.ndarray
    rep: Rep = "physical"

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})")
        object.__setattr__(self, "values", _frozen(self.values))


def field_from_physical(grid: TorusGrid, values: np.ndarray) -> Field2D:
    return Field2D(grid, values, "physical")


def field_from_spectral(grid: TorusGrid, values: np.ndarray) -> Field2D:
    return Field2D(grid, values, "spectral")


def to_spectral(f: Field2D) -> Field2D:
    """Spectral representation; identity if already spectral."""
    if f.rep == "spectral":
        return f
    return Field2D(f.grid, _fft.fft2(f.values), "spectral")


def to_physical(f: Field2D) -> Field2D:
    """Physical representation; identity if already physical."""
    if f.rep == "physical":
        return f
    return Field2D(f.grid, _fft.ifft2(f.values), "physical")


def _require_same_grid(f: Field2D, g: Field2D) -> None:
    if f.grid != g.grid:
        raise GridMismatch("fields live on different grids")


def inner_product(f: Field2D, g: Field2D) -> float:
    """Real inner product ``integral Re(f conj(g))`` by cell quadrature."""
    _require_same_grid(f, g)
    if f.rep == g.rep == "spectral":
        scale = f.grid.cell_area / f.grid.npoints
        return float(scale * np.sum(np.real(f.values * np.conj(g.values))))
    fp, gp = to_physical(f), to_physical(g)
    return float(f.grid.cell_area * np.sum(np.real(fp.values * np.conj(gp.values))))


def norm_l2(f: Field2D) -> float:
    if f.rep == "spectral":
        scale = f.grid.cell_area / f.grid.npoints
        return float(np.sqrt(scale * np.sum(np.abs(f.values) ** 2)))
    return float(np.sqrt(f.grid.cell_area * np.sum(np.abs(f.values) ** 2)))


def norm_linf(f: Field2D) -> float:
    return float(np.max(np.abs(to_physical(f).values)))


def norm_l1hat(f: Field2D) -> float:
    """``sum |fhat(xi)| dxi1 dxi2`` with the paper's (2 pi)^-2 transform."""
    fh = to_spectral(f).values
    return float(np.sum(np.abs(fh)) / f.grid.npoints)


def norm_hs(f: Field2D, s: float) -> float:
    """Inhomogeneous Sobolev norm ``|| (1+|xi|^2)^(s/2) fhat ||``."""
    from .multiplier import bessel_power, apply_multiplier
    return norm_l2(apply_multiplier(f, bessel_power(s)))


def norm_hseps(f: Field2D, s: float, eps: float, k: float) -> float:
    """Carrier-rescaled Sobolev norm: L2 after the rescaled Bessel weight."""
    from .multiplier import rescaled_bessel, apply_multiplier
    return norm_l2(apply_multiplier(f, rescaled_bessel(s, eps, k)))


def norm(f: Field2D, kind: str, **params) -> float:
    """Dispatch on norm kind: ``l2 | linf | hs | hseps | l1hat``."""
    kind = kind.lower()
    if kind == "l2":
        return norm_l2(f)
    if kind == "linf":
        return norm_linf(f)
    if kind == "hs":
        return norm_hs(f, params["s"])
    if kind == "hseps":
        return norm_hseps(f, params["s"], params["eps"], params["k"])
    if kind == "l1hat":
        return norm_l1hat(f)
    raise ValueError(f"unknown norm kind {kind!r}")


def norm_lp(f: Field2D, p: float) -> float:
    """``(integral |f|^p)^(1/p)`` by cell quadrature."""
    fp = to_physical(f)
    return float((f.grid.cell_area * np.sum(np.abs(fp.values) ** p)) ** (1.0 / p))


# ---------------------------------------------------------------------------
# wave packets and power nonlinearities


def carrier_wave(grid: TorusGrid, k: float, omega_t: float = 0.0) -> np.ndarray:
    """Plane-wave factor ``exp(i (k x + omega_t))`` on the physical mesh."""
    X, _ = grid.mesh
    return np.exp(1j * (k * X + omega_t))


def modulate(envelope: Field2D, fast_grid: TorusGrid, k: float) -> Field2D:
    """Wave packet ``F(eps x, eps y) e^{i k x}`` from a slow-grid envelope.

    The slow grid must be the fast grid scaled by eps with the same sample
    counts, so envelope samples transfer pointwise; when the counts differ the
    envelope is spectrally resampled (exact for band-limited envelopes).
    """
    env = envelope
    if env.grid.nx != fast_grid.nx or env.grid.ny != fast_grid.ny:
        env = resample(env, fast_grid.nx, fast_grid.ny)
    vals = to_physical(env).values * carrier_wave(fast_grid, k)
    return Field2D(fast_grid, vals, "physical")


def resample(f: Field2D, nx: int, ny: int) -> Field2D:
    """Trigonometric resampling onto an ``nx x ny`` lattice of the same torus."""
    g = f.grid
    fh = to_spectral(f).values
    out = np.zeros((nx, ny), dtype=np.complex128)
    hx, hy = min(g.nx, nx) // 2, min(g.ny, ny) // 2
    out[:hx, :hy] = fh[:hx, :hy]
    out[:hx, -hy:] = fh[:hx, -hy:]
    out[-hx:, :hy] = fh[-hx:, :hy]
    out[-hx:, -hy:] = fh[-hx:, -hy:]
    out *= (nx * ny) / (g.nx * g.ny)
    new_grid = TorusGrid(nx, ny, g.lx, g.ly, g.carrier_index)
    return Field2D(new_grid, out, "spectral")


def pointwise_power(f: Field2D, q: int, dealias: bool = True) -> Field2D:
    """The degree-q power term ``f |f|^(q-1)`` (q odd).

    With ``dealias=True`` the product is evaluated on a zero-padded grid large
    enough that no aliased copy of the true degree-q spectrum wraps into the
    retained modes (padding factor ``(q+1)/2``, the degree-q generalization of
    the 3/2 rule).  Band-limited callers that have checked their own product
    bandwidth may pass ``dealias=False``.
    """
    if q < 1 or q % 2 == 0:
        raise ValueError(f"power degree q={q} must be odd and >= 1")
    g = f.grid
    if not dealias:
        zp = to_physical(f).values
        return Field2D(g, zp * np.abs(zp) ** (q - 1), "physical")
    pad = (q + 1) // 2
    big = resample(f, pad * g.nx, pad * g.ny)
    zp = to_physical(big).values
    wide = Field2D(big.grid, zp * np.abs(zp) ** (q - 1), "physical")
    return Field2D(g, resample(wide, g.nx, g.ny).values, "spectral")
