"""Periodic computational domain.

A :class:`TorusGrid` is a rectangular torus sampled on an ``nx x ny`` lattice.
It knows its physical sample points, its discrete frequency lattice, and the
carrier index ``m`` that pins a plane wave ``exp(i k x)`` with ``k = 2 pi m / lx``
exactly onto the lattice.  Keeping the carrier grid-exact is what makes the
mode filter, the rescaled multipliers and the wave-packet identities hold at
machine precision instead of up to interpolation error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridTooSmall, NonAdmissibleCarrier

TWO_PI = 2.0 * np.pi


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Periodic 2D domain ``[0, lx) x [0, ly)`` with a grid-exact carrier.

    Attributes
    ----------
    nx, ny : int
        Samples per axis; powers of two, at least 16.
    lx, ly : float
        Domain lengths.
    carrier_index : int
        Integer ``m`` with carrier ``k = 2 pi m / lx``, ``0 < m < nx/2``.
    """

    nx: int
    ny: int
    lx: float
    ly: float
    carrier_index: int

    def __post_init__(self) -> None:
        for n, name in ((self.nx, "nx"), (self.ny, "ny")):
            if not _is_pow2(n) or n < 16:
                raise ValueError(f"{name}={n} must be a power of two >= 16")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("domain lengths must be positive")
        if not (0 < self.carrier_index < self.nx // 2):
            raise GridTooSmall(
                f"carrier index {self.carrier_index} outside (0, {self.nx // 2})")

    @property
    def k(self) -> float:
        """Carrier wavenumber ``2 pi m / lx``."""
        return TWO_PI * self.carrier_index / self.lx

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def dxi1(self) -> float:
        """Frequency spacing along the first axis."""
        return TWO_PI / self.lx

    @property
    def dxi2(self) -> float:
        return TWO_PI / self.ly

    @property
    def npoints(self) -> int:
        return self.nx * self.ny

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @cached_property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) * self.dy

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical sample points, ``indexing='ij'``."""
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        X.flags.writeable = False
        Y.flags.writeable = False
        return X, Y

    @cached_property
    def xi(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequency lattice ``(xi1, xi2)`` in FFT ordering, ``indexing='ij'``."""
        xi1 = TWO_PI * np.fft.fftfreq(self.nx, d=self.dx)
        xi2 = TWO_PI * np.fft.fftfreq(self.ny, d=self.dy)
        K1, K2 = np.meshgrid(xi1, xi2, indexing="ij")
        K1.flags.writeable = False
        K2.flags.writeable = False
        return K1, K2

    def scaled(self, factor: float) -> "TorusGrid":
        """Grid with lengths multiplied by ``factor`` (same sample counts).

        Used to derive the slow (envelope) grid from the fast grid: the slow
        grid of a packet with small parameter ``eps`` is ``scaled(eps)``, so
        slow samples sit exactly on ``(eps * x_i, eps * y_j)``.  The carrier
        index is inherited; it has no meaning on the slow grid.
        """
        return TorusGrid(self.nx, self.ny, factor * self.lx, factor * self.ly,
                         self.carrier_index)


def make_grid(nx: int, ny: int, lx: float, ly: float, k: float,
              tol: float = 1e-9) -> TorusGrid:
    """Build a grid whose carrier wavenumber ``k`` is lattice-exact.

    Raises
    ------
    NonAdmissibleCarrier
        If ``k lx / (2 pi)`` is not an integer within ``tol``.
    GridTooSmall
        If the implied index is >= nx/2.
    """
    if k <= 0:
        raise NonAdmissibleCarrier(f"carrier k={k} must be positive")
    m_real = k * lx / TWO_PI
    m = int(round(m_real))
    if abs(m_real - m) > tol:
        raise NonAdmissibleCarrier(
            f"k*lx/(2*pi) = {m_real} is not an integer (tol {tol})")
    return TorusGrid(nx, ny, lx, ly, m)
