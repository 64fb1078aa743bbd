"""Analytic envelope profiles.

Profiles are constructed in frequency space and transformed back, so the
physical field is the exact periodization of the analytic profile.  Building
them by sampling the physical formula instead leaves an O(edge value)
truncation seam whose spectral floor gets amplified by the high-order
derivative weights in the corrector forcings; the spectral construction has
no seam by design.
"""

from __future__ import annotations

import numpy as np

from .field import Field2D
from .grid import TorusGrid


def _centered_spectrum(grid: TorusGrid, shape: np.ndarray) -> Field2D:
    """Physical field whose spectrum is ``shape`` centered mid-domain, peak 1."""
    K1, K2 = grid.xi
    phase = np.exp(-1j * (K1 * grid.lx / 2.0 + K2 * grid.ly / 2.0))
    vals = np.fft.ifft2(shape * phase)
    peak = np.max(np.abs(vals))
    return Field2D(grid, vals / peak, "physical")


def gaussian(grid: TorusGrid, sigma: float = 1.0, chirp: float = 0.0,
             amplitude: float = 1.0) -> Field2D:
    """Periodized Gaussian ``amplitude * exp(-R^2/(2 sigma^2)) * exp(i chirp X)``.

    ``chirp`` shifts the envelope spectrum by ``chirp`` along the first axis,
    giving a generic complex profile (the plain Gaussian is real at T = 0 and
    hides several pairings behind symmetry).
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    K1, K2 = grid.xi
    shape = np.exp(-0.5 * sigma ** 2 * ((K1 - chirp) ** 2 + K2 ** 2))
    f = _centered_spectrum(grid, shape)
    return Field2D(grid, amplitude * f.values, "physical")


def ring(grid: TorusGrid, sigma: float = 1.0, amplitude: float = 1.0) -> Field2D:
    """Annular profile ``amplitude * (R/sigma)^2 exp(-R^2/(2 sigma^2))``.

    Realized spectrally via ``x^2 f <-> -d^2/dxi^2 fhat`` applied to the
    Gaussian, so it is exactly periodized like :func:`gaussian`.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    K1, K2 = grid.xi
    r2 = K1 * K1 + K2 * K2
    # FT of (x^2+y^2) exp(-r^2/(2 s^2)) is s^4 (2/s^2 - |xi|^2) exp(-s^2 |xi|^2 / 2)
    # up to normalization; peak-normalized below so only the shape matters.
    shape = (2.0 / sigma ** 2 - r2) * np.exp(-0.5 * sigma ** 2 * r2)
    f = _centered_spectrum(grid, shape)
    return Field2D(grid, amplitude * f.values, "physical")


def algebraic_tail(grid: TorusGrid, order: int, amplitude: float = 1.0) -> Field2D:
    """Profile with the sharp spectral decay ``<xi>^-(order+1)``.

    Lies in H^m exactly for m < ``order``, which makes it the right probe for
    leakage laws whose rate is set by a finite Sobolev exponent; analytic
    profiles decay too fast for any power law to be visible.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    K1, K2 = grid.xi
    shape = (1.0 + K1 * K1 + K2 * K2) ** (-(order + 1) / 2.0)
    f = _centered_spectrum(grid, shape)
    return Field2D(grid, amplitude * f.values, "physical")


def make_profile(grid: TorusGrid, name: str, **params) -> Field2D:
    """Profile factory used by sweep configs: ``gaussian`` or ``ring``."""
    name = name.lower()
    if name == "gaussian":
        return gaussian(grid, sigma=params.get("sigma", 1.0),
                        chirp=params.get("chirp", 0.0),
                        amplitude=params.get("amplitude", 1.0))
    if name == "ring":
        return ring(grid, sigma=params.get("sigma", 1.0),
                    amplitude=params.get("amplitude", 1.0))
    raise ValueError(f"unknown profile {name!r}")
