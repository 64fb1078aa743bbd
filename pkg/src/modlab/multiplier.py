"""Diagonal Fourier multipliers.

Every operator the solvers need is a real symbol evaluated on the frequency
lattice: solid and Bessel derivative powers, their carrier-rescaled versions,
the sharp mode filter around the carrier, and the entries of the wave
semigroup.  Symbols are cached per (spec, grid).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import GridMismatch
from .field import Field2D, to_spectral
from .grid import TorusGrid


@dataclass(frozen=True)
class MultiplierSpec:
    """A named diagonal symbol with scalar parameters.

    ``kind`` is one of ``solid_power, bessel_power, rescaled_solid,
    rescaled_bessel, mode_filter, semi_cos, semi_sinc, semi_dsin``.
    """

    kind: str
    p: Optional[float] = None
    s: Optional[float] = None
    eps: Optional[float] = None
    k: Optional[float] = None
    t: Optional[float] = None


def solid_power(p: float) -> MultiplierSpec:
    """|D|^p, symbol |xi|^p."""
    return MultiplierSpec("solid_power", p=p)


def bessel_power(s: float) -> MultiplierSpec:
    """Lambda^s, symbol (1+|xi|^2)^(s/2)."""
    return MultiplierSpec("bessel_power", s=s)


def rescaled_solid(s: float, eps: float, k: float) -> MultiplierSpec:
    """|D|^s_eps, symbol |(xi - k e1)/eps|^s."""
    return MultiplierSpec("rescaled_solid", s=s, eps=eps, k=k)


def rescaled_bessel(s: float, eps: float, k: float) -> MultiplierSpec:
    """Lambda^s_eps, symbol <(xi - k e1)/eps>^s."""
    return MultiplierSpec("rescaled_bessel", s=s, eps=eps, k=k)


def mode_filter(k: float) -> MultiplierSpec:
    """Sharp cutoff to the ball |xi - k e1| <= k/2, boundary points included."""
    return MultiplierSpec("mode_filter", k=k)


def semi_cos(p: float, t: float) -> MultiplierSpec:
    """cos(|xi|^(p/2) t): the diagonal wave-semigroup entry."""
    return MultiplierSpec("semi_cos", p=p, t=t)


def semi_sinc(p: float, t: float) -> MultiplierSpec:
    """sin(|xi|^(p/2) t)/|xi|^(p/2), equal to t at xi = 0."""
    return MultiplierSpec("semi_sinc", p=p, t=t)


def semi_dsin(p: float, t: float) -> MultiplierSpec:
    """-|xi|^(p/2) sin(|xi|^(p/2) t): the lower-left semigroup entry."""
    return MultiplierSpec("semi_dsin", p=p, t=t)


@lru_cache(maxsize=512)
def _symbol_cached(spec: MultiplierSpec, grid: TorusGrid) -> np.ndarray:
    K1, K2 = grid.xi
    if spec.kind == "solid_power":
        r = np.hypot(K1, K2)
        sym = r ** spec.p
    elif spec.kind == "bessel_power":
        sym = (1.0 + K1 * K1 + K2 * K2) ** (spec.s / 2.0)
    elif spec.kind == "rescaled_solid":
        r = np.hypot(K1 - spec.k, K2) / spec.eps
        sym = r ** spec.s
    elif spec.kind == "rescaled_bessel":
        d2 = ((K1 - spec.k) ** 2 + K2 * K2) / spec.eps ** 2
        sym = (1.0 + d2) ** (spec.s / 2.0)
    elif spec.kind == "mode_filter":
        d2 = (K1 - spec.k) ** 2 + K2 * K2
        sym = (d2 <= (spec.k / 2.0) ** 2).astype(np.float64)
    elif spec.kind in ("semi_cos", "semi_sinc", "semi_dsin"):
        om = np.hypot(K1, K2) ** (spec.p / 2.0)
        if spec.kind == "semi_cos":
            sym = np.cos(om * spec.t)
        elif spec.kind == "semi_dsin":
            sym = -om * np.sin(om * spec.t)
        else:
            # removable singularity at xi = 0: sin(om t)/om -> t
            safe = np.where(om > 0.0, om, 1.0)
            sym = np.where(om > 0.0, np.sin(om * spec.t) / safe, spec.t)
    else:
        raise ValueError(f"unknown multiplier kind {spec.kind!r}")
    sym = np.ascontiguousarray(sym, dtype=np.float64)
    sym.flags.writeable = False
    return sym


def symbol(spec: MultiplierSpec, grid: TorusGrid) -> np.ndarray:
    """The real symbol of ``spec`` on the grid's frequency lattice."""
    return _symbol_cached(spec, grid)


def apply_multiplier(f: Field2D, spec: MultiplierSpec) -> Field2D:
    """Pointwise spectral multiplication; output is spectral."""
    fh = to_spectral(f)
    return Field2D(f.grid, symbol(spec, f.grid) * fh.values, "spectral")


def apply_semigroup(z: Field2D, zt: Field2D, p: float, dt: float
                    ) -> tuple[Field2D, Field2D]:
    """Exact free flow of ``z_tt + |D|^p z = 0`` over ``dt`` on ``(z, z_t)``."""
    if z.grid != zt.grid:
        raise GridMismatch("z and z_t on different grids")
    zh, zth = to_spectral(z).values, to_spectral(zt).values
    g = z.grid
    c = symbol(semi_cos(p, dt), g)
    sc = symbol(semi_sinc(p, dt), g)
    ds = symbol(semi_dsin(p, dt), g)
    return (Field2D(g, c * zh + sc * zth, "spectral"),
            Field2D(g, ds * zh + c * zth, "spectral"))
