"""Log-log order fits for convergence studies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


def fit_loglog_order(points) -> FitResult:
    """Least-squares line through ``(log eps, log value)``.

    Needs at least 3 points with strictly positive coordinates; constant data
    fits slope 0 with r^2 = 1 by convention.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise DegenerateFit(f"need >= 3 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise DegenerateFit("all abscissae and values must be positive")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    n = len(pts)
    mx, my = lx.mean(), ly.mean()
    sxx = float(np.sum((lx - mx) ** 2))
    if sxx == 0.0:
        raise DegenerateFit("all abscissae coincide")
    sxy = float(np.sum((lx - mx) * (ly - my)))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = float(np.sum((ly - (slope * lx + intercept)) ** 2))
    ss_tot = float(np.sum((ly - my) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return FitResult(slope=slope, intercept=intercept, r_squared=r2,
                     points=tuple(pts))
