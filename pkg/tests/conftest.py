import math

import numpy as np
import pytest

from modlab import Field2D, TorusGrid, make_grid


@pytest.fixture(scope="session")
def grid64():
    # 64^2 on a 16pi torus hosts k = 2 at index 16
    return make_grid(64, 64, 16 * math.pi, 16 * math.pi, k=2.0)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32, 32, 8 * math.pi, 8 * math.pi, k=2.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_field(grid: TorusGrid, rng, band_limit: float | None = None) -> Field2D:
    """Random complex field, optionally band-limited to |xi| <= band_limit."""
    vals = rng.standard_normal((grid.nx, grid.ny)) \
        + 1j * rng.standard_normal((grid.nx, grid.ny))
    if band_limit is not None:
        K1, K2 = grid.xi
        mask = (K1 ** 2 + K2 ** 2) <= band_limit ** 2
        vals = np.fft.ifft2(mask * np.fft.fft2(vals))
    return Field2D(grid, vals, "physical")
