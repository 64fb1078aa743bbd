"""Split-step solver for the envelope (modulation) Schrodinger equations.

Two algebraically equivalent forms are supported.  The carrier form reads

    2 i w A_T + c_X A_XX + c_Y A_YY + C_w A |A|^(q-1) = 0,

with w = k^(p/2), C_w = w^(2 - 4/p) and coefficients derived from the exact
second-order Taylor expansion of |xi|^p about (k, 0):

    c_X = w'^2 - T2[a^2] = (1/4) p (2-p) k^(p-2),
    c_Y = -T2[b^2]       = -(1/2) p k^(p-2).

The carrier-free normalized form is the same equation divided by k^(p-2):
prefactor 2 w^(4/p-1), c_X = p(2-p)/4, c_Y = -p/2, unit nonlinearity.  For
p in (0, 2) the c_X/c_Y signs differ (mixed signature), for p > 2 they agree.

The nonlinear substep is the exact pointwise phase rotation (|A| is invariant
along the nonlinear flow), the linear substep is exact in spectral space, and
Strang composition gives global second order in dT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
import scipy.fft as _fft

from .errors import HorizonExceeded, NonFinite
from .field import Field2D, inner_product, norm_hs, to_spectral
from .grid import TorusGrid
from .multiplier import apply_multiplier, bessel_power
from .symbols import dispersion_taylor


def critical_index(q: int) -> float:
    """Critical Sobolev index ``1 - 2/(q-1)`` of the degree-q problem."""
    if q < 3 or q % 2 == 0:
        raise ValueError(f"q={q} must be an odd integer >= 3")
    return 1.0 - 2.0 / (q - 1)


@dataclass(frozen=True)
class SampleSpec:
    """Sampling metadata for a solution: spacings and a recorded sup norm."""

    dx: float
    dy: float
    dt: float
    sup_norm: float = 1.0


def rescale_u_to_A(u_spec: SampleSpec, p: float, omega: float) -> SampleSpec:
    """Coordinate dilation taking prescale samples to envelope samples.

    (x, y, t) -> (X, Y, T) = (a x, b y, c t) with a = sqrt(p |2-p|)/2,
    b = sqrt(p/2), c = 2 omega^(4/p - 1).  The map preserves sup norms.
    The Y factor matches the normalized equation's c_Y = -p/2; see the
    second-derivative Taylor coefficient in the module docstring.
    """
    if p == 2:
        raise ValueError("p = 2 degenerates the X scaling (p|2-p| = 0)")
    if p <= 0 or omega <= 0:
        raise ValueError("p and omega must be positive")
    a = 0.5 * np.sqrt(p * abs(2.0 - p))
    b = np.sqrt(p / 2.0)
    c = 2.0 * omega ** (4.0 / p - 1.0)
    return SampleSpec(dx=a * u_spec.dx, dy=b * u_spec.dy, dt=c * u_spec.dt,
                      sup_norm=u_spec.sup_norm)


@dataclass(frozen=True)
class NLSParams:
    """Parameters of one envelope evolution."""

    slow_grid: TorusGrid
    p: float
    q: int
    s: float
    k: float
    dT: Optional[float] = None
    T1: float = 1.0
    form: Literal["carrier", "normalized"] = "carrier"
    nl_scale: float = 1.0          # 0 disables the power nonlinearity

    def __post_init__(self) -> None:
        if self.p <= 0 or self.p == 2:
            raise ValueError("p must be positive and != 2")
        if self.q < 3 or self.q % 2 == 0:
            raise ValueError("q must be an odd integer >= 3")
        if self.s <= critical_index(self.q):
            raise ValueError(f"s={self.s} must exceed s_c={critical_index(self.q)}")
        if self.k <= 0:
            raise ValueError("carrier k must be positive")
        if self.dT is None:
            dx = self.slow_grid.dx
            object.__setattr__(self, "dT", min(0.25 * dx * dx, 1e-2))
        if self.dT <= 0:
            raise ValueError("dT must be positive")

    @property
    def omega(self) -> float:
        return self.k ** (self.p / 2.0)

    @property
    def c_nl(self) -> float:
        """Nonlinearity coefficient (C_w in the carrier form, 1 normalized)."""
        base = 1.0 if self.form == "normalized" \
            else self.omega ** (2.0 - 4.0 / self.p)
        return self.nl_scale * base

    @property
    def time_prefactor(self) -> float:
        """Coefficient of ``i A_T``: 2w (carrier) or 2 w^(4/p-1) (normalized)."""
        if self.form == "normalized":
            return 2.0 * self.omega ** (4.0 / self.p - 1.0)
        return 2.0 * self.omega

    @property
    def c_x(self) -> float:
        if self.form == "normalized":
            return 0.25 * self.p * (2.0 - self.p)
        t2 = dict(dispersion_taylor(self.p, self.k, 2)[2])
        omega_prime_sq = 0.25 * self.p ** 2 * self.k ** (self.p - 2.0)
        return omega_prime_sq - t2.get((2, 0), 0.0)

    @property
    def c_y(self) -> float:
        if self.form == "normalized":
            return -0.5 * self.p
        t2 = dict(dispersion_taylor(self.p, self.k, 2)[2])
        return -t2[(0, 2)]


@dataclass(frozen=True)
class NLSState:
    A: Field2D
    T: float


def _linear_phase(params: NLSParams, dT: float) -> np.ndarray:
    K1, K2 = params.slow_grid.xi
    # A_T = (i/pref)(c_x A_XX + c_y A_YY):  Ahat *= exp(-i (c_x e1^2 + c_y e2^2) dT / pref)
    return np.exp(-1j * (params.c_x * K1 ** 2 + params.c_y * K2 ** 2)
                  * dT / params.time_prefactor)


def _nonlinear_rotation(a: np.ndarray, params: NLSParams, dT: float) -> np.ndarray:
    theta = params.c_nl * np.abs(a) ** (params.q - 1) * dT / params.time_prefactor
    return a * np.exp(1j * theta)


def strang_step(state: NLSState, params: NLSParams,
                dT: Optional[float] = None) -> NLSState:
    """One Strang step: half nonlinear, full linear, half nonlinear."""
    h = params.dT if dT is None else dT
    a = np.asarray(to_spectral(state.A).values)
    ap = _fft.ifft2(a)
    ap = _nonlinear_rotation(ap, params, 0.5 * h)
    ah = _linear_phase(params, h) * _fft.fft2(ap)
    ap = _nonlinear_rotation(_fft.ifft2(ah), params, 0.5 * h)
    return NLSState(Field2D(params.slow_grid, _fft.fft2(ap), "spectral"),
                    state.T + h)


class NLSTrajectory:
    """Stored envelope history with spectrally exact shifted sampling."""

    def __init__(self, params: NLSParams, spectra: list[np.ndarray]):
        self.params = params
        self.spectra = spectra

    @property
    def dT(self) -> float:
        return self.params.dT

    @property
    def n_steps(self) -> int:
        return len(self.spectra) - 1

    @property
    def T_end(self) -> float:
        return self.n_steps * self.dT

    def state(self, i: int) -> NLSState:
        return NLSState(Field2D(self.params.slow_grid, self.spectra[i],
                                "spectral"), i * self.dT)

    def sample(self, T: float, x_shift: float = 0.0) -> Field2D:
        """Envelope at slow time ``T``, translated by ``x_shift`` in X.

        The translation is an exact spectral phase.  Off-grid times take one
        Strang sub-step from the last stored step below ``T``, so values are
        smooth inside a step interval (local error O(sub-step^3)).
        """
        if T < -1e-12 or T > self.T_end + 1e-12:
            raise HorizonExceeded(f"T={T} outside [0, {self.T_end}]")
        i = int(round(T / self.dT))
        if abs(i * self.dT - T) > 1e-11 * max(1.0, abs(T)):
            i = int(np.floor(T / self.dT))
            st = strang_step(self.state(i), self.params, T - i * self.dT)
            ah = np.asarray(st.A.values)
        else:
            ah = self.spectra[i]
        if x_shift != 0.0:
            K1, _ = self.params.slow_grid.xi
            ah = ah * np.exp(1j * K1 * x_shift)
        return Field2D(self.params.slow_grid, ah, "spectral")


def run_nls(state0: NLSState, params: NLSParams, T_end: float) -> NLSTrajectory:
    """Integrate to ``T_end`` (a whole number of steps); starts at T = 0."""
    if T_end <= 0:
        raise ValueError("T_end must be positive")
    if state0.T != 0.0:
        raise ValueError("trajectories are anchored at T = 0")
    n = int(round(T_end / params.dT))
    if abs(n * params.dT - T_end) > 1e-9 * max(1.0, T_end):
        raise ValueError(
            f"T_end={T_end} is not a whole number of steps dT={params.dT}")
    spectra = [np.asarray(to_spectral(state0.A).values)]
    st = NLSState(Field2D(params.slow_grid, spectra[0], "spectral"), state0.T)
    for i in range(n):
        st = strang_step(st, params)
        vals = np.asarray(st.A.values)
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise NonFinite(f"non-finite envelope sample at T={st.T}")
        spectra.append(vals)
    return NLSTrajectory(params, spectra)


def mass(state: NLSState) -> float:
    from .field import norm_l2
    return norm_l2(state.A)


def growth_functional(state: NLSState, params: NLSParams) -> float:
    """``||A||_Hs^2 + 2 (T + T1) < Lam^s A, Lam^s (i A |A|^(q-1)) >``."""
    A = state.A
    hs = norm_hs(A, params.s)
    from .field import pointwise_power
    nl = pointwise_power(A, params.q, dealias=True)
    inl = Field2D(A.grid, 1j * np.asarray(nl.values), nl.rep)
    lam = bessel_power(params.s)
    pair = inner_product(apply_multiplier(A, lam), apply_multiplier(inl, lam))
    return hs * hs + 2.0 * (state.T + params.T1) * pair
