"""Multiscale wave-packet construction.

The approximate solution is the carrier sum

    ztil(t) = sum_n eps^n A^(n)(eps(x + w' t), eps y, eps^2 t) e^{i(k x + w t)}

whose envelopes satisfy a triangular hierarchy: collecting the order
eps^(m+2) terms of ``ztil_tt + |D|^p ztil + C_w eps^2 ztil |ztil/eps|^(q-1)``
and using that every term rides the first carrier harmonic (odd power
nonlinearity) forces

    2 i w dT A^(m) + c_X A^(m)_XX + c_Y A^(m)_YY
        + C_w N_{m+2}[A^(1..m)]
        + [2 w' dX dT + T3] A^(m-1)
        + [dT^2 + T4] A^(m-2)
        + sum_{j=5..m+1} T_j A^(m+2-j)  =  0,

with T_j the exact Taylor pieces of |xi|^p about the carrier and N_r the sum
of all degree-q envelope products of total order r.  Slow-time derivatives in
the forcings are eliminated symbolically through the lower equations (never
by numeric differencing in T), so each right-hand side is a fixed pipeline of
spectral multipliers and pointwise products.

With d envelopes the expansion cancels pointwise through order eps^(d+2), so
the L2 residual of the approximate equation scales like eps^(d+2) (one power
is returned by the fast-grid measure).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import factorial
import struct

import numpy as np
import scipy.fft as _fft

from .envexpr import EnvelopeEvaluator, Expr, cenv, d_slow_time, env, esum, op, prod
from .errors import DepthUnsupported, GridMismatch, HorizonExceeded
from .field import Field2D, carrier_wave, pointwise_power, resample, to_spectral
from .grid import TorusGrid
from .multiplier import apply_multiplier, solid_power
from .nls import NLSTrajectory
from .symbols import Poly, dispersion_taylor, poly

GUARANTEED_DEPTH = 4


def dispersion(k: float, p: float) -> float:
    """Carrier frequency w = k^(p/2) solving w^2 = k^p."""
    if k <= 0 or p <= 0:
        raise ValueError("k and p must be positive")
    return k ** (p / 2.0)


def group_velocity(k: float, p: float) -> float:
    """Envelope frame speed w' = p k |k|^(p-2) / (2 w) = p |k|^((p-2)/2) / 2."""
    if k <= 0:
        raise ValueError("k must be positive")
    return 0.5 * p * k ** ((p - 2.0) / 2.0)


@dataclass(frozen=True)
class PacketParams:
    """Geometry and exponents of one packet family."""

    eps: float
    k: float
    p: float
    q: int
    s: float
    nu: float
    depth: int
    fast_grid: TorusGrid
    slow_grid: TorusGrid
    nl_scale: float = 1.0          # 0 builds the linearized hierarchy

    def __post_init__(self) -> None:
        if not (0.0 < self.eps <= 0.25):
            raise ValueError(f"eps={self.eps} outside (0, 0.25]")
        if not (1.0 < self.nu < 2.0):
            raise ValueError(f"nu={self.nu} outside (1, 2)")
        if not (1 <= self.depth <= 6):
            raise ValueError(f"depth={self.depth} outside 1..6")
        for a, b in ((self.slow_grid.lx, self.eps * self.fast_grid.lx),
                     (self.slow_grid.ly, self.eps * self.fast_grid.ly)):
            if abs(a - b) > 1e-12 * max(1.0, abs(b)):
                raise GridMismatch(
                    "slow grid lengths must be eps * fast grid lengths")

    @property
    def omega(self) -> float:
        return dispersion(self.k, self.p)

    @property
    def omega_prime(self) -> float:
        return group_velocity(self.k, self.p)

    @property
    def c_omega(self) -> float:
        return self.nl_scale * self.omega ** (2.0 - 4.0 / self.p)


def _multinomial(counts: dict[int, int]) -> int:
    n = sum(counts.values())
    r = factorial(n)
    for v in counts.values():
        r //= factorial(v)
    return r


def _nonlinear_terms(q: int, total: int, max_index: int) -> list[tuple[int, Expr]]:
    """All degree-q products ``prod A^(j_i) prod conj A^(j_i)`` with
    ``sum j_i = total`` and ``1 <= j_i <= max_index``, with multiplicities."""
    n_plain = (q + 1) // 2
    n_conj = (q - 1) // 2
    out: list[tuple[int, Expr]] = []
    for ju in combinations_with_replacement(range(1, max_index + 1), n_plain):
        rest = total - sum(ju)
        if rest < n_conj or (n_conj == 0 and rest != 0):
            continue
        for jc in combinations_with_replacement(range(1, max_index + 1), n_conj):
            if sum(jc) != rest:
                continue
            cu: dict[int, int] = {}
            cc: dict[int, int] = {}
            for j in ju:
                cu[j] = cu.get(j, 0) + 1
            for j in jc:
                cc[j] = cc.get(j, 0) + 1
            coef = _multinomial(cu) * _multinomial(cc)
            factors = tuple(env(j) for j in ju) + tuple(cenv(j) for j in jc)
            out.append((coef, prod(*factors)))
    return out


def build_hierarchy(params: PacketParams) -> dict[int, Expr]:
    """Evolution expressions ``rhs[m] = dT A^(m)`` for m = 1..depth."""
    p, k, q = params.p, params.k, params.q
    w = params.omega
    wp = params.omega_prime
    cw = params.c_omega
    taylor = dispersion_taylor(p, k, params.depth + 1)
    t2 = dict(taylor[2])
    c_x = wp * wp - t2.get((2, 0), 0.0)
    c_y = -t2[(0, 2)]
    # linear propagator c_x dXX + c_y dYY as a frequency polynomial
    q2: Poly = poly({(2, 0): -c_x, (0, 2): -c_y})
    ih = 1j / (2.0 * w)
    rhs: dict[int, Expr] = {}
    for m in range(1, params.depth + 1):
        terms: list[tuple[complex, Expr]] = [(ih, op(q2, env(m)))]
        for coef, pr in _nonlinear_terms(q, q + m - 1, m):
            terms.append((ih * cw * coef, pr))
        if m >= 2:
            # 2 w' dX dT A^(m-1); dX contributes i * eta1
            terms.append((ih * 2.0 * wp * 1j,
                          op(poly({(1, 0): 1.0}), d_slow_time(env(m - 1), rhs))))
            terms.append((ih, op(taylor[3], env(m - 1))))
        if m >= 3:
            terms.append((ih, d_slow_time(d_slow_time(env(m - 2), rhs), rhs)))
            terms.append((ih, op(taylor[4], env(m - 2))))
        for j in range(5, m + 2):
            terms.append((ih, op(taylor[j], env(m + 2 - j))))
        rhs[m] = esum(terms)
    return rhs


class CorrectorSet:
    """Envelope trajectories A^(1..depth) plus their slow-time derivatives."""

    def __init__(self, params: PacketParams, traj: NLSTrajectory,
                 spectra: dict[int, list[np.ndarray]], rhs: dict[int, Expr]):
        self.params = params
        self.traj = traj
        self.spectra = spectra
        self.rhs = rhs
        self.d1 = {n: d_slow_time(env(n), rhs) for n in rhs}
        self.d2 = {n: d_slow_time(self.d1[n], rhs) for n in rhs}
        self.evaluator = EnvelopeEvaluator(params.slow_grid)

    @property
    def depth(self) -> int:
        return self.params.depth

    @property
    def dT(self) -> float:
        return self.traj.dT

    @property
    def T_end(self) -> float:
        return self.traj.T_end

    def envelopes_at(self, T: float, x_shift: float = 0.0) -> dict[int, np.ndarray]:
        """Spectral envelopes at slow time T, X-shifted by a spectral phase.

        On-grid times return stored steps; off-grid times use a sliding cubic
        Lagrange interpolation of the stored spectra (error O(dT^4), smooth
        enough for finite-difference cross checks of the time derivatives).
        """
        n_stored = len(self.spectra[1])
        if T < -1e-12 or T > (n_stored - 1) * self.dT + 1e-12:
            raise HorizonExceeded(f"T={T} outside stored range")
        i = int(round(T / self.dT))
        if abs(i * self.dT - T) <= 1e-9 * max(1.0, abs(T)):
            out = {n: self.spectra[n][i] for n in self.spectra}
        else:
            i0 = min(max(int(np.floor(T / self.dT)) - 1, 0), n_stored - 4)
            nodes = [i0, i0 + 1, i0 + 2, i0 + 3]
            wts = []
            for a in nodes:
                wa = 1.0
                for b in nodes:
                    if b != a:
                        wa *= (T - b * self.dT) / ((a - b) * self.dT)
                wts.append(wa)
            out = {}
            for n in self.spectra:
                acc = wts[0] * self.spectra[n][nodes[0]]
                for wa, a in zip(wts[1:], nodes[1:]):
                    acc = acc + wa * self.spectra[n][a]
                out[n] = acc
        if x_shift != 0.0:
            K1, _ = self.params.slow_grid.xi
            shift = np.exp(1j * K1 * x_shift)
            out = {n: shift * a for n, a in out.items()}
        return out


def build_correctors(params: PacketParams, traj: NLSTrajectory,
                     allow_experimental: bool = False) -> CorrectorSet:
    """Integrate the corrector hierarchy along a leading-envelope trajectory.

    A^(1) is the given trajectory itself; A^(n), n >= 2, solve their forced
    linear Schrodinger equations with zero initial data, stepped on the same
    grid with an exponential Heun rule (exact diagonal propagator, trapezoid
    on the forcing).
    """
    if params.depth > GUARANTEED_DEPTH and not allow_experimental:
        raise DepthUnsupported(
            f"depth {params.depth} > {GUARANTEED_DEPTH} requires "
            "allow_experimental=True")
    if traj.params.slow_grid != params.slow_grid:
        raise GridMismatch("trajectory grid differs from params.slow_grid")
    for name, a, b in (("k", traj.params.k, params.k),
                       ("p", traj.params.p, params.p),
                       ("q", traj.params.q, params.q),
                       ("nl_scale", traj.params.nl_scale, params.nl_scale)):
        if a != b:
            raise ValueError(f"trajectory {name}={a} != packet {name}={b}")

    rhs = build_hierarchy(params)
    ev = EnvelopeEvaluator(params.slow_grid)
    grid = params.slow_grid
    n_steps = traj.n_steps
    dT = traj.dT
    spectra: dict[int, list[np.ndarray]] = {1: traj.spectra}
    if params.depth == 1:
        return CorrectorSet(params, traj, spectra, rhs)

    K1, K2 = grid.xi
    taylor2 = dict(dispersion_taylor(params.p, params.k, 2)[2])
    c_x = params.omega_prime ** 2 - taylor2.get((2, 0), 0.0)
    c_y = -taylor2[(0, 2)]
    lin_mult = (1j / (2.0 * params.omega)) * (-(c_x * K1 ** 2 + c_y * K2 ** 2))
    elin = np.exp(lin_mult * dT)

    for n in range(2, params.depth + 1):
        spectra[n] = [np.zeros((grid.nx, grid.ny), dtype=np.complex128)]

    def forcing(m: int, env_hat: dict[int, np.ndarray], memo: dict) -> np.ndarray:
        # full rhs minus the diagonal linear part (kept exact in elin)
        total = _fft.fft2(ev.evaluate(rhs[m], env_hat, memo))
        return total - lin_mult * env_hat[m]

    for i in range(n_steps):
        cur = {n: spectra[n][i] for n in spectra}
        nxt: dict[int, np.ndarray] = {1: traj.spectra[i + 1]}
        memo_cur: dict = {}
        for m in range(2, params.depth + 1):
            # rhs[m] is triangular: it only references orders <= m, all of
            # which are already updated in nxt when we get here.
            g0 = forcing(m, cur, memo_cur)
            pred = dict(nxt)
            pred[m] = elin * (cur[m] + dT * g0)
            g1 = forcing(m, pred, {})
            nxt[m] = elin * cur[m] + 0.5 * dT * (elin * g0 + g1)
        for m in range(2, params.depth + 1):
            spectra[m].append(nxt[m])
    return CorrectorSet(params, traj, spectra, rhs)


@dataclass(frozen=True)
class PacketEvaluation:
    """The packet and its first two time derivatives at one fast time."""

    z: Field2D
    z_t: Field2D
    z_tt: Field2D
    t: float


_DX = poly({(1, 0): 1.0})
_DXX = poly({(2, 0): 1.0})


def assemble(cset: CorrectorSet, params: PacketParams, t: float) -> PacketEvaluation:
    """Evaluate the packet sum and its time derivatives at fast time ``t``.

    Each envelope is sampled at slow time eps^2 t with the exact spectral
    X-shift w' eps t; time derivatives apply (i w + eps w' dX + eps^2 dT) per
    packet with dT eliminated through the hierarchy expressions.
    """
    eps, k = params.eps, params.k
    w, wp = params.omega, params.omega_prime
    T = eps * eps * t
    if T < -1e-12 or T > cset.T_end + 1e-12:
        raise HorizonExceeded(f"eps^2 t = {T} outside [0, {cset.T_end}]")
    gs, gf = params.slow_grid, params.fast_grid
    envs = cset.envelopes_at(T, x_shift=wp * eps * t)
    ev = cset.evaluator
    memo: dict = {}

    def up(a: np.ndarray) -> np.ndarray:
        f = Field2D(gs, _fft.fft2(a), "spectral")
        return np.asarray(resample(f, gf.nx, gf.ny).values)

    shape = (gf.nx, gf.ny)
    z = np.zeros(shape, dtype=np.complex128)
    zt = np.zeros(shape, dtype=np.complex128)
    ztt = np.zeros(shape, dtype=np.complex128)
    for n in sorted(envs):
        B = up(ev.evaluate(env(n), envs, memo))
        z += eps ** n * B
        BT = up(ev.evaluate(cset.d1[n], envs, memo))
        BTT = up(ev.evaluate(cset.d2[n], envs, memo))
        dX = 1j * up(ev.evaluate(op(_DX, env(n)), envs, memo))
        dXT = 1j * up(ev.evaluate(op(_DX, cset.d1[n]), envs, memo))
        dXX = -up(ev.evaluate(op(_DXX, env(n)), envs, memo))
        zt += eps ** n * (1j * w * B + eps * wp * dX + eps ** 2 * BT)
        ztt += eps ** n * (-w * w * B + 2j * w * eps * wp * dX
                           + eps ** 2 * (2j * w * BT + wp * wp * dXX)
                           + 2.0 * eps ** 3 * wp * dXT + eps ** 4 * BTT)
    # z, zt, ztt hold fast-grid spectral envelope sums at this point
    car = carrier_wave(gf, k, w * t)
    zf = Field2D(gf, _fft.ifft2(z) * car, "physical")
    ztf = Field2D(gf, _fft.ifft2(zt) * car, "physical")
    zttf = Field2D(gf, _fft.ifft2(ztt) * car, "physical")
    return PacketEvaluation(zf, ztf, zttf, t)


def residual(cset: CorrectorSet, params: PacketParams, t: float) -> Field2D:
    """Left side of the approximate equation at time ``t``.

    ``ztil_tt + |D|^p ztil + C_w eps^(3-q) ztil |ztil|^(q-1)`` with the exact
    spectral |D|^p and a dealiased power term.
    """
    pe = assemble(cset, params, t)
    disp = apply_multiplier(pe.z, solid_power(params.p))
    nl = pointwise_power(pe.z, params.q, dealias=True)
    vals = (to_spectral(pe.z_tt).values + disp.values
            + params.c_omega * params.eps ** (3 - params.q)
            * to_spectral(nl).values)
    return Field2D(params.fast_grid, vals, "spectral")


# ---------------------------------------------------------------------------
# binary dump of corrector trajectories
#
# layout: magic 'MLCS', u32 version, u32 depth, u32 n_steps(+1 stored),
#         u32 nx, u32 ny, f64 lx, f64 ly, f64 dT, then for each step and each
#         order n=1..depth the physical samples as row-major complex64 pairs.

_MAGIC = b"MLCS"
_VERSION = 1


def dump_correctors(cset: CorrectorSet, path) -> None:
    gs = cset.params.slow_grid
    n_stored = len(cset.spectra[1])
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIIII", _VERSION, cset.depth, n_stored,
                             gs.nx, gs.ny))
        fh.write(struct.pack("<ddd", gs.lx, gs.ly, cset.dT))
        for i in range(n_stored):
            for n in range(1, cset.depth + 1):
                phys = _fft.ifft2(cset.spectra[n][i]).astype(np.complex64)
                fh.write(np.ascontiguousarray(phys).tobytes())


def load_correctors(path) -> tuple[dict, dict[int, list[np.ndarray]]]:
    """Read a corrector dump; returns (header dict, physical trajectories)."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a corrector dump")
        version, depth, n_stored, nx, ny = struct.unpack("<IIIII", fh.read(20))
        if version != _VERSION:
            raise ValueError(f"unsupported dump version {version}")
        lx, ly, dT = struct.unpack("<ddd", fh.read(24))
        out: dict[int, list[np.ndarray]] = {n: [] for n in range(1, depth + 1)}
        count = nx * ny
        for _ in range(n_stored):
            for n in range(1, depth + 1):
                buf = np.frombuffer(fh.read(8 * count), dtype=np.complex64)
                out[n].append(buf.reshape(nx, ny).astype(np.complex128))
    header = dict(depth=depth, n_stored=n_stored, nx=nx, ny=ny,
                  lx=lx, ly=ly, dT=dT)
    return header, out
