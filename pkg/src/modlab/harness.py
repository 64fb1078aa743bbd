"""Batch experiments behind every measured claim.

Each entry point is re-runnable from a :class:`SweepConfig` alone and returns
plain row dictionaries ready for :func:`modlab.io.emit_csv`; sweeps are
deterministic (ordered merges, no RNG).

Grid layouts differ by experiment on purpose:

* the remainder sweep fixes the fast grid and gives each eps its own slow
  grid (the acceptance epsilons are not commensurate, so a shared envelope
  grid cannot carry a lattice-exact carrier for all of them);
* the residual-order and pairing-identity studies fix the slow grid (one
  envelope trajectory serves every eps) and scale the fast grid per eps,
  which keeps the fitted constants genuinely eps-independent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import BlowupPenalty, ValidationError
from .field import (Field2D, inner_product, norm_hs, norm_hseps, norm_l2,
                    pointwise_power, to_physical, to_spectral)
from .fits import FitResult, fit_loglog_order
from .grid import TorusGrid, make_grid
from .multiplier import (apply_multiplier, bessel_power, mode_filter,
                         rescaled_bessel, solid_power)
from .nls import NLSParams, NLSState, growth_functional, run_nls
from .packet import (CorrectorSet, PacketParams, assemble, build_correctors,
                     residual)
from .profiles import make_profile
from .progenitor import (ProgenitorParams, ProgenitorState, hamiltonian,
                         initial_state, lambda_of, run_window)

DIAGNOSTIC_COLUMNS = ("t", "r_l2", "r_hse", "rt_hse", "rtt_hse", "lambda",
                      "energy", "mass_progeny")
REMAINDER_COLUMNS = ("epsilon", "sup_r_hse", "sup_rt_hse", "sup_rtt_hse")
FIT_COLUMNS = ("slope", "intercept", "r_squared")


@dataclass(frozen=True)
class SweepConfig:
    """Shared experiment configuration."""

    epsilons: tuple[float, ...] = (0.1, 0.07, 0.05)
    horizon_T: float = 0.25
    depth: int = 3
    profile: str = "gaussian"
    profile_params: tuple[tuple[str, float], ...] = ()
    k: float = 2.0
    p: float = 1.0
    q: int = 3
    s: float = 1.0
    nu: float = 1.5
    T1: float = 1.0
    c_growth: float = 1e5
    fast_nx: int = 256
    fast_lx: float = 64.0 * math.pi
    slow_nx: int = 128
    n_diag: int = 8
    h_target: float = 0.1
    nls_steps_min: int = 160
    threads: int = 1
    power_scale: float = 1.0
    penalty_scale: float = 1.0
    nl_scale: float = 1.0
    omega_override: float = 0.0   # 0 means dispersion omega = k^(p/2)

    def __post_init__(self) -> None:
        if not self.epsilons:
            raise ValidationError("epsilons must be nonempty")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValidationError("epsilons must be strictly decreasing")
        if self.horizon_T <= 0:
            raise ValidationError("horizon_T must be positive")

    @property
    def profile_kwargs(self) -> dict:
        return dict(self.profile_params)


@dataclass
class RunSetup:
    """Everything needed to evolve one eps: grids, packet and progenitor."""

    eps: float
    fast_grid: TorusGrid
    slow_grid: TorusGrid
    traj: NLSTrajectory
    cset: CorrectorSet
    packet_params: PacketParams
    prog_params: ProgenitorParams
    state0: ProgenitorState


def _nls_step_count(cfg: SweepConfig) -> int:
    per = max(1, math.ceil(cfg.nls_steps_min / cfg.n_diag))
    return per * cfg.n_diag


def _slow_grid(cfg: SweepConfig, eps: float) -> TorusGrid:
    # carrier index 1 is a placeholder; envelope grids carry no carrier
    return TorusGrid(cfg.slow_nx, cfg.slow_nx, eps * cfg.fast_lx,
                     eps * cfg.fast_lx, 1)


def prepare_run(cfg: SweepConfig, eps: float,
                fast_grid: TorusGrid | None = None) -> RunSetup:
    """Build the full pipeline (envelope -> correctors -> progenitor data)."""
    if fast_grid is None:
        fast_grid = make_grid(cfg.fast_nx, cfg.fast_nx, cfg.fast_lx,
                              cfg.fast_lx, cfg.k)
    slow_grid = _slow_grid(cfg, eps)
    A0 = make_profile(slow_grid, cfg.profile, **cfg.profile_kwargs)
    n_steps = _nls_step_count(cfg)
    nls_params = NLSParams(slow_grid=slow_grid, p=cfg.p, q=cfg.q, s=cfg.s,
                           k=cfg.k, dT=cfg.horizon_T / n_steps, T1=cfg.T1,
                           nl_scale=cfg.nl_scale)
    traj = run_nls(NLSState(A0, 0.0), nls_params, cfg.horizon_T)
    packet_params = PacketParams(eps=eps, k=cfg.k, p=cfg.p, q=cfg.q, s=cfg.s,
                                 nu=cfg.nu, depth=cfg.depth,
                                 fast_grid=fast_grid, slow_grid=slow_grid,
                                 nl_scale=cfg.nl_scale)
    cset = build_correctors(packet_params, traj)
    horizon_t = cfg.horizon_T / eps ** 2
    window = horizon_t / cfg.n_diag
    n_sub = max(1, math.ceil(window / cfg.h_target))
    prog_params = ProgenitorParams(
        grid=fast_grid, eps=eps, k=cfg.k, p=cfg.p, q=cfg.q, s=cfg.s,
        nu=cfg.nu, anchor_hs=norm_hs(A0, cfg.s), T1=cfg.T1,
        c_growth=cfg.c_growth, n_sub=n_sub, t0=window / 2.0,
        horizon_T=cfg.horizon_T,
        power_scale=cfg.power_scale * cfg.nl_scale,
        penalty_scale=cfg.penalty_scale,
        omega=cfg.omega_override if cfg.omega_override > 0 else None)
    pe0 = assemble(cset, packet_params, 0.0)
    state0 = initial_state(pe0.z, pe0.z_t, prog_params)
    return RunSetup(eps=eps, fast_grid=fast_grid, slow_grid=slow_grid,
                    traj=traj, cset=cset, packet_params=packet_params,
                    prog_params=prog_params, state0=state0)


# ---------------------------------------------------------------------------
# remainder sweep


def _remainder_worker(cfg: SweepConfig, eps: float) -> dict:
    try:
        return _remainder_worker_inner(cfg, eps)
    except BlowupPenalty as exc:
        raise BlowupPenalty(f"eps={eps}: {exc}", t=exc.t) from exc


def _remainder_worker_inner(cfg: SweepConfig, eps: float) -> dict:
    setup = prepare_run(cfg, eps)
    pp, gp = setup.packet_params, setup.prog_params
    horizon_t = cfg.horizon_T / eps ** 2
    t_diag = [horizon_t * i / cfg.n_diag for i in range(cfg.n_diag + 1)]
    states, ledger = run_window(setup.state0, gp, horizon_t, record_at=t_diag)
    sup = {"r": 0.0, "rt": 0.0, "rtt": 0.0}
    records: list[dict] = []
    for st in states:
        pe = assemble(setup.cset, pp, st.t)
        r = np.asarray(to_spectral(st.z).values) - np.asarray(to_spectral(pe.z).values)
        rt = np.asarray(to_spectral(st.z_t).values) - np.asarray(to_spectral(pe.z_t).values)
        rtt = np.asarray(to_spectral(st.z_tt).values) - np.asarray(to_spectral(pe.z_tt).values)
        rf = Field2D(pp.fast_grid, r, "spectral")
        rtf = Field2D(pp.fast_grid, rt, "spectral")
        rttf = Field2D(pp.fast_grid, rtt, "spectral")
        hse = lambda fld: norm_hseps(fld, cfg.s, eps, cfg.k)
        v_r, v_rt, v_rtt = hse(rf), hse(rtf), hse(rttf)
        sup["r"] = max(sup["r"], v_r)
        sup["rt"] = max(sup["rt"], v_rt)
        sup["rtt"] = max(sup["rtt"], v_rtt)
        A_now = setup.traj.sample(eps * eps * st.t)
        records.append({
            "t": st.t, "r_l2": norm_l2(rf), "r_hse": v_r, "rt_hse": v_rt,
            "rtt_hse": v_rtt, "lambda": lambda_of(st.z_tt, gp),
            "energy": hamiltonian(st, gp), "mass_progeny": norm_l2(A_now),
        })
    return {
        "row": {"epsilon": eps, "sup_r_hse": sup["r"], "sup_rt_hse": sup["rt"],
                "sup_rtt_hse": sup["rtt"]},
        "trace": records,
        "ledger": ledger,
        "energy0": hamiltonian(setup.state0, gp),
        "lam_star": gp.lam_star,
    }


def remainder_sweep(cfg: SweepConfig) -> dict:
    """Run the full pipeline for every eps and collect sup-norm rows.

    Returns ``{"rows", "fits", "traces", "ledgers", ...}``; a BlowupPenalty
    in any run propagates with the offending eps attached.
    """
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda e: _remainder_worker(cfg, e),
                                    cfg.epsilons))
    else:
        results = [_remainder_worker(cfg, e) for e in cfg.epsilons]
    rows = [r["row"] for r in results]
    fits = {
        name: fit_loglog_order([(row["epsilon"], row[col]) for row in rows])
        for name, col in (("r", "sup_r_hse"), ("rt", "sup_rt_hse"),
                          ("rtt", "sup_rtt_hse"))
    } if len(rows) >= 3 else {}
    return {
        "rows": rows,
        "fits": fits,
        "traces": {r["row"]["epsilon"]: r["trace"] for r in results},
        "ledgers": {r["row"]["epsilon"]: r["ledger"] for r in results},
        "energy0": {r["row"]["epsilon"]: r["energy0"] for r in results},
        "lam_star": {r["row"]["epsilon"]: r["lam_star"] for r in results},
    }


# ---------------------------------------------------------------------------
# residual orders (fixed slow grid, fast grid scaled per eps)


def _scaled_fast_grid(cfg: SweepConfig, eps: float) -> TorusGrid:
    """Fast grid for a fixed slow domain ``eps_anchor * fast_lx``.

    The anchor eps is the largest one; smaller eps get proportionally longer
    and finer fast grids so the spectral cutoff stays put.
    """
    anchor = cfg.epsilons[0]
    ratio = anchor / eps
    n = cfg.fast_nx * ratio
    lx = cfg.fast_lx * ratio
    if abs(n - round(n)) > 1e-9:
        raise ValidationError(
            f"eps={eps}: fast_nx * {anchor}/{eps} must be an integer")
    return make_grid(int(round(n)), int(round(n)), lx, lx, cfg.k)


def residual_order_study(cfg: SweepConfig, depths: tuple[int, ...] = (1, 2, 3),
                         sample_times_T: tuple[float, ...] | None = None) -> dict:
    """Sup-t residual L2 norms per (depth, eps) and their eps-slopes.

    One envelope trajectory on the shared slow grid serves every eps; the
    corrector set is built once at the deepest level and truncated.
    """
    slow_grid = _slow_grid(cfg, cfg.epsilons[0])
    A0 = make_profile(slow_grid, cfg.profile, **cfg.profile_kwargs)
    n_steps = _nls_step_count(cfg)
    nls_params = NLSParams(slow_grid=slow_grid, p=cfg.p, q=cfg.q, s=cfg.s,
                           k=cfg.k, dT=cfg.horizon_T / n_steps, T1=cfg.T1,
                           nl_scale=cfg.nl_scale)
    traj = run_nls(NLSState(A0, 0.0), nls_params, cfg.horizon_T)
    if sample_times_T is None:
        sample_times_T = tuple(cfg.horizon_T * i / 4 for i in range(5))
    max_depth = max(depths)
    # the hierarchy depends on (p, k, q) but not on eps, and the slow grid is
    # shared, so one corrector build serves every (eps, depth) pair
    pp0 = PacketParams(eps=cfg.epsilons[0], k=cfg.k, p=cfg.p, q=cfg.q,
                       s=cfg.s, nu=cfg.nu, depth=max_depth, nl_scale=cfg.nl_scale,
                       fast_grid=_scaled_fast_grid(cfg, cfg.epsilons[0]),
                       slow_grid=slow_grid)
    cs_full = build_correctors(pp0, traj)
    rows: list[dict] = []
    fits: dict[int, FitResult] = {}
    for depth in depths:
        pts = []
        for eps in cfg.epsilons:
            pp = replace(pp0, eps=eps, depth=depth,
                         fast_grid=_scaled_fast_grid(cfg, eps))
            cs = _truncate(cs_full, pp)
            sup = 0.0
            for T in sample_times_T:
                t = T / eps ** 2
                sup = max(sup, norm_l2(residual(cs, pp, t)))
            rows.append({"depth": depth, "epsilon": eps, "sup_res_l2": sup})
            pts.append((eps, sup))
        if len(pts) >= 3:
            fits[depth] = fit_loglog_order(pts)
    return {"rows": rows, "fits": fits}


def _truncate(cset: CorrectorSet, pp: PacketParams) -> CorrectorSet:
    """Corrector set restricted to ``pp.depth`` (the hierarchy is triangular,
    so the shallow set is exactly what a shallow build would produce)."""
    spectra = {n: cset.spectra[n] for n in range(1, pp.depth + 1)}
    rhs = {n: cset.rhs[n] for n in range(1, pp.depth + 1)}
    return CorrectorSet(pp, cset.traj, spectra, rhs)


# ---------------------------------------------------------------------------
# leading-order pairing identity


def modulation_identity_check(cfg: SweepConfig,
                              sample_times_T: tuple[float, ...] = (0.04, 0.08),
                              ) -> dict:
    """Both sides of the leading-order pairing identity

        < Lam^2s_eps ztil_tt, -|D|^p ztil_t - C_w eps^2 d/dt B(ztil |ztil/eps|^(q-1)) >
            =  (w^3 C_w / 2) eps^2 < Lam^2s A, i A |A|^(q-1) >  +  O(eps^3).

    The constant w^3/2 comes from the same multiscale bookkeeping as the
    packet itself (two inner factors i w from ztil_tt, the surviving
    combinatorial weight 1, and C_w/(2 w) from eliminating dT A).
    """
    slow_grid = _slow_grid(cfg, cfg.epsilons[0])
    A0 = make_profile(slow_grid, cfg.profile, **cfg.profile_kwargs)
    n_steps = _nls_step_count(cfg)
    nls_params = NLSParams(slow_grid=slow_grid, p=cfg.p, q=cfg.q, s=cfg.s,
                           k=cfg.k, dT=cfg.horizon_T / n_steps, T1=cfg.T1,
                           nl_scale=cfg.nl_scale)
    traj = run_nls(NLSState(A0, 0.0), nls_params, cfg.horizon_T)
    rows: list[dict] = []
    pp0 = PacketParams(eps=cfg.epsilons[0], k=cfg.k, p=cfg.p, q=cfg.q,
                       s=cfg.s, nu=cfg.nu, depth=cfg.depth, nl_scale=cfg.nl_scale,
                       fast_grid=_scaled_fast_grid(cfg, cfg.epsilons[0]),
                       slow_grid=slow_grid)
    cs_full = build_correctors(pp0, traj)
    for eps in cfg.epsilons:
        fast_grid = _scaled_fast_grid(cfg, eps)
        pp = replace(pp0, eps=eps, fast_grid=fast_grid)
        cs = _truncate(cs_full, pp)
        lam2s = rescaled_bessel(2.0 * cfg.s, eps, cfg.k)
        ball = mode_filter(cfg.k)
        for T in sample_times_T:
            t = T / eps ** 2
            pe = assemble(cs, pp, t)
            z = np.asarray(to_physical(pe.z).values)
            zt = np.asarray(to_physical(pe.z_t).values)
            absz = np.abs(z)
            dnl = (0.5 * (cfg.q + 1) * zt * absz ** (cfg.q - 1)
                   + 0.5 * (cfg.q - 1) * z * z * np.conj(zt) * absz ** (cfg.q - 3))
            dnl_f = apply_multiplier(Field2D(fast_grid, dnl, "physical"), ball)
            rhs_field = Field2D(
                fast_grid,
                -np.asarray(apply_multiplier(pe.z_t, solid_power(cfg.p)).values)
                - pp.c_omega * eps ** (3 - cfg.q) * np.asarray(dnl_f.values),
                "spectral")
            pairing = inner_product(apply_multiplier(pe.z_tt, lam2s), rhs_field)
            A = traj.sample(T)
            nl = pointwise_power(A, cfg.q, dealias=True)
            inl = Field2D(slow_grid, 1j * np.asarray(to_spectral(nl).values),
                          "spectral")
            pred_inner = inner_product(
                apply_multiplier(A, bessel_power(2.0 * cfg.s)), inl)
            w = pp.omega
            prediction = 0.5 * w ** 3 * pp.c_omega * eps ** 2 * pred_inner
            diff = abs(pairing - prediction)
            rows.append({"epsilon": eps, "T": T, "pairing": pairing,
                         "prediction": prediction, "abs_diff": diff,
                         "diff_over_eps3": diff / eps ** 3})
    return {"rows": rows}


# ---------------------------------------------------------------------------
# envelope transport


def envelope_speed_check(cfg: SweepConfig, eps: float | None = None) -> dict:
    """Track the centroid of |z|^2 along a progenitor run and fit its speed.

    Returns the fitted velocity (expected -w'), the per-sample centroid rows
    and the co-moving drift in grid cells.
    """
    eps = cfg.epsilons[0] if eps is None else eps
    setup = prepare_run(cfg, eps)
    gp = setup.prog_params
    horizon_t = min(1.0 / eps, cfg.horizon_T / eps ** 2)
    n_rec = cfg.n_diag
    window = horizon_t / n_rec
    n_sub = max(1, math.ceil(window / cfg.h_target))
    gp = replace(gp, n_sub=n_sub, t0=window / 2.0)
    t_rec = [horizon_t * i / n_rec for i in range(n_rec + 1)]
    states, _ = run_window(setup.state0, gp, horizon_t, record_at=t_rec)
    grid = setup.fast_grid
    x = grid.x
    wp = setup.packet_params.omega_prime
    rows = []
    prev_c = None
    offset = 0.0
    for st in states:
        dens = np.abs(np.asarray(to_physical(st.z).values)) ** 2
        wsum = float(dens.sum())
        # unwrap against the previous centroid so transport is monotone
        cx = float((dens.sum(axis=1) * x).sum() / wsum)
        if prev_c is not None:
            while cx + offset - prev_c > grid.lx / 2:
                offset -= grid.lx
            while cx + offset - prev_c < -grid.lx / 2:
                offset += grid.lx
        cx = cx + offset
        prev_c = cx
        rows.append({"t": st.t, "centroid_x": cx,
                     "comoving_x": cx + wp * st.t})
    ts = np.array([r["t"] for r in rows])
    cs = np.array([r["centroid_x"] for r in rows])
    slope = float(np.polyfit(ts, cs, 1)[0])
    drift_cells = float(np.max(np.abs(
        np.array([r["comoving_x"] for r in rows]) - rows[0]["comoving_x"]))
        / grid.dx)
    return {"rows": rows, "velocity": slope, "expected": -wp,
            "drift_cells": drift_cells}


# ---------------------------------------------------------------------------
# norm growth


def norm_growth_experiment(cfg: SweepConfig, T_end: float | None = None) -> dict:
    """Envelope Sobolev-norm trace, growth functional, and a polynomial fit
    of the norm against (1 + T)."""
    T_end = cfg.horizon_T if T_end is None else T_end
    slow_grid = _slow_grid(cfg, cfg.epsilons[0])
    A0 = make_profile(slow_grid, cfg.profile, **cfg.profile_kwargs)
    n_steps = _nls_step_count(cfg)
    params = NLSParams(slow_grid=slow_grid, p=cfg.p, q=cfg.q, s=cfg.s,
                       k=cfg.k, dT=T_end / n_steps, T1=cfg.T1,
                       nl_scale=cfg.nl_scale)
    traj = run_nls(NLSState(A0, 0.0), params, T_end)
    rows = []
    idx = np.linspace(0, traj.n_steps, cfg.n_diag + 1).round().astype(int)
    for i in idx:
        st = traj.state(int(i))
        rows.append({"T": st.T, "hs_norm": norm_hs(st.A, cfg.s),
                     "growth_functional": growth_functional(st, params),
                     "mass": norm_l2(st.A)})
    pts = [(1.0 + r["T"], r["hs_norm"]) for r in rows if r["T"] > 0]
    fit = fit_loglog_order(pts) if len(pts) >= 3 else None
    return {"rows": rows, "fit": fit}


# ---------------------------------------------------------------------------
# jump refinement study


def jump_refinement_study(cfg: SweepConfig, eps: float | None = None,
                          n_subs: tuple[int, ...] = (16, 32, 64, 128),
                          window: float = 1.0) -> dict:
    """Mean z_tt jump size over one window for several subinterval counts."""
    eps = cfg.epsilons[0] if eps is None else eps
    setup = prepare_run(cfg, eps)
    rows = []
    for n_sub in n_subs:
        gp = replace(setup.prog_params, n_sub=n_sub, t0=window / 2.0,
                     fp_tol=1e-13)
        _, ledger = run_window(setup.state0, gp, window)
        jumps = [r.jump_l2 for r in ledger.rows[1:]]  # skip the t=0 seed jump
        rows.append({"n_sub": n_sub,
                     "mean_jump": float(np.mean(jumps)),
                     "max_jump": float(np.max(jumps))})
    fit = fit_loglog_order([(r["n_sub"], r["mean_jump"]) for r in rows]) \
        if len(rows) >= 3 else None
    return {"rows": rows, "fit": fit}
