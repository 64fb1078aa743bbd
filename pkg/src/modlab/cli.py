"""Command-line front end.

Exit codes are a stable contract: 0 success, 2 configuration/validation
failure, 3 control-norm blow-up, 4 fixed-point non-convergence, 64 usage.
stderr carries one structured line per failure; stdout is human progress.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from .config import RunConfig, load_config, validate
from .errors import (BlowupPenalty, ModlabError, NoConvergence, ParseError,
                     PenaltyScaleInvalid, ValidationError)
from .io import emit_csv, emit_manifest
from . import harness
from .packet import dispersion, group_velocity

COMMANDS = ("nls-run", "packet-build", "progenitor-run", "sweep-remainder",
            "check-dispersion", "check-identity", "growth-track")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BLOWUP = 3
EXIT_NOCONV = 4
EXIT_USAGE = 64


def _sweep_config(cfg: RunConfig, threads: int) -> harness.SweepConfig:
    prof_params = [("sigma", cfg.sweep.sigma)]
    if cfg.sweep.chirp != 0.0:
        prof_params.append(("chirp", cfg.sweep.chirp))
    pg = cfg.progenitor
    if pg.omega_mode == "explicit":
        omega = pg.omega
    elif pg.omega_mode == "calibrated":
        from .progenitor import calibrate_omega
        omega = calibrate_omega(cfg.packet.p, cfg.packet.q, pg.calib_T,
                                pg.calib_sup, pg.calib_const)
    else:
        omega = 0.0
    return harness.SweepConfig(
        omega_override=omega,
        epsilons=tuple(cfg.sweep.epsilons),
        horizon_T=cfg.sweep.horizon_T,
        depth=cfg.packet.depth,
        profile=cfg.sweep.profile,
        profile_params=tuple(prof_params),
        k=cfg.packet.k, p=cfg.packet.p, q=cfg.packet.q, s=cfg.packet.s,
        nu=cfg.packet.nu, T1=cfg.packet.t1, c_growth=cfg.progenitor.c_growth,
        fast_nx=cfg.grid.nx, fast_lx=cfg.grid.lx,
        slow_nx=cfg.sweep.slow_nx, n_diag=cfg.sweep.n_diag,
        h_target=cfg.sweep.h_target, threads=threads)


def _progress(quiet: bool, msg: str) -> None:
    if not quiet:
        print(msg, flush=True)


def _cmd_check_dispersion(cfg, out, threads, quiet) -> int:
    w = dispersion(cfg.packet.k, cfg.packet.p)
    wp = group_velocity(cfg.packet.k, cfg.packet.p)
    print(f"omega = {w:.12g}")
    print(f"omega_prime = {wp:.12g}")
    return EXIT_OK


def _cmd_nls_run(cfg, out, threads, quiet) -> int:
    sc = _sweep_config(cfg, threads)
    t0 = time.perf_counter()
    res = harness.norm_growth_experiment(sc)
    emit_csv(res["rows"], out / "nls_trace.csv",
             ("T", "hs_norm", "growth_functional", "mass"))
    emit_manifest(cfg.as_dict(), out / "nls_manifest.json",
                  timings={"total": time.perf_counter() - t0})
    _progress(quiet, f"wrote {out / 'nls_trace.csv'}")
    return EXIT_OK


def _cmd_growth_track(cfg, out, threads, quiet) -> int:
    sc = _sweep_config(cfg, threads)
    t0 = time.perf_counter()
    res = harness.norm_growth_experiment(sc)
    emit_csv(res["rows"], out / "growth_trace.csv",
             ("T", "hs_norm", "growth_functional", "mass"))
    rows = []
    if res["fit"] is not None:
        f = res["fit"]
        rows.append({"slope": f.slope, "intercept": f.intercept,
                     "r_squared": f.r_squared})
    emit_csv(rows, out / "growth_fit.csv", harness.FIT_COLUMNS)
    emit_manifest(cfg.as_dict(), out / "growth_manifest.json",
                  timings={"total": time.perf_counter() - t0})
    _progress(quiet, f"wrote {out / 'growth_trace.csv'}")
    return EXIT_OK


def _cmd_packet_build(cfg, out, threads, quiet) -> int:
    from .packet import dump_correctors
    sc = _sweep_config(cfg, threads)
    t0 = time.perf_counter()
    setup = harness.prepare_run(sc, cfg.packet.epsilon)
    out.mkdir(parents=True, exist_ok=True)
    dump_correctors(setup.cset, out / "correctors.bin")
    emit_manifest(cfg.as_dict(), out / "packet_manifest.json",
                  timings={"total": time.perf_counter() - t0},
                  extra={"grid": {"nx": setup.fast_grid.nx,
                                  "lx": setup.fast_grid.lx,
                                  "carrier_index": setup.fast_grid.carrier_index}})
    _progress(quiet, f"wrote {out / 'correctors.bin'}")
    return EXIT_OK


def _cmd_progenitor_run(cfg, out, threads, quiet) -> int:
    sc = _sweep_config(cfg, threads)
    t0 = time.perf_counter()
    from .progenitor import run_window
    eps = cfg.packet.epsilon
    setup = harness.prepare_run(sc, eps)
    horizon_t = sc.horizon_T / eps ** 2
    _, ledger = run_window(setup.state0, setup.prog_params, horizon_t)
    rows = [{"t": r.t, "lambda": r.lam, "g_bar": r.g_bar, "energy": r.energy,
             "jump_l2": r.jump_l2} for r in ledger.rows]
    emit_csv(rows, out / "progenitor_ledger.csv",
             ("t", "lambda", "g_bar", "energy", "jump_l2"))
    emit_manifest(cfg.as_dict(), out / "progenitor_manifest.json",
                  timings={"total": time.perf_counter() - t0},
                  extra={"grid": {"nx": setup.fast_grid.nx,
                                  "ny": setup.fast_grid.ny,
                                  "lx": setup.fast_grid.lx,
                                  "ly": setup.fast_grid.ly,
                                  "carrier_index": setup.fast_grid.carrier_index},
                         "iterations": {
                      "max_fp": max(ledger.fp_iterations, default=0),
                      "mean_fp": (sum(ledger.fp_iterations) /
                                  max(1, len(ledger.fp_iterations)))},
                      "max_lambda": ledger.max_lambda})
    _progress(quiet, f"wrote {out / 'progenitor_ledger.csv'}")
    return EXIT_OK


def _cmd_sweep_remainder(cfg, out, threads, quiet) -> int:
    sc = _sweep_config(cfg, threads)
    t0 = time.perf_counter()
    res = harness.remainder_sweep(sc)
    emit_csv(res["rows"], out / "remainder_sweep.csv", harness.REMAINDER_COLUMNS)
    fit_rows = [{"norm": name, "slope": f.slope, "intercept": f.intercept,
                 "r_squared": f.r_squared} for name, f in res["fits"].items()]
    emit_csv(fit_rows, out / "remainder_fits.csv",
             ("norm",) + harness.FIT_COLUMNS)
    for eps, trace in res["traces"].items():
        emit_csv(trace, out / f"trace_eps_{eps}.csv", harness.DIAGNOSTIC_COLUMNS)
    emit_manifest(cfg.as_dict(), out / "remainder_manifest.json",
                  timings={"total": time.perf_counter() - t0})
    _progress(quiet, f"wrote {out / 'remainder_sweep.csv'} "
                     f"({len(res['rows'])} rows)")
    return EXIT_OK


def _cmd_check_identity(cfg, out, threads, quiet) -> int:
    # the identity study scales the fast grid per eps, which needs integer
    # eps ratios; derive a halving pair from the packet epsilon
    sc = _sweep_config(cfg, threads)
    eps = cfg.packet.epsilon
    sc = replace(sc, epsilons=(eps, eps / 2.0))
    t0 = time.perf_counter()
    times = (0.4 * sc.horizon_T, 0.8 * sc.horizon_T)
    res = harness.modulation_identity_check(sc, sample_times_T=times)
    emit_csv(res["rows"], out / "identity_check.csv",
             ("epsilon", "T", "pairing", "prediction", "abs_diff",
              "diff_over_eps3"))
    emit_manifest(cfg.as_dict(), out / "identity_manifest.json",
                  timings={"total": time.perf_counter() - t0})
    _progress(quiet, f"wrote {out / 'identity_check.csv'}")
    return EXIT_OK


_HANDLERS = {
    "check-dispersion": _cmd_check_dispersion,
    "nls-run": _cmd_nls_run,
    "growth-track": _cmd_growth_track,
    "packet-build": _cmd_packet_build,
    "progenitor-run": _cmd_progenitor_run,
    "sweep-remainder": _cmd_sweep_remainder,
    "check-identity": _cmd_check_identity,
}


def dispatch(command: str, cfg: RunConfig, out_dir: str | None = None,
             threads: int = 1, quiet: bool = False) -> int:
    """Run one command; returns the exit code."""
    if command not in _HANDLERS:
        sys.stderr.write(f"error: usage: unknown command {command!r}; "
                         f"choose from {', '.join(COMMANDS)}\n")
        return EXIT_USAGE
    out = Path(out_dir if out_dir is not None else cfg.output.dir)
    try:
        validate(cfg)
        return _HANDLERS[command](cfg, out, threads, quiet)
    except (ValidationError, ParseError, PenaltyScaleInvalid) as exc:
        sys.stderr.write(f"error: validation: {exc}\n")
        return EXIT_VALIDATION
    except BlowupPenalty as exc:
        sys.stderr.write(f"error: blowup-penalty: {exc} (t={exc.t})\n")
        return EXIT_BLOWUP
    except NoConvergence as exc:
        sys.stderr.write(f"error: no-convergence: {exc}\n")
        return EXIT_NOCONV
    except ModlabError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="modlab",
        description="Wave-packet modulation laboratory")
    parser.add_argument("command", help=f"one of: {', '.join(COMMANDS)}")
    parser.add_argument("--config", type=str, default=None,
                        help="TOML configuration path (defaults apply if omitted)")
    parser.add_argument("--out", type=str, default=None,
                        help="output directory (overrides [output].dir)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--quiet", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    threads = args.threads
    env_threads = os.environ.get("MODLAB_THREADS")
    if env_threads:
        try:
            threads = int(env_threads)
        except ValueError:
            sys.stderr.write("error: validation: MODLAB_THREADS must be an"
                             " integer\n")
            return EXIT_VALIDATION
    try:
        cfg = load_config(args.config) if args.config else validate(RunConfig())
    except ParseError as exc:
        sys.stderr.write(f"error: parse: {exc}\n")
        return EXIT_VALIDATION
    except (ValidationError, PenaltyScaleInvalid) as exc:
        sys.stderr.write(f"error: validation: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"error: io: {exc}\n")
        return EXIT_VALIDATION
    return dispatch(args.command, cfg, args.out, threads, args.quiet)


if __name__ == "__main__":
    sys.exit(main())
