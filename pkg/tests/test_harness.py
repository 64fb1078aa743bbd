import math

import numpy as np
import pytest

from modlab import SweepConfig, ValidationError
from modlab.harness import (envelope_speed_check, jump_refinement_study,
                            modulation_identity_check, norm_growth_experiment,
                            prepare_run, remainder_sweep, residual_order_study)


def tiny_cfg(**kw):
    defaults = dict(epsilons=(0.125,), horizon_T=0.02, depth=2, k=2.0,
                    fast_nx=64, fast_lx=16 * math.pi, slow_nx=32,
                    n_diag=2, h_target=0.5, nls_steps_min=40,
                    profile_params=(("sigma", 0.6),))
    defaults.update(kw)
    return SweepConfig(**defaults)


def test_sweepconfig_validation():
    with pytest.raises(ValidationError):
        SweepConfig(epsilons=(0.05, 0.1))
    with pytest.raises(ValidationError):
        SweepConfig(horizon_T=-1.0)


def test_prepare_run_shapes():
    setup = prepare_run(tiny_cfg(), 0.125)
    assert setup.slow_grid.lx == pytest.approx(0.125 * setup.fast_grid.lx)
    assert setup.state0.g_bar > 0.0


def test_remainder_sweep_structure_and_determinism():
    cfg = tiny_cfg()
    r1 = remainder_sweep(cfg)
    r2 = remainder_sweep(cfg)
    assert len(r1["rows"]) == 1
    row = r1["rows"][0]
    assert set(row) == {"epsilon", "sup_r_hse", "sup_rt_hse", "sup_rtt_hse"}
    assert row == r2["rows"][0]          # identical runs, identical numbers
    trace = r1["traces"][0.125]
    assert [r["t"] for r in trace] == sorted(r["t"] for r in trace)
    assert all(np.isfinite(list(r.values())).all() for r in trace)


def test_remainder_sweep_threaded_matches_serial():
    cfg = tiny_cfg()
    serial = remainder_sweep(cfg)
    threaded = remainder_sweep(tiny_cfg(threads=2))
    assert serial["rows"] == threaded["rows"]


def test_residual_order_study_small():
    cfg = tiny_cfg(epsilons=(0.125, 0.0625), depth=2, nls_steps_min=40)
    res = residual_order_study(cfg, depths=(1, 2),
                               sample_times_T=(0.0, 0.01, 0.02))
    assert {r["depth"] for r in res["rows"]} == {1, 2}
    # halving eps divides the depth-d residual by about 2^(d+2)
    by_depth = {d: [r["sup_res_l2"] for r in res["rows"] if r["depth"] == d]
                for d in (1, 2)}
    for d in (1, 2):
        ratio = by_depth[d][0] / by_depth[d][1]
        assert 2 ** (d + 2 - 0.8) <= ratio <= 2 ** (d + 2 + 0.8), (d, ratio)


def test_identity_check_real_data_at_T0():
    cfg = tiny_cfg(epsilons=(0.125,), depth=2)
    res = modulation_identity_check(cfg, sample_times_T=(0.0,))
    row = res["rows"][0]
    # real envelope at T = 0: the prediction side vanishes, the packet side
    # must be O(eps^3)
    assert abs(row["prediction"]) <= 1e-12
    assert abs(row["pairing"]) <= 5.0 * 0.125 ** 3


def test_envelope_speed_check_linearized():
    cfg = tiny_cfg(horizon_T=0.25, nl_scale=0.0, penalty_scale=0.0,
                   n_diag=4, h_target=0.25)
    res = envelope_speed_check(cfg)
    assert res["velocity"] == pytest.approx(res["expected"], rel=0.02)
    assert res["drift_cells"] < 0.5


def test_norm_growth_linear_flow_constant():
    cfg = tiny_cfg(nl_scale=0.0, horizon_T=0.1, nls_steps_min=50, n_diag=5)
    res = norm_growth_experiment(cfg)
    h = [r["hs_norm"] for r in res["rows"]]
    assert max(h) - min(h) <= 1e-10 * h[0]
    g = [r["growth_functional"] for r in res["rows"]]
    assert g[0] == pytest.approx(h[0] ** 2, rel=1e-10)


def test_omega_override_reaches_progenitor():
    # an override near the dispersion value keeps the packet data admissible
    setup = prepare_run(tiny_cfg(omega_override=1.5), 0.125)
    assert setup.prog_params.omega == 1.5
    setup2 = prepare_run(tiny_cfg(), 0.125)
    assert setup2.prog_params.omega == pytest.approx(2.0 ** 0.5)


def test_norm_growth_defocusing_elliptic():
    """p = 3 (elliptic defocusing) Gaussian run: bounded trace, finite fit."""
    cfg = tiny_cfg(p=3.0, horizon_T=5.0, nls_steps_min=400, n_diag=8)
    res = norm_growth_experiment(cfg)
    h = [r["hs_norm"] for r in res["rows"]]
    assert all(np.isfinite(h)) and max(h) <= 5.0 * h[0]
    assert res["fit"] is not None and np.isfinite(res["fit"].slope)
    m = [r["mass"] for r in res["rows"]]
    assert max(m) - min(m) <= 1e-10 * m[0]


def test_penalty_negligible_for_remainder():
    """Disabling the penalty term barely moves the remainder (its size is
    O(eps^(q+4)) against the eps^3 signal)."""
    on = remainder_sweep(tiny_cfg())["rows"][0]
    off = remainder_sweep(tiny_cfg(penalty_scale=0.0))["rows"][0]
    assert off["sup_r_hse"] == pytest.approx(on["sup_r_hse"], rel=1e-2)


def test_jump_refinement_structure():
    cfg = tiny_cfg()
    res = jump_refinement_study(cfg, n_subs=(4, 8), window=0.5)
    jumps = [r["mean_jump"] for r in res["rows"]]
    assert jumps[1] < jumps[0]
