import math

import pytest

from modlab import ParseError, RunConfig, ValidationError, parse_config, \
    serialize_config
from modlab.cli import (EXIT_BLOWUP, EXIT_NOCONV, EXIT_OK, EXIT_USAGE,
                        EXIT_VALIDATION, dispatch, main)
from modlab.errors import BlowupPenalty, NoConvergence

MINIMAL = """
[packet]
epsilon = 0.1
k = 2.0
p = 1.0
q = 3
s = 1.0
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.progenitor.c_growth == 1e5
    assert cfg.packet.nu == 1.5
    assert cfg.packet.depth == 3
    assert cfg.packet.t1 == 1.0
    assert cfg.grid.nx == 256


def test_nu_out_of_range():
    with pytest.raises(ValidationError, match="nu out of"):
        parse_config(MINIMAL + "nu = 2.5\n")


def test_parse_error_reports_position():
    with pytest.raises(ParseError, match="line"):
        parse_config("[packet\nepsilon = 0.1")


def test_unknown_key_rejected():
    with pytest.raises(ValidationError, match="unknown key"):
        parse_config("[packet]\nepsilonn = 0.1\n")


def test_penalty_scale_validation():
    # 1e5 * 0.25^7 = 6.1 < 64 is fine; bump c_growth to break it
    bad = MINIMAL + "\n[progenitor]\nc_growth = 1.1e9\n"
    with pytest.raises(ValidationError, match="64"):
        parse_config(bad)


def test_round_trip_serialize_parse():
    cfg = parse_config(MINIMAL + "depth = 2\n\n[sweep]\nepsilons = [0.1, 0.05]\n")
    text = serialize_config(cfg)
    again = parse_config(text)
    assert again == cfg


def test_carrier_must_fit_grid():
    bad = "[packet]\nepsilon = 0.1\nk = 0.3\np = 1.0\nq = 3\ns = 1.0\n"
    with pytest.raises(ValidationError, match="carrier"):
        parse_config(bad)


# ---------------------------------------------------------------------------
# dispatch / exit codes


def test_check_dispersion_output(capsys):
    cfg = parse_config("[packet]\nepsilon = 0.1\nk = 4.0\np = 1.0\nq = 3\n"
                       "s = 1.0\n[grid]\nlx = 16.0\n"
                       .replace("lx = 16.0", f"lx = {8 * math.pi}"))
    code = dispatch("check-dispersion", cfg)
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "omega = 2" in out
    assert "omega_prime = 0.25" in out


def test_unknown_command(capsys):
    code = dispatch("frobnicate", RunConfig())
    assert code == EXIT_USAGE
    assert "unknown command" in capsys.readouterr().err


def test_validation_failure_exit_code(tmp_path, capsys):
    cfg = RunConfig()
    cfg.packet.nu = 2.5
    code = dispatch("check-dispersion", cfg, out_dir=str(tmp_path))
    assert code == EXIT_VALIDATION
    assert "validation" in capsys.readouterr().err


def test_blowup_and_noconv_exit_codes(monkeypatch, tmp_path, capsys):
    import modlab.cli as cli

    def boom(cfg, out, threads, quiet):
        raise BlowupPenalty("lambda hit 1", t=3.25)

    def stall(cfg, out, threads, quiet):
        raise NoConvergence("gbar stuck")

    monkeypatch.setitem(cli._HANDLERS, "progenitor-run", boom)
    assert dispatch("progenitor-run", RunConfig(), str(tmp_path)) == EXIT_BLOWUP
    assert "t=3.25" in capsys.readouterr().err
    monkeypatch.setitem(cli._HANDLERS, "progenitor-run", stall)
    assert dispatch("progenitor-run", RunConfig(), str(tmp_path)) == EXIT_NOCONV


def test_main_env_threads_invalid(monkeypatch, capsys):
    monkeypatch.setenv("MODLAB_THREADS", "many")
    assert main(["check-dispersion"]) == EXIT_VALIDATION
    assert "MODLAB_THREADS" in capsys.readouterr().err


def test_main_check_dispersion_default_config(monkeypatch, capsys):
    monkeypatch.delenv("MODLAB_THREADS", raising=False)
    assert main(["check-dispersion"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "omega" in out


def _fast_cli_config(tmp_path):
    text = f"""
[grid]
nx = 64
ny = 64
lx = {16 * math.pi}
ly = {16 * math.pi}

[packet]
epsilon = 0.125
k = 2.0
p = 1.0
q = 3
s = 1.0
depth = 2

[sweep]
epsilons = [0.125]
horizon_T = 0.02
n_diag = 2
h_target = 0.5
slow_nx = 32
sigma = 0.6

[output]
dir = "{tmp_path / 'out'}"
"""
    path = tmp_path / "cfg.toml"
    path.write_text(text)
    return path


def test_cli_sweep_remainder_single_eps(tmp_path, monkeypatch):
    monkeypatch.delenv("MODLAB_THREADS", raising=False)
    cfg_path = _fast_cli_config(tmp_path)
    code = main(["sweep-remainder", "--config", str(cfg_path), "--quiet"])
    assert code == EXIT_OK
    out = tmp_path / "out"
    lines = (out / "remainder_sweep.csv").read_text().strip().splitlines()
    assert lines[0] == "epsilon,sup_r_hse,sup_rt_hse,sup_rtt_hse"
    assert len(lines) == 2
    assert (out / "remainder_manifest.json").exists()


def test_cli_growth_and_identity(tmp_path, monkeypatch):
    monkeypatch.delenv("MODLAB_THREADS", raising=False)
    cfg_path = _fast_cli_config(tmp_path)
    assert main(["growth-track", "--config", str(cfg_path), "--quiet"]) == EXIT_OK
    assert (tmp_path / "out" / "growth_trace.csv").exists()
    assert main(["packet-build", "--config", str(cfg_path), "--quiet"]) == EXIT_OK
    assert (tmp_path / "out" / "correctors.bin").exists()


def test_cli_progenitor_run_invalid_penalty_scale(tmp_path, monkeypatch):
    monkeypatch.delenv("MODLAB_THREADS", raising=False)
    cfg_path = _fast_cli_config(tmp_path)
    text = cfg_path.read_text() + "\n[progenitor]\nc_growth = 1.1e9\n"
    bad = tmp_path / "bad.toml"
    bad.write_text(text)
    assert main(["progenitor-run", "--config", str(bad)]) == EXIT_VALIDATION


def test_cli_progenitor_nls_identity(tmp_path, monkeypatch):
    monkeypatch.delenv("MODLAB_THREADS", raising=False)
    cfg_path = _fast_cli_config(tmp_path)
    assert main(["progenitor-run", "--config", str(cfg_path), "--quiet"]) == EXIT_OK
    ledger = (tmp_path / "out" / "progenitor_ledger.csv").read_text()
    assert ledger.splitlines()[0] == "t,lambda,g_bar,energy,jump_l2"
    assert main(["nls-run", "--config", str(cfg_path), "--quiet"]) == EXIT_OK
    assert (tmp_path / "out" / "nls_trace.csv").exists()
    assert main(["check-identity", "--config", str(cfg_path), "--quiet"]) == EXIT_OK
    head = (tmp_path / "out" / "identity_check.csv").read_text().splitlines()[0]
    assert head == "epsilon,T,pairing,prediction,abs_diff,diff_over_eps3"
