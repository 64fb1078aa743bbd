"""TOML run configuration: parsing, defaults, validation, serialization."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .errors import ParseError, PenaltyScaleInvalid, ValidationError
from .grid import make_grid
from .nls import critical_index
from .progenitor import lambda_star_of


@dataclass
class GridSection:
    nx: int = 256
    ny: int = 256
    lx: float = 64.0 * math.pi
    ly: float = 64.0 * math.pi


@dataclass
class PacketSection:
    epsilon: float = 0.1
    k: float = 2.0
    p: float = 1.0
    q: int = 3
    s: float = 1.0
    nu: float = 1.5
    t1: float = 1.0
    depth: int = 3


@dataclass
class ProgenitorSection:
    c_growth: float = 1e5
    omega_mode: str = "dispersion"      # dispersion | explicit | calibrated
    omega: float = 0.0                  # used when omega_mode == explicit
    calib_const: float = 1.0            # calibrated mode knobs
    calib_T: float = 1.0
    calib_sup: float = 1.0
    n_sub: int = 64
    t0: float = 0.5
    fp_tol: float = 1e-10
    fp_maxiter: int = 25


@dataclass
class SweepSection:
    epsilons: list[float] = field(default_factory=lambda: [0.1, 0.07, 0.05])
    horizon_T: float = 0.25
    profile: str = "gaussian"
    sigma: float = 1.0
    chirp: float = 0.0
    n_diag: int = 8
    h_target: float = 0.1
    slow_nx: int = 128


@dataclass
class OutputSection:
    dir: str = "out"
    formats: list[str] = field(default_factory=lambda: ["csv", "json"])


@dataclass
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    packet: PacketSection = field(default_factory=PacketSection)
    progenitor: ProgenitorSection = field(default_factory=ProgenitorSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    output: OutputSection = field(default_factory=OutputSection)

    def as_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "grid": GridSection,
    "packet": PacketSection,
    "progenitor": ProgenitorSection,
    "sweep": SweepSection,
    "output": OutputSection,
}


def _build_section(cls, data: dict, name: str):
    known = {f.name: f for f in fields(cls)}
    out = cls()
    for key, val in data.items():
        if key not in known:
            raise ValidationError(f"[{name}] has unknown key {key!r}")
        expected = known[key].type
        cur = getattr(out, key)
        if isinstance(cur, int) and not isinstance(cur, bool) \
                and isinstance(val, float) and val.is_integer():
            val = int(val)
        if isinstance(cur, float) and isinstance(val, int):
            val = float(val)
        if type(val) is not type(cur):
            raise ValidationError(
                f"[{name}].{key}: expected {type(cur).__name__}, "
                f"got {type(val).__name__}")
        setattr(out, key, val)
    return out


def validate(cfg: RunConfig) -> RunConfig:
    """Re-check every cross-field constraint owned by the solver modules."""
    pk, gr, pg, sw = cfg.packet, cfg.grid, cfg.progenitor, cfg.sweep
    if not (1.0 < pk.nu < 2.0):
        raise ValidationError(f"nu out of (1,2): {pk.nu}")
    if pk.p <= 0 or pk.p == 2:
        raise ValidationError(f"p must be positive and != 2: {pk.p}")
    if pk.q < 3 or pk.q % 2 == 0:
        raise ValidationError(f"q must be odd and >= 3: {pk.q}")
    if pk.s <= critical_index(pk.q):
        raise ValidationError(
            f"s={pk.s} not above critical index {critical_index(pk.q)}")
    if not (0.0 < pk.epsilon <= 0.25):
        raise ValidationError(f"epsilon out of (0, 0.25]: {pk.epsilon}")
    if not (1 <= pk.depth <= 6):
        raise ValidationError(f"depth out of 1..6: {pk.depth}")
    try:
        make_grid(gr.nx, gr.ny, gr.lx, gr.ly, pk.k)
    except Exception as exc:
        raise ValidationError(f"grid cannot host carrier k={pk.k}: {exc}") from exc
    try:
        lambda_star_of(pk.epsilon, pk.q, pg.c_growth)
        for e in sw.epsilons:
            lambda_star_of(e, pk.q, pg.c_growth)
    except PenaltyScaleInvalid as exc:
        raise ValidationError(str(exc)) from exc
    if pg.omega_mode not in ("dispersion", "explicit", "calibrated"):
        raise ValidationError(f"unknown omega_mode {pg.omega_mode!r}")
    if pg.omega_mode == "explicit" and pg.omega <= 0:
        raise ValidationError("omega_mode=explicit needs omega > 0")
    if sorted(sw.epsilons, reverse=True) != sw.epsilons or \
            len(set(sw.epsilons)) != len(sw.epsilons):
        raise ValidationError("sweep.epsilons must be strictly decreasing")
    if sw.horizon_T <= 0:
        raise ValidationError("sweep.horizon_T must be positive")
    if pg.n_sub < 1 or pg.t0 <= 0 or pg.fp_tol <= 0 or pg.fp_maxiter < 1:
        raise ValidationError("progenitor stepping parameters must be positive")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse TOML text, apply defaults, validate."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc)) from exc
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ValidationError(f"unknown sections: {sorted(unknown)}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        section = data.get(name, {})
        if not isinstance(section, dict):
            raise ValidationError(f"[{name}] must be a table")
        kwargs[name] = _build_section(cls, section, name)
    return validate(RunConfig(**kwargs))


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def serialize_config(cfg: RunConfig) -> str:
    """Round-trippable TOML text (parse(serialize(cfg)) == cfg)."""
    lines = []
    for name in _SECTIONS:
        section = getattr(cfg, name)
        lines.append(f"[{name}]")
        for f in fields(section):
            lines.append(f"{f.name} = {_toml_value(getattr(section, f.name))}")
        lines.append("")
    return "\n".join(lines)
