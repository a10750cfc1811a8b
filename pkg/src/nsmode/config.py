"""INI run configuration with typed sections and line-aware diagnostics.

Example::

    [reservoir]
    gamma0 = 1.0
    xi = 1.0

    [modulation]
    omega0 = 1e4
    chi = 10.0
    zeta = 10.0

    [run]
    scaled_t_max = 5.0
    samples = 101

Instead of [modulation] a run may list dimensionless sets,
``groups = 0.1:0.1, 0.5:0.1`` (varkappa:kappa), together with ``omega0``.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .engineering import DriveSpec
from .params import ModulationSpec, ReservoirSpec, modulation_from_groups

SECTIONS = ("modulation", "reservoir", "cat", "bath", "drive", "run", "sweep")


class ConfigError(ValueError):
    def __init__(self, message, *, line=None, section=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if section:
            where.append(f"[{section}]" + (f" {key}" if key else ""))
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line, self.section, self.key = line, section, key


@dataclass(frozen=True)
class ModulationSection:
    omega0: float = 1e4
    chi: float = 0.0
    zeta: float = 0.0
    sign: int = -1


@dataclass(frozen=True)
class ReservoirSection:
    gamma0: float = 1.0
    xi: float = 1.0
    lambda0: float = 1.0


@dataclass(frozen=True)
class CatSection:
    alpha0: float = 1.0
    n_cut: int = 24


@dataclass(frozen=True)
class BathSection:
    modes: int = 4000
    halfwidth_xi_multiples: float = 16.5
    horizon_factor: float = 2.0


@dataclass(frozen=True)
class DriveSection:
    G: float = 3e5
    delta1: float = 1e6
    delta2: float = 1e7
    F0: float = 3e6
    phi: float = math.pi / 4
    zeta: float = 1e6
    omega_c: float = 0.0
    convention: str = "printed"
    compare: bool = False
    n_max: int = 4
    n_cut: int = 24


@dataclass(frozen=True)
class RunSection:
    t_max: float = 0.0           # absolute time; 0 means use scaled_t_max
    scaled_t_max: float = 5.0    # gamma0 * t
    samples: int = 101
    output: str = "out"
    groups: tuple = ()           # ((varkappa, kappa), ...)
    display_omega0_ratio: float = 0.0   # omega0/gamma0 for trajectory plots
    oracle_samples: int = 41


@dataclass(frozen=True)
class SweepSection:
    command: str = "gamma"
    parameter: str = ""          # "section.key"
    values: tuple = ()
    workers: int = 1


_TYPES = {
    "modulation": ModulationSection, "reservoir": ReservoirSection, "cat": CatSection,
    "bath": BathSection, "drive": DriveSection, "run": RunSection, "sweep": SweepSection,
}


@dataclass(frozen=True)
class RunConfig:
    present: frozenset = frozenset()
    modulation: ModulationSection = field(default_factory=ModulationSection)
    reservoir: ReservoirSection = field(default_factory=ReservoirSection)
    cat: CatSection = field(default_factory=CatSection)
    bath: BathSection = field(default_factory=BathSection)
    drive: DriveSection = field(default_factory=DriveSection)
    run: RunSection = field(default_factory=RunSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    def require(self, *names):
        for name in names:
            if name not in self.present:
                raise ConfigError(f"missing required section [{name}]", section=name)

    def reservoir_spec(self) -> ReservoirSpec:
        self.require("reservoir")
        r = self.reservoir
        try:
            return ReservoirSpec.from_rate(r.gamma0, r.xi, lambda0=r.lambda0)
        except ValueError as exc:
            raise ConfigError(str(exc), section="reservoir") from exc

    def modulations(self) -> list[tuple[str, ModulationSpec]]:
        """Labelled modulation specs: the [modulation] section or each group."""
        res = self.reservoir_spec()
        out = []
        if "modulation" in self.present:
            m = self.modulation
            try:
                out.append(("modulation", ModulationSpec(m.omega0, m.chi, m.zeta, m.sign)))
            except ValueError as exc:
                raise ConfigError(str(exc), section="modulation") from exc
        for vk, k in self.run.groups:
            try:
                mod = modulation_from_groups(vk, k, res, omega0=self.modulation.omega0,
                                             sign=self.modulation.sign)
            except ValueError as exc:
                raise ConfigError(str(exc), section="run", key="groups") from exc
            out.append((f"vk{vk:g}_k{k:g}", mod))
        if not out:
            raise ConfigError("need a [modulation] section or [run] groups", section="run")
        return out

    def t_max(self) -> float:
        if self.run.t_max > 0:
            return self.run.t_max
        return self.run.scaled_t_max / self.reservoir_spec().gamma0

    def drive_spec(self) -> DriveSpec:
        self.require("drive")
        d = self.drive
        try:
            return DriveSpec(d.G, d.delta1, d.delta2, d.F0, d.phi, d.omega_c)
        except ValueError as exc:
            raise ConfigError(str(exc), section="drive") from exc

    def with_value(self, dotted: str, value) -> "RunConfig":
        """Copy with one ``section.key`` replaced (used by sweeps)."""
        section, _, key = dotted.partition(".")
        if section not in _TYPES or key not in {f.name for f in fields(_TYPES[section])}:
            raise ConfigError(f"unknown sweep parameter {dotted!r}", section="sweep",
                              key="parameter")
        cls = _TYPES[section]
        conv = _converter(cls, key)
        new = replace(getattr(self, section), **{key: conv(str(value))})
        return replace(self, present=self.present | {section}, **{section: new})


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_groups(text):
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        vk, sep, k = item.partition(":")
        if not sep:
            raise ValueError(f"group {item!r} is not varkappa:kappa")
        out.append((_parse_fraction(vk), _parse_fraction(k)))
    return tuple(out)


def _parse_fraction(text):
    num, sep, den = text.strip().partition("/")
    return float(num) / float(den) if sep else float(num)


def _parse_values(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _converter(cls, key):
    default = {f.name: f.default for f in fields(cls)}[key]
    if key == "groups":
        return _parse_groups
    if key == "values":
        return _parse_values
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return _parse_fraction
    return str


def _line_of(text: str, section: str, key: str | None = None):
    current = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None:
            name = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            if name == key:
                return i
    return None


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str   # keys such as G and F0 are case-sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed INI: {exc}", line=getattr(exc, "lineno", None)) from exc
    kwargs = {}
    for section in cp.sections():
        if section not in _TYPES:
            raise ConfigError(f"unknown section [{section}]", line=_line_of(text, section),
                              section=section)
        cls = _TYPES[section]
        known = {f.name for f in fields(cls)}
        values = {}
        for key, raw in cp.items(section):
            if key not in known:
                raise ConfigError(f"unknown key {key!r}", line=_line_of(text, section, key),
                                  section=section, key=key)
            try:
                values[key] = _converter(cls, key)(raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad value {raw!r}: {exc}",
                                  line=_line_of(text, section, key),
                                  section=section, key=key) from exc
        kwargs[section] = cls(**values)
    return RunConfig(present=frozenset(cp.sections()), **kwargs)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ", ".join(f"{a!r}:{b!r}" for a, b in value)
        return ", ".join(str(v) for v in value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    """INI text for the sections present; floats use repr so parsing is exact."""
    lines = []
    for section in SECTIONS:
        if section not in cfg.present:
            continue
        lines.append(f"[{section}]")
        for f in fields(_TYPES[section]):
            lines.append(f"{f.name} = {_format(getattr(getattr(cfg, section), f.name))}")
        lines.append("")
    return "\n".join(lines)


def config_from_header(text: str) -> RunConfig:
    """Rebuild the config from the '# ' echo header of an output file."""
    body = []
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body.append(line[2:] if line.startswith("# ") else line[1:])
    ini = [ln for ln in body if not ln.startswith("nsmode ")]
    return parse_config("\n".join(ini))
