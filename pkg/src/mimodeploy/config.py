"""INI-style scenario files.

A file has a ``[scenario]`` section whose keys are :class:`ScenarioConfig`
field names and an optional ``[sweep]`` section with ``axis`` and a
comma-separated ``values`` list. Missing keys keep their default values.

    [scenario]
    n_antennas = 256
    n_users = 8
    topology = cylindrical
    csi_accuracy = 0.8

    [sweep]
    axis = n_clusters
    values = 1, 2, 4
"""

from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .montecarlo import SWEEP_AXES, ScenarioConfig

FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
SECTIONS = ("scenario", "sweep")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple


def field_type(name):
    t = FIELDS[name].type
    return {"int": int, "float": float, "str": str}[t if isinstance(t, str) else t.__name__]


def coerce(key, raw: str, line=None):
    """Convert a raw string to the type of ScenarioConfig field ``key``."""
    kind = field_type(key)
    text = raw.strip()
    try:
        if kind is int:
            return int(text.replace("_", ""), 10)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"expected {kind.__name__}, got {text!r}", key, line) from None
    return text


def sweep_values(axis, items, line=None):
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; valid axes: "
                          f"{', '.join(sorted(SWEEP_AXES))}", "axis", line)
    parts = [p for p in (s.strip() for s in items) if p]
    if not parts:
        raise ConfigError("sweep needs at least one value", "values", line)
    return tuple(coerce(SWEEP_AXES[axis], p, line) for p in parts)


def _line_index(text):
    """Map (section, key) to 1-based line numbers."""
    index = {}
    section = None
    for no, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        m = re.match(r"\[([^\]]+)\]", stripped)
        if m:
            section = m.group(1).strip().lower()
            index.setdefault((section, None), no)
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip().lower()), no)
    return index


def loads(text, source="<string>"):
    """Parse config text into ``(ScenarioConfig, SweepSpec or None)``."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"malformed file: {exc.message}", line=line) from None
    lines = _line_index(text)

    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]",
                              line=lines.get((section.lower(), None)))

    values = {}
    if parser.has_section("scenario"):
        for key, raw in parser.items("scenario"):
            line = lines.get(("scenario", key))
            if key not in FIELDS:
                raise ConfigError("unknown key", key, line)
            values[key] = coerce(key, raw, line)
    try:
        cfg = ScenarioConfig(**values)
    except ConfigError as exc:
        raise ConfigError(str(exc).split(": ", 1)[-1], exc.key,
                          lines.get(("scenario", exc.key))) from None

    spec = None
    if parser.has_section("sweep"):
        keys = dict(parser.items("sweep"))
        for key in keys:
            if key not in ("axis", "values"):
                raise ConfigError("unknown key", key, lines.get(("sweep", key)))
        if "axis" not in keys or "values" not in keys:
            raise ConfigError("[sweep] needs both 'axis' and 'values'",
                              line=lines.get(("sweep", None)))
        axis = keys["axis"].strip()
        spec = SweepSpec(axis, sweep_values(axis, keys["values"].split(","),
                                            lines.get(("sweep", "values"))))
    return cfg, spec


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, source=str(path))


def parse_config(path) -> ScenarioConfig:
    """Read a scenario file; absent keys take their defaults."""
    return load_config(path)[0]


def dumps(cfg: ScenarioConfig, sweep: Optional[SweepSpec] = None) -> str:
    out = ["[scenario]"]
    for name in FIELDS:
        v = getattr(cfg, name)
        out.append(f"{name} = {v!r}" if isinstance(v, float) else f"{name} = {v}")
    if sweep is not None:
        out += ["", "[sweep]", f"axis = {sweep.axis}",
                "values = " + ", ".join(str(v) for v in sweep.values)]
    return "\n".join(out) + "\n"


def write_config(cfg: ScenarioConfig, path, sweep: Optional[SweepSpec] = None):
    Path(path).write_text(dumps(cfg, sweep), encoding="utf-8")
