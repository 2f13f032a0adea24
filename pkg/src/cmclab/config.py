"""Metric configuration files.

A config is a YAML mapping.  Recognised keys::

    name: dip_metric              # optional, defaults to the file stem
    kind: schwarzschild | tabulated | analytic
    mass: 1.0                     # schwarzschild only
    data: table.dat               # tabulated only; path relative to the config
    point_masses: [1.0]           # analytic only; terms c/(2r)
    bumps:                        # analytic only
      - {shape: gaussian, center: 1.0, width: 0.08, amplitude: 0.005}
    r_min: 0.25
    r_cutoff: 1.0e4
    deriv_step: 1.0e-5
    tolerances:
      asymptotic: 1.0e-3

Unknown keys are rejected.  Tabulated data is plain text with two columns
``r phi``, ascending in ``r``, at least 200 rows; ``#`` starts a comment.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .metric import Analytic, Bump, ConformalMetric, Schwarzschild, Tabulated

TOP_KEYS = {
    "name", "kind", "mass", "data", "point_masses", "bumps",
    "r_min", "r_cutoff", "deriv_step", "tolerances",
}
KIND_KEYS = {
    "schwarzschild": {"mass"},
    "tabulated": {"data"},
    "analytic": {"point_masses", "bumps"},
}
BUMP_KEYS = {"shape", "center", "width", "amplitude"}
TOLERANCE_KEYS = {"asymptotic"}


def bundled_names():
    root = resources.files("cmclab") / "configs"
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def bundled_path(name) -> Path:
    return Path(str(resources.files("cmclab") / "configs" / f"{name}.yaml"))


def _key_lines(node, prefix=()):
    """Map key paths to 1-based source lines, for diagnostics."""
    out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = prefix + (k.value,)
            out[path] = k.start_mark.line + 1
            out.update(_key_lines(v, path))
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out.update(_key_lines(v, prefix + (i,)))
    return out


def _where(lines, path, source):
    line = lines.get(path)
    return f"{source}:{line}" if line else source


def _number(value, key, lines, source, positive=False):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{_where(lines, key, source)}: '{key[-1]}' must be a number, got {value!r}")
    if not np.isfinite(x) or (positive and x <= 0):
        raise ConfigError(f"{_where(lines, key, source)}: '{key[-1]}' must be a positive number, got {value!r}")
    return x


def _reject_unknown(mapping, allowed, path, lines, source):
    for k in mapping:
        if k not in allowed:
            where = _where(lines, path + (k,), source)
            raise ConfigError(f"{where}: unknown key '{k}' (allowed: {', '.join(sorted(allowed))})")


def _parse_text(text, source):
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else "?"
        raise ConfigError(f"{source}:{line}: YAML syntax error: {exc.problem}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: config must be a mapping of keys to values")
    return data, _key_lines(node)


def _load_table(path: Path):
    try:
        arr = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read tabulated data {path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed tabulated data: {exc}") from None
    if arr.shape[1] != 2:
        raise ConfigError(f"{path}: tabulated data needs exactly 2 columns, got {arr.shape[1]}")
    return arr[:, 0], arr[:, 1]


def metric_from_mapping(data, base_dir=None, source="<config>", lines=None) -> ConformalMetric:
    lines = lines or {}
    _reject_unknown(data, TOP_KEYS, (), lines, source)
    if "kind" not in data:
        raise ConfigError(f"{source}: missing required key 'kind'")
    kind_name = data["kind"]
    if kind_name not in KIND_KEYS:
        raise ConfigError(
            f"{_where(lines, ('kind',), source)}: unknown kind {kind_name!r}"
            f" (expected one of {', '.join(sorted(KIND_KEYS))})"
        )
    for other, keys in KIND_KEYS.items():
        if other == kind_name:
            continue
        for k in keys - KIND_KEYS[kind_name]:
            if k in data:
                raise ConfigError(f"{_where(lines, (k,), source)}: key '{k}' is not valid for kind {kind_name!r}")

    try:
        if kind_name == "schwarzschild":
            if "mass" not in data:
                raise ConfigError(f"{source}: schwarzschild needs 'mass'")
            kind = Schwarzschild(_number(data["mass"], ("mass",), lines, source, positive=True))
        elif kind_name == "tabulated":
            if "data" not in data:
                raise ConfigError(f"{source}: tabulated needs 'data'")
            path = Path(str(data["data"]))
            if not path.is_absolute() and base_dir is not None:
                path = Path(base_dir) / path
            r, phi = _load_table(path)
            kind = Tabulated(tuple(r.tolist()), tuple(phi.tolist()))
        else:
            masses = data.get("point_masses") or []
            if not isinstance(masses, list):
                raise ConfigError(f"{_where(lines, ('point_masses',), source)}: 'point_masses' must be a list")
            masses = tuple(_number(c, ("point_masses", i), lines, source) for i, c in enumerate(masses))
            bumps = []
            raw_bumps = data.get("bumps") or []
            if not isinstance(raw_bumps, list):
                raise ConfigError(f"{_where(lines, ('bumps',), source)}: 'bumps' must be a list")
            for i, b in enumerate(raw_bumps):
                if not isinstance(b, dict):
                    raise ConfigError(f"{source}: bump {i} must be a mapping")
                _reject_unknown(b, BUMP_KEYS, ("bumps", i), lines, source)
                missing = {"center", "width", "amplitude"} - set(b)
                if missing:
                    raise ConfigError(f"{source}: bump {i} is missing {', '.join(sorted(missing))}")
                bumps.append(Bump(
                    center=_number(b["center"], ("bumps", i, "center"), lines, source),
                    width=_number(b["width"], ("bumps", i, "width"), lines, source, positive=True),
                    amplitude=_number(b["amplitude"], ("bumps", i, "amplitude"), lines, source),
                    shape=str(b.get("shape", "gaussian")),
                ))
            kind = Analytic(masses, tuple(bumps))
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None

    tolerances = data.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        raise ConfigError(f"{_where(lines, ('tolerances',), source)}: 'tolerances' must be a mapping")
    _reject_unknown(tolerances, TOLERANCE_KEYS, ("tolerances",), lines, source)

    if isinstance(kind, Tabulated):
        default_min, default_max = kind.r[0], kind.r[-1]
    else:
        default_min, default_max = 0.25 * kind.scale, 1e4 * kind.scale
    kwargs = {}
    if "deriv_step" in data:
        kwargs["deriv_step"] = _number(data["deriv_step"], ("deriv_step",), lines, source, positive=True)
    if "asymptotic" in tolerances:
        kwargs["asymptotic_tol"] = _number(
            tolerances["asymptotic"], ("tolerances", "asymptotic"), lines, source, positive=True
        )
    r_min = _number(data.get("r_min", default_min), ("r_min",), lines, source, positive=True)
    r_cutoff = _number(data.get("r_cutoff", default_max), ("r_cutoff",), lines, source, positive=True)
    name = str(data.get("name", Path(source).stem if source != "<config>" else "metric"))
    try:
        return ConformalMetric(kind, r_min, r_cutoff, name=name, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> ConformalMetric:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    data, lines = _parse_text(text, str(path))
    data.setdefault("name", path.stem)
    return metric_from_mapping(data, base_dir=path.parent, source=str(path), lines=lines)


def parse_config(text, base_dir=None, source="<inline>") -> ConformalMetric:
    data, lines = _parse_text(text, source)
    return metric_from_mapping(data, base_dir=base_dir, source=source, lines=lines)


def resolve_metric(target) -> ConformalMetric:
    """A config path, a bundled config name, or inline YAML text."""
    target = str(target)
    path = Path(target)
    if path.is_file():
        return load_config(path)
    if target in bundled_names():
        return load_config(bundled_path(target))
    if ":" in target and "\n" in target or target.lstrip().startswith("{"):
        return parse_config(target)
    raise ConfigError(
        f"no config file or bundled metric named {target!r} (bundled: {', '.join(bundled_names())})"
    )
