"""Run configuration: a small JSON schema with strict validation.

Example::

    {
      "map": {"preset": "arnold", "params": [0.19725, 0.48348]},
      "viewport": {"center": [0, 0], "half_width": 2, "half_height": 2,
                   "px_w": 512, "px_h": 512},
      "max_iter": 256
    }

Complex numbers are ``[re, im]`` pairs.  Unknown keys are rejected at every
level, and every validation error names the offending field.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

from .errors import ConfigError, CstarError
from .map_core import PuncturedPolyMap
from .presets import PRESETS, preset


def _complex(value, name: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{name}: expected a number or an [re, im] pair, got {value!r}", field=name)


def _pair(c: complex) -> list[float]:
    return [c.real, c.imag]


def _number(value, name: str, *, integer=False, positive=False, nonneg=False):
    ok_types = (int,) if integer else (int, float)
    if isinstance(value, bool) or not isinstance(value, ok_types):
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"{name}: expected {kind}, got {value!r}", field=name)
    if positive and not value > 0:
        raise ConfigError(f"{name}: must be > 0, got {value!r}", field=name)
    if nonneg and not value >= 0:
        raise ConfigError(f"{name}: must be >= 0, got {value!r}", field=name)
    return value if integer else float(value)


def _string(value, name: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{name}: expected a string, got {value!r}", field=name)
    return value


def _check_keys(obj: dict, allowed, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object", field=where)
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}", field=f"{where}.{extra[0]}")


# ---------------------------------------------------------------------------
# map spec
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MapSpec:
    """Either an explicit map (n, P, Q) or a named preset with parameters."""

    n: int | None = None
    P: tuple[complex, ...] | None = None
    Q: tuple[complex, ...] | None = None
    preset: str | None = None
    params: tuple[float, ...] = ()

    def to_map(self) -> PuncturedPolyMap:
        if self.preset is not None:
            return preset(self.preset, self.params)
        return PuncturedPolyMap(self.n, self.P, self.Q)

    def to_dict(self) -> dict:
        if self.preset is not None:
            return {"preset": self.preset, "params": list(self.params)}
        return {"n": self.n, "P": [_pair(c) for c in self.P], "Q": [_pair(c) for c in self.Q]}

    @classmethod
    def from_dict(cls, obj, where: str = "map") -> "MapSpec":
        if isinstance(obj, dict) and "preset" in obj:
            _check_keys(obj, ("preset", "params"), where)
            name = _string(obj["preset"], f"{where}.preset")
            if name not in PRESETS:
                raise ConfigError(
                    f"{where}.preset: unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}",
                    field=f"{where}.preset",
                )
            params = obj.get("params", [])
            if not isinstance(params, list):
                raise ConfigError(f"{where}.params: expected a list", field=f"{where}.params")
            params = tuple(_number(v, f"{where}.params[{i}]") for i, v in enumerate(params))
            spec = cls(preset=name, params=params)
        else:
            _check_keys(obj, ("n", "P", "Q"), where)
            for key in ("n", "P", "Q"):
                if key not in obj:
                    raise ConfigError(f"{where}.{key}: required", field=f"{where}.{key}")
            n = _number(obj["n"], f"{where}.n", integer=True)
            coeffs = {}
            for key in ("P", "Q"):
                raw = obj[key]
                if not isinstance(raw, list):
                    raise ConfigError(f"{where}.{key}: expected a list of [re, im] pairs", field=f"{where}.{key}")
                coeffs[key] = tuple(_complex(v, f"{where}.{key}[{i}]") for i, v in enumerate(raw))
            spec = cls(n=n, P=coeffs["P"], Q=coeffs["Q"])
        try:
            spec.to_map()
        except CstarError as exc:
            sub = exc.context.get("field")
            name = f"{where}.{sub}" if sub else where
            raise ConfigError(f"{name}: {exc}", field=name) from exc
        except TypeError as exc:
            raise ConfigError(f"{where}.params: {exc}", field=f"{where}.params") from exc
        return spec

    @classmethod
    def arnold(cls, alpha: float = 0.19725, beta: float = 0.48348) -> "MapSpec":
        return cls(preset="arnold", params=(float(alpha), float(beta)))


# ---------------------------------------------------------------------------
# run config
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ViewportSpec:
    center: complex = 0j
    half_width: float = 2.0
    half_height: float = 2.0
    px_w: int = 256
    px_h: int = 256

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["center"] = _pair(self.center)
        return d

    @classmethod
    def from_dict(cls, obj, where="viewport") -> "ViewportSpec":
        _check_keys(obj, [f.name for f in fields(cls)], where)
        kw = {}
        if "center" in obj:
            kw["center"] = _complex(obj["center"], f"{where}.center")
        for key in ("half_width", "half_height"):
            if key in obj:
                kw[key] = _number(obj[key], f"{where}.{key}", positive=True)
        for key in ("px_w", "px_h"):
            if key in obj:
                kw[key] = _number(obj[key], f"{where}.{key}", integer=True, positive=True)
        return cls(**kw)


@dataclass(frozen=True)
class TGridSpec:
    """Ray parameters: ``count`` values from ``t_min`` to ``t_max``.

    ``t_min`` defaults to 1.2 * r_norm of the map.
    """

    t_min: float | None = None
    t_max: float = 40.0
    count: int = 100
    spacing: str = "linear"

    def values(self, r_norm: float) -> np.ndarray:
        lo = self.t_min if self.t_min is not None else 1.2 * r_norm
        if not lo < self.t_max:
            raise ConfigError(f"t_grid: t_min {lo:g} must be below t_max {self.t_max:g}", field="t_grid.t_min")
        if self.spacing == "geometric":
            return np.geomspace(lo, self.t_max, self.count)
        return np.linspace(lo, self.t_max, self.count)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, obj, where="t_grid") -> "TGridSpec":
        _check_keys(obj, [f.name for f in fields(cls)], where)
        kw = {}
        if obj.get("t_min") is not None:
            kw["t_min"] = _number(obj["t_min"], f"{where}.t_min", positive=True)
        if "t_max" in obj:
            kw["t_max"] = _number(obj["t_max"], f"{where}.t_max", positive=True)
        if "count" in obj:
            kw["count"] = _number(obj["count"], f"{where}.count", integer=True, positive=True)
        if "spacing" in obj:
            sp = _string(obj["spacing"], f"{where}.spacing")
            if sp not in ("linear", "geometric"):
                raise ConfigError(f"{where}.spacing: expected 'linear' or 'geometric'", field=f"{where}.spacing")
            kw["spacing"] = sp
        return cls(**kw)


_STYLES = ("itinerary", "phase")


@dataclass(frozen=True)
class RunConfig:
    map: MapSpec = field(default_factory=MapSpec.arnold)
    viewport: ViewportSpec = field(default_factory=ViewportSpec)
    max_iter: int = 256
    escape_log_radius: float | None = None
    prefix_len: int = 4
    t_grid: TGridSpec = field(default_factory=TGridSpec)
    address: str | None = None
    itinerary: str | None = None
    symbols: tuple[str, ...] = ()
    max_period: int = 3
    tol: float = 1e-12
    land_tol: float = 1e-6
    period: int = 1
    seed: complex | None = None
    on_circle: bool = False
    sample_count: int = 10_000
    pair_count: int = 1_000
    sample_pairs: int = 10_000
    head_start_K: float | None = None
    head_start_offset: float = 0.0
    strip_range: tuple[int, int] = (0, 0)
    style: str = "itinerary"
    bounded_color: tuple[int, int, int] = (255, 165, 0)
    threads: int | None = None
    out: str | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if hasattr(v, "to_dict"):
                v = v.to_dict()
            elif isinstance(v, complex):
                v = _pair(v)
            elif isinstance(v, tuple):
                v = list(v)
            d[f.name] = v
        return d


_POSITIVE_FLOATS = ("tol", "land_tol")
_POSITIVE_INTS = ("max_iter", "max_period", "period", "sample_count", "pair_count", "sample_pairs")


def config_from_dict(obj: dict) -> RunConfig:
    names = [f.name for f in fields(RunConfig)]
    _check_keys(obj, names, "config")
    kw: dict[str, Any] = {}
    if "map" in obj:
        kw["map"] = MapSpec.from_dict(obj["map"])
    if "viewport" in obj:
        kw["viewport"] = ViewportSpec.from_dict(obj["viewport"])
    if "t_grid" in obj:
        kw["t_grid"] = TGridSpec.from_dict(obj["t_grid"])
    for key in _POSITIVE_INTS:
        if key in obj:
            kw[key] = _number(obj[key], key, integer=True, positive=True)
    for key in _POSITIVE_FLOATS:
        if key in obj:
            kw[key] = _number(obj[key], key, positive=True)
    if "prefix_len" in obj:
        kw["prefix_len"] = _number(obj["prefix_len"], "prefix_len", integer=True, nonneg=True)
        if kw["prefix_len"] > 56:
            raise ConfigError("prefix_len: at most 56", field="prefix_len")
    for key in ("escape_log_radius", "head_start_K"):
        if obj.get(key) is not None:
            kw[key] = _number(obj[key], key, positive=True)
    if "head_start_offset" in obj:
        kw["head_start_offset"] = _number(obj["head_start_offset"], "head_start_offset", nonneg=True)
    for key in ("address", "itinerary", "out"):
        if obj.get(key) is not None:
            kw[key] = _string(obj[key], key)
    if "symbols" in obj:
        if not isinstance(obj["symbols"], list):
            raise ConfigError("symbols: expected a list of tract triples", field="symbols")
        kw["symbols"] = tuple(_string(s, f"symbols[{i}]") for i, s in enumerate(obj["symbols"]))
    if obj.get("seed") is not None:
        kw["seed"] = _complex(obj["seed"], "seed")
        if kw["seed"] == 0:
            raise ConfigError("seed: must be nonzero", field="seed")
    if "on_circle" in obj:
        if not isinstance(obj["on_circle"], bool):
            raise ConfigError("on_circle: expected true or false", field="on_circle")
        kw["on_circle"] = obj["on_circle"]
    if "strip_range" in obj:
        sr = obj["strip_range"]
        if not (isinstance(sr, list) and len(sr) == 2):
            raise ConfigError("strip_range: expected [lo, hi]", field="strip_range")
        lo, hi = (_number(v, f"strip_range[{i}]", integer=True) for i, v in enumerate(sr))
        if lo > hi:
            raise ConfigError("strip_range: lo must not exceed hi", field="strip_range")
        kw["strip_range"] = (lo, hi)
    if "style" in obj:
        style = _string(obj["style"], "style")
        if style not in _STYLES:
            raise ConfigError(f"style: expected one of {', '.join(_STYLES)}", field="style")
        kw["style"] = style
    if "bounded_color" in obj:
        bc = obj["bounded_color"]
        if not (isinstance(bc, list) and len(bc) == 3):
            raise ConfigError("bounded_color: expected [r, g, b]", field="bounded_color")
        rgb = tuple(_number(v, f"bounded_color[{i}]", integer=True, nonneg=True) for i, v in enumerate(bc))
        if max(rgb) > 255:
            raise ConfigError("bounded_color: channels must be <= 255", field="bounded_color")
        kw["bounded_color"] = rgb
    if obj.get("threads") is not None:
        kw["threads"] = _number(obj["threads"], "threads", integer=True, positive=True)
    return RunConfig(**kw)


def parse_config(text: str) -> RunConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from None
    return config_from_dict(obj)


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}", path=path) from None
    return parse_config(text)
