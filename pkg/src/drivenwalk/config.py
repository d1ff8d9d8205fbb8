"""Experiment configuration: parsing, validation, normalization.

Configs are TOML (or JSON with the same structure). Two kinds exist: a walk
config describing topology, coins, injection and outputs, and a search
config holding a ``search`` table. Validation is strict; unknown keys and
out-of-range values raise :class:`ConfigError` carrying the dotted path of
the offending field.

Inline coin matrices are written as rows of interleaved real/imag pairs,
e.g. the swap coin is ``[[0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 0.0]]``.
"""

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .coins import BUILTIN_COINS, CoinAssignment
from .errors import ConfigError
from .lattice import Line, Topology, Torus2D

__all__ = [
    "WalkConfig",
    "SearchConfig",
    "load_config",
    "parse_config",
    "bundled_config_path",
    "BUNDLED_CONFIGS",
]

BUNDLED_CONFIGS = ("line5_matched", "line5_mismatched", "search11")

PHASE_MODES = ("matched", "explicit", "constant")
OUTPUT_SERIES = ("physical", "eigenmode")


def bundled_config_path(name: str) -> Path:
    """Path of a config shipped with the package."""
    if name not in BUNDLED_CONFIGS:
        raise KeyError(f"no bundled config named {name!r}; "
                       f"available: {', '.join(BUNDLED_CONFIGS)}")
    return Path(__file__).parent / "configs" / f"{name}.toml"


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    seed: Optional[int]
    topology: Topology
    flip_flop: bool
    coins: CoinAssignment
    injection_vertex: int
    injection_weights: dict
    amplitude: float
    phase_mode: str
    matched_mode: object  # int or "auto"
    phi: Optional[float]
    output_series: Tuple[str, ...]
    document: dict

    kind = "walk"


@dataclass(frozen=True)
class SearchConfig:
    side: int
    central: Tuple[int, int]
    target: Optional[Tuple[int, int]]
    alpha: float
    steps: Optional[int]
    seed: Optional[int]
    document: dict

    kind = "search"


def load_config(path) -> "WalkConfig | SearchConfig":
    """Read and validate a config file (.toml or .json)."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    else:
        try:
            doc = tomllib.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(str(path), f"invalid TOML: {exc}") from exc
    return parse_config(doc)


def parse_config(doc: dict) -> "WalkConfig | SearchConfig":
    """Validate a config document already parsed into a dict."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a table")
    if "search" in doc:
        return _parse_search(doc)
    return _parse_walk(doc)


# ---------------------------------------------------------------------------
# validation helpers

def _reject_unknown(table: dict, allowed, path: str):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else key,
                              f"unknown key (allowed: {', '.join(sorted(allowed))})")


def _require(table: dict, key: str, path: str):
    if key not in table:
        raise ConfigError(f"{path}.{key}" if path else key, "required key missing")
    return table[key]


def _as_int(value, path: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _as_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(path, f"expected true/false, got {value!r}")
    return value


def _as_str(value, path: str, choices=None) -> str:
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ConfigError(path, f"must be one of {', '.join(choices)}; got {value!r}")
    return value


def _as_pair(value, path: str) -> Tuple[int, int]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, int) for v in value)):
        raise ConfigError(path, f"expected a pair [x, y] of integers, got {value!r}")
    return int(value[0]), int(value[1])


def _parse_matrix(value, dim: int, path: str) -> np.ndarray:
    """Rows of interleaved re/im floats -> complex (dim, dim) matrix."""
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError(path, f"matrix needs {dim} rows of {2 * dim} numbers")
    out = np.zeros((dim, dim), dtype=np.complex128)
    for i, row in enumerate(value):
        if (not isinstance(row, list) or len(row) != 2 * dim
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in row)):
            raise ConfigError(f"{path}[{i}]",
                              f"expected {2 * dim} numbers (re, im pairs)")
        out[i] = [complex(row[2 * j], row[2 * j + 1]) for j in range(dim)]
    return out


def _coin_matrix(value, dim: int, path: str) -> np.ndarray:
    if isinstance(value, str):
        if value not in BUILTIN_COINS:
            raise ConfigError(path, f"unknown coin name {value!r}; "
                              f"built-ins: {', '.join(sorted(BUILTIN_COINS))}")
        matrix = BUILTIN_COINS[value]()
        if matrix.shape[0] != dim:
            raise ConfigError(path, f"coin {value!r} is {matrix.shape[0]}x"
                              f"{matrix.shape[0]}, topology needs {dim}x{dim}")
        return matrix
    return _parse_matrix(value, dim, path)


def _vertex(value, topology: Topology, path: str) -> int:
    if isinstance(topology, Line):
        v = _as_int(value, path)
    else:
        v = _as_pair(value, path)
    try:
        return topology.vertex_index(v)
    except IndexError as exc:
        raise ConfigError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# walk configs

def _parse_topology(doc: dict):
    table = _require(doc, "topology", "")
    if not isinstance(table, dict):
        raise ConfigError("topology", "expected a table")
    kind = _as_str(_require(table, "kind", "topology"), "topology.kind",
                   choices=("line", "torus"))
    if kind == "line":
        _reject_unknown(table, {"kind", "n", "boundary", "flip_flop"}, "topology")
        n = _as_int(_require(table, "n", "topology"), "topology.n", minimum=2)
        boundary = _as_str(table.get("boundary", "cyclic"), "topology.boundary",
                           choices=("cyclic", "hard"))
        topology = Line(n, boundary)
    else:
        _reject_unknown(table, {"kind", "nx", "ny", "flip_flop"}, "topology")
        nx = _as_int(_require(table, "nx", "topology"), "topology.nx", minimum=2)
        ny = _as_int(_require(table, "ny", "topology"), "topology.ny", minimum=2)
        topology = Torus2D(nx, ny)
    flip_flop = _as_bool(table.get("flip_flop", False), "topology.flip_flop")
    return topology, flip_flop


def _parse_coins(doc: dict, topology: Topology) -> CoinAssignment:
    table = _require(doc, "coins", "")
    if not isinstance(table, dict):
        raise ConfigError("coins", "expected a table")
    _reject_unknown(table, {"default", "override"}, "coins")
    dim = topology.coin_dim
    default = _coin_matrix(_require(table, "default", "coins"), dim, "coins.default")
    overrides = {}
    entries = table.get("override", [])
    if not isinstance(entries, list):
        raise ConfigError("coins.override", "expected an array of tables")
    for i, entry in enumerate(entries):
        path = f"coins.override[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(path, "expected a table")
        _reject_unknown(entry, {"vertex", "coin", "matrix"}, path)
        v = _vertex(_require(entry, "vertex", path), topology, f"{path}.vertex")
        if ("coin" in entry) == ("matrix" in entry):
            raise ConfigError(path, "give exactly one of 'coin' or 'matrix'")
        if "coin" in entry:
            overrides[v] = _coin_matrix(entry["coin"], dim, f"{path}.coin")
        else:
            overrides[v] = _parse_matrix(entry["matrix"], dim, f"{path}.matrix")
    try:
        return CoinAssignment.from_overrides(topology, default, overrides)
    except ValueError as exc:
        raise ConfigError("coins", str(exc)) from None


def _parse_injection(doc: dict, topology: Topology):
    table = _require(doc, "injection", "")
    if not isinstance(table, dict):
        raise ConfigError("injection", "expected a table")
    _reject_unknown(table, {"vertex", "weights", "amplitude", "phase_mode",
                            "matched_mode", "phi"}, "injection")
    vertex = _vertex(_require(table, "vertex", "injection"), topology,
                     "injection.vertex")
    raw_weights = _require(table, "weights", "injection")
    if not isinstance(raw_weights, dict) or not raw_weights:
        raise ConfigError("injection.weights",
                          "expected a non-empty table of coin label -> [re, im]")
    weights = {}
    for label, value in raw_weights.items():
        path = f"injection.weights.{label}"
        if label not in topology.coin_labels:
            raise ConfigError(path, f"unknown coin label for this topology "
                              f"(valid: {', '.join(topology.coin_labels)})")
        if (not isinstance(value, list) or len(value) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in value)):
            raise ConfigError(path, f"expected [re, im], got {value!r}")
        weights[label] = complex(value[0], value[1])
    amplitude = _as_number(table.get("amplitude", 1.0), "injection.amplitude")
    if amplitude <= 0:
        raise ConfigError("injection.amplitude", f"must be > 0, got {amplitude}")
    phase_mode = _as_str(table.get("phase_mode", "constant"),
                         "injection.phase_mode", choices=PHASE_MODES)
    matched_mode = table.get("matched_mode", "auto")
    if phase_mode == "matched":
        if matched_mode != "auto":
            matched_mode = _as_int(matched_mode, "injection.matched_mode", minimum=0)
            if matched_mode >= topology.mode_count:
                raise ConfigError("injection.matched_mode",
                                  f"mode {matched_mode} out of range; operator has "
                                  f"{topology.mode_count} modes")
    elif "matched_mode" in table:
        raise ConfigError("injection.matched_mode",
                          "only valid with phase_mode = 'matched'")
    phi = None
    if phase_mode == "explicit":
        phi = _as_number(_require(table, "phi", "injection"), "injection.phi")
    elif "phi" in table:
        raise ConfigError("injection.phi",
                          "only valid with phase_mode = 'explicit'")
    return vertex, weights, amplitude, phase_mode, matched_mode, phi


def _parse_outputs(doc: dict) -> Tuple[str, ...]:
    table = doc.get("outputs", {"series": ["physical"]})
    if not isinstance(table, dict):
        raise ConfigError("outputs", "expected a table")
    _reject_unknown(table, {"series"}, "outputs")
    series = table.get("series", ["physical"])
    if not isinstance(series, list) or not series:
        raise ConfigError("outputs.series", "expected a non-empty array")
    for i, name in enumerate(series):
        _as_str(name, f"outputs.series[{i}]", choices=OUTPUT_SERIES)
    if len(set(series)) != len(series):
        raise ConfigError("outputs.series", "duplicate entries")
    return tuple(series)


def _parse_walk(doc: dict) -> WalkConfig:
    _reject_unknown(doc, {"steps", "seed", "topology", "coins", "injection",
                          "outputs"}, "")
    steps = _as_int(_require(doc, "steps", ""), "steps", minimum=0)
    seed = _as_int(doc["seed"], "seed") if "seed" in doc else None
    topology, flip_flop = _parse_topology(doc)
    coins = _parse_coins(doc, topology)
    vertex, weights, amplitude, phase_mode, matched_mode, phi = \
        _parse_injection(doc, topology)
    output_series = _parse_outputs(doc)
    return WalkConfig(
        steps=steps, seed=seed, topology=topology, flip_flop=flip_flop,
        coins=coins, injection_vertex=vertex, injection_weights=weights,
        amplitude=amplitude, phase_mode=phase_mode, matched_mode=matched_mode,
        phi=phi, output_series=output_series, document=_normalize(doc),
    )


def _parse_search(doc: dict) -> SearchConfig:
    _reject_unknown(doc, {"seed", "search"}, "")
    table = doc["search"]
    if not isinstance(table, dict):
        raise ConfigError("search", "expected a table")
    _reject_unknown(table, {"L", "central", "target", "alpha", "steps"}, "search")
    side = _as_int(_require(table, "L", "search"), "search.L", minimum=3)
    central = _as_pair(_require(table, "central", "search"), "search.central")
    lattice = Torus2D(side, side)
    try:
        lattice.vertex_index(central)
    except IndexError as exc:
        raise ConfigError("search.central", str(exc)) from None
    target = None
    if "target" in table:
        target = _as_pair(table["target"], "search.target")
        try:
            lattice.vertex_index(target)
        except IndexError as exc:
            raise ConfigError("search.target", str(exc)) from None
        if target == central:
            raise ConfigError("search.target", "must differ from search.central")
    alpha = _as_number(table.get("alpha", 1.0), "search.alpha")
    if alpha <= 0:
        raise ConfigError("search.alpha", f"must be > 0, got {alpha}")
    steps = None
    if "steps" in table:
        steps = _as_int(table["steps"], "search.steps", minimum=1)
    seed = _as_int(doc["seed"], "seed") if "seed" in doc else None
    return SearchConfig(side=side, central=central, target=target, alpha=alpha,
                        steps=steps, seed=seed, document=_normalize(doc))


def _normalize(value):
    """Deep copy with tuples as lists, ready for JSON serialization."""
    if isinstance(value, dict):
        return {k: _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    return value
