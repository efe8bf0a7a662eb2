"""Experiment configuration as a single JSON document.

A config bundles the row system, an optional grouping of rows into nodes,
the graph schedule, the flow choice, and integration settings. Parsing
validates every field with the same preconditions the library enforces
and reports failures by field path. A parsed experiment serializes back
to a canonical dictionary; reparsing that dictionary yields an identical
experiment.
"""

from __future__ import annotations

import dataclasses
import json
import pathlib

import numpy as np

from .affine import AffinePatch, LinearSystem
from .errors import ConfigError, LinflowError
from .flows import FLOW_KINDS, KIND_CONSENSUS_PROJECTION, FlowSpec
from .graphsig import GraphSignal, SignalMode, WeightedDigraph
from .sim import IntegratorConfig

__all__ = ["MONITOR_NAMES", "ExperimentConfig", "parse_config", "parse_graph_only"]

MONITOR_NAMES = (
    "disagreement",
    "average",
    "own_set_distance",
    "intersection_distance",
    "worst_sq_error",
    "worst_sq_set_distance",
    "total_sq_error",
    "limit_gap",
    "potential",
    "ls_objective_average",
)

_TOP_KEYS = {"system", "grouping", "graph", "flow", "integrator", "x0", "monitors", "output_dir"}
_SYSTEM_KEYS = {"H", "z", "normalize"}
_GRAPH_KEYS = {"mode", "a_star", "segments"}
_SEGMENT_KEYS = {"duration", "weights", "arcs", "n"}
_FLOW_KEYS = {"kind", "K", "gamma", "normalized", "project_initial"}
_INTEGRATOR_KEYS = {"step", "t_end", "sample_stride", "t0"}


def _fail(path, message):
    raise ConfigError(f"{path}: {message}")


def _reject_unknown(d, allowed, path):
    for key in d:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown key")


def _require(d, key, path):
    if key not in d:
        _fail(f"{path}.{key}" if path else key, "missing required key")
    return d[key]


def _as_positive(value, path):
    try:
        value = float(value)
    except (TypeError, ValueError):
        _fail(path, f"must be a number, got {value!r}")
    if not np.isfinite(value) or value <= 0:
        _fail(path, f"must be positive and finite, got {value}")
    return value


def _as_matrix(value, path):
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        _fail(path, "must be a matrix (list of equal-length numeric rows)")
    if M.ndim != 2 or 0 in M.shape:
        _fail(path, "must be a nonempty matrix (list of equal-length rows)")
    if not np.all(np.isfinite(M)):
        _fail(path, "entries must be finite")
    return M


@dataclasses.dataclass
class ExperimentConfig:
    """A fully validated experiment ready to run."""

    sys: LinearSystem
    grouping: tuple[tuple[int, ...], ...]
    patches: tuple[AffinePatch, ...]
    signal: GraphSignal
    spec: FlowSpec
    integrator: IntegratorConfig
    x0: np.ndarray
    monitors: tuple[str, ...]
    project_initial: bool
    output_dir: str | None

    @property
    def n_nodes(self):
        return len(self.grouping)

    def to_dict(self):
        """Canonical dictionary form; reparsing it gives an equal experiment."""
        return {
            "system": {
                "H": self.sys.H.tolist(),
                "z": self.sys.z.tolist(),
                "normalize": self.sys.normalized,
            },
            "grouping": [list(g) for g in self.grouping],
            "graph": {
                "mode": self.signal.mode.value,
                "a_star": self.signal.a_star,
                "segments": [
                    {"duration": d, "weights": g.weights.tolist()}
                    for d, g in self.signal.segments
                ],
            },
            "flow": {
                "kind": self.spec.kind,
                "K": self.spec.K,
                "gamma": self.spec.gamma,
                "normalized": self.spec.normalized,
                "project_initial": self.project_initial,
            },
            "integrator": {
                "step": self.integrator.step,
                "t_end": self.integrator.t_end,
                "sample_stride": self.integrator.sample_stride,
                "t0": self.integrator.t0,
            },
            "x0": self.x0.tolist(),
            "monitors": list(self.monitors),
            "output_dir": self.output_dir,
        }


def _parse_system(raw):
    if not isinstance(raw, dict):
        _fail("system", "must be an object with H and z")
    _reject_unknown(raw, _SYSTEM_KEYS, "system")
    H = _as_matrix(_require(raw, "H", "system"), "system.H")
    z_raw = _require(raw, "z", "system")
    try:
        z = np.array(z_raw, dtype=float)
    except (TypeError, ValueError):
        _fail("system.z", "must be a numeric vector")
    if z.ndim != 1 or z.shape[0] != H.shape[0]:
        _fail("system.z", f"must have one entry per row of H ({H.shape[0]})")
    normalize = raw.get("normalize", True)
    if not isinstance(normalize, bool):
        _fail("system.normalize", "must be true or false")
    try:
        return LinearSystem.from_rows(H, z, normalize=normalize)
    except LinflowError as exc:
        _fail("system", str(exc))
    except ValueError as exc:
        _fail("system", str(exc))


def _parse_grouping(raw, sys):
    if raw is None:
        return tuple((i,) for i in range(sys.N))
    if not isinstance(raw, list) or not raw:
        _fail("grouping", "must be a nonempty list of row-index lists")
    groups = []
    for k, idxs in enumerate(raw):
        if not isinstance(idxs, list) or not idxs:
            _fail(f"grouping[{k}]", "must be a nonempty list of row indices")
        for i in idxs:
            if not isinstance(i, int) or not 0 <= i < sys.N:
                _fail(f"grouping[{k}]", f"row index {i!r} outside 0..{sys.N - 1}")
        groups.append(tuple(idxs))
    return tuple(groups)


def _parse_segment_graph(raw, k, n_hint):
    has_weights = "weights" in raw
    has_arcs = "arcs" in raw
    if has_weights == has_arcs:
        _fail(f"graph.segments[{k}]", "give exactly one of 'weights' or 'arcs'")
    path = f"graph.segments[{k}]"
    try:
        if has_weights:
            return WeightedDigraph(_as_matrix(raw["weights"], f"{path}.weights"))
        n = raw.get("n", n_hint)
        if not isinstance(n, int) or n < 1:
            _fail(f"{path}.n", "arc form needs a positive integer node count")
        arcs = raw["arcs"]
        if not isinstance(arcs, list):
            _fail(f"{path}.arcs", "must be a list of [src, dst, weight] triples")
        triples = []
        for a in arcs:
            if not (isinstance(a, list) and len(a) == 3):
                _fail(f"{path}.arcs", f"bad triple {a!r}; expected [src, dst, weight]")
            src, dst, w = a
            if not (isinstance(src, int) and isinstance(dst, int)):
                _fail(f"{path}.arcs", f"src and dst must be integers in {a!r}")
            if not (0 <= src < n and 0 <= dst < n):
                _fail(f"{path}.arcs", f"node index outside 0..{n - 1} in {a!r}")
            triples.append((src, dst, float(w)))
        return WeightedDigraph.from_arcs(n, triples)
    except ValueError as exc:
        _fail(path, str(exc))


def _parse_graph(raw, n_nodes=None):
    if not isinstance(raw, dict):
        _fail("graph", "must be an object with segments")
    _reject_unknown(raw, _GRAPH_KEYS, "graph")
    mode = raw.get("mode", "hold-last")
    try:
        mode = SignalMode(mode)
    except ValueError:
        _fail("graph.mode", f"must be 'periodic' or 'hold-last', got {mode!r}")
    segments_raw = _require(raw, "segments", "graph")
    if not isinstance(segments_raw, list) or not segments_raw:
        _fail("graph.segments", "must be a nonempty list")
    segments = []
    for k, seg in enumerate(segments_raw):
        if not isinstance(seg, dict):
            _fail(f"graph.segments[{k}]", "must be an object")
        _reject_unknown(seg, _SEGMENT_KEYS, f"graph.segments[{k}]")
        duration = _as_positive(_require(seg, "duration", f"graph.segments[{k}]"),
                                f"graph.segments[{k}].duration")
        segments.append((duration, _parse_segment_graph(seg, k, n_nodes)))
    a_star = raw.get("a_star")
    if a_star is not None:
        a_star = _as_positive(a_star, "graph.a_star")
    try:
        signal = GraphSignal(segments, mode, a_star)
    except ValueError as exc:
        _fail("graph", str(exc))
    if n_nodes is not None and signal.n != n_nodes:
        _fail("graph", f"graphs have {signal.n} nodes but the grouping defines {n_nodes}")
    return signal


def _parse_flow(raw, patches):
    if not isinstance(raw, dict):
        _fail("flow", "must be an object with a kind")
    _reject_unknown(raw, _FLOW_KEYS, "flow")
    kind = _require(raw, "kind", "flow")
    if kind not in FLOW_KINDS:
        _fail("flow.kind", f"unknown kind {kind!r}; choose from {list(FLOW_KINDS)}")
    normalized = raw.get("normalized", True)
    if not isinstance(normalized, bool):
        _fail("flow.normalized", "must be true or false")
    project_initial = raw.get("project_initial", False)
    if not isinstance(project_initial, bool):
        _fail("flow.project_initial", "must be true or false")
    K = _as_positive(raw.get("K", 1.0), "flow.K")
    gamma = _as_positive(raw.get("gamma", 1.0), "flow.gamma")
    try:
        spec = FlowSpec(kind=kind, patches=patches, K=K, gamma=gamma, normalized=normalized)
    except (ValueError, LinflowError) as exc:
        _fail("flow", str(exc))
    return spec, project_initial


def _parse_integrator(raw):
    if not isinstance(raw, dict):
        _fail("integrator", "must be an object with t_end")
    _reject_unknown(raw, _INTEGRATOR_KEYS, "integrator")
    t_end = _as_positive(_require(raw, "t_end", "integrator"), "integrator.t_end")
    step = _as_positive(raw.get("step", 1e-3), "integrator.step")
    stride = raw.get("sample_stride", 10)
    if not isinstance(stride, int) or stride < 1:
        _fail("integrator.sample_stride", f"must be a positive integer, got {stride!r}")
    t0 = raw.get("t0")
    if t0 is not None:
        try:
            t0 = float(t0)
        except (TypeError, ValueError):
            _fail("integrator.t0", f"must be a number or null, got {t0!r}")
        if not np.isfinite(t0) or t0 < 0:
            _fail("integrator.t0", f"must be nonnegative and finite, got {t0}")
        if t0 >= t_end:
            _fail("integrator.t0", f"must be below t_end = {t_end}")
    return IntegratorConfig(t_end=t_end, step=step, sample_stride=stride, t0=t0)


def _parse_x0(raw, n_nodes, m):
    if raw is None:
        _fail("x0", "missing required key")
    X = _as_matrix(raw, "x0")
    if X.shape != (n_nodes, m):
        _fail("x0", f"expected {n_nodes} rows of length {m}, got {X.shape[0]}x{X.shape[1]}")
    return X


def _parse_monitors(raw):
    if raw is None:
        return ("disagreement", "average", "own_set_distance")
    if not isinstance(raw, list):
        _fail("monitors", "must be a list of monitor names")
    for name in raw:
        if name not in MONITOR_NAMES:
            _fail("monitors", f"unknown monitor {name!r}; choose from {list(MONITOR_NAMES)}")
    return tuple(raw)


def _load_raw(source):
    if isinstance(source, (str, pathlib.Path)):
        path = pathlib.Path(source)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    elif isinstance(source, dict):
        raw = source
    else:
        raise ConfigError(f"config must be a path or a dict, got {type(source).__name__}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return raw


def parse_graph_only(source):
    """Parse and validate only the graph section of a config.

    Used by connectivity checks that need no system or flow. Arc-form
    segments must carry their own 'n' in this mode. Other sections are
    left untouched.
    """
    raw = _load_raw(source)
    return _parse_graph(_require(raw, "graph", ""))


def parse_config(source):
    """Parse and validate a config from a file path or an already-loaded dict.

    Raises ConfigError with a field path on the first violation.
    """
    raw = _load_raw(source)
    _reject_unknown(raw, _TOP_KEYS, "")

    sys = _parse_system(_require(raw, "system", ""))
    grouping = _parse_grouping(raw.get("grouping"), sys)
    try:
        patches = tuple(sys.patch_for(g) for g in grouping)
    except LinflowError as exc:
        _fail("grouping", str(exc))
    signal = _parse_graph(_require(raw, "graph", ""), len(grouping))
    spec, project_initial = _parse_flow(_require(raw, "flow", ""), patches)
    integrator = _parse_integrator(_require(raw, "integrator", ""))
    x0 = _parse_x0(raw.get("x0"), len(grouping), sys.m)
    monitors = _parse_monitors(raw.get("monitors"))
    output_dir = raw.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        _fail("output_dir", "must be a string path")

    return ExperimentConfig(
        sys=sys,
        grouping=grouping,
        patches=patches,
        signal=signal,
        spec=spec,
        integrator=integrator,
        x0=x0,
        monitors=monitors,
        project_initial=project_initial,
        output_dir=output_dir,
    )
