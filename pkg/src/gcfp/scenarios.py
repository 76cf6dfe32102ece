"""Named experiment setups and the JSON scenario format.

A scenario file is one JSON object::

    {
      "name": "halving",
      "space":  {"dimension": 1, "metric": "euclidean",
                 "box": {"lower": [0], "upper": [1], "open_sides": [[false, false]]}},
      "graph":  {"kind": "componentwise-order"},
      "map":    {"kind": "halving-to-anchor", "anchor": [0]},
      "params": {"variant": "graph-gc-strict", "a": 0.5, "b": 0.5, "c": 0.2},
      "start":  [1],
      "expected": {"kind": "fixed-point", "point": [0], "tolerance": 1e-8},
      "solver": {"tolerance": 1e-9, "max_iterations": 1000, "beta": 0.5},
      "verify": {"samples": 100000, "seed": 7}
    }

Unbounded box sides are ``null`` and need ``box.sample_lower`` /
``box.sample_upper`` for sampling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .contraction import GCParams, validate_params
from .errors import ConfigError, GCFPError
from .graph import Digraph, EdgeRelation, strip_space
from .mapping import MappingHandle
from .report import dumps
from .space import ConvexSpace

EXPECTED_KINDS = ("fixed-point", "no-fixed-point", "hypothesis-failure")


@dataclass(frozen=True)
class Expected:
    kind: str
    point: Optional[tuple[float, ...]] = None
    tolerance: Optional[float] = None

    def __post_init__(self):
        if self.kind not in EXPECTED_KINDS:
            raise ConfigError(f"expected.kind must be one of {EXPECTED_KINDS}")
        if self.kind == "fixed-point" and (self.point is None or self.tolerance is None):
            raise ConfigError("expected fixed-point needs point and tolerance")


@dataclass(frozen=True)
class SolverDefaults:
    tolerance: float = 1e-9
    max_iterations: int = 1000
    beta: Optional[float] = None
    assert_edges: bool = True


@dataclass(frozen=True)
class VerifyDefaults:
    samples: int = 10_000
    seed: int = 0


@dataclass(frozen=True)
class Scenario:
    name: str
    space: ConvexSpace
    graph: Digraph
    map: MappingHandle
    params: GCParams
    start: tuple[float, ...]
    expected: Expected
    solver: SolverDefaults = field(default_factory=SolverDefaults)
    verify: VerifyDefaults = field(default_factory=VerifyDefaults)
    demo: Optional[str] = None

    def __post_init__(self):
        if self.graph.space != self.space or self.map.domain != self.space:
            raise ConfigError("graph and map must live on the scenario space")
        start = self.space.point(self.start)
        if not self.space.contains(start):
            raise ConfigError(f"start {list(self.start)} outside the domain")
        if self.expected.point is not None and not self.space.contains(self.expected.point):
            raise ConfigError("expected fixed point outside the domain")


# ------------------------------------------------------------ builtins


def _halving() -> Scenario:
    space = ConvexSpace.box((0.0,), (1.0,))
    return Scenario(
        name="halving",
        space=space,
        graph=Digraph(space, EdgeRelation("componentwise-order")),
        map=MappingHandle("halving-to-anchor", space, anchor=(0.0,)),
        params=validate_params("graph-gc-strict", 0.5, 0.5, 0.2),
        start=(1.0,),
        expected=Expected("fixed-point", (0.0,), 1e-8),
        solver=SolverDefaults(tolerance=1e-9, beta=0.5),
        verify=VerifyDefaults(samples=100_000, seed=7),
    )


def _shift() -> Scenario:
    space = ConvexSpace(dimension=1, sample_lower=(-50.0,), sample_upper=(50.0,))
    return Scenario(
        name="shift-counterexample",
        space=space,
        graph=Digraph(space, EdgeRelation("componentwise-order")),
        map=MappingHandle("shift", space, vector=(1.0,)),
        params=validate_params("raw", 0.9, 0.1, 5 / 9),
        start=(0.0,),
        expected=Expected("no-fixed-point"),
        solver=SolverDefaults(tolerance=1e-9, max_iterations=200),
        verify=VerifyDefaults(samples=100_000, seed=0),
    )


def _strip() -> Scenario:
    space = strip_space()
    return Scenario(
        name="strip-space",
        space=space,
        graph=Digraph(space, EdgeRelation("fixed-first-coordinate-order")),
        # Moves y halfway to 1 on each vertical fibre; a contraction along
        # edges only, with one fixed point (x, 1) per fibre.
        map=MappingHandle("affine", space, matrix=((1.0, 0.0), (0.0, 0.5)), vector=(0.0, 0.5)),
        params=validate_params("graph-gc-strict", 0.5, 0.5, 0.2),
        start=(0.5, 0.0),
        expected=Expected("fixed-point", (0.5, 1.0), 1e-8),
        demo="strip",
    )


def _affine() -> Scenario:
    space = ConvexSpace.box((0.0, 0.0), (1.0, 1.0))
    return Scenario(
        name="affine-monotone",
        space=space,
        graph=Digraph(space, EdgeRelation("componentwise-order")),
        map=MappingHandle("affine", space, matrix=((0.3, 0.1), (0.0, 0.4)), vector=(0.2, 0.3)),
        params=validate_params("graph-gc-strict", 0.6, 0.4, 0.1),
        start=(0.0, 0.0),
        # (I - A)^{-1} v
        expected=Expected("fixed-point", (5 / 14, 0.5), 1e-8),
    )


BUILTINS = {
    "halving": _halving,
    "shift-counterexample": _shift,
    "strip-space": _strip,
    "affine-monotone": _affine,
}


def builtin(name: str) -> Scenario:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ConfigError(f"unknown builtin scenario {name!r}; known: {sorted(BUILTINS)}") from None


# ------------------------------------------------------------ config format


def _bound(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


def scenario_to_config(s: Scenario) -> dict[str, Any]:
    sp = s.space
    box = {
        "lower": [_bound(v) for v in sp.lower],
        "upper": [_bound(v) for v in sp.upper],
        "open_sides": [list(p) for p in sp.open_sides],
    }
    if (sp.sample_lower, sp.sample_upper) != (sp.lower, sp.upper):
        box["sample_lower"] = list(sp.sample_lower)
        box["sample_upper"] = list(sp.sample_upper)
    space: dict[str, Any] = {"dimension": sp.dimension, "metric": sp.metric, "box": box}
    if sp.weights:
        space["weights"] = list(sp.weights)

    rel = s.graph.relation
    graph: dict[str, Any] = {"kind": rel.kind, "transitive": s.graph.transitive_claimed}
    if rel.kind == "finite-table":
        graph["vertices"] = [list(v) for v in rel.vertices]
        graph["matrix"] = [list(r) for r in rel.matrix]
    if rel.kind == "custom-affine-order":
        graph["order_matrix"] = [list(r) for r in rel.order_matrix]

    m = s.map
    mp: dict[str, Any] = {"kind": m.kind}
    if m.kind == "affine":
        mp["matrix"] = [list(r) for r in m.matrix]
    if m.kind in ("affine", "shift"):
        mp["vector"] = list(m.vector)
    if m.kind == "halving-to-anchor":
        mp["anchor"] = list(m.anchor)
    if m.kind == "named-builtin":
        mp["name"] = m.name

    p = s.params
    params: dict[str, Any] = {"variant": p.variant, "a": p.a}
    if p.variant == "gregus":
        params["p"] = p.b
    else:
        params["b"] = p.b
        params["c"] = p.c

    expected: dict[str, Any] = {"kind": s.expected.kind}
    if s.expected.point is not None:
        expected["point"] = list(s.expected.point)
        expected["tolerance"] = s.expected.tolerance

    out = {
        "name": s.name,
        "space": space,
        "graph": graph,
        "map": mp,
        "params": params,
        "start": list(s.start),
        "expected": expected,
        "solver": {
            "tolerance": s.solver.tolerance,
            "max_iterations": s.solver.max_iterations,
            "beta": s.solver.beta,
            "assert_edges": s.solver.assert_edges,
        },
        "verify": {"samples": s.verify.samples, "seed": s.verify.seed},
    }
    if s.demo:
        out["demo"] = s.demo
    return out


def dump_scenario(s: Scenario) -> str:
    return dumps(scenario_to_config(s))


def _get(d: dict, key: str, path: str, default: Any = ...):
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object")
    if key in d:
        return d[key]
    if default is ...:
        raise ConfigError(f"missing key '{path}.{key}'" if path else f"missing key '{key}'")
    return default


def _tuple(values, path: str) -> tuple[float, ...]:
    if not isinstance(values, list):
        raise ConfigError(f"{path}: expected a list of numbers")
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a list of numbers") from None


def _matrix(rows, path: str):
    if not isinstance(rows, list):
        raise ConfigError(f"{path}: expected a list of rows")
    return tuple(_tuple(r, path) for r in rows)


def _section(name: str, build):
    try:
        return build()
    except ConfigError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    except (GCFPError, TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def scenario_from_config(cfg: dict[str, Any]) -> Scenario:
    if not isinstance(cfg, dict):
        raise ConfigError("scenario config must be a JSON object")

    def build_space():
        sp = _get(cfg, "space", "")
        box = _get(sp, "box", "space", {})
        return ConvexSpace(
            dimension=_get(sp, "dimension", "space"),
            metric=_get(sp, "metric", "space", "euclidean"),
            lower=tuple(_get(box, "lower", "space.box", ())),
            upper=tuple(_get(box, "upper", "space.box", ())),
            open_sides=tuple(tuple(p) for p in _get(box, "open_sides", "space.box", ())),
            weights=tuple(_get(sp, "weights", "space", ())),
            sample_lower=tuple(_get(box, "sample_lower", "space.box", ())),
            sample_upper=tuple(_get(box, "sample_upper", "space.box", ())),
        )

    space = _section("space", build_space)

    def build_graph():
        g = _get(cfg, "graph", "")
        kind = _get(g, "kind", "graph")
        rel = EdgeRelation(
            kind=kind,
            vertices=_matrix(_get(g, "vertices", "graph", []), "graph.vertices"),
            matrix=tuple(tuple(bool(e) for e in r) for r in _get(g, "matrix", "graph", [])),
            order_matrix=_matrix(_get(g, "order_matrix", "graph", []), "graph.order_matrix"),
        )
        return Digraph(space, rel, bool(_get(g, "transitive", "graph", True)))

    graph = _section("graph", build_graph)

    def build_map():
        m = _get(cfg, "map", "")
        return MappingHandle(
            kind=_get(m, "kind", "map"),
            domain=space,
            matrix=_matrix(_get(m, "matrix", "map", []), "map.matrix"),
            vector=_tuple(_get(m, "vector", "map", []), "map.vector"),
            anchor=_tuple(_get(m, "anchor", "map", []), "map.anchor"),
            name=_get(m, "name", "map", ""),
        )

    mapping = _section("map", build_map)

    def build_params():
        p = _get(cfg, "params", "")
        variant = _get(p, "variant", "params")
        if variant == "gregus":
            return validate_params(variant, _get(p, "a", "params"), _get(p, "p", "params"),
                                   _get(p, "c", "params", None))
        return validate_params(variant, _get(p, "a", "params"), _get(p, "b", "params"),
                               _get(p, "c", "params"))

    params = _section("params", build_params)

    def build_expected():
        e = _get(cfg, "expected", "")
        point = _get(e, "point", "expected", None)
        return Expected(
            kind=_get(e, "kind", "expected"),
            point=None if point is None else _tuple(point, "expected.point"),
            tolerance=_get(e, "tolerance", "expected", None),
        )

    expected = _section("expected", build_expected)

    def build_solver():
        s = _get(cfg, "solver", "", {})
        beta = _get(s, "beta", "solver", None)
        return SolverDefaults(
            tolerance=float(_get(s, "tolerance", "solver", 1e-9)),
            max_iterations=int(_get(s, "max_iterations", "solver", 1000)),
            beta=None if beta is None else float(beta),
            assert_edges=bool(_get(s, "assert_edges", "solver", True)),
        )

    def build_verify():
        v = _get(cfg, "verify", "", {})
        return VerifyDefaults(
            samples=int(_get(v, "samples", "verify", 10_000)),
            seed=int(_get(v, "seed", "verify", 0)),
        )

    solver = _section("solver", build_solver)
    verify = _section("verify", build_verify)
    start = _section("start", lambda: _tuple(_get(cfg, "start", ""), "start"))
    return _section("scenario", lambda: Scenario(
        name=str(cfg.get("name", "config")),
        space=space,
        graph=graph,
        map=mapping,
        params=params,
        start=start,
        expected=expected,
        solver=solver,
        verify=verify,
        demo=cfg.get("demo"),
    ))


def load_scenario(config_text: str) -> Scenario:
    """Parse and fully construct a scenario, running every construction check."""
    try:
        cfg = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_config(cfg)


def expected_fixed_point_matches(s: Scenario, omega) -> Optional[bool]:
    if s.expected.kind != "fixed-point":
        return None
    return bool(s.space.distance(np.asarray(omega), np.asarray(s.expected.point)) <= s.expected.tolerance)
