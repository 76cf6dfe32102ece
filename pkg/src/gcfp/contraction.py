"""Gregus, Ciric and graph-monotone Gregus-Ciric conditions.

The right-hand-side evaluators take single points; the ``verify_*``
functions run the same formulas vectorised over sampled pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError, PreconditionError, SparseRelationError
from .graph import Digraph, all_edge_pairs
from .mapping import MappingHandle
from .report import ViolationReport, relative_slack
from .space import ConvexSpace

VARIANTS = ("gregus", "ciric-cg", "drm", "graph-gc", "graph-gc-strict", "raw")
GC_VARIANTS = ("ciric-cg", "drm", "graph-gc", "graph-gc-strict", "raw")
MIN_EDGE_PAIRS = 10
SUM_TOL = 1e-12


@dataclass(frozen=True)
class GCParams:
    """Validated ``(a, b, c)``; for ``gregus`` ``b`` holds p and ``c`` is None.

    ``raw`` only requires nonnegative entries and is meant for evaluating
    the inequality outside every theorem's regime (the shift counterexample).
    """

    a: float
    b: float
    c: Optional[float]
    variant: str

    @property
    def p(self) -> float:
        return self.b


def _fail(variant: str, bound: str):
    raise ParameterError(f"{variant}: {bound} required")


def validate_params(variant: str, a: float, b_or_p: float, c: Optional[float] = None) -> GCParams:
    if variant not in VARIANTS:
        raise ParameterError(f"unknown params.variant {variant!r}; expected one of {VARIANTS}")
    a = float(a)
    b = float(b_or_p)
    if not all(np.isfinite([a, b] + ([c] if c is not None else []))):
        raise ParameterError(f"{variant}: parameters must be finite")
    if variant == "gregus":
        if c is not None:
            _fail(variant, "c absent")
        if not 0 < a < 1:
            _fail(variant, "0 < a < 1")
        if b < 0:
            _fail(variant, "p >= 0")
        if abs(a + 2 * b - 1) > SUM_TOL:
            _fail(variant, "a + 2p = 1")
        return GCParams(a, b, None, variant)

    if c is None:
        _fail(variant, "c present")
    c = float(c)
    if variant == "raw":
        if min(a, b, c) < 0:
            _fail(variant, "a, b, c >= 0")
        return GCParams(a, b, c, variant)
    if not 0 < a < 1:
        _fail(variant, "0 < a < 1")
    if b < 0:
        _fail(variant, "b >= 0")
    if abs(a + b - 1) > SUM_TOL:
        _fail(variant, "a + b = 1")
    if c < 0:
        _fail(variant, "c >= 0")
    if variant == "ciric-cg" and c > (4 - a) / (8 - a):
        _fail(variant, "c <= (4-a)/(8-a)")
    if variant in ("drm", "graph-gc-strict") and not c < 0.5:
        _fail(variant, "c < 1/2")
    if variant == "graph-gc" and c > 0.5:
        _fail(variant, "c <= 1/2")
    return GCParams(a, b, c, variant)


def satisfies(params: GCParams, variant: str) -> bool:
    """Whether the same numbers would also validate under another variant."""
    try:
        validate_params(variant, params.a, params.b, params.c)
    except ParameterError:
        return False
    return True


def _gc_terms(space, x, y, tx, ty):
    d = space.distance
    return d(x, y), d(x, ty) + d(y, tx), d(x, tx), d(y, ty)


def _rhs_gc_arrays(space, x, y, tx, ty, a, b, c):
    dxy, cross, dxtx, dyty = _gc_terms(space, x, y, tx, ty)
    return a * np.maximum(dxy, c * cross) + b * np.maximum(dxtx, dyty)


def _rhs_quasi_arrays(space, x, y, tx, ty, k):
    d = space.distance
    five = np.stack([d(x, y), d(x, ty), d(y, tx), d(x, tx), d(y, ty)])
    return k * five.max(axis=0)


def rhs_gc(space: ConvexSpace, T: MappingHandle, x, y, params: GCParams) -> float:
    """``a max{d(x,y), c[d(x,Ty)+d(y,Tx)]} + b max{d(x,Tx), d(y,Ty)}``."""
    if params.variant not in GC_VARIANTS:
        raise PreconditionError(f"rhs_gc does not apply to variant {params.variant!r}")
    x, y = space.point(x), space.point(y)
    return float(_rhs_gc_arrays(space, x, y, T(x), T(y), params.a, params.b, params.c))


def rhs_quasi(space: ConvexSpace, T: MappingHandle, x, y, k: float) -> float:
    """``k`` times the largest of the five distances among x, y, Tx, Ty."""
    if k < 0:
        raise PreconditionError("k must be >= 0")
    x, y = space.point(x), space.point(y)
    return float(_rhs_quasi_arrays(space, x, y, T(x), T(y), k))


def rhs_gregus(space: ConvexSpace, T: MappingHandle, x, y, a: float, p: float) -> float:
    params = validate_params("gregus", a, p)
    x, y = space.point(x), space.point(y)
    d = space.distance
    return params.a * d(x, y) + params.p * d(T(x), x) + params.p * d(T(y), y)


def _rhs_for(space, x, y, tx, ty, params):
    if params.variant == "gregus":
        d = space.distance
        return params.a * d(x, y) + params.p * (d(tx, x) + d(ty, y))
    return _rhs_gc_arrays(space, x, y, tx, ty, params.a, params.b, params.c)


def _edge_sample(g: Digraph, sample_count: int, seed: int, orient: bool):
    """Pairs drawn from the domain, kept when related.

    With ``orient`` a pair related only backwards is swapped so every kept
    pair satisfies ``x -> y``. Finite tables return every edge instead.
    """
    if g.is_finite:
        x, y = all_edge_pairs(g)
        return x, y, "exhaustive over all edges"
    rng = np.random.default_rng(seed)
    x = g.relation.sample_vertices(rng, g.space, sample_count)
    y = g.relation.propose(rng, g.space, x)
    fwd = g.edges(x, y)
    bwd = g.edges(y, x) & ~fwd
    if orient:
        x, y = np.where(bwd[:, None], y, x), np.where(bwd[:, None], x, y)
    keep = fwd | bwd
    if keep.sum() < MIN_EDGE_PAIRS:
        raise SparseRelationError(
            f"relation too sparse: {int(keep.sum())} edge pairs in {sample_count} draws"
        )
    return x[keep], y[keep], f"{int(keep.sum())} edge pairs from {sample_count} draws"


def verify_condition(
    space: ConvexSpace, g: Digraph, T: MappingHandle, params: GCParams,
    sample_count: int, seed: int,
) -> ViolationReport:
    """Check ``d(Tx, Ty) <= rhs`` over related pairs.

    Both sides are symmetric in (x, y), so a pair related in either
    direction is an admissible edge.
    """
    x, y, note = _edge_sample(g, sample_count, seed, orient=False)
    tx, ty = T(x), T(y)
    lhs = space.distance(tx, ty)
    rhs = _rhs_for(space, x, y, tx, ty, params)
    report = ViolationReport.from_margins(
        f"condition[{params.variant}]", (x, y), lhs, rhs, relative_slack(rhs), seed
    )
    report.notes.append(note)
    return report


def verify_monotone(g: Digraph, T: MappingHandle, sample_count: int, seed: int) -> ViolationReport:
    """Edge preservation: ``x -> y`` implies ``Tx -> Ty``."""
    x, y, note = _edge_sample(g, sample_count, seed, orient=True)
    report = ViolationReport.from_mask(
        "monotone", (x, y), ~g.edges(T(x), T(y)), seed=seed, note="edge not preserved"
    )
    report.notes.append(note)
    return report


def check_quasi_dominance(
    space: ConvexSpace, T: MappingHandle, params: GCParams, sample_count: int, seed: int,
) -> ViolationReport:
    """Pointwise ``rhs_gc(x, y) <= rhs_quasi(x, y, a+b)`` for a+b < 1, c <= 1/2."""
    if params.c is None:
        raise PreconditionError("quasi dominance needs a (a, b, c) triple")
    if not params.a + params.b < 1:
        raise PreconditionError("quasi dominance: a + b < 1 required")
    if not params.c <= 0.5:
        raise PreconditionError("quasi dominance: c <= 1/2 required")
    rng = np.random.default_rng(seed)
    x = space.sample(rng, sample_count)
    y = space.sample(rng, sample_count)
    tx, ty = T(x), T(y)
    gc = _rhs_gc_arrays(space, x, y, tx, ty, params.a, params.b, params.c)
    quasi = _rhs_quasi_arrays(space, x, y, tx, ty, params.a + params.b)
    return ViolationReport.from_margins(
        "quasi-dominance", (x, y), gc, quasi, relative_slack(quasi), seed
    )
