"""Executable consequences of the contraction hypotheses.

Four checks, each usable on a single input or as a sampled suite:

* edge-pair bound ``d(x,y) <= (2-a)/(1-a) (d(x,Tx) + d(y,Ty))``;
* orbit displacements ``d(T^n x, T^{n+1} x)`` are nonincreasing;
* some ``n <= N_max(a)`` has ``d(T^n x, T^{n+2} x) <= 2/(2-a) d(x,Tx)``;
* the convex-combination factor ``K(a, b, c, beta) < 1`` for ``2c < beta < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .contraction import GCParams, satisfies
from .errors import HypothesisFailure, ParameterError, PreconditionError, SparseRelationError
from .graph import Digraph, sample_edge_pairs
from .mapping import MappingHandle
from .report import relative_slack
from .space import ConvexSpace

ORBIT_SLACK = 1e-12


class LemmaCheck(NamedTuple):
    holds: bool
    lhs: float
    bound: float


def edge_pair_factor(a: float) -> float:
    return (2 - a) / (1 - a)


def lemma1_check(
    space: ConvexSpace, g: Digraph, T: MappingHandle, params: GCParams, x, y,
    strict: bool = True,
) -> LemmaCheck:
    """Edge-pair bound for one pair related in at least one direction.

    With ``strict=False`` the bound is evaluated even when ``params`` fall
    outside the graph-gc regime (used to observe counterexamples).
    """
    if strict and not satisfies(params, "graph-gc"):
        raise ParameterError("edge-pair bound needs graph-gc parameters")
    if not 0 < params.a < 1:
        raise ParameterError("edge-pair bound needs 0 < a < 1")
    x, y = space.point(x), space.point(y)
    if not (g.has_edge(x, y) or g.has_edge(y, x)):
        raise PreconditionError("pair is not an edge in either direction")
    lhs = space.distance(x, y)
    bound = edge_pair_factor(params.a) * (space.distance(x, T(x)) + space.distance(y, T(y)))
    return LemmaCheck(lhs <= bound + float(relative_slack(bound)), lhs, bound)


@dataclass
class OrbitProfile:
    points: np.ndarray
    displacements: np.ndarray
    increases: list[int] = field(default_factory=list)

    @property
    def nonincreasing(self) -> bool:
        return not self.increases


def _admissible(g: Digraph, x, tx) -> np.ndarray:
    return g.edges(x, tx) | g.edges(tx, x)


def orbit_profile(
    space: ConvexSpace, T: MappingHandle, x, steps: int, g: Optional[Digraph] = None,
) -> OrbitProfile:
    """Orbit ``x, ..., T^steps x`` and its displacement list.

    ``increases`` lists indices k with ``disp[k+1] > disp[k]`` beyond slack.
    """
    if steps < 1:
        raise PreconditionError("steps must be positive")
    x = space.point(x)
    if g is not None and not _admissible(g, x, T(x)):
        raise PreconditionError("start has no edge to or from its image")
    pts = T.orbit(x, steps)
    disp = np.asarray(space.distance(pts[:-1], pts[1:]))
    grew = disp[1:] - disp[:-1] > relative_slack(disp[:-1], ORBIT_SLACK)
    return OrbitProfile(pts, disp, np.flatnonzero(grew).tolist())


def max_reduction_index(a: float) -> int:
    """Smallest ``N`` with ``2 a^(N-1) + 1 <= a/(2-a) + 1``."""
    if not 0 < a < 1:
        raise ParameterError("0 < a < 1 required")
    return math.ceil(1 + math.log(a / (2 * (2 - a))) / math.log(a))


def reduction_bound(a: float, d0):
    return 2 / (2 - a) * d0


def _scan_reduction(space, orbit: np.ndarray, a: float, n_max: int):
    """First index n in 1..n_max meeting the reduction bound, per start.

    ``orbit`` has shape ``(steps+1, ...)``. Returns (index or 0, values).
    """
    d0 = space.distance(orbit[0], orbit[1])
    bound = reduction_bound(a, d0)
    vals = np.stack([space.distance(orbit[n], orbit[n + 2]) for n in range(1, n_max + 1)])
    ok = vals <= bound + relative_slack(bound)
    first = np.where(ok.any(axis=0), ok.argmax(axis=0) + 1, 0)
    return first, vals


def find_reduction_index(space: ConvexSpace, T: MappingHandle, x, a: float) -> tuple[int, float]:
    """First ``n <= N_max(a)`` with ``d(T^n x, T^{n+2} x) <= 2/(2-a) d(x, Tx)``.

    Raises :class:`HypothesisFailure` if none exists: on a genuine
    contraction orbit this cannot happen.
    """
    n_max = max_reduction_index(a)
    x = space.point(x)
    orbit = T.orbit(x, n_max + 2)
    first, vals = _scan_reduction(space, orbit, a, n_max)
    n = int(first)
    if n == 0:
        raise HypothesisFailure(
            f"lemma hypothesis violated: no reduction index within N_max={n_max} "
            f"(best {float(np.min(vals)):.17g} > bound "
            f"{reduction_bound(a, space.distance(orbit[0], orbit[1])):.17g})"
        )
    return n, float(vals[n - 1])


def k_factor(a: float, b: float, c: float, beta: float) -> float:
    """``alpha a max{alpha + 2beta/(2-a), c(2 + 2beta/(2-a))} + beta^2 a + b``."""
    alpha = 1 - beta
    t = 2 * beta / (2 - a)
    return alpha * a * max(alpha + t, c * (2 + t)) + beta * beta * a + b


@dataclass(frozen=True)
class BetaSchedule:
    beta: float
    alpha: float
    K: float


def make_beta_schedule(params: GCParams, beta: Optional[float] = None, force: bool = False) -> BetaSchedule:
    """Pick ``beta`` in ``(2c, 1)`` (default: midpoint) and compute K.

    ``force`` skips the parameter and interval checks; if the default lies
    outside (0, 1) it falls back to 0.5. K may then be >= 1.
    """
    if params.c is None:
        raise ParameterError("beta schedule needs a (a, b, c) triple")
    a, b, c = params.a, params.b, params.c
    if not force:
        if not satisfies(params, "graph-gc-strict"):
            raise ParameterError("beta schedule needs graph-gc-strict parameters (c < 1/2)")
        if beta is not None and not 2 * c < beta < 1:
            raise ParameterError(f"beta = {beta} outside (2c, 1) = ({2 * c}, 1)")
    if beta is None:
        beta = (2 * c + 1) / 2
        if force and not 0 < beta < 1:
            beta = 0.5
    if not 0 <= beta <= 1:
        raise ParameterError(f"beta = {beta} outside [0, 1]")
    K = k_factor(a, b, c, beta)
    if not force and not K < 1:
        raise HypothesisFailure(f"K = {K} >= 1 for admissible parameters")
    return BetaSchedule(beta=beta, alpha=1 - beta, K=K)


def a_priori_iterations(d0: float, K: float, tolerance: float) -> int:
    """Outer steps after which ``K^k d0 <= tolerance``."""
    if not 0 < K < 1:
        raise ParameterError("0 < K < 1 required")
    if d0 <= 0 or tolerance <= 0:
        raise PreconditionError("d0 and tolerance must be positive")
    if tolerance >= d0:
        return 0
    return max(1, math.ceil(math.log(tolerance / d0) / math.log(K)))


# ---------------------------------------------------------------- suites


@dataclass
class SuiteResult:
    lemma: str
    passed: bool
    samples: int
    worst_margin: Optional[float]
    hypotheses_met: bool
    detail: str = ""


def lemma1_suite(space, g, T, params, samples: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    try:
        x, y = sample_edge_pairs(g, rng, samples, either_direction=True)
    except SparseRelationError as exc:
        return SuiteResult("edge-pair bound", False, 0, None, False, str(exc))
    bound = edge_pair_factor(params.a) * (space.distance(x, T(x)) + space.distance(y, T(y)))
    margin = space.distance(x, y) - bound
    bad = int((margin > relative_slack(bound)).sum())
    return SuiteResult(
        "edge-pair bound", bad == 0, len(x), float(margin.max()),
        satisfies(params, "graph-gc"), f"{bad} violations",
    )


def sample_admissible_starts(g: Digraph, T: MappingHandle, count: int, rng) -> np.ndarray:
    found = []
    total = 0
    drawn = 0
    while total < count:
        if drawn > 10**6:
            raise SparseRelationError("could not sample admissible starts")
        x = g.relation.sample_vertices(rng, g.space, max(count, 64))
        x = x[_admissible(g, x, T(x))]
        found.append(x)
        total += len(x)
        drawn += max(count, 64)
    return np.concatenate(found)[:count]


def orbit_suites(space, g, T, params, starts: int, steps: int, seed: int) -> list[SuiteResult]:
    """Displacement monotonicity and reduction-index search on sampled orbits."""
    rng = np.random.default_rng(seed)
    hyp = satisfies(params, "graph-gc")
    try:
        x0 = sample_admissible_starts(g, T, starts, rng)
    except SparseRelationError as exc:
        return [
            SuiteResult("displacement monotonicity", False, 0, None, hyp, str(exc)),
            SuiteResult("reduction index", False, 0, None, hyp, str(exc)),
        ]
    n_max = max_reduction_index(params.a)
    orbit = T.orbit(x0, max(steps, n_max + 2))
    disp = space.distance(orbit[:-1], orbit[1:])
    growth = disp[1:] - disp[:-1]
    grew = int((growth > relative_slack(disp[:-1], ORBIT_SLACK)).sum())
    mono = SuiteResult(
        "displacement monotonicity", grew == 0, len(x0), float(growth.max()), hyp,
        f"{steps}-step orbits; {grew} increases",
    )
    first, _ = _scan_reduction(space, orbit, params.a, n_max)
    missing = int((first == 0).sum())
    worst_n = int(first.max()) if missing == 0 else None
    red = SuiteResult(
        "reduction index", missing == 0, len(x0), None,
        satisfies(params, "graph-gc") and g.transitive_claimed,
        f"N_max={n_max}; " + (f"largest n used {worst_n}" if missing == 0
                              else f"{missing} orbits without a reduction index"),
    )
    return [mono, red]


GRID_A = tuple(round(0.05 * i, 2) for i in range(1, 20))
GRID_C = tuple(round(0.05 * i, 2) for i in range(0, 10))


def k_grid():
    """Yield ``(a, c, beta, K)`` over the standard parameter grid (b = 1 - a)."""
    for a in GRID_A:
        for c in GRID_C:
            for t in range(1, 10):
                beta = 2 * c + t * (1 - 2 * c) / 10
                yield a, c, beta, k_factor(a, 1 - a, c, beta)


def lemma4_suite(params: GCParams, beta: Optional[float] = None) -> SuiteResult:
    grid = list(k_grid())
    failures = sum(1 for *_, K in grid if not K < 1)
    # K should be nondecreasing in c at fixed (a, beta); reported, not enforced.
    mono_breaks = sum(
        1
        for a in GRID_A
        for beta_g in (0.1 * t for t in range(1, 10))
        for c1, c2 in zip(GRID_C, GRID_C[1:])
        if 2 * c2 < beta_g and k_factor(a, 1 - a, c2, beta_g) < k_factor(a, 1 - a, c1, beta_g)
    )
    detail = f"grid {len(grid)} points, {failures} with K >= 1, {mono_breaks} K-in-c decreases"
    try:
        sched = make_beta_schedule(params, beta)
        own = f"; scenario beta={sched.beta:.6g}, K={sched.K:.17g}"
        own_ok = True
    except (ParameterError, HypothesisFailure) as exc:
        own = f"; scenario: {exc}"
        own_ok = False
    worst = max(K for *_, K in grid) - 1
    return SuiteResult(
        "contraction factor K", failures == 0 and own_ok, len(grid), worst,
        satisfies(params, "graph-gc-strict"), detail + own,
    )


def run_lemma_suites(
    space, g, T, params, samples: int = 10_000, seed: int = 0,
    starts: int = 100, steps: int = 200, beta: Optional[float] = None,
) -> list[SuiteResult]:
    return [
        lemma1_suite(space, g, T, params, samples, seed),
        *orbit_suites(space, g, T, params, starts, steps, seed),
        lemma4_suite(params, beta),
    ]
