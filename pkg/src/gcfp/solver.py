"""Convex-combination fixed-point iteration for monotone GC-contractions.

One outer step from an iterate ``z`` with residual ``r = d(z, Tz)``:

1. find the first ``n <= N_max(a)`` with ``d(T^n z, T^{n+2} z) <= 2/(2-a) r``;
2. ``z' = alpha T^{n+1} z (+) beta T^{n+2} z``;
3. require ``d(z', Tz') <= K r``.

Iterates form a G-monotone chain, so the residual bound plus the edge-pair
bound makes the chain Cauchy; the last iterate is reported as the fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .contraction import GCParams, satisfies
from .errors import ParameterError, PreconditionError
from .graph import Digraph
from .mapping import MappingHandle
from .oracles import (
    _scan_reduction,
    edge_pair_factor,
    make_beta_schedule,
    max_reduction_index,
)
from .report import relative_slack
from .space import ConvexSpace

DECAY_SLACK = 1e-12


@dataclass
class SolverConfig:
    tolerance: float = 1e-9
    max_outer_iterations: int = 1000
    beta_override: Optional[float] = None
    assert_edges: bool = True
    force_mode: bool = False

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")
        if self.max_outer_iterations < 1:
            raise ParameterError("max_outer_iterations must be positive")


@dataclass
class SolverStep:
    index: int
    z: tuple[float, ...]
    residual: float
    reduction_index: int
    ratio: float
    edge_attestations: list[bool]
    notes: list[str] = field(default_factory=list)


@dataclass
class Certificate:
    omega: tuple[float, ...]
    final_residual: float
    K: float
    beta: float
    alpha: float
    tolerance: float
    start: tuple[float, ...]
    start_residual: float
    direction: str
    status: str
    reason: str
    certifying: bool
    start_edge_holds: bool
    a: float
    b: float
    c: float
    steps: list[SolverStep] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def residuals(self) -> list[float]:
        return [self.start_residual] + [s.residual for s in self.steps]

    def iterates(self) -> list[tuple[float, ...]]:
        return [self.start] + [s.z for s in self.steps]


def _direction(g: Digraph, x0: np.ndarray, tx0: np.ndarray) -> str:
    # Both directions hold at fixed points or in symmetric relations; prefer increasing.
    if g.has_edge(x0, tx0):
        return "increasing"
    if g.has_edge(tx0, x0):
        return "decreasing"
    raise PreconditionError("start point has no edge to or from its image")


def _oriented(g: Digraph, direction: str, lo, hi) -> bool:
    """Edge ``lo -> hi`` for increasing runs, ``hi -> lo`` for decreasing ones."""
    return g.has_edge(lo, hi) if direction == "increasing" else g.has_edge(hi, lo)


def solve(
    space: ConvexSpace, g: Digraph, T: MappingHandle, params: GCParams, x0,
    config: Optional[SolverConfig] = None,
    on_step: Optional[Callable[[SolverStep], None]] = None,
) -> Certificate:
    """Iterate from ``x0`` until the residual drops below the tolerance.

    Hypothesis failures (no reduction index, broken edge chain, residual
    decay above K) end the run with status ``hypothesis-failure``; in force
    mode they are recorded on the step and the run continues. ``on_step``
    is called with every step as it is produced (trace streaming).
    """
    config = config or SolverConfig()
    if params.c is None:
        raise ParameterError("solver needs a (a, b, c) triple")
    if not config.force_mode:
        if not satisfies(params, "graph-gc-strict"):
            raise ParameterError(
                "solver needs graph-gc-strict parameters (0<a<1, a+b=1, 0<=c<1/2); "
                "use force mode to run anyway"
            )
        if not g.transitive_claimed:
            raise PreconditionError("solver needs a transitive graph")
    if not 0 < params.a < 1:
        raise ParameterError("solver needs 0 < a < 1")
    sched = make_beta_schedule(params, config.beta_override, force=config.force_mode)
    x0 = space.point(x0)
    if not space.contains(x0):
        raise PreconditionError(f"start {x0.tolist()} outside the domain")
    tx0 = T(x0)
    direction = _direction(g, x0, tx0)
    a = params.a
    n_max = max_reduction_index(a)
    tol = config.tolerance

    z = x0
    r = space.distance(x0, tx0)
    r0 = r
    steps: list[SolverStep] = []
    status, reason = "max-iterations", ""
    failures: list[str] = []

    if r <= tol:
        status = "converged"
    for k in range(config.max_outer_iterations if status != "converged" else 0):
        notes: list[str] = []
        orbit = T.orbit(z, n_max + 2)
        first, vals = _scan_reduction(space, orbit, a, n_max)
        n = int(first)
        if n == 0:
            msg = f"step {k + 1}: no reduction index within N_max={n_max}"
            if not config.force_mode:
                status, reason = "hypothesis-failure", msg
                break
            n = int(np.argmin(vals)) + 1
            notes.append(msg)
            failures.append(msg)
        z_new = space.combine(orbit[n + 1], orbit[n + 2], sched.alpha)
        tz_new = T(z_new)
        r_new = space.distance(z_new, tz_new)
        attest = [_oriented(g, direction, z, z_new), _oriented(g, direction, z_new, tz_new)]
        step = SolverStep(
            index=k + 1,
            z=tuple(float(c) for c in z_new),
            residual=float(r_new),
            reduction_index=n,
            ratio=float(r_new / r) if r > 0 else 0.0,
            edge_attestations=attest,
            notes=notes,
        )
        steps.append(step)
        problems = []
        if config.assert_edges and not all(attest):
            problems.append(f"step {k + 1}: edge attestation failed {attest}")
        if r_new > sched.K * r + float(relative_slack(r, DECAY_SLACK)):
            problems.append(
                f"step {k + 1}: residual {r_new:.17g} exceeds K*previous {sched.K * r:.17g}"
            )
        if problems:
            if not config.force_mode:
                status, reason = "hypothesis-failure", "; ".join(problems)
                step.notes.extend(problems)
                if on_step is not None:
                    on_step(step)
                z, r = z_new, r_new
                break
            step.notes.extend(problems)
            failures.extend(problems)
        if on_step is not None:
            on_step(step)
        z, r = z_new, r_new
        if r <= tol:
            status = "converged"
            break

    if status == "max-iterations" and failures:
        status = "hypothesis-failure"
        reason = failures[0] + (f" (+{len(failures) - 1} more)" if len(failures) > 1 else "")
    elif status == "max-iterations":
        reason = f"residual {r:.3g} above tolerance after {len(steps)} steps"

    return Certificate(
        omega=tuple(float(c) for c in z),
        final_residual=float(r),
        K=sched.K,
        beta=sched.beta,
        alpha=sched.alpha,
        tolerance=tol,
        start=tuple(float(c) for c in x0),
        start_residual=float(r0),
        direction=direction,
        status=status,
        reason=reason,
        certifying=not config.force_mode,
        start_edge_holds=_oriented(g, direction, x0, z),
        a=params.a,
        b=params.b,
        c=params.c,
        steps=steps,
    )


@dataclass
class UniquenessReport:
    holds: bool
    steps_checked: int
    worst_margin: float
    distance_to_omega: float
    coincidence_radius: float
    edges_hold: bool


def verify_uniqueness(
    space: ConvexSpace, g: Digraph, T: MappingHandle, params: GCParams,
    cert: Certificate, candidate,
) -> UniquenessReport:
    """Check that an approximate fixed point on the start's side coincides with omega.

    Every iterate ``z`` must satisfy
    ``d(z, cand) <= (2-a)/(1-a) (d(z, Tz) + d(cand, T cand))``, and omega sits
    within ``coincidence_radius <= 2 (2-a)/(1-a) tolerance`` of the candidate.
    """
    cand = space.point(candidate)
    cand_res = space.distance(cand, T(cand))
    if cand_res > cert.tolerance:
        raise PreconditionError(
            f"candidate is not a fixed point: residual {cand_res:.3g} > {cert.tolerance:.3g}"
        )
    start = np.asarray(cert.start)
    if not _oriented(g, cert.direction, start, cand):
        raise PreconditionError("candidate is not on the start's side of the relation")
    factor = edge_pair_factor(params.a)
    zs = np.asarray(cert.iterates())
    res = np.asarray(cert.residuals())
    bounds = factor * (res + cand_res)
    dists = space.distance(zs, np.broadcast_to(cand, zs.shape))
    margins = dists - bounds
    ok = bool(np.all(margins <= relative_slack(bounds)))
    edges = all(_oriented(g, cert.direction, z, cand) for z in zs)
    radius = factor * (cert.final_residual + cand_res)
    d_omega = space.distance(np.asarray(cert.omega), cand)
    ok = ok and d_omega <= radius + float(relative_slack(radius))
    return UniquenessReport(
        holds=ok,
        steps_checked=len(zs),
        worst_margin=float(margins.max()),
        distance_to_omega=float(d_omega),
        coincidence_radius=float(radius),
        edges_hold=edges,
    )
