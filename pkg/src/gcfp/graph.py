"""Reflexive weighted digraphs over a convex space.

Edges are evaluated lazily from a predicate; only the ``finite-table`` kind
materialises an adjacency matrix, and that kind exists for exhaustive
verification. The weight of an edge is always the metric distance of its
endpoints, so no weights are stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, PreconditionError, SparseRelationError
from .report import ViolationReport
from .space import ConvexSpace

RELATION_KINDS = (
    "componentwise-order",
    "fixed-first-coordinate-order",
    "finite-table",
    "custom-affine-order",
)

REJECTION_CAP = 10**6
AFFINE_ORDER_SLACK = 1e-12


@dataclass(frozen=True)
class EdgeRelation:
    """Edge predicate ``u -> v``.

    * ``componentwise-order``: ``u_i <= v_i`` for all i.
    * ``fixed-first-coordinate-order``: ``u_1 == v_1`` and ``u_2 <= v_2``.
    * ``finite-table``: ``matrix[i][j]`` for vertices i, j.
    * ``custom-affine-order``: ``M (v - u) >= 0`` componentwise, M entrywise
      nonnegative.
    """

    kind: str
    vertices: tuple[tuple[float, ...], ...] = ()
    matrix: tuple[tuple[bool, ...], ...] = ()
    order_matrix: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in RELATION_KINDS:
            raise ConfigError(f"unknown graph.kind {self.kind!r}; expected one of {RELATION_KINDS}")
        if self.kind == "finite-table":
            verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
            mat = tuple(tuple(bool(e) for e in row) for row in self.matrix)
            if not verts:
                raise ConfigError("finite-table needs a nonempty vertex list")
            if len(mat) != len(verts) or any(len(row) != len(verts) for row in mat):
                raise ConfigError("graph.matrix must be square with one row per vertex")
            if not all(mat[i][i] for i in range(len(mat))):
                raise ConfigError("graph.matrix diagonal must be all true (reflexivity)")
            if len(set(verts)) != len(verts):
                raise ConfigError("finite-table vertices must be distinct")
            object.__setattr__(self, "vertices", verts)
            object.__setattr__(self, "matrix", mat)
        if self.kind == "custom-affine-order":
            om = tuple(tuple(float(e) for e in row) for row in self.order_matrix)
            if not om or any(e < 0 for row in om for e in row):
                raise ConfigError("graph.order_matrix must be nonempty and entrywise nonnegative")
            if len({len(row) for row in om}) != 1:
                raise ConfigError("graph.order_matrix rows must have equal length")
            object.__setattr__(self, "order_matrix", om)

    def _index(self, pts: np.ndarray) -> np.ndarray:
        lookup = {v: i for i, v in enumerate(self.vertices)}
        flat = pts.reshape(-1, pts.shape[-1])
        out = np.empty(flat.shape[0], dtype=int)
        for k, row in enumerate(flat):
            try:
                out[k] = lookup[tuple(float(c) for c in row)]
            except KeyError:
                raise PreconditionError(f"vertex {row.tolist()} not in finite table") from None
        return out.reshape(pts.shape[:-1])

    def edges(self, u, v) -> np.ndarray:
        """Vectorised edge test over the last axis."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind == "componentwise-order":
            return np.all(u <= v, axis=-1)
        if self.kind == "fixed-first-coordinate-order":
            return (u[..., 0] == v[..., 0]) & (u[..., 1] <= v[..., 1])
        if self.kind == "custom-affine-order":
            m = np.asarray(self.order_matrix)
            diff = v - u
            scale = np.abs(diff) @ m.T
            return np.all(diff @ m.T >= -AFFINE_ORDER_SLACK * (1 + scale), axis=-1)
        adj = np.asarray(self.matrix)
        return adj[self._index(u), self._index(v)]

    def propose(self, rng: np.random.Generator, space: ConvexSpace, x: np.ndarray) -> np.ndarray:
        """Candidate partners for rejection sampling of related pairs.

        Uniform on the sample box, except for the fibre relation where the
        first coordinate is copied from ``x`` (otherwise edges have
        probability zero).
        """
        if self.kind == "finite-table":
            verts = np.asarray(self.vertices)
            return verts[rng.integers(0, len(verts), size=x.shape[0])]
        y = space.sample(rng, x.shape[0])
        if self.kind == "fixed-first-coordinate-order":
            y[:, 0] = x[:, 0]
        return y

    def sample_vertices(self, rng: np.random.Generator, space: ConvexSpace, count: int) -> np.ndarray:
        if self.kind == "finite-table":
            verts = np.asarray(self.vertices)
            return verts[rng.integers(0, len(verts), size=count)]
        return space.sample(rng, count)


@dataclass(frozen=True)
class Digraph:
    space: ConvexSpace
    relation: EdgeRelation
    transitive_claimed: bool = True

    def __post_init__(self):
        rel = self.relation
        if rel.kind == "fixed-first-coordinate-order" and self.space.dimension != 2:
            raise ConfigError("fixed-first-coordinate-order needs dimension 2")
        if rel.kind == "finite-table":
            if any(len(v) != self.space.dimension for v in rel.vertices):
                raise ConfigError("finite-table vertex dimension differs from the space")
            if not all(self.space.contains(v) for v in rel.vertices):
                raise ConfigError("finite-table vertex outside the space domain")
            if self.transitive_claimed and _transitivity_failures(rel).size:
                raise ConfigError("finite-table claimed transitive but is not")
        if rel.kind == "custom-affine-order" and len(rel.order_matrix[0]) != self.space.dimension:
            raise ConfigError("graph.order_matrix column count differs from the dimension")

    @property
    def is_finite(self) -> bool:
        return self.relation.kind == "finite-table"

    def has_edge(self, p, q) -> bool:
        p = self.space.point(p)
        q = self.space.point(q)
        return bool(self.relation.edges(p, q))

    def edges(self, u, v) -> np.ndarray:
        return self.relation.edges(u, v)

    def in_forward_interval(self, x, y) -> np.ndarray:
        """``y`` in ``[x, ->)``."""
        return self.relation.edges(x, y)

    def in_backward_interval(self, x, y) -> np.ndarray:
        """``y`` in ``(<-, x]``."""
        return self.relation.edges(y, x)


def _transitivity_failures(rel: EdgeRelation) -> np.ndarray:
    adj = np.asarray(rel.matrix, dtype=bool)
    two_step = (adj.astype(np.int64) @ adj.astype(np.int64)) > 0
    # Return (i, k) pairs reachable in two steps but not joined by an edge.
    return np.argwhere(two_step & ~adj)


def sample_edge_pairs(
    g: Digraph, rng: np.random.Generator, count: int, either_direction: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Rejection-sample ``count`` pairs ``(x, y)`` with ``x -> y``.

    With ``either_direction`` a pair related only as ``y -> x`` is kept and
    swapped into orientation.
    """
    space = g.space
    xs, ys = [], []
    found = 0
    drawn = 0
    batch = max(count, 64)
    while found < count:
        if drawn > REJECTION_CAP:
            raise SparseRelationError(
                f"relation too sparse: {found} related pairs after {drawn} draws"
            )
        x = g.relation.sample_vertices(rng, space, batch)
        y = g.relation.propose(rng, space, x)
        fwd = g.edges(x, y)
        if either_direction:
            bwd = g.edges(y, x) & ~fwd
            x, y = np.where(bwd[:, None], y, x), np.where(bwd[:, None], x, y)
            fwd = fwd | bwd
        xs.append(x[fwd])
        ys.append(y[fwd])
        found += int(fwd.sum())
        drawn += batch
    return np.concatenate(xs)[:count], np.concatenate(ys)[:count]


def all_edge_pairs(g: Digraph) -> tuple[np.ndarray, np.ndarray]:
    """Every edge of a finite table, as aligned point arrays."""
    verts = np.asarray(g.relation.vertices)
    i, j = np.nonzero(np.asarray(g.relation.matrix, dtype=bool))
    return verts[i], verts[j]


def check_graph_axioms(g: Digraph, sample_count: int, seed: int) -> ViolationReport:
    """Reflexivity and transitivity: exhaustive on finite tables, sampled otherwise."""
    rel = g.relation
    if g.is_finite:
        verts = np.asarray(rel.vertices)
        adj = np.asarray(rel.matrix, dtype=bool)
        n = len(verts)
        refl = ViolationReport.from_mask(
            "reflexivity", (verts,), ~np.diag(adj), note="missing loop"
        )
        # Exhaustive over all triples (a, b, c) with a->b, b->c, not a->c.
        bad = adj[:, :, None] & adj[None, :, :] & ~adj[:, None, :]
        a, b, c = np.nonzero(bad)
        trans = ViolationReport.from_mask(
            "transitivity",
            (verts[a], verts[b], verts[c]),
            np.ones(a.size, dtype=bool),
            note="a->b, b->c but not a->c",
        )
        trans.samples_tested = n**3
        report = refl.merge(trans)
        report.check = "graph-axioms"
        report.notes.append(f"exhaustive over {n} vertices")
        return report

    rng = np.random.default_rng(seed)
    space = g.space
    p = space.sample(rng, sample_count)
    refl = ViolationReport.from_mask(
        "reflexivity", (p,), ~g.edges(p, p), seed=seed, note="missing loop"
    )
    u, v = sample_edge_pairs(g, rng, sample_count)
    w_all = rel.propose(rng, space, v)
    keep = g.edges(v, w_all)
    u, v, w = u[keep], v[keep], w_all[keep]
    trans = ViolationReport.from_mask(
        "transitivity", (u, v, w), ~g.edges(u, w), seed=seed, note="u->v, v->w but not u->w"
    )
    report = refl.merge(trans)
    report.check = "graph-axioms"
    report.seed = seed
    return report


def check_interval_convexity(g: Digraph, sample_count: int, seed: int) -> ViolationReport:
    """Sample ``combine(y1, y2, beta)`` for y1, y2 in a G-interval of x."""
    if g.is_finite:
        raise PreconditionError("convexity undefined for finite tables")
    rng = np.random.default_rng(seed)
    space = g.space
    x, y1 = sample_edge_pairs(g, rng, sample_count)
    y2 = _partners_for(g, rng, x, forward=True)
    beta = rng.uniform(0.0, 1.0, sample_count)
    z = space.combine(y1, y2, beta)
    fwd = ViolationReport.from_mask(
        "forward-interval-convexity", (x, y1, y2, z), ~g.in_forward_interval(x, z), seed=seed,
    )
    y1b, xb = sample_edge_pairs(g, rng, sample_count)
    y2b = _partners_for(g, rng, xb, forward=False)
    zb = space.combine(y1b, y2b, beta)
    bwd = ViolationReport.from_mask(
        "backward-interval-convexity", (xb, y1b, y2b, zb), ~g.in_backward_interval(xb, zb),
        seed=seed,
    )
    report = fwd.merge(bwd)
    report.check = "interval-convexity"
    return report


def _partners_for(g: Digraph, rng: np.random.Generator, x: np.ndarray, forward: bool) -> np.ndarray:
    """For each row of x draw one point in its forward (or backward) interval."""
    out = np.empty_like(x)
    todo = np.arange(x.shape[0])
    rejections = 0
    while todo.size:
        cand = g.relation.propose(rng, g.space, x[todo])
        ok = g.edges(x[todo], cand) if forward else g.edges(cand, x[todo])
        out[todo[ok]] = cand[ok]
        rejections += int((~ok).sum())
        if rejections > REJECTION_CAP:
            raise SparseRelationError("interval too thin to sample")
        todo = todo[~ok]
    return out


@dataclass
class PropertyStarReport:
    direction: str
    holds: bool
    edge_indices: list[int]
    tail_all: bool
    limit_distance: float


def _sequence_direction(g: Digraph, seq: np.ndarray) -> str:
    if len(seq) < 2:
        return "increasing"
    if bool(np.all(g.edges(seq[:-1], seq[1:]))):
        return "increasing"
    if bool(np.all(g.edges(seq[1:], seq[:-1]))):
        return "decreasing"
    raise PreconditionError("sequence is not G-monotone")


def check_property_star(
    g: Digraph, seq: Sequence, limit, tolerance: float = 1e-6
) -> PropertyStarReport:
    """Check that a G-monotone sequence has edges to its limit.

    This is evidence on one concrete sequence, not a proof for the relation.
    For transitive graphs the edge should hold at every index, which is what
    ``tail_all`` reports.
    """
    seq = np.asarray([g.space.point(p) for p in seq])
    limit = g.space.point(limit)
    direction = _sequence_direction(g, seq)
    dist = g.space.distance(seq[-1], limit)
    if dist > tolerance:
        raise PreconditionError(
            f"sequence does not reach its limit: last distance {dist:.3g} > {tolerance:.3g}"
        )
    lim = np.broadcast_to(limit, seq.shape)
    mask = g.edges(seq, lim) if direction == "increasing" else g.edges(lim, seq)
    idx = np.flatnonzero(mask).tolist()
    return PropertyStarReport(
        direction=direction,
        holds=len(idx) > 0,
        edge_indices=idx,
        tail_all=bool(mask.all()),
        limit_distance=float(dist),
    )


def strip_space() -> ConvexSpace:
    """``{(x, y) : 0 <= x < 1, 0 <= y <= 1}`` with the Euclidean metric."""
    return ConvexSpace.box((0.0, 0.0), (1.0, 1.0), open_sides=((False, True), (False, False)))


def strip_graph() -> Digraph:
    return Digraph(strip_space(), EdgeRelation("fixed-first-coordinate-order"))


@dataclass
class SequenceCertificate:
    terms: int
    g_monotone: bool
    cauchy: bool
    tail_diameters: list[float]
    limit: tuple[float, ...]
    last_distance_to_limit: float
    limit_in_space: bool


@dataclass
class GCompleteDemoReport:
    monotone: SequenceCertificate
    escaping: SequenceCertificate

    @property
    def ok(self) -> bool:
        return (
            self.monotone.g_monotone and self.monotone.cauchy and self.monotone.limit_in_space
            and self.escaping.cauchy and not self.escaping.limit_in_space
        )


def _certify(g: Digraph, seq: np.ndarray, limit: np.ndarray) -> SequenceCertificate:
    space = g.space
    n = len(seq)
    try:
        _sequence_direction(g, seq)
        monotone = True
    except PreconditionError:
        monotone = False
    # Tail diameter from index m on; for 1/k-type sequences it must be <= 1/(m+1).
    dists = space.distance(seq[:, None, :], seq[None, :, :])
    tails = [float(dists[m:, m:].max()) for m in range(n)]
    cauchy = all(t <= 1.0 / (m + 1) + 1e-12 for m, t in enumerate(tails)) and all(
        b <= a for a, b in zip(tails, tails[1:])
    )
    return SequenceCertificate(
        terms=n,
        g_monotone=monotone,
        cauchy=cauchy,
        tail_diameters=tails,
        limit=tuple(float(c) for c in limit),
        last_distance_to_limit=float(space.distance(seq[-1], limit)),
        limit_in_space=bool(space.contains(limit)),
    )


def demo_g_complete_strip(n_terms: int) -> GCompleteDemoReport:
    """The strip is not complete, yet every G-monotone Cauchy sequence converges in it.

    Builds ``(0.5, 1 - 1/k)`` (G-increasing, limit ``(0.5, 1)`` inside) and
    ``(1 - 1/k, 0)`` (Cauchy, limit ``(1, 0)`` outside the open side).
    """
    if n_terms < 2:
        raise PreconditionError("n_terms must be >= 2")
    g = strip_graph()
    k = np.arange(1, n_terms + 1, dtype=float)
    mono = np.stack([np.full_like(k, 0.5), 1.0 - 1.0 / k], axis=-1)
    esc = np.stack([1.0 - 1.0 / k, np.zeros_like(k)], axis=-1)
    return GCompleteDemoReport(
        monotone=_certify(g, mono, np.array([0.5, 1.0])),
        escaping=_certify(g, esc, np.array([1.0, 0.0])),
    )
