"""Normed boxes in R^n with linear geodesics.

A :class:`ConvexSpace` is an axis-aligned box (sides may be open, closed or
unbounded) carrying one of three norms. The combination point
``combine(p, q, beta)`` is ``beta*p + (1-beta)*q``: ``beta`` weights the
FIRST argument, so ``d(p, z) = (1-beta) d(p, q)`` and ``d(z, q) = beta d(p, q)``.

All methods accept single points (shape ``(n,)``) or stacks of points
(shape ``(N, n)``); distances are taken along the last axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DimensionError, PreconditionError
from .report import ViolationReport, relative_slack

METRICS = ("euclidean", "max-norm", "weighted-euclidean")


def _floats(values, n: int, fill: float, name: str) -> tuple[float, ...]:
    if values is None or len(values) == 0:
        return (fill,) * n
    if len(values) != n:
        raise ConfigError(f"{name}: expected {n} entries, got {len(values)}")
    return tuple(fill if v is None else float(v) for v in values)


@dataclass(frozen=True)
class ConvexSpace:
    dimension: int
    metric: str = "euclidean"
    lower: tuple[float, ...] = ()
    upper: tuple[float, ...] = ()
    open_sides: tuple[tuple[bool, bool], ...] = ()
    weights: tuple[float, ...] = ()
    sample_lower: tuple[float, ...] = ()
    sample_upper: tuple[float, ...] = ()

    def __post_init__(self):
        n = self.dimension
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ConfigError(f"dimension must be a positive integer, got {n!r}")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        lower = _floats(self.lower, n, -math.inf, "box.lower")
        upper = _floats(self.upper, n, math.inf, "box.upper")
        if self.open_sides:
            if len(self.open_sides) != n:
                raise ConfigError(f"box.open_sides: expected {n} pairs")
            sides = tuple((bool(lo), bool(hi)) for lo, hi in self.open_sides)
        else:
            sides = ((False, False),) * n
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            if math.isnan(lo) or math.isnan(hi):
                raise ConfigError(f"box bound {i} is NaN")
            if lo > hi or (lo == hi and any(sides[i])):
                raise ConfigError(f"empty domain along coordinate {i}: [{lo}, {hi}]")
        weights: tuple[float, ...] = ()
        if self.metric == "weighted-euclidean":
            weights = _floats(self.weights, n, 1.0, "weights")
            if not all(w > 0 and math.isfinite(w) for w in weights):
                raise ConfigError("weighted-euclidean weights must be strictly positive")
        elif self.weights:
            raise ConfigError(f"weights given for metric {self.metric!r}")
        s_lo = _floats(self.sample_lower, n, math.nan, "box.sample_lower")
        s_hi = _floats(self.sample_upper, n, math.nan, "box.sample_upper")
        s_lo = tuple(lo if math.isnan(s) else s for s, lo in zip(s_lo, lower))
        s_hi = tuple(hi if math.isnan(s) else s for s, hi in zip(s_hi, upper))
        for i in range(n):
            if not (math.isfinite(s_lo[i]) and math.isfinite(s_hi[i])):
                raise ConfigError(
                    f"coordinate {i} is unbounded; give box.sample_lower/sample_upper"
                )
            if s_lo[i] < lower[i] or s_hi[i] > upper[i] or s_lo[i] > s_hi[i]:
                raise ConfigError(f"sample box leaves the domain along coordinate {i}")
        object.__setattr__(self, "dimension", int(n))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "open_sides", sides)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "sample_lower", s_lo)
        object.__setattr__(self, "sample_upper", s_hi)

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence, metric: str = "euclidean", **kw) -> "ConvexSpace":
        return cls(dimension=len(lower), metric=metric, lower=tuple(lower), upper=tuple(upper), **kw)

    @property
    def bounded(self) -> bool:
        return all(map(math.isfinite, self.lower + self.upper))

    def point(self, p) -> np.ndarray:
        """Validate and convert a single point."""
        arr = np.asarray(p, dtype=float).reshape(-1) if np.ndim(p) <= 1 else None
        if arr is None:
            raise DimensionError(f"expected a single point, got shape {np.shape(p)}")
        if arr.shape[0] != self.dimension:
            raise DimensionError(f"point has dimension {arr.shape[0]}, space has {self.dimension}")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError(f"non-finite coordinates in {arr.tolist()}")
        return arr

    def _check_pair(self, p, q) -> tuple[np.ndarray, np.ndarray]:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        for arr in (p, q):
            if arr.ndim == 0 or arr.shape[-1] != self.dimension:
                raise DimensionError(
                    f"point shape {arr.shape} does not match dimension {self.dimension}"
                )
            if not np.all(np.isfinite(arr)):
                raise PreconditionError("non-finite coordinates")
        return p, q

    def distance(self, p, q):
        p, q = self._check_pair(p, q)
        diff = p - q
        if self.metric == "euclidean":
            out = np.linalg.norm(diff, axis=-1)
        elif self.metric == "max-norm":
            out = np.max(np.abs(diff), axis=-1)
        else:
            out = np.sqrt(np.sum(np.asarray(self.weights) * diff * diff, axis=-1))
        return float(out) if np.ndim(out) == 0 else out

    def combine(self, p, q, beta):
        """The point ``beta*p (+) (1-beta)*q`` on the segment from p to q."""
        p, q = self._check_pair(p, q)
        beta_arr = np.asarray(beta, dtype=float)
        if np.any(~np.isfinite(beta_arr)) or np.any(beta_arr < 0) or np.any(beta_arr > 1):
            raise PreconditionError(f"beta must lie in [0, 1], got {beta}")
        b = beta_arr[..., None] if beta_arr.ndim else beta_arr
        z = q + b * (p - q)
        # Rounding must not push z off the segment (order relations rely on it).
        z = np.clip(z, np.minimum(p, q), np.maximum(p, q))
        z = np.where(b == 1.0, p, z)
        z = np.where(b == 0.0, q, z)
        return z

    def contains(self, p):
        """Membership in the box, strict on open sides."""
        p = np.asarray(p, dtype=float)
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        open_lo = np.asarray([s[0] for s in self.open_sides])
        open_hi = np.asarray([s[1] for s in self.open_sides])
        above = np.where(open_lo, p > lo, p >= lo)
        below = np.where(open_hi, p < hi, p <= hi)
        inside = np.all(above & below & np.isfinite(p), axis=-1)
        return bool(inside) if np.ndim(inside) == 0 else inside

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniform points in the sample box, shape ``(count, n)``."""
        lo = np.asarray(self.sample_lower)
        hi = np.asarray(self.sample_upper)
        # Open sides: nudge the closed end of the uniform draw inward.
        open_lo = np.asarray([s[0] for s in self.open_sides])
        lo = np.where(open_lo & (lo == np.asarray(self.lower)), np.nextafter(lo, hi), lo)
        pts = rng.uniform(lo, hi, size=(count, self.dimension))
        top_open = np.asarray([s[1] for s in self.open_sides]) & (hi == np.asarray(self.upper))
        return np.where(top_open & (pts >= hi), np.nextafter(hi, lo), pts)

    def corners(self) -> np.ndarray:
        """Vertices of the closed sample box."""
        grids = np.meshgrid(*zip(self.sample_lower, self.sample_upper), indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=-1)


def check_segment_identities(space: ConvexSpace, sample_count: int, seed: int) -> ViolationReport:
    """Sample ``(p, q, beta)`` and check both segment-splitting identities."""
    rng = np.random.default_rng(seed)
    p = space.sample(rng, sample_count)
    q = space.sample(rng, sample_count)
    beta = rng.uniform(0.0, 1.0, sample_count)
    z = space.combine(p, q, beta)
    dpq = space.distance(p, q)
    err_first = np.abs(space.distance(p, z) - (1 - beta) * dpq)
    err_second = np.abs(space.distance(z, q) - beta * dpq)
    err = np.maximum(err_first, err_second)
    return ViolationReport.from_margins(
        "segment-identities", (p, q), err, np.zeros_like(err), relative_slack(dpq), seed
    )


def check_takahashi(space: ConvexSpace, sample_count: int, seed: int) -> ViolationReport:
    """Sample ``d(beta x (+) (1-beta) y, z) <= beta d(x,z) + (1-beta) d(y,z)``."""
    if sample_count < 1:
        raise PreconditionError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    x = space.sample(rng, sample_count)
    y = space.sample(rng, sample_count)
    z = space.sample(rng, sample_count)
    beta = rng.uniform(0.0, 1.0, sample_count)
    lhs = space.distance(space.combine(x, y, beta), z)
    rhs = beta * space.distance(x, z) + (1 - beta) * space.distance(y, z)
    return ViolationReport.from_margins(
        "takahashi", (x, y, z), lhs, rhs, relative_slack(rhs), seed
    )
