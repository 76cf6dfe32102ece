"""Self-maps ``T: C -> C`` of a convex space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PreconditionError
from .space import ConvexSpace

MAP_KINDS = ("affine", "shift", "halving-to-anchor", "named-builtin")

_NAMED = {
    "identity": lambda x: x.copy(),
    "swap": lambda x: x[..., ::-1].copy(),
}

SELF_MAP_SAMPLES = 1000


@dataclass(frozen=True)
class MappingHandle:
    """An evaluatable map with one of the declared kinds.

    ``affine``: ``A x + v``; ``shift``: ``x + v``; ``halving-to-anchor``:
    ``anchor + (x - anchor)/2``; ``named-builtin``: one of ``identity``,
    ``swap``. Construction samples the domain and rejects maps that leave it.
    """

    kind: str
    domain: ConvexSpace
    matrix: tuple[tuple[float, ...], ...] = ()
    vector: tuple[float, ...] = ()
    anchor: tuple[float, ...] = ()
    name: str = ""

    def __post_init__(self):
        n = self.domain.dimension
        if self.kind not in MAP_KINDS:
            raise ConfigError(f"unknown map.kind {self.kind!r}; expected one of {MAP_KINDS}")
        if self.kind == "affine":
            mat = tuple(tuple(float(e) for e in row) for row in self.matrix)
            if len(mat) != n or any(len(row) != n for row in mat):
                raise ConfigError(f"map.matrix must be {n}x{n}")
            object.__setattr__(self, "matrix", mat)
        if self.kind in ("affine", "shift"):
            vec = tuple(float(e) for e in self.vector) if self.vector else (0.0,) * n
            if len(vec) != n:
                raise ConfigError(f"map.vector must have {n} entries")
            object.__setattr__(self, "vector", vec)
        if self.kind == "halving-to-anchor":
            anc = tuple(float(e) for e in self.anchor)
            if len(anc) != n:
                raise ConfigError(f"map.anchor must have {n} entries")
            object.__setattr__(self, "anchor", anc)
        if self.kind == "named-builtin":
            if self.name not in _NAMED:
                raise ConfigError(f"unknown named map {self.name!r}; expected one of {sorted(_NAMED)}")
            if self.name == "swap" and n != 2:
                raise ConfigError("swap needs dimension 2")
        self._check_self_map()

    def _check_self_map(self):
        rng = np.random.default_rng(0)
        pts = self.domain.sample(rng, SELF_MAP_SAMPLES)
        if self.domain.bounded:
            pts = np.concatenate([self.domain.corners(), pts])
            pts = pts[self.domain.contains(pts)]
        images = self(pts)
        escaped = ~self.domain.contains(images)
        if escaped.any():
            i = int(np.flatnonzero(escaped)[0])
            raise ConfigError(
                f"map leaves its domain: T({pts[i].tolist()}) = {images[i].tolist()}"
            )

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "affine":
            return x @ np.asarray(self.matrix).T + np.asarray(self.vector)
        if self.kind == "shift":
            return x + np.asarray(self.vector)
        if self.kind == "halving-to-anchor":
            anchor = np.asarray(self.anchor)
            return anchor + (x - anchor) / 2
        return _NAMED[self.name](x)

    def orbit(self, x, steps: int) -> np.ndarray:
        """``x, T(x), ..., T^steps(x)`` stacked on a new leading axis."""
        x = np.asarray(x, dtype=float)
        out = np.empty((steps + 1,) + x.shape)
        out[0] = x
        for k in range(steps):
            out[k + 1] = self(out[k])
        if not np.all(self.domain.contains(out)):
            raise PreconditionError("orbit escapes the domain")
        return out

    @property
    def order_preserving_affine(self) -> bool:
        """True for affine maps with an entrywise nonnegative matrix."""
        if self.kind == "affine":
            return all(e >= 0 for row in self.matrix for e in row)
        return self.kind in ("shift", "halving-to-anchor") or self.name == "identity"
