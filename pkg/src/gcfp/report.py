"""Violation reports and deterministic JSON output.

Every sampled check in the package returns a :class:`ViolationReport`.
Reports are mergeable (violation lists concatenate, worst margins take the
max) so a check split over several batches gives the same report as one run.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

MAX_WITNESSES = 50


def relative_slack(scale, rel: float = 1e-12):
    """Slack ``rel * (1 + |scale|)`` used for every inequality check."""
    return rel * (1.0 + np.abs(scale))


@dataclass
class Violation:
    points: tuple[tuple[float, ...], ...]
    lhs: float | None = None
    rhs: float | None = None
    margin: float | None = None
    note: str = ""


@dataclass
class ViolationReport:
    """Outcome of a sampled (or exhaustive) check.

    ``margin`` is ``lhs - rhs``; a sample is a violation when its margin
    exceeds the per-sample slack. ``violations`` keeps at most
    ``MAX_WITNESSES`` witnesses while ``violation_count`` counts all of them.
    Predicate checks (no inequality) leave ``worst_margin`` as ``None``.
    """

    check: str
    samples_tested: int
    violations: list[Violation] = field(default_factory=list)
    violation_count: int = 0
    worst_margin: float | None = None
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def merge(self, other: "ViolationReport") -> "ViolationReport":
        margins = [m for m in (self.worst_margin, other.worst_margin) if m is not None]
        return ViolationReport(
            check=self.check,
            samples_tested=self.samples_tested + other.samples_tested,
            violations=(self.violations + other.violations)[:MAX_WITNESSES],
            violation_count=self.violation_count + other.violation_count,
            worst_margin=max(margins) if margins else None,
            seed=self.seed,
            notes=self.notes + [n for n in other.notes if n not in self.notes],
        )

    @classmethod
    def from_margins(
        cls,
        check: str,
        points: Sequence[np.ndarray],
        lhs: np.ndarray,
        rhs: np.ndarray,
        slack: np.ndarray | float,
        seed: int | None = None,
    ) -> "ViolationReport":
        """Build a report from vectorised ``lhs``/``rhs`` arrays.

        ``points`` holds one ``(N, n)`` array per role (x, y, ...), aligned
        with ``lhs``.
        """
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        margin = lhs - rhs
        bad = np.flatnonzero(margin > slack)
        witnesses = [
            Violation(
                points=tuple(tuple(float(c) for c in np.atleast_1d(arr[i])) for arr in points),
                lhs=float(lhs[i]),
                rhs=float(rhs[i]),
                margin=float(margin[i]),
            )
            for i in bad[:MAX_WITNESSES]
        ]
        return cls(
            check=check,
            samples_tested=int(lhs.size),
            violations=witnesses,
            violation_count=int(bad.size),
            worst_margin=float(margin.max()) if margin.size else None,
            seed=seed,
        )

    @classmethod
    def from_mask(
        cls,
        check: str,
        points: Sequence[np.ndarray],
        failed: np.ndarray,
        seed: int | None = None,
        note: str = "",
    ) -> "ViolationReport":
        """Build a report for a boolean predicate check."""
        failed = np.asarray(failed, dtype=bool)
        bad = np.flatnonzero(failed)
        witnesses = [
            Violation(
                points=tuple(tuple(float(c) for c in np.atleast_1d(arr[i])) for arr in points),
                note=note,
            )
            for i in bad[:MAX_WITNESSES]
        ]
        return cls(
            check=check,
            samples_tested=int(failed.size),
            violations=witnesses,
            violation_count=int(bad.size),
            seed=seed,
        )

    def to_dict(self) -> dict[str, Any]:
        out = to_jsonable(self)
        out["ok"] = self.ok
        return out


def to_jsonable(obj: Any) -> Any:
    """Convert dataclasses, numpy values and tuples into plain JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        # JSON has no infinities; these only appear as "unbounded" markers.
        return "null"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".eEn"):
        text += ".0"
    return text


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialise to JSON with every real written at 17 significant digits.

    Key order is insertion order, so equal inputs give byte-identical output.
    """
    return _encode(to_jsonable(obj), indent, 0)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_line(obj: Any) -> str:
    """Single-line variant used for JSON-lines trace streams."""
    return _encode_compact(to_jsonable(obj))


def _encode_compact(obj: Any) -> str:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode_compact(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_encode_compact(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
