"""Geometry on the real projective line.

Directions are angles modulo pi; the distance between two directions is the
sine of the angle between the lines. Hyperbolic SL(2,R) matrices (|trace| >
2) act as Moebius maps with one attracting (sink) and one repelling
(source) fixed direction. A family of such matrices whose sinks share one
connected component of the complement of the sources admits an invariant
cone, an open arc mapped strictly inside itself by every member.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ProjectivePoint",
    "Arc",
    "FixedPoints",
    "SourceSinkResult",
    "proj_distance",
    "moebius_apply",
    "is_hyperbolic",
    "fixed_points",
    "source_sink_condition",
    "invariant_cone",
]

PI = math.pi


class NotHyperbolicError(ValueError):
    """Matrix (or family member) is not hyperbolic."""


@dataclass(frozen=True)
class ProjectivePoint:
    """A direction on the projective line, stored as an angle in [0, pi)."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % PI)

    @classmethod
    def from_vector(cls, v) -> "ProjectivePoint":
        v = np.asarray(v, dtype=np.float64)
        if not np.any(v):
            raise ValueError("zero vector has no direction")
        return cls(math.atan2(v[1], v[0]))

    def vector(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])


@dataclass(frozen=True)
class Arc:
    """Open arc (start, start + width) on the circle of circumference pi."""

    start: float
    width: float

    def __post_init__(self):
        if not 0.0 < self.width < PI:
            raise ValueError("arc width must lie strictly between 0 and pi")
        object.__setattr__(self, "start", float(self.start) % PI)
        object.__setattr__(self, "width", float(self.width))

    def position(self, p: ProjectivePoint) -> float:
        """Arc-length coordinate of ``p`` measured from ``start`` in [0, pi)."""
        return (p.angle - self.start) % PI

    def contains(self, p: ProjectivePoint, margin: float = 0.0) -> bool:
        pos = self.position(p)
        return margin < pos < self.width - margin

    @property
    def midpoint(self) -> ProjectivePoint:
        return ProjectivePoint(self.start + 0.5 * self.width)

    @property
    def end(self) -> float:
        return (self.start + self.width) % PI


@dataclass(frozen=True)
class FixedPoints:
    """Source/sink directions of a hyperbolic matrix with their multipliers."""

    source: ProjectivePoint
    sink: ProjectivePoint
    multipliers: tuple[float, float]  # (contracting, expanding)


def proj_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Sine of the angle between the two lines; a metric with values in [0, 1]."""
    return abs(math.sin(p.angle - q.angle))


def moebius_apply(m: np.ndarray, p: ProjectivePoint) -> ProjectivePoint:
    m = np.asarray(m, dtype=np.float64)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0.0 or not np.isfinite(det):
        raise ValueError("Moebius action requires an invertible matrix")
    return ProjectivePoint.from_vector(m @ p.vector())


def _check_unimodular(m: np.ndarray) -> float:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det - 1.0) > 1e-10:
        raise ValueError(f"matrix must be unimodular, det={det!r}")
    return float(np.trace(m))


def is_hyperbolic(m: np.ndarray) -> bool:
    """True iff the unimodular matrix has |trace| > 2."""
    return abs(_check_unimodular(np.asarray(m, dtype=np.float64))) > 2.0


def fixed_points(m: np.ndarray) -> FixedPoints:
    """Eigen-directions of a hyperbolic matrix, split into source and sink."""
    m = np.asarray(m, dtype=np.float64)
    tr = _check_unimodular(m)
    if abs(tr) <= 2.0:
        raise NotHyperbolicError(f"|trace| = {abs(tr)!r} <= 2, no source/sink pair")
    if abs(tr) <= 2.0 + 1e-12:
        raise NotHyperbolicError(
            f"|trace| = {abs(tr)!r} too close to 2: fixed points ill-conditioned"
        )
    disc = math.sqrt(tr * tr - 4.0)
    xi_big = 0.5 * (tr + math.copysign(disc, tr))  # larger |eigenvalue|
    xi_small = 1.0 / xi_big  # det = 1
    sink = _eigendirection(m, xi_big)
    source = _eigendirection(m, xi_small)
    return FixedPoints(source=source, sink=sink, multipliers=(xi_small, xi_big))


def _eigendirection(m: np.ndarray, xi: float) -> ProjectivePoint:
    # kernel of (m - xi): pick the larger of the two candidate row solutions
    a, b = m[0, 0] - xi, m[0, 1]
    c, d = m[1, 0], m[1, 1] - xi
    v1 = np.array([-b, a])
    v2 = np.array([-d, c])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    return ProjectivePoint.from_vector(v)


@dataclass(frozen=True)
class SourceSinkResult:
    holds: bool
    sink_component: Arc | None
    fixed: tuple[FixedPoints, ...]


def source_sink_condition(family: Sequence[np.ndarray]) -> SourceSinkResult:
    """Check that all sinks share one component of the complement of the sources.

    The sources split the circle into gaps; the condition holds iff every
    sink falls inside a single gap, returned as ``sink_component``.
    """
    fixed = []
    for k, m in enumerate(family):
        try:
            fixed.append(fixed_points(m))
        except (NotHyperbolicError, ValueError) as exc:
            raise NotHyperbolicError(f"family member {k} is not hyperbolic: {exc}") from exc
    fixed = tuple(fixed)
    sources = sorted(fp.source.angle for fp in fixed)
    sinks = [fp.sink for fp in fixed]

    gaps: list[Arc] = []
    for i, s in enumerate(sources):
        nxt = sources[(i + 1) % len(sources)]
        width = (nxt - s) % PI
        if width > 0.0:
            gaps.append(Arc(s, width))
    if not gaps:
        # all sources coincide: complement of one point, one component
        s = sources[0]
        gaps = [Arc(s, PI - 1e-15)]
    for gap in gaps:
        if all(gap.contains(p) for p in sinks):
            return SourceSinkResult(True, gap, fixed)
    return SourceSinkResult(False, None, fixed)


def _maps_strictly_inside(m: np.ndarray, arc: Arc, margin: float) -> bool:
    # det = 1 matrices preserve orientation, so the image of the arc is the
    # positively-oriented arc between the images of its endpoints; it stays
    # inside iff both images are interior (with margin) in the right order.
    pos_s = arc.position(moebius_apply(m, ProjectivePoint(arc.start)))
    pos_e = arc.position(moebius_apply(m, ProjectivePoint(arc.end)))
    pos_m = arc.position(moebius_apply(m, arc.midpoint))
    return (
        margin < pos_s < arc.width - margin
        and margin < pos_e < arc.width - margin
        and pos_s <= pos_m <= pos_e
    )


def invariant_cone(family: Sequence[np.ndarray], margin: float = 1e-9) -> Arc | None:
    """Search for an open arc mapped strictly inside itself by every member.

    Starts from the minimal arc spanning all sinks padded by 10% of the
    slack toward the nearest source; verified by mapping arc endpoints and
    midpoint. On failure other padding fractions of the slack are tried.
    Returns None (reported, not fatal) if no candidate verifies.
    """
    result = source_sink_condition(family)
    if not result.holds:
        raise NotHyperbolicError("source-sink condition fails; no cone search possible")
    gap = result.sink_component
    assert gap is not None
    positions = sorted(gap.position(fp.sink) for fp in result.fixed)
    hull_lo, hull_hi = positions[0], positions[-1]
    # slack before the candidate closure would hit the bounding sources
    slack = min(hull_lo, gap.width - hull_hi)
    if slack <= 0.0:
        return None

    def candidate(pad: float) -> Arc | None:
        width = (hull_hi - hull_lo) + 2.0 * pad
        if not 0.0 < width < PI:
            return None
        return Arc(gap.start + (hull_lo - pad), width)

    for frac in (0.1, 0.05, 0.2, 0.3, 0.5, 0.7, 0.9, 0.02, 0.01, 0.5e-2, 1e-3):
        arc = candidate(frac * slack)
        if arc is not None and all(
            _maps_strictly_inside(m, arc, margin) for m in family
        ):
            return arc
    return None
