"""Decoding paths through the MSE hypercube.

Every path is stored as a polyline of vertices starting at the all-ones
vector (no a-priori information) and ending at the all-zeros vector
(error-free decoding). The curve parameter ``t`` runs over ``[0, 1]`` with
each segment's share proportional to its L1 length, so on a monotone path
``t = sum_k (1 - v_k(t)) / K``.

User indices are zero-based throughout.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "PathKind",
    "DecodingPath",
    "PathReport",
    "InvalidPathError",
    "make_straight_line",
    "make_sic_path",
    "make_waypoint_path",
    "random_monotone_path",
    "validate_path",
    "sample_path",
]

DEFAULT_SAMPLES = 2048


class PathKind(str, enum.Enum):
    STRAIGHT = "straight"
    SIC = "sic"
    WAYPOINTS = "waypoints"


@dataclass(frozen=True, eq=False)
class DecodingPath:
    """Piecewise-linear curve ``v(t)`` in ``[0, 1]^K``.

    Build instances with :func:`make_straight_line`, :func:`make_sic_path`
    or :func:`make_waypoint_path`. Construction does not validate; use
    :func:`validate_path`.
    """

    vertices: np.ndarray
    kind: PathKind = PathKind.WAYPOINTS
    order: tuple[int, ...] | None = None
    samples: int = DEFAULT_SAMPLES
    _knots: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        verts = np.array(self.vertices, dtype=float, ndmin=2)
        if verts.ndim != 2 or verts.shape[0] < 2 or verts.shape[1] < 1:
            raise ValueError("a path needs at least two vertices of dimension >= 1")
        # drop repeated vertices so every segment has positive length
        keep = np.ones(len(verts), dtype=bool)
        keep[1:] = np.any(np.diff(verts, axis=0) != 0, axis=1)
        verts = verts[keep]
        if len(verts) < 2:
            raise ValueError("path has zero length")
        verts.flags.writeable = False
        lengths = np.abs(np.diff(verts, axis=0)).sum(axis=1)
        knots = np.concatenate([[0.0], np.cumsum(lengths)]) / lengths.sum()
        knots[-1] = 1.0
        knots.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "kind", PathKind(self.kind))
        object.__setattr__(self, "_knots", knots)
        if self.order is not None:
            object.__setattr__(self, "order", tuple(int(i) for i in self.order))

    @property
    def num_users(self) -> int:
        return self.vertices.shape[1]

    @property
    def num_segments(self) -> int:
        return len(self.vertices) - 1

    @property
    def knots(self) -> np.ndarray:
        """Curve parameter ``t`` at each vertex."""
        return self._knots

    def __call__(self, t):
        """Evaluate ``v(t)``; ``t`` may be scalar or 1-D."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if np.any((t < 0) | (t > 1)):
            raise ValueError("t must lie in [0, 1]")
        out = np.column_stack(
            [np.interp(t, self._knots, self.vertices[:, k]) for k in range(self.num_users)]
        )
        return out[0] if scalar else out

    def segments(self):
        """Iterate over ``(start, end)`` vertex pairs."""
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            yield a, b

    def permuted(self, perm: Sequence[int]) -> "DecodingPath":
        """Relabel users: new user ``i`` is old user ``perm[i]``."""
        perm = list(perm)
        inv = np.argsort(perm)
        order = None if self.order is None else tuple(int(inv[k]) for k in self.order)
        return DecodingPath(self.vertices[:, perm], self.kind, order, self.samples)

    def to_dict(self) -> dict:
        if self.kind is PathKind.STRAIGHT:
            return {"kind": "straight", "num_users": self.num_users}
        if self.kind is PathKind.SIC:
            return {"kind": "sic", "order": list(self.order)}
        return {"kind": "waypoints", "waypoints": self.vertices.tolist()}

    @classmethod
    def from_dict(cls, data: dict, num_users: int | None = None) -> "DecodingPath":
        """Build a path from its JSON descriptor.

        ``num_users`` is needed for a straight line unless the descriptor
        carries ``"num_users"``.
        """
        if "kind" not in data:
            raise ValueError("path descriptor is missing key 'kind'")
        kind = data["kind"]
        if kind == "straight":
            k = data.get("num_users", num_users)
            if k is None:
                raise ValueError("straight path needs 'num_users'")
            return make_straight_line(int(k))
        if kind == "sic":
            if "order" not in data:
                raise ValueError("sic path descriptor is missing key 'order'")
            return make_sic_path(data["order"])
        if kind == "waypoints":
            if "waypoints" not in data:
                raise ValueError("waypoints path descriptor is missing key 'waypoints'")
            return make_waypoint_path(data["waypoints"])
        raise ValueError(f"unknown path kind {kind!r}")


class InvalidPathError(ValueError):
    """Raised by consumers that require a valid path."""

    def __init__(self, report: "PathReport"):
        super().__init__(str(report))
        self.report = report


def make_straight_line(num_users: int) -> DecodingPath:
    """``v(t) = (1 - t) * 1``."""
    if num_users < 1:
        raise ValueError("num_users must be >= 1")
    verts = np.stack([np.ones(num_users), np.zeros(num_users)])
    return DecodingPath(verts, PathKind.STRAIGHT)


def make_sic_path(order: Sequence[int]) -> DecodingPath:
    """Axis-aligned path decoding users one after another.

    Segment ``m`` drives ``v[order[m]]`` from 1 to 0 with every other
    component frozen, i.e. ``order[0]`` is decoded first, under full
    interference.
    """
    order = [int(i) for i in order]
    k = len(order)
    if k < 1 or sorted(order) != list(range(k)):
        raise ValueError(f"order must be a permutation of 0..{k - 1}, got {order}")
    verts = [np.ones(k)]
    for user in order:
        nxt = verts[-1].copy()
        nxt[user] = 0.0
        verts.append(nxt)
    return DecodingPath(np.array(verts), PathKind.SIC, tuple(order))


def make_waypoint_path(waypoints) -> DecodingPath:
    """Polyline through ``waypoints``.

    The all-ones start and all-zeros end are added when missing.
    """
    pts = np.array(waypoints, dtype=float, ndmin=2)
    if pts.size == 0:
        raise ValueError("at least one waypoint is required")
    k = pts.shape[1]
    if not np.array_equal(pts[0], np.ones(k)):
        pts = np.vstack([np.ones(k), pts])
    if not np.array_equal(pts[-1], np.zeros(k)):
        pts = np.vstack([pts, np.zeros(k)])
    return DecodingPath(pts, PathKind.WAYPOINTS)


def random_monotone_path(num_users: int, num_waypoints: int, rng) -> DecodingPath:
    """Random valid path with ``num_waypoints`` interior vertices.

    Each coordinate takes independently sorted uniform levels, so every
    component is non-increasing along the path.
    """
    rng = np.random.default_rng(rng)
    levels = -np.sort(-rng.uniform(size=(num_waypoints, num_users)), axis=0)
    corners = np.vstack([np.ones(num_users), levels, np.zeros(num_users)])
    return DecodingPath(corners, PathKind.WAYPOINTS)


@dataclass
class PathReport:
    """Outcome of :func:`validate_path`.

    ``violation`` is ``None`` for a valid path, otherwise one of
    ``"start"``, ``"end"``, ``"range"`` or ``"monotonicity"`` with the first
    offending curve parameter ``t`` and user index.
    """

    ok: bool
    violation: str | None = None
    t: float | None = None
    user: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "path ok"
        return f"{self.violation} violation at t={self.t:.6g}, user {self.user}: {self.detail}"

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violation": self.violation,
            "t": self.t,
            "user": self.user,
            "detail": self.detail,
        }


def validate_path(p: DecodingPath, samples: int | None = None) -> PathReport:
    """Check endpoints, hypercube containment and componentwise monotonicity.

    A polyline is inside the hypercube and monotone iff its vertices are, so
    the checks run exactly on the vertices and report the first offending
    vertex. ``samples`` is accepted for call-site symmetry with the sampling
    helpers and has no effect.
    """
    k = p.num_users
    verts = p.vertices
    knots = p.knots
    if not np.array_equal(verts[0], np.ones(k)):
        user = int(np.flatnonzero(verts[0] != 1)[0])
        return PathReport(False, "start", 0.0, user, f"v(0)={verts[0].tolist()} is not all ones")
    if not np.array_equal(verts[-1], np.zeros(k)):
        user = int(np.flatnonzero(verts[-1] != 0)[0])
        return PathReport(False, "end", 1.0, user, f"v(1)={verts[-1].tolist()} is not all zeros")
    out = (verts < 0) | (verts > 1)
    if out.any():
        i, user = np.argwhere(out)[0]
        return PathReport(
            False, "range", float(knots[i]), int(user),
            f"v={verts[i, user]:.6g} outside [0, 1]",
        )
    rising = np.diff(verts, axis=0) > 0
    if rising.any():
        i, user = np.argwhere(rising)[0]
        return PathReport(
            False, "monotonicity", float(knots[i + 1]), int(user),
            f"v increases from {verts[i, user]:.6g} to {verts[i + 1, user]:.6g}",
        )
    return PathReport(True)


def sample_path(p: DecodingPath, n: int | None = None) -> list[tuple[float, np.ndarray]]:
    """``n`` ordered samples ``(t, v(t))`` including every vertex.

    Segments receive sample intervals in proportion to their parameter
    length, with at least one interval each.
    """
    n = p.samples if n is None else int(n)
    if n < 2:
        raise ValueError("n must be at least 2")
    t = _sample_grid(p.knots, n)
    values = p(t)
    return [(float(ti), vi) for ti, vi in zip(t, values)]


def _sample_grid(knots: np.ndarray, n: int) -> np.ndarray:
    n_seg = len(knots) - 1
    intervals = n - 1
    if intervals < n_seg:
        raise ValueError(f"n={n} is too small to include all {n_seg + 1} vertices")
    share = np.diff(knots) * intervals
    counts = np.maximum(np.floor(share).astype(int), 1)
    # largest-remainder top-up / trim to hit the exact total
    while counts.sum() < intervals:
        counts[np.argmax(share - counts)] += 1
    while counts.sum() > intervals:
        candidates = np.where(counts > 1, counts - share, -np.inf)
        counts[np.argmax(candidates)] -= 1
    pieces = [np.linspace(a, b, c + 1)[:-1] for a, b, c in zip(knots[:-1], knots[1:], counts)]
    return np.concatenate(pieces + [[1.0]])
