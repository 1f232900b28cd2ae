"""Capacity-region polytope of the scalar Gaussian MAC and path synthesis.

The region is cut out by one constraint per non-empty user subset ``S``:

    sum_{k in S} R_k <= log(1 + sum_{k in S} g_k / sigma^2).

Points on the maximal sum-rate face are reached by matched decoding paths.
:func:`synthesize_path_for_tuple` builds one as a nested staircase: users are
peeled off in some order, each user ``m`` first descends alone to a depth
``d_m``, the inner users are handled recursively, and finally user ``m``
descends from ``d_m`` to zero. Since the integrand is a gradient, user
``m``'s rate only depends on ``d_m`` through the capacity left to the inner
users, which gives ``d_m`` in closed form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channel import MacChannel
from .path import DecodingPath, PathKind
from .rates import RateTuple, sum_rate_closed_form
from .transfer import format_float

__all__ = [
    "RegionConstraint",
    "FeasibilityReport",
    "InfeasibleTargetError",
    "OffFaceError",
    "enumerate_constraints",
    "is_feasible",
    "synthesize_path_for_tuple",
    "region_report",
]

MAX_ENUMERATION_USERS = 20
MAX_SYNTHESIS_USERS = 10


@dataclass(frozen=True)
class RegionConstraint:
    """``sum_{k in subset} R_k <= bound`` (nats, zero-based user indices)."""

    subset: tuple[int, ...]
    bound: float

    def to_dict(self, units: str = "nats") -> dict:
        b = self.bound if units == "nats" else self.bound / np.log(2.0)
        return {"subset": list(self.subset), "bound": float(format_float(b))}


def enumerate_constraints(ch: MacChannel) -> list[RegionConstraint]:
    """All ``2^K - 1`` subset constraints, by subset size then lexicographically."""
    k = ch.num_users
    if k > MAX_ENUMERATION_USERS:
        raise ValueError(f"refusing to enumerate 2^{k} subsets (limit K <= {MAX_ENUMERATION_USERS})")
    g, s2 = ch.gains, ch.noise_var
    out = []
    for size in range(1, k + 1):
        for subset in itertools.combinations(range(k), size):
            out.append(RegionConstraint(subset, float(np.log1p(g[list(subset)].sum() / s2))))
    return out


@dataclass
class FeasibilityReport:
    feasible: bool
    violated: list[RegionConstraint] = field(default_factory=list)
    tight: list[RegionConstraint] = field(default_factory=list)

    @property
    def binding(self) -> list[RegionConstraint]:
        return self.violated + self.tight

    def __bool__(self) -> bool:
        return self.feasible


def _rates_in_nats(r) -> np.ndarray:
    if isinstance(r, RateTuple):
        return r.to("nats").per_user
    return np.asarray(r, dtype=float)


def is_feasible(ch: MacChannel, r, slack: float = 1e-9) -> FeasibilityReport:
    """Check a rate tuple (``RateTuple`` or nats array) against every constraint.

    A constraint is *violated* when exceeded by more than ``slack`` and
    *tight* when met within ``slack``.
    """
    rates = _rates_in_nats(r)
    if rates.shape != (ch.num_users,):
        raise ValueError(f"expected {ch.num_users} rates, got shape {rates.shape}")
    if np.any(rates < 0):
        raise ValueError("rates must be nonnegative")
    violated, tight = [], []
    for c in enumerate_constraints(ch):
        excess = rates[list(c.subset)].sum() - c.bound
        if excess > slack:
            violated.append(c)
        elif excess >= -slack:
            tight.append(c)
    return FeasibilityReport(not violated, violated, tight)


class InfeasibleTargetError(ValueError):
    def __init__(self, violated: list[RegionConstraint]):
        names = ", ".join(str(list(c.subset)) for c in violated)
        super().__init__(f"target rate tuple violates constraints on subsets {names}")
        self.violated = violated


class OffFaceError(ValueError):
    """Target is feasible but below the maximal sum-rate face."""


def _peel_depths(g, s2, rates, order, tol):
    """Depths ``d_m`` for the nested staircase in ``order``, or None."""
    noise = s2
    depths = {}
    for pos, m in enumerate(order[:-1]):
        inner_gain = g[list(order[pos + 1:])].sum()
        stage_capacity = np.log1p((g[m] + inner_gain) / noise)
        inner_capacity = stage_capacity - rates[m]
        if g[m] == 0:
            if abs(rates[m]) > tol:
                return None
            depths[m] = 1.0
            continue
        if inner_gain == 0:
            d = 0.0 if abs(inner_capacity) <= tol else np.nan
        elif inner_capacity <= 0:
            d = np.inf
        else:
            d = (inner_gain / np.expm1(inner_capacity) - noise) / g[m]
        if not -1e-12 <= d <= 1 + 1e-12:
            return None
        d = min(max(d, 0.0), 1.0)
        depths[m] = d
        noise += g[m] * d
    last = order[-1]
    if abs(np.log1p(g[last] / noise) - rates[last]) > tol:
        return None
    return depths


def _nested_path(k, order, depths) -> DecodingPath:
    v = np.ones(k)
    verts = [v.copy()]
    for m in order[:-1]:
        v[m] = depths[m]
        verts.append(v.copy())
    v[order[-1]] = 0.0
    verts.append(v.copy())
    for m in reversed(order[:-1]):
        v[m] = 0.0
        verts.append(v.copy())
    is_sic = all(d in (0.0, 1.0) for d in depths.values())
    path = DecodingPath(np.array(verts), PathKind.WAYPOINTS)
    if is_sic and path.num_segments == k:
        sic_order = tuple(int(np.flatnonzero(b != a)[0]) for a, b in path.segments())
        return DecodingPath(path.vertices, PathKind.SIC, sic_order)
    return path


def _preferred_orders(g: np.ndarray):
    # descending gain, ties by index, first; then every other permutation
    first = tuple(sorted(range(len(g)), key=lambda i: (-g[i], i)))
    yield first
    for perm in itertools.permutations(first):
        if perm != first:
            yield perm


def synthesize_path_for_tuple(ch: MacChannel, target, tol: float = 1e-6) -> DecodingPath:
    """Valid decoding path whose Gaussian rates equal ``target``.

    ``target`` must lie on the maximal sum-rate face (within ``tol``).

    Raises
    ------
    InfeasibleTargetError
        Some subset constraint is violated by more than ``tol``.
    OffFaceError
        The target sum is below the sum capacity by more than ``tol``.
    """
    rates = _rates_in_nats(target)
    k = ch.num_users
    if k > MAX_SYNTHESIS_USERS:
        raise ValueError(f"path synthesis supports at most {MAX_SYNTHESIS_USERS} users")
    report = is_feasible(ch, rates, slack=tol)
    if not report.feasible:
        raise InfeasibleTargetError(report.violated)
    capacity = sum_rate_closed_form(ch)
    if capacity - rates.sum() > tol:
        raise OffFaceError(
            f"target sum {rates.sum():.12g} is below the sum capacity {capacity:.12g}; "
            "only tuples on the maximal sum-rate face admit fully matched paths"
        )
    if k == 1:
        return DecodingPath(np.array([[1.0], [0.0]]), PathKind.STRAIGHT)
    g = ch.gains
    for order in _preferred_orders(g):
        depths = _peel_depths(g, ch.noise_var, rates, order, tol)
        if depths is not None:
            return _nested_path(k, order, depths)
    raise RuntimeError("no nested staircase reproduces the target")  # pragma: no cover


def region_report(ch: MacChannel, target=None, slack: float = 1e-9, units: str = "nats") -> dict:
    """JSON-ready summary: constraints, and verdict/binding set for ``target``."""
    out = {
        "units": units,
        "constraints": [c.to_dict(units) for c in enumerate_constraints(ch)],
    }
    if target is not None:
        rep = is_feasible(ch, target, slack)
        out["feasible"] = rep.feasible
        out["binding"] = [list(c.subset) for c in rep.binding]
        out["violated"] = [list(c.subset) for c in rep.violated]
    return out

