"""Composite midpoint rule along polylines with Richardson extrapolation."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class QuadratureSpec:
    """Refinement settings for path integrals.

    Every path segment starts with ``base_samples`` sub-intervals; the count
    doubles per level until two successive extrapolated estimates differ by
    less than ``refinement_tolerance`` relative to the largest component.
    """

    base_samples: int = 32
    refinement_tolerance: float = 1e-9
    max_levels: int = 12

    def __post_init__(self) -> None:
        if self.base_samples < 16:
            raise ValueError("base_samples must be at least 16")
        if not self.refinement_tolerance > 0:
            raise ValueError("refinement_tolerance must be positive")
        if self.max_levels < 1:
            raise ValueError("max_levels must be at least 1")


class QuadratureWarning(UserWarning):
    pass


# contribution(v_lo, v_mid, v_hi) -> per-sub-interval, per-user terms
Contribution = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def midpoint_sum(vertices: np.ndarray, contribution: Contribution, m: int) -> np.ndarray:
    """One composite pass with ``m`` equal sub-intervals per segment."""
    s = np.arange(m + 1) / m
    mid = (np.arange(m) + 0.5) / m
    total = None
    for a, b in zip(vertices[:-1], vertices[1:]):
        d = b - a
        nodes = a + s[:, None] * d
        v_mid = a + mid[:, None] * d
        part = contribution(nodes[:-1], v_mid, nodes[1:]).sum(axis=0)
        total = part if total is None else total + part
    return total


def romberg(estimate: Callable[[int], np.ndarray], q: QuadratureSpec) -> np.ndarray:
    """Richardson-extrapolate ``estimate(m)`` over ``m = base * 2**level``.

    The midpoint error expands in even powers of the step, so column ``i``
    of the table removes the ``h^(2i)`` term.
    """
    rows: list[list[np.ndarray]] = []
    best = None
    for level in range(q.max_levels + 1):
        row = [np.asarray(estimate(q.base_samples * 2**level), dtype=float)]
        for i in range(1, level + 1):
            prev = rows[-1][i - 1]
            row.append(row[i - 1] + (row[i - 1] - prev) / (4**i - 1))
        rows.append(row)
        if level:
            best, last = row[-1], rows[-2][-1]
            scale = max(np.max(np.abs(best)), np.finfo(float).tiny)
            if np.max(np.abs(best - last)) <= q.refinement_tolerance * scale:
                return best
    warnings.warn(
        f"path integral did not reach relative tolerance {q.refinement_tolerance:g} "
        f"within {q.max_levels} refinements",
        QuadratureWarning,
        stacklevel=3,
    )
    return best if best is not None else rows[-1][-1]


def integrate_polyline(
    vertices: np.ndarray, contribution: Contribution, q: QuadratureSpec
) -> np.ndarray:
    return romberg(lambda m: midpoint_sum(vertices, contribution, m), q)
