"""ESE transfer function and decoder (DEC) characteristics.

The ESE maps the decoders' MSE vector ``v`` to the per-user SNR after soft
interference cancellation,

    rho_k = g_k / (sum_{j != k} g_j v_j + sigma^2).

A DEC characteristic maps a user's SNR back to its output MSE. A DEC is
matched to a decoding path when, along the path, it returns exactly the
``v_k(t)`` that produced ``rho_k(t)``.
"""
from __future__ import annotations

import io
from typing import Sequence

import numpy as np

from .channel import MacChannel
from .path import DecodingPath, PathKind, _sample_grid

__all__ = [
    "ese_snr",
    "ese_snr_bounds",
    "DecCharacteristic",
    "StraightLineDec",
    "SicStepDec",
    "TabulatedDec",
    "NonMonotoneSnrError",
    "dec_apply",
    "synthesize_matching_dec",
    "matched_decs",
    "format_float",
]


def format_float(x: float) -> str:
    return f"{float(x):.12g}"


def ese_snr(ch: MacChannel, v) -> np.ndarray:
    """Per-user SNR after soft cancellation.

    ``v`` has shape ``(K,)`` or ``(n, K)``; the result has the same shape.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != ch.num_users:
        raise ValueError(f"v has {v.shape[-1]} entries, expected {ch.num_users}")
    if np.any((v < 0) | (v > 1)):
        raise ValueError("v must lie in [0, 1]^K")
    g = ch.gains
    residual = v @ g
    interference = residual[..., None] - g * v
    # the subtraction can leave a tiny negative remainder when v_j g_j dominates
    interference = np.maximum(interference, 0.0)
    return g / (interference + ch.noise_var)


def ese_snr_bounds(ch: MacChannel) -> tuple[np.ndarray, np.ndarray]:
    """``(rho_min, rho_max)``: SNR with all others undecoded / all cancelled."""
    g = ch.gains
    rho_min = g / (g.sum() - g + ch.noise_var)
    rho_max = g / ch.noise_var
    return rho_min, rho_max


class NonMonotoneSnrError(ValueError):
    """The user's SNR decreases along the path, so no single-valued DEC exists."""

    def __init__(self, user: int, t_start: float, t_end: float):
        super().__init__(
            f"rho of user {user} decreases on t in [{t_start:.6g}, {t_end:.6g}]; "
            "no single-valued matching DEC curve exists"
        )
        self.user = user
        self.t_interval = (t_start, t_end)


class DecCharacteristic:
    """Base class: a non-increasing MSE-vs-SNR curve ``v = psi_k(rho)``."""

    user: int

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.clip(self._eval(np.atleast_1d(rho)), 0.0, 1.0)
        return out.reshape(rho.shape) if rho.ndim else float(out[0])

    def _eval(self, rho: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def table(self, n: int = 1001) -> tuple[np.ndarray, np.ndarray]:
        """Plot-ready ``(rho, v)`` samples covering the transition."""
        raise NotImplementedError

    def shifted(self, snr_shift: float, n: int = 4097) -> "TabulatedDec":
        """Same curve moved right by ``snr_shift``: the decoder needs more SNR."""
        rho, v = self.table(n)
        return TabulatedDec(self.user, rho + snr_shift, v)

    def to_csv(self, n: int = 1001) -> str:
        rho, v = self.table(n)
        buf = io.StringIO()
        buf.write("rho,v\n")
        for r, x in zip(rho, v):
            buf.write(f"{format_float(r)},{format_float(x)}\n")
        return buf.getvalue()


class StraightLineDec(DecCharacteristic):
    """Closed-form DEC matched to the straight-line path.

    With every ``v_j`` equal, inverting the ESE function gives

        v_k = (g_k / rho_k - sigma^2) / sum_{j != k} g_j,

    clamped to ``[0, 1]``; it equals 1 at ``rho_min`` and 0 at ``rho_max``.
    """

    def __init__(self, user: int, gain: float, interference: float, noise_var: float):
        self.user = int(user)
        self.gain = float(gain)
        self.interference = float(interference)
        self.noise_var = float(noise_var)
        self.rho_min = self.gain / (self.interference + self.noise_var)
        self.rho_max = self.gain / self.noise_var

    def _eval(self, rho: np.ndarray) -> np.ndarray:
        if self.interference == 0.0:
            return np.where(rho >= self.rho_max, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            v = (self.gain / rho - self.noise_var) / self.interference
        v = np.where(rho <= self.rho_min, 1.0, v)
        return np.where(rho >= self.rho_max, 0.0, v)

    def table(self, n: int = 1001):
        if self.interference == 0.0:
            return np.array([self.rho_max, self.rho_max]), np.array([1.0, 0.0])
        rho = np.linspace(self.rho_min, self.rho_max, n)
        v = self(rho)
        v[0], v[-1] = 1.0, 0.0
        return rho, v

    def __repr__(self) -> str:
        return (
            f"StraightLineDec(user={self.user}, rho_min={self.rho_min:.6g}, "
            f"rho_max={self.rho_max:.6g})"
        )


class SicStepDec(DecCharacteristic):
    """Hard decision: ``v = 1`` below ``threshold``, ``v = 0`` at and above it."""

    def __init__(self, user: int, threshold: float):
        self.user = int(user)
        self.threshold = float(threshold)

    def _eval(self, rho: np.ndarray) -> np.ndarray:
        return np.where(rho >= self.threshold, 0.0, 1.0)

    def table(self, n: int = 1001):
        return np.array([self.threshold, self.threshold]), np.array([1.0, 0.0])

    def __repr__(self) -> str:
        return f"SicStepDec(user={self.user}, threshold={self.threshold:.6g})"


class TabulatedDec(DecCharacteristic):
    """DEC through ``(rho, v)`` points, interpolated linearly in ``1 / rho``.

    On a straight path segment both ``v_k`` and ``1 / rho_k`` are affine in
    the curve parameter, so this interpolation is exact between the samples
    of a matched polyline path. ``rho`` must be non-decreasing and ``v`` non-increasing. A repeated
    ``rho`` encodes a vertical drop; at the drop the lower value applies.
    Outside the table the end values are held.
    """

    def __init__(self, user: int, rho: Sequence[float], v: Sequence[float]):
        rho = np.asarray(rho, dtype=float)
        v = np.asarray(v, dtype=float)
        if rho.ndim != 1 or rho.shape != v.shape or rho.size < 1:
            raise ValueError("rho and v must be 1-D arrays of equal, non-zero length")
        order = np.argsort(rho, kind="stable")
        rho, v = rho[order], v[order]
        if np.any((v < 0) | (v > 1)):
            raise ValueError("tabulated v must lie in [0, 1]")
        if np.any(np.diff(v) > 0):
            raise ValueError("tabulated v must be non-increasing in rho")
        self.user = int(user)
        self.rho = rho
        self.v = v

    def _eval(self, rho: np.ndarray) -> np.ndarray:
        xp, fp = self.rho, self.v
        idx = np.searchsorted(xp, rho, side="right")
        out = np.empty_like(rho)
        below = idx == 0
        above = idx == len(xp)
        out[below] = fp[0]
        out[above] = fp[-1]
        inner = ~below & ~above
        i = idx[inner]
        x0, x1, r = xp[i - 1], xp[i], rho[inner]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r > 0, (r - x0) * x1 / (r * (x1 - x0)), (r - x0) / (x1 - x0))
        out[inner] = fp[i - 1] + w * (fp[i] - fp[i - 1])
        return out

    def table(self, n: int = 1001):
        return self.rho.copy(), self.v.copy()

    def __repr__(self) -> str:
        return f"TabulatedDec(user={self.user}, points={self.rho.size})"


def dec_apply(dec: DecCharacteristic, rho):
    """Evaluate a DEC curve at ``rho >= 0``."""
    if np.any(np.asarray(rho) < 0):
        raise ValueError("rho must be nonnegative")
    return dec(rho)


def synthesize_matching_dec(
    ch: MacChannel, path: DecodingPath, k: int, grid_size: int = 2048
) -> DecCharacteristic:
    """DEC curve of user ``k`` matched to ``path``.

    Eliminates ``t`` between ``v_k(t)`` and ``rho_k(t)``. Straight lines give
    the closed form, SIC paths a step at the user's SIC threshold, and other
    paths a table sampled on ``grid_size`` points (vertices included).

    Raises
    ------
    NonMonotoneSnrError
        If ``rho_k(t)`` decreases anywhere along the path.
    """
    if path.num_users != ch.num_users:
        raise ValueError("path and channel disagree on the number of users")
    if not 0 <= k < ch.num_users:
        raise ValueError(f"user index {k} out of range")
    t = _sample_grid(path.knots, max(int(grid_size), path.num_segments + 1))
    V = np.clip(path(t), 0.0, 1.0)
    rho = ese_snr(ch, V)[:, k]
    drop = np.diff(rho) < -1e-12 * np.maximum(np.abs(rho[:-1]), 1e-300)
    if drop.any():
        bad = np.flatnonzero(drop)
        # report the first contiguous run of decreasing samples
        run_end = bad[0]
        while run_end + 1 < len(drop) and drop[run_end + 1]:
            run_end += 1
        raise NonMonotoneSnrError(k, float(t[bad[0]]), float(t[run_end + 1]))

    g = ch.gains
    if path.kind is PathKind.STRAIGHT:
        return StraightLineDec(k, g[k], g.sum() - g[k], ch.noise_var)
    if path.kind is PathKind.SIC:
        later = list(path.order[path.order.index(k) + 1:])
        return SicStepDec(k, g[k] / (g[later].sum() + ch.noise_var))
    pts = np.column_stack([rho, V[:, k]])
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.diff(pts, axis=0) != 0, axis=1)
    pts = pts[keep]
    return TabulatedDec(k, pts[:, 0], np.minimum.accumulate(pts[:, 1]))


def matched_decs(ch: MacChannel, path: DecodingPath, grid_size: int = 2048) -> list:
    """Matched DEC curves for every user."""
    return [synthesize_matching_dec(ch, path, k, grid_size) for k in range(ch.num_users)]
