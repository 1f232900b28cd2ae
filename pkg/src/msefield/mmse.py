"""Scalar MMSE curves ``f(rho)`` for unit-energy Gaussian and QPSK inputs.

The observation model is ``y = sqrt(rho) x + z`` with ``z ~ CN(0, 1)``.
QPSK splits into two real BPSK dimensions with half the energy each; both see
the same per-dimension SNR ``rho`` and their half-MMSEs add up to

    f_QPSK(rho) = E[sech^2(rho + sqrt(rho) Z)],   Z ~ N(0, 1),

which is the variance of ``x - E[x|y]``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["Alphabet", "MmseFunction", "mmse", "mmse_inverse", "GAUSSIAN", "QPSK"]

# Below this SNR Gauss-Hermite on the Gaussian noise is spectrally accurate;
# above it the sech^2 peak sits in the noise tail and a trapezoid rule in the
# log-likelihood variable is used instead.
_GH_SWITCH_SNR = 0.5


class Alphabet(str, enum.Enum):
    GAUSSIAN = "gaussian"
    QPSK = "qpsk"


@lru_cache(maxsize=None)
def _hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    return nodes, weights / np.sqrt(2.0 * np.pi)


@lru_cache(maxsize=None)
def _llr_grid(order: int) -> tuple[np.ndarray, float]:
    step = 16.0 / order
    u = np.arange(-20.0, 50.0 + 0.5 * step, step)
    # log of 4 e^{3u} / (1 + e^{2u})^2 = sech^2(u) e^u
    log_kernel = np.log(4.0) + 3.0 * u - 2.0 * np.logaddexp(0.0, 2.0 * u)
    return np.stack([u, log_kernel]), step


def _sech2(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    e = np.exp(-2.0 * ax)
    return 4.0 * e / (1.0 + e) ** 2


def _qpsk_mmse(rho: np.ndarray, order: int) -> np.ndarray:
    out = np.empty_like(rho)
    low = rho <= _GH_SWITCH_SNR
    if np.any(low):
        z, w = _hermite_rule(order)
        r = rho[low][:, None]
        out[low] = _sech2(r + np.sqrt(r) * z) @ w
    high = ~low & np.isfinite(rho)
    if np.any(high):
        (u, log_kernel), step = _llr_grid(order)
        r = rho[high][:, None]
        # substitute u = rho + sqrt(rho) z; the Gaussian weight becomes
        # e^{u - rho/2 - u^2/(2 rho)} / sqrt(2 pi rho)
        log_terms = log_kernel - u**2 / (2.0 * r)
        scale = np.exp(-0.5 * rho[high]) / np.sqrt(2.0 * np.pi * rho[high])
        out[high] = scale * step * np.exp(log_terms).sum(axis=1)
    out[np.isposinf(rho)] = 0.0
    return out


@dataclass(frozen=True)
class MmseFunction:
    """MMSE curve of a unit-energy alphabet.

    ``quadrature_order`` sets the Gauss-Hermite order of the QPSK evaluation
    (and, proportionally, the step of the high-SNR rule). It is ignored for
    the Gaussian alphabet, whose curve is ``1 / (1 + rho)``.
    """

    alphabet: Alphabet = Alphabet.GAUSSIAN
    quadrature_order: int = 64

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", Alphabet(self.alphabet))
        if int(self.quadrature_order) < 1:
            raise ValueError("quadrature_order must be positive")
        object.__setattr__(self, "quadrature_order", int(self.quadrature_order))

    def __call__(self, rho):
        return mmse(self, rho)

    def inverse(self, v):
        return mmse_inverse(self, v)

    def _eval(self, rho: np.ndarray) -> np.ndarray:
        """Evaluate without argument checks; ``rho`` may contain ``+inf``."""
        if self.alphabet is Alphabet.GAUSSIAN:
            with np.errstate(divide="ignore"):
                return 1.0 / (1.0 + rho)
        return _qpsk_mmse(rho, self.quadrature_order)

    def _inverse_eval(self, v: np.ndarray) -> np.ndarray:
        """Inverse on ``[0, 1]``; ``v == 0`` maps to ``+inf``."""
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            gauss = (1.0 - v) / v
        if self.alphabet is Alphabet.GAUSSIAN:
            return gauss
        out = np.zeros_like(v)
        out[v == 0] = np.inf
        inner = (v > 0) & (v < 1)
        if np.any(inner):
            out[inner] = _bisect_inverse(self, v[inner], gauss[inner])
        return out


GAUSSIAN = MmseFunction(Alphabet.GAUSSIAN)
QPSK = MmseFunction(Alphabet.QPSK)


def _bisect_inverse(fn: MmseFunction, v: np.ndarray, hi: np.ndarray) -> np.ndarray:
    # Any unit-energy input has MMSE below the Gaussian one, so the Gaussian
    # inverse is an upper bracket; -log(v) serves as the lower guess.
    lo = np.minimum(-np.log(v), hi)
    for _ in range(200):
        bad = fn._eval(lo) < v
        if not bad.any():
            break
        lo[bad] *= 0.5
    for _ in range(200):
        bad = fn._eval(hi) > v
        if not bad.any():
            break
        hi[bad] *= 2.0
    lo = np.maximum(lo, np.finfo(float).tiny)
    log_lo, log_hi = np.log(lo), np.log(hi)
    for _ in range(200):
        if np.all(log_hi - log_lo <= 1e-15):
            break
        mid = 0.5 * (log_lo + log_hi)
        above = fn._eval(np.exp(mid)) > v
        log_lo = np.where(above, mid, log_lo)
        log_hi = np.where(above, log_hi, mid)
    return np.exp(0.5 * (log_lo + log_hi))


def mmse(fn: MmseFunction, rho):
    """MMSE of ``fn``'s alphabet at SNR ``rho`` (scalar or array, ``rho >= 0``)."""
    arr = np.asarray(rho, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise ValueError("rho must be nonnegative")
    out = fn._eval(np.atleast_1d(arr).astype(float))
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def mmse_inverse(fn: MmseFunction, v):
    """SNR ``rho`` with ``f(rho) == v`` for ``0 < v <= 1``.

    Gaussian uses the closed form ``(1 - v) / v``; QPSK bisects the monotone
    curve in ``log(rho)`` to a relative bracket of 1e-15.
    """
    arr = np.asarray(v, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0):
        raise ValueError("v must be positive (v = 0 corresponds to infinite SNR)")
    if np.any(arr > 1):
        raise ValueError("v must not exceed 1")
    out = fn._inverse_eval(np.atleast_1d(arr))
    return out.reshape(arr.shape) if arr.ndim else float(out[0])
