"""LMMSE-based ESE for the MIMO MAC.

The interference-plus-noise covariance seen by the LMMSE front end is

    R(v) = sigma^2 I + H V H^H,   V = diag(P_k v_k repeated per antenna of k).

Per-user SNR follows from ``S_k = sum_i P_k h_{k,i}^H R^{-1} h_{k,i}`` as
``rho_k = S_k / (1 - v_k S_k)``. Since ``S_k`` is also the partial derivative
of ``log det R`` in ``v_k`` (Jacobi's formula), the rate integrand is again a
gradient and the sum rate is path independent.
"""
from __future__ import annotations

import numpy as np

from ._quadrature import QuadratureSpec, integrate_polyline
from .channel import MimoMacChannel, concatenate_channels
from .path import DecodingPath
from .rates import RateTuple, _finish, _require_valid, to_units

__all__ = [
    "SingularSnrError",
    "covariance",
    "log_det_covariance",
    "lmmse_snr",
    "log_det_gradient",
    "mimo_sum_rate",
    "mimo_rates_along_path",
    "jacobi_gradient_check",
]


class SingularSnrError(ArithmeticError):
    """``1 - v_k S_k`` is not safely positive."""


def _column_powers(ch: MimoMacChannel, v: np.ndarray) -> np.ndarray:
    # v: (..., K) -> (..., sum N_t)
    return np.repeat(v * ch.powers, ch.num_tx, axis=-1)


def covariance(ch: MimoMacChannel, v) -> np.ndarray:
    """``R(v)``; ``v`` of shape ``(K,)`` or ``(n, K)``."""
    v = np.asarray(v, dtype=float)
    H, _ = concatenate_channels(ch)
    w = _column_powers(ch, v)
    R = np.einsum("ij,...j,kj->...ik", H, w, H.conj())
    R = R + ch.noise_var * np.eye(ch.num_rx)
    return 0.5 * (R + np.swapaxes(R.conj(), -1, -2))


def _chol(R: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(R)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - R is PD by construction
        raise np.linalg.LinAlgError("covariance is not positive definite") from exc


def log_det_covariance(ch: MimoMacChannel, v) -> np.ndarray:
    L = _chol(covariance(ch, v))
    return 2.0 * np.log(np.abs(np.diagonal(L, axis1=-2, axis2=-1))).sum(axis=-1)


def log_det_gradient(ch: MimoMacChannel, v) -> np.ndarray:
    """``S_k = P_k trace(R^{-1} H_k H_k^H)`` for every user, via Cholesky solves."""
    v = np.asarray(v, dtype=float)
    H, col_pow = concatenate_channels(ch)
    L = _chol(covariance(ch, v))
    Hb = np.broadcast_to(H, L.shape[:-2] + H.shape)
    W = np.linalg.solve(L, Hb)  # L^{-1} H
    per_col = col_pow * np.sum(np.abs(W) ** 2, axis=-2)
    return np.stack([per_col[..., a:b].sum(axis=-1) for a, b in ch.column_blocks], axis=-1)


def lmmse_snr(ch: MimoMacChannel, v) -> np.ndarray:
    """Per-user LMMSE SNR ``S_k / (1 - v_k S_k)``."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != ch.num_users:
        raise ValueError(f"v has {v.shape[-1]} entries, expected {ch.num_users}")
    if np.any((v < 0) | (v > 1)):
        raise ValueError("v must lie in [0, 1]^K")
    S = log_det_gradient(ch, v)
    denom = 1.0 - v * S
    if np.any(denom <= 1e-14):
        k = int(np.argwhere(denom <= 1e-14)[0][-1])
        d = float(denom[..., k].min())
        # single-stream users always have v_k S_k < 1; several streams can exceed it
        reason = "near-singular cancellation" if d > -1e-12 else "SNR formula undefined for this multi-stream load"
        raise SingularSnrError(f"1 - v_k S_k = {d:.3e} for user {k}: {reason}")
    return S / denom


def mimo_sum_rate(ch: MimoMacChannel, ordering: str = "auto", units: str = "nats") -> float:
    """``log det(I + H P H^H / sigma^2)`` in nats (or bits).

    ``ordering="receive"`` uses the ``N_R x N_R`` form, ``"transmit"`` the
    equivalent ``sum N_t x sum N_t`` form ``I + P^1/2 H^H H P^1/2 / sigma^2``;
    ``"auto"`` takes the smaller one.
    """
    H, col_pow = concatenate_channels(ch)
    n_r, n_t = H.shape
    if ordering == "auto":
        ordering = "receive" if n_r <= n_t else "transmit"
    if ordering == "receive":
        M = np.eye(n_r) + (H * col_pow) @ H.conj().T / ch.noise_var
    elif ordering == "transmit":
        Hs = H * np.sqrt(col_pow)
        M = np.eye(n_t) + Hs.conj().T @ Hs / ch.noise_var
    else:
        raise ValueError("ordering must be 'auto', 'receive' or 'transmit'")
    M = 0.5 * (M + M.conj().T)
    L = np.linalg.cholesky(M)
    return float(to_units(2.0 * np.log(np.abs(np.diag(L))).sum(), units))


def mimo_rates_along_path(
    ch: MimoMacChannel,
    p: DecodingPath,
    q: QuadratureSpec | None = None,
    units: str = "nats",
) -> RateTuple:
    """Per-user rates ``R_k = -int S_k(v) dv_k`` along ``p``."""
    q = q or QuadratureSpec()
    _require_valid(ch.num_users, p)

    def contribution(v_lo, v_mid, v_hi):
        return -(v_hi - v_lo) * log_det_gradient(ch, v_mid)

    return _finish(integrate_polyline(p.vertices, contribution, q), units)


def jacobi_gradient_check(ch: MimoMacChannel, v, h: float = 1e-5) -> float:
    """Max gap between the trace formula and central differences of log det R.

    The difference ``log det R(v + h e_k) - log det R(v - h e_k)`` is taken as
    ``log det(R_-^{-1} R_+)`` so that no large log-determinants cancel.
    """
    v = np.asarray(v, dtype=float)
    if h <= 0:
        raise ValueError("h must be positive")
    if np.any((v <= 0) | (v >= 1)):
        raise ValueError("v must be interior to (0, 1)^K")
    analytic = log_det_gradient(ch, v)
    fd = np.empty(ch.num_users)
    for k in range(ch.num_users):
        e = np.zeros(ch.num_users)
        e[k] = h
        R_plus, R_minus = covariance(ch, v + e), covariance(ch, v - e)
        delta = R_plus - R_minus
        _, logdet = np.linalg.slogdet(np.eye(ch.num_rx) + np.linalg.solve(R_minus, delta))
        fd[k] = logdet / (2.0 * h)
    return float(np.max(np.abs(fd - analytic)))
