"""Iterative receiver trajectories and Monte Carlo validation of the ESE model."""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import MacChannel
from .transfer import DecCharacteristic, ese_snr, format_float

__all__ = [
    "Trajectory",
    "McReport",
    "evolve",
    "monte_carlo_ese",
    "MIN_MC_SAMPLES",
    "MSE_FLOOR",
]

MIN_MC_SAMPLES = 10_000
# MSE values are clamped to this floor before the feedback SNR (1 - v) / v
MSE_FLOOR = 1e-12


@dataclass
class Trajectory:
    """Sequence of receiver states ``(n, v, rho)``."""

    points: list = field(default_factory=list)
    converged: bool = False
    iterations_used: int = 0
    stalled: bool = False

    @property
    def v(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def rho(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])

    def to_csv(self) -> str:
        k = len(self.points[0][1]) if self.points else 0
        buf = io.StringIO()
        header = ["n"] + [f"v_{i}" for i in range(k)] + [f"rho_{i}" for i in range(k)]
        buf.write(",".join(header) + "\n")
        for n, v, rho in self.points:
            buf.write(",".join([str(n)] + [format_float(x) for x in (*v, *rho)]) + "\n")
        return buf.getvalue()

    def summary(self) -> dict:
        last = self.points[-1]
        return {
            "converged": self.converged,
            "stalled": self.stalled,
            "iterations_used": self.iterations_used,
            "final_v": [float(format_float(x)) for x in last[1]],
            "final_rho": [float(format_float(x)) for x in last[2]],
        }


def evolve(
    ch: MacChannel,
    decs: Sequence[DecCharacteristic],
    slack: float = 1e-3,
    max_iter: int = 10_000,
    stop_v: float = 1e-8,
) -> Trajectory:
    """Run ``v <- max(psi(phi(v)) - slack, 0)`` from ``v = 1``.

    All users update in parallel from the same ``v``. The run ends when every
    ``v_k < stop_v`` (converged), when an iteration leaves ``v`` unchanged
    (stalled at a fixed point), or after ``max_iter`` iterations.
    """
    if len(decs) != ch.num_users:
        raise ValueError(f"need {ch.num_users} DEC curves, got {len(decs)}")
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    v = np.ones(ch.num_users)
    rho = ese_snr(ch, v)
    traj = Trajectory(points=[(0, v.copy(), rho.copy())])
    for n in range(1, max_iter + 1):
        new_v = np.array([max(float(dec(r)) - slack, 0.0) for dec, r in zip(decs, rho)])
        new_v = np.clip(new_v, 0.0, 1.0)
        unchanged = np.array_equal(new_v, v)
        v = new_v
        rho = ese_snr(ch, v)
        traj.points.append((n, v.copy(), rho.copy()))
        traj.iterations_used = n
        if np.all(v < stop_v):
            traj.converged = True
            break
        if unchanged:
            traj.stalled = True
            break
    return traj


@dataclass
class McReport:
    """Empirical versus predicted per-user SINR."""

    empirical_sinr: np.ndarray
    predicted_sinr: np.ndarray
    sinr_std_error: np.ndarray
    residual_var: np.ndarray
    predicted_residual_var: np.ndarray
    residual_var_std_error: np.ndarray
    n_samples: int
    seed: int

    def z_scores(self) -> np.ndarray:
        return (self.empirical_sinr - self.predicted_sinr) / self.sinr_std_error

    def to_dict(self) -> dict:
        def fl(a):
            return [float(format_float(x)) for x in a]

        return {
            "empirical_sinr": fl(self.empirical_sinr),
            "predicted_sinr": fl(self.predicted_sinr),
            "sinr_std_error": fl(self.sinr_std_error),
            "residual_var": fl(self.residual_var),
            "predicted_residual_var": fl(self.predicted_residual_var),
            "residual_var_std_error": fl(self.residual_var_std_error),
            "n_samples": self.n_samples,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _cn(rng: np.random.Generator, n: int, var: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((2, n))
    return np.sqrt(var / 2.0) * (z[0] + 1j * z[1])


def monte_carlo_ese(ch: MacChannel, v, n_samples: int = 1_000_000, seed: int = 0) -> McReport:
    """Simulate soft interference cancellation with Gaussian signalling.

    Each decoder's feedback is ``x'_k = sqrt(rho'_k) x_k + w`` with
    ``rho'_k = (1 - v_k) / v_k``; its conditional-mean estimate has MSE
    ``v_k`` exactly. After cancelling the other users' estimates, the
    residual ``y'_k - sqrt(P_k) h_k x_k`` is measured directly and the
    empirical SINR ``g_k / E|residual|^2`` is compared with the ESE formula.

    Every user, the feedback noise and the channel noise draw from their own
    substream spawned from ``seed``.
    """
    n_samples = int(n_samples)
    if n_samples < MIN_MC_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_MC_SAMPLES}")
    v = np.asarray(v, dtype=float)
    if v.shape != (ch.num_users,):
        raise ValueError(f"v must have {ch.num_users} entries")
    if np.any((v < 0) | (v > 1)):
        raise ValueError("v must lie in [0, 1]^K")
    v = np.maximum(v, MSE_FLOOR)
    k_users = ch.num_users
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2 * k_users + 1)]

    amp = np.sqrt(ch.powers) * ch.fading
    x = np.empty((k_users, n_samples), dtype=complex)
    x_hat = np.empty_like(x)
    for k in range(k_users):
        x[k] = _cn(streams[k], n_samples)
        snr_fb = (1.0 - v[k]) / v[k]
        x_fb = np.sqrt(snr_fb) * x[k] + _cn(streams[k_users + k], n_samples)
        x_hat[k] = np.sqrt(snr_fb) / (1.0 + snr_fb) * x_fb
    noise = _cn(streams[-1], n_samples, ch.noise_var)
    y = amp @ x + noise
    soft = amp[:, None] * x_hat

    g = ch.gains
    emp = np.empty(k_users)
    se = np.empty(k_users)
    res_var = np.empty(k_users)
    res_se = np.empty(k_users)
    total_soft = soft.sum(axis=0)
    for k in range(k_users):
        y_k = y - (total_soft - soft[k])
        power = np.abs(y_k - amp[k] * x[k]) ** 2
        res_var[k] = power.mean()
        res_se[k] = power.std(ddof=1) / np.sqrt(n_samples)
        emp[k] = g[k] / res_var[k]
        se[k] = g[k] * res_se[k] / res_var[k] ** 2
    predicted = ese_snr(ch, np.clip(v, 0.0, 1.0))
    predicted_res = g @ v - g * v + ch.noise_var
    return McReport(
        empirical_sinr=emp,
        predicted_sinr=predicted,
        sinr_std_error=se,
        residual_var=res_var,
        predicted_residual_var=predicted_res,
        residual_var_std_error=res_se,
        n_samples=n_samples,
        seed=int(seed),
    )
