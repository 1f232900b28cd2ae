"""Achievable rates as line integrals in the MSE vector field.

For Gaussian signalling the rate of user ``k`` along a decoding path is

    R_k = -int g_k / (g.v + sigma^2) dv_k,

and the integrand vector is the gradient of ``log(sigma^2 + g.v)``, so the sum
rate does not depend on the path. For a general alphabet with MMSE curve ``f``
the rate is accumulated in the SNR domain instead,

    R_k = int_0^{rho_min} f(rho) drho + int_path f(rho_k + f^{-1}(v_k)) drho_k,

which reduces to the first expression when ``f(rho) = 1 / (1 + rho)``.
"""
from __future__ import annotations

import io
import itertools
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._quadrature import QuadratureSpec, integrate_polyline, romberg
from .channel import MacChannel
from .mmse import GAUSSIAN, MmseFunction
from .path import DecodingPath, InvalidPathError, validate_path
from .transfer import ese_snr, ese_snr_bounds, format_float

__all__ = [
    "QuadratureSpec",
    "RateTuple",
    "PathIndependenceReport",
    "rates_gaussian",
    "rate_general_alphabet",
    "sum_rate_closed_form",
    "straight_line_rates_closed_form",
    "verify_path_independence",
    "potential",
    "potential_gradient",
    "per_user_bounds",
    "to_units",
]

UNITS = ("nats", "bits")


def to_units(value, units: str):
    """Convert a quantity in nats to ``units``."""
    if units == "nats":
        return value
    if units == "bits":
        return value / np.log(2.0)
    raise ValueError(f"units must be one of {UNITS}, got {units!r}")


@dataclass(frozen=True, eq=False)
class RateTuple:
    """Per-user rates in ``units`` (``"nats"`` or ``"bits"``)."""

    per_user: np.ndarray
    units: str = "nats"

    def __post_init__(self) -> None:
        if self.units not in UNITS:
            raise ValueError(f"units must be one of {UNITS}, got {self.units!r}")
        r = np.atleast_1d(np.asarray(self.per_user, dtype=float)).copy()
        if np.any(r < 0) or not np.all(np.isfinite(r)):
            raise ValueError("rates must be finite and nonnegative")
        r.flags.writeable = False
        object.__setattr__(self, "per_user", r)

    @property
    def sum(self) -> float:
        return float(self.per_user.sum())

    @property
    def num_users(self) -> int:
        return self.per_user.size

    def to(self, units: str) -> "RateTuple":
        if units == self.units:
            return self
        nats = self.per_user if self.units == "nats" else self.per_user * np.log(2.0)
        return RateTuple(to_units(nats, units), units)

    def to_dict(self) -> dict:
        return {
            "per_user": [float(format_float(r)) for r in self.per_user],
            "sum": float(format_float(self.sum)),
            "units": self.units,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("user,rate,units\n")
        for k, r in enumerate(self.per_user):
            buf.write(f"{k},{format_float(r)},{self.units}\n")
        buf.write(f"sum,{format_float(self.sum)},{self.units}\n")
        return buf.getvalue()

    def __repr__(self) -> str:
        vals = ", ".join(f"{r:.6g}" for r in self.per_user)
        return f"RateTuple([{vals}], sum={self.sum:.6g} {self.units})"


def _require_valid(ch_users: int, p: DecodingPath) -> None:
    if p.num_users != ch_users:
        raise ValueError(f"path has {p.num_users} users, channel has {ch_users}")
    report = validate_path(p)
    if not report.ok:
        raise InvalidPathError(report)


def _finish(r: np.ndarray, units: str) -> RateTuple:
    # rates are nonnegative analytically; clear rounding noise around zero
    r = np.where(np.abs(r) < 1e-15, 0.0, r)
    return RateTuple(to_units(np.maximum(r, 0.0), units), units)


def potential(ch: MacChannel, v) -> np.ndarray:
    """Scalar field ``log(sigma^2 + g.v)``."""
    return np.log(ch.noise_var + np.asarray(v, dtype=float) @ ch.gains)


def potential_gradient(ch: MacChannel, v) -> np.ndarray:
    """Rate integrand vector ``g / (g.v + sigma^2)``."""
    v = np.asarray(v, dtype=float)
    return ch.gains / (v @ ch.gains + ch.noise_var)[..., None]


def rates_gaussian(
    ch: MacChannel,
    p: DecodingPath,
    q: QuadratureSpec | None = None,
    units: str = "nats",
) -> RateTuple:
    """Per-user Gaussian-input rates along ``p`` by refined path quadrature."""
    q = q or QuadratureSpec()
    _require_valid(ch.num_users, p)
    g, s2 = ch.gains, ch.noise_var

    def contribution(v_lo, v_mid, v_hi):
        return -(v_hi - v_lo) * g / (v_mid @ g + s2)[:, None]

    return _finish(integrate_polyline(p.vertices, contribution, q), units)


def rate_general_alphabet(
    ch: MacChannel,
    p: DecodingPath,
    fn: MmseFunction = GAUSSIAN,
    q: QuadratureSpec | None = None,
    units: str = "nats",
) -> RateTuple:
    """Per-user rates for the alphabet of ``fn``, integrated over SNR.

    The SNR trajectory ``rho(t)`` comes from the ESE function along the
    path. Before the path starts each user already sees ``rho_min``, which
    contributes the single-user information ``int_0^{rho_min} f``; after
    ``v_k`` reaches zero the integrand vanishes.
    """
    q = q or QuadratureSpec()
    _require_valid(ch.num_users, p)
    rho_min, _ = ese_snr_bounds(ch)

    def head(m):
        x = (np.arange(m) + 0.5) / m
        return fn._eval(np.outer(rho_min, x).ravel()).reshape(len(rho_min), m).sum(axis=1) * (
            rho_min / m
        )

    def contribution(v_lo, v_mid, v_hi):
        d_rho = ese_snr(ch, v_hi) - ese_snr(ch, v_lo)
        rho_mid = ese_snr(ch, v_mid)
        prior = fn._inverse_eval(v_mid.ravel()).reshape(v_mid.shape)
        return fn._eval((rho_mid + prior).ravel()).reshape(v_mid.shape) * d_rho

    total = romberg(head, q) + integrate_polyline(p.vertices, contribution, q)
    return _finish(total, units)


def sum_rate_closed_form(ch: MacChannel, units: str = "nats") -> float:
    """``log(1 + sum_k g_k / sigma^2)``."""
    return float(to_units(np.log1p(ch.gains.sum() / ch.noise_var), units))


def straight_line_rates_closed_form(ch: MacChannel, units: str = "nats") -> RateTuple:
    """Straight-line split: rates proportional to the gains."""
    g = ch.gains
    total = g.sum()
    if total <= 0:
        raise ValueError("straight-line split needs at least one positive gain")
    return RateTuple(to_units(g / total * np.log1p(total / ch.noise_var), units), units)


def per_user_bounds(ch: MacChannel, units: str = "nats") -> tuple[np.ndarray, np.ndarray]:
    """Bounds every valid path respects:
    ``log((g_k + s2) / (sum_{l!=k} g_l + s2)) <= R_k <= log((g_k + s2) / s2)``.
    """
    g, s2 = ch.gains, ch.noise_var
    lower = np.log((g + s2) / (g.sum() - g + s2))
    upper = np.log((g + s2) / s2)
    return to_units(lower, units), to_units(upper, units)


@dataclass
class PathIndependenceReport:
    sums: np.ndarray
    closed_form: float
    max_pairwise_deviation: float
    max_closed_form_deviation: float
    units: str = "nats"

    @property
    def max_relative_deviation(self) -> float:
        return max(self.max_pairwise_deviation, self.max_closed_form_deviation) / self.closed_form

    def to_dict(self) -> dict:
        return {
            "sums": [float(format_float(s)) for s in self.sums],
            "closed_form": float(format_float(self.closed_form)),
            "max_pairwise_deviation": float(format_float(self.max_pairwise_deviation)),
            "max_closed_form_deviation": float(format_float(self.max_closed_form_deviation)),
            "units": self.units,
        }


def verify_path_independence(
    ch: MacChannel,
    paths: Sequence[DecodingPath],
    q: QuadratureSpec | None = None,
    units: str = "nats",
) -> PathIndependenceReport:
    """Integrate the sum rate along each path and compare them."""
    if not paths:
        raise ValueError("at least one path is required")
    sums = np.array([rates_gaussian(ch, p, q, units).sum for p in paths])
    closed = sum_rate_closed_form(ch, units)
    pairwise = max((abs(a - b) for a, b in itertools.combinations(sums, 2)), default=0.0)
    return PathIndependenceReport(
        sums=sums,
        closed_form=closed,
        max_pairwise_deviation=float(pairwise),
        max_closed_form_deviation=float(np.max(np.abs(sums - closed))),
        units=units,
    )
