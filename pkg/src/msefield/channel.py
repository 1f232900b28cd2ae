"""Scalar and MIMO Gaussian multiple-access channel descriptions.

Symbols are normalized to unit average energy, so all received power lives in
the per-user ``powers``. Complex numbers travel through JSON as ``[re, im]``
pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = [
    "MacChannel",
    "MimoMacChannel",
    "effective_gains",
    "concatenate_channels",
]


def _complex_from_pair(value: Any) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if len(value) != 2:
        raise ValueError(f"complex value must be a [re, im] pair, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _pair_from_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


@dataclass(frozen=True, eq=False)
class MacChannel:
    """K-user scalar MAC ``y = sum_k sqrt(P_k) h_k x_k + n``.

    Parameters
    ----------
    powers : sequence of float
        Received powers ``P_k >= 0`` (linear scale).
    fading : sequence of complex, optional
        Fading coefficients ``h_k``; defaults to all ones.
    noise_var : float
        Noise variance ``sigma^2 > 0``.
    """

    powers: np.ndarray
    fading: np.ndarray = None  # type: ignore[assignment]
    noise_var: float = 1.0

    def __post_init__(self) -> None:
        powers = np.atleast_1d(np.asarray(self.powers, dtype=float)).copy()
        if powers.ndim != 1 or powers.size < 1:
            raise ValueError("powers must be a non-empty 1-D sequence")
        if self.fading is None:
            fading = np.ones(powers.size, dtype=complex)
        else:
            fading = np.atleast_1d(np.asarray(self.fading, dtype=complex)).copy()
        if fading.shape != powers.shape:
            raise ValueError(
                f"fading has {fading.size} entries but there are {powers.size} users"
            )
        if np.any(~np.isfinite(powers)) or np.any(powers < 0):
            raise ValueError("powers must be finite and nonnegative")
        if np.any(~np.isfinite(fading)):
            raise ValueError("fading coefficients must be finite")
        noise_var = float(self.noise_var)
        if not np.isfinite(noise_var) or noise_var <= 0:
            raise ValueError("noise_var must be positive and finite")
        gains = powers * np.abs(fading) ** 2
        if np.any(~np.isfinite(gains)):
            raise ValueError("effective gains overflow")
        powers.flags.writeable = False
        fading.flags.writeable = False
        gains.flags.writeable = False
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "fading", fading)
        object.__setattr__(self, "noise_var", noise_var)
        object.__setattr__(self, "_gains", gains)

    @classmethod
    def from_gains(cls, gains: Sequence[float], noise_var: float = 1.0) -> "MacChannel":
        """Channel with unit fading whose powers equal the given gains."""
        return cls(powers=np.asarray(gains, dtype=float), noise_var=noise_var)

    @property
    def num_users(self) -> int:
        return int(self.powers.size)

    @property
    def gains(self) -> np.ndarray:
        """Effective gains ``g_k = P_k |h_k|^2``."""
        return self._gains  # type: ignore[attr-defined]

    def permuted(self, perm: Sequence[int]) -> "MacChannel":
        perm = list(perm)
        return MacChannel(self.powers[perm], self.fading[perm], self.noise_var)

    def to_dict(self) -> dict:
        return {
            "users": [
                {"power": float(p), "fading": _pair_from_complex(h)}
                for p, h in zip(self.powers, self.fading)
            ],
            "noise_var": self.noise_var,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MacChannel":
        try:
            users = data["users"]
            noise_var = data["noise_var"]
        except KeyError as exc:
            raise ValueError(f"channel descriptor is missing key {exc.args[0]!r}") from None
        if not users:
            raise ValueError("channel descriptor has no users")
        powers, fading = [], []
        for i, user in enumerate(users):
            if "power" not in user:
                raise ValueError(f"users[{i}] is missing key 'power'")
            powers.append(float(user["power"]))
            fading.append(_complex_from_pair(user.get("fading", [1.0, 0.0])))
        return cls(np.array(powers), np.array(fading), float(noise_var))


def effective_gains(ch: MacChannel) -> np.ndarray:
    """Return ``g_k = P_k |h_k|^2`` in user order."""
    return ch.gains.copy()


@dataclass(frozen=True, eq=False)
class MimoMacChannel:
    """K-user MIMO MAC ``y = sum_k sqrt(P_k) H_k x_k + n``.

    ``channels[k]`` has shape ``(N_R, N_t_k)``; every user shares ``N_R``.
    Powers are kept apart from the matrices.
    """

    channels: tuple
    powers: np.ndarray
    noise_var: float = 1.0
    _blocks: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self) -> None:
        mats = []
        for k, h in enumerate(self.channels):
            h = np.asarray(h, dtype=complex)
            if h.ndim == 1:
                h = h[:, None]
            if h.ndim != 2 or h.shape[0] < 1 or h.shape[1] < 1:
                raise ValueError(f"channel of user {k} must be a non-empty matrix")
            if not np.all(np.isfinite(h)):
                raise ValueError(f"channel of user {k} has non-finite entries")
            h = h.copy()
            h.flags.writeable = False
            mats.append(h)
        if not mats:
            raise ValueError("at least one user is required")
        n_r = {m.shape[0] for m in mats}
        if len(n_r) != 1:
            raise ValueError(f"all user channels must share the row count, got {sorted(n_r)}")
        powers = np.atleast_1d(np.asarray(self.powers, dtype=float)).copy()
        if powers.shape != (len(mats),):
            raise ValueError(f"expected {len(mats)} powers, got {powers.size}")
        if np.any(~np.isfinite(powers)) or np.any(powers < 0):
            raise ValueError("powers must be finite and nonnegative")
        noise_var = float(self.noise_var)
        if not np.isfinite(noise_var) or noise_var <= 0:
            raise ValueError("noise_var must be positive and finite")
        powers.flags.writeable = False
        stops = np.cumsum([m.shape[1] for m in mats])
        blocks = tuple(zip(np.concatenate([[0], stops[:-1]]).tolist(), stops.tolist()))
        object.__setattr__(self, "channels", tuple(mats))
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "noise_var", noise_var)
        object.__setattr__(self, "_blocks", blocks)

    @classmethod
    def from_scalar(cls, ch: MacChannel) -> "MimoMacChannel":
        """Single-antenna embedding of a scalar MAC."""
        return cls(tuple(np.array([[h]]) for h in ch.fading), ch.powers, ch.noise_var)

    @property
    def num_users(self) -> int:
        return len(self.channels)

    @property
    def num_rx(self) -> int:
        return self.channels[0].shape[0]

    @property
    def num_tx(self) -> tuple[int, ...]:
        return tuple(m.shape[1] for m in self.channels)

    @property
    def column_blocks(self) -> tuple[tuple[int, int], ...]:
        """Half-open column ranges of each user in the concatenated matrix."""
        return self._blocks

    def to_dict(self) -> dict:
        return {
            "users": [
                {
                    "power": float(p),
                    "channel": [[_pair_from_complex(z) for z in row] for row in h],
                }
                for p, h in zip(self.powers, self.channels)
            ],
            "noise_var": self.noise_var,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MimoMacChannel":
        try:
            users = data["users"]
            noise_var = data["noise_var"]
        except KeyError as exc:
            raise ValueError(f"MIMO channel descriptor is missing key {exc.args[0]!r}") from None
        mats, powers = [], []
        for i, user in enumerate(users):
            for key in ("power", "channel"):
                if key not in user:
                    raise ValueError(f"users[{i}] is missing key {key!r}")
            rows = [[_complex_from_pair(z) for z in row] for row in user["channel"]]
            mats.append(np.array(rows, dtype=complex))
            powers.append(float(user["power"]))
        return cls(tuple(mats), np.array(powers), float(noise_var))


def concatenate_channels(ch: MimoMacChannel) -> tuple[np.ndarray, np.ndarray]:
    """Stack user channels side by side.

    Returns
    -------
    H : ndarray, shape (N_R, sum_k N_t_k)
        Unscaled concatenated channel, user blocks in order.
    column_powers : ndarray, shape (sum_k N_t_k,)
        ``P_k`` repeated once per transmit antenna of user ``k``.
    """
    H = np.concatenate(ch.channels, axis=1)
    column_powers = np.repeat(ch.powers, ch.num_tx)
    return H, column_powers
