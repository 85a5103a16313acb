"""Effective channel gain of a ground user with respect to the UAV transmit beam.

The UAV carries a critically spaced (half-wavelength) uniform linear array of
``n_elements`` isotropic elements driven by a single RF chain, so the transmit
beam is a steering vector aimed at a boresight departure angle.  A user at
departure angle ``theta`` sees the squared Fejer-kernel factor

    F = | sin(pi * n * x / 2) / (n * sin(pi * x / 2)) |^2,
    x = sin(boresight) - sin(theta),

which is 1 on boresight and bounded by 1 everywhere.  The effective power gain
is then |alpha|^2 * n_elements * F / PL.

All functions are numpy-ufunc friendly: scalars in, scalar out; arrays in,
elementwise arrays out.  The Monte Carlo engine and the single-user API share
these exact code paths, so per-drop results agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .population import UserSample

__all__ = [
    "ArrayConfig",
    "DistancePowerLaw",
    "CloseInReference",
    "PathLossModel",
    "array_gain_factor",
    "path_loss_linear",
    "effective_gain",
    "gain_from_components",
]

# below this, sin(pi*x/2) is treated as a removable singularity and F -> 1
_SINGULARITY_EPS = 1e-9


@dataclass(frozen=True)
class ArrayConfig:
    """Transmit array: element count and beam departure angle (from nadir)."""

    n_elements: int
    boresight_rad: float = 0.0

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {self.n_elements}")


@dataclass(frozen=True)
class DistancePowerLaw:
    """Linear path loss 1 + d^gamma."""

    gamma: float = 2.0

    def __post_init__(self):
        if not (self.gamma > 0.0):
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class CloseInReference:
    """Close-in free-space reference-distance model (1 m reference, carrier in GHz).

    PL_dB(d) = 32.4 + 21 * log10(d) + 20 * log10(fc_ghz); valid for d >= 1 m.
    Shadow fading is not modelled, only the mean path loss.
    """

    fc_ghz: float = 30.0

    def __post_init__(self):
        if not (self.fc_ghz > 0.0):
            raise ValueError(f"fc_ghz must be > 0, got {self.fc_ghz}")


PathLossModel = Union[DistancePowerLaw, CloseInReference]


def _gain_factor_from_sines(sin_theta, sin_boresight, n_elements):
    """Array factor from precomputed sines; shared by the fast and scalar paths."""
    x = sin_boresight - sin_theta
    half = 0.5 * np.pi * x
    sin_half = np.sin(half)
    near_limit = np.abs(sin_half) < _SINGULARITY_EPS
    den = np.where(near_limit, 1.0, n_elements * sin_half)
    ratio = np.where(near_limit, 1.0, np.sin(n_elements * half) / den)
    return ratio * ratio


def array_gain_factor(theta_rad, boresight_rad, n_elements):
    """Squared, normalized array factor in [0, 1]; 1 at boresight and x = +-2."""
    if n_elements < 1:
        raise ValueError(f"n_elements must be >= 1, got {n_elements}")
    out = _gain_factor_from_sines(np.sin(theta_rad), np.sin(boresight_rad), n_elements)
    return float(out) if out.ndim == 0 else out


def path_loss_linear(model: PathLossModel, d_m):
    """Linear (unitless) path loss at 3D distance ``d_m``."""
    d = np.asarray(d_m, dtype=float)
    if isinstance(model, DistancePowerLaw):
        if np.any(d < 0.0):
            raise ValueError("d_m must be >= 0")
        out = 1.0 + d**model.gamma
    elif isinstance(model, CloseInReference):
        if np.any(d < 1.0):
            raise ValueError("close-in model needs d_m >= 1 (below reference distance)")
        pl_db = 32.4 + 21.0 * np.log10(d) + 20.0 * math.log10(model.fc_ghz)
        out = 10.0 ** (pl_db / 10.0)
    else:
        raise TypeError(f"unknown path loss model: {model!r}")
    return float(out) if np.isscalar(d_m) else out


def _gain_from_sines(alpha_sq, sin_theta, pl_linear, sin_boresight, n_elements):
    f = _gain_factor_from_sines(sin_theta, sin_boresight, n_elements)
    return alpha_sq * n_elements * f / pl_linear


def gain_from_components(alpha_sq, theta_rad, pl_linear, boresight_rad, n_elements):
    """Effective power gain |alpha|^2 * n * F(theta) / PL from precomputed parts."""
    return _gain_from_sines(alpha_sq, np.sin(theta_rad), pl_linear, np.sin(boresight_rad), n_elements)


def effective_gain(user: UserSample, array: ArrayConfig, model: PathLossModel, h_m: float) -> float:
    """Effective channel power gain of one user; fills the user's derived fields."""
    theta = np.arctan(user.r_m / h_m)
    d = np.sqrt(h_m * h_m + user.r_m * user.r_m)
    pl = path_loss_linear(model, float(d))
    user.theta_rad = float(theta)
    user.d_m = float(d)
    user.pl_linear = float(pl)
    alpha_sq = user.alpha.real**2 + user.alpha.imag**2
    return float(gain_from_components(alpha_sq, theta, pl, array.boresight_rad, array.n_elements))
