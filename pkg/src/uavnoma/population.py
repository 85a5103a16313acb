"""Random user drops: Poisson counts, area-uniform placement, Rayleigh-type fading.

Seeding contract
----------------
Every Monte Carlo drop owns an independent substream derived from the 64-bit
master seed and the drop index alone:

    Philox4x64 keyed by the master seed, with the 256-bit counter started at
    ``drop_index << 128`` (each drop owns a disjoint block of 2**128 counters).

Within a drop the draws happen blockwise, in this order:

    1. user count K          (one Poisson draw; skipped when the count is fixed)
    2. K uniforms            -> radii, r = sqrt(l1^2 + u * (l2^2 - l1^2))
    3. K uniforms            -> azimuths on [-half_azimuth, +half_azimuth]
    4. 2K standard normals   -> fading, alpha = (z[:K] + 1j * z[K:]) / sqrt(2)

Because the substream depends only on (seed, drop index), sequential and
parallel runs see identical drops, and a drop's users are common random
numbers across boresight grid points and altitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import UserRegion

__all__ = [
    "UserSample",
    "DropPopulation",
    "mean_user_count",
    "drop_rng",
    "sample_count",
    "sample_positions",
    "sample_user",
    "sample_drop",
]

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass
class UserSample:
    """One ground user: sampled position and fading, plus derived link quantities.

    ``theta_rad`` and ``d_m`` are filled from the altitude at sampling time;
    ``pl_linear`` stays ``None`` until a path-loss model is applied.
    """

    r_m: float
    psi_rad: float
    alpha: complex
    theta_rad: float | None = None
    d_m: float | None = None
    pl_linear: float | None = None


@dataclass
class DropPopulation:
    users: list[UserSample] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.users)


def mean_user_count(region: UserRegion, density_per_m2: float) -> float:
    """Mean user count of the homogeneous PPP over the region: area * density."""
    if not (density_per_m2 > 0.0 and math.isfinite(density_per_m2)):
        raise ValueError(f"density_per_m2 must be positive and finite, got {density_per_m2}")
    return region.area_m2 * density_per_m2


def drop_rng(master_seed: int, drop_index: int) -> np.random.Generator:
    """Independent substream for one drop (see module docstring for the derivation)."""
    if drop_index < 0:
        raise ValueError(f"drop_index must be >= 0, got {drop_index}")
    return np.random.Generator(np.random.Philox(key=master_seed, counter=drop_index << 128))


def sample_count(mu: float, rng: np.random.Generator, fixed_user_count: int | None = None) -> int:
    """Poisson user count with mean ``mu``, or the fixed override when set."""
    if fixed_user_count is not None:
        if fixed_user_count < 0:
            raise ValueError(f"fixed_user_count must be >= 0, got {fixed_user_count}")
        return int(fixed_user_count)
    if mu < 0.0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    if mu == 0.0:
        return 0
    return int(rng.poisson(mu))


def sample_positions(region: UserRegion, count: int, rng: np.random.Generator):
    """Draw one drop's user block: radii, azimuths, complex fading.

    Radii are area-uniform over the annular sector (uniform in r^2), azimuths
    uniform over the sector opening, and fading is circularly symmetric complex
    Gaussian with unit mean power (|alpha|^2 ~ Exp(1)).
    """
    u = rng.random(count)
    r = np.sqrt(region.l1_m**2 + u * (region.l2_m**2 - region.l1_m**2))
    psi = rng.uniform(-region.half_azimuth_rad, region.half_azimuth_rad, count)
    z = rng.standard_normal(2 * count)
    alpha = (z[:count] + 1j * z[count:]) * _SQRT_HALF
    return r, psi, alpha


def sample_user(region: UserRegion, h_m: float, rng: np.random.Generator) -> UserSample:
    """Sample a single user and fill its altitude-derived geometry."""
    r, psi, alpha = sample_positions(region, 1, rng)
    return UserSample(
        r_m=float(r[0]),
        psi_rad=float(psi[0]),
        alpha=complex(alpha[0]),
        theta_rad=math.atan(float(r[0]) / h_m),
        d_m=math.sqrt(h_m * h_m + float(r[0]) * float(r[0])),
    )


def sample_drop(
    region: UserRegion,
    mu: float,
    rng: np.random.Generator,
    fixed_user_count: int | None = None,
    h_m: float | None = None,
) -> DropPopulation:
    """Sample a full drop: count, then the user block in the documented order."""
    k = sample_count(mu, rng, fixed_user_count)
    r, psi, alpha = sample_positions(region, k, rng)
    users = []
    for n in range(k):
        theta = math.atan(float(r[n]) / h_m) if h_m is not None else None
        d = math.sqrt(h_m * h_m + float(r[n]) ** 2) if h_m is not None else None
        users.append(
            UserSample(
                r_m=float(r[n]),
                psi_rad=float(psi[n]),
                alpha=complex(alpha[n]),
                theta_rad=theta,
                d_m=d,
            )
        )
    return DropPopulation(users=users)
