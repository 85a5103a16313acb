"""Ground/beam geometry for a UAV base station hovering over an annular user region.

All angles are in radians and all distances in metres.  The departure angle of
a ground point at planar radius ``r`` seen from altitude ``h`` is measured from
nadir (straight down = 0), so ``theta = arctan(r / h)`` and ``sin(theta)`` stays
in ``[0, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "UserRegion",
    "BeamGeometry",
    "RadiatedInterval",
    "elevation_angle",
    "required_vertical_angle",
    "boresight_bounds",
    "radiated_interval",
    "coverage_fraction",
]


@dataclass(frozen=True)
class UserRegion:
    """Annular sector where ground users live.

    ``l1_m == l2_m`` is tolerated as a degenerate pinpoint region; it is useful
    for placing a user at an exact radius in validation runs.
    """

    l1_m: float             # inner radius
    l2_m: float             # outer radius
    half_azimuth_rad: float  # half opening angle of the sector

    def __post_init__(self):
        if not (0.0 <= self.l1_m <= self.l2_m) or not math.isfinite(self.l2_m):
            raise ValueError(f"need 0 <= l1_m <= l2_m < inf, got l1_m={self.l1_m}, l2_m={self.l2_m}")
        if not (0.0 < self.half_azimuth_rad < math.pi):
            raise ValueError(f"half_azimuth_rad must be in (0, pi), got {self.half_azimuth_rad}")

    @property
    def area_m2(self) -> float:
        """Sector area, (l2^2 - l1^2) * half_azimuth."""
        return (self.l2_m**2 - self.l1_m**2) * self.half_azimuth_rad


@dataclass(frozen=True)
class BeamGeometry:
    """A downward-tilted beam: altitude, boresight ground distance, vertical beamwidth."""

    altitude_m: float
    boresight_distance_m: float
    vertical_beamwidth_rad: float

    def __post_init__(self):
        if not (self.altitude_m > 0.0 and math.isfinite(self.altitude_m)):
            raise ValueError(f"altitude_m must be positive and finite, got {self.altitude_m}")
        if not (self.boresight_distance_m >= 0.0):
            raise ValueError(f"boresight_distance_m must be >= 0, got {self.boresight_distance_m}")
        if not (0.0 < self.vertical_beamwidth_rad < math.pi):
            raise ValueError(
                f"vertical_beamwidth_rad must be in (0, pi), got {self.vertical_beamwidth_rad}"
            )


@dataclass(frozen=True)
class RadiatedInterval:
    """Radial footprint [ell1, ell2] of the beam on the ground.

    ``ell2_m`` is ``math.inf`` when the upper beam edge clears the horizon.
    """

    ell1_m: float
    ell2_m: float

    def __post_init__(self):
        if not (0.0 <= self.ell1_m <= self.ell2_m):
            raise ValueError(f"need 0 <= ell1_m <= ell2_m, got {self.ell1_m}, {self.ell2_m}")

    def contains(self, r_m):
        """Membership test, elementwise on arrays."""
        return (r_m >= self.ell1_m) & (r_m <= self.ell2_m)


def elevation_angle(r_m, h_m):
    """Departure angle from nadir for a ground point at planar radius ``r_m``.

    Accepts scalars or arrays in ``r_m``; strictly increasing in ``r_m``.
    """
    if not (np.isscalar(h_m) and math.isfinite(h_m) and h_m > 0):
        raise ValueError(f"h_m must be a positive finite scalar, got {h_m}")
    r = np.asarray(r_m, dtype=float)
    if not np.all(np.isfinite(r) & (r >= 0.0)):
        raise ValueError("r_m must be finite and >= 0")
    theta = np.arctan(r / h_m)
    return float(theta) if np.isscalar(r_m) else theta


def required_vertical_angle(h_m: float, region: UserRegion) -> float:
    """Minimal vertical beamwidth that covers the whole user region from altitude ``h_m``."""
    return elevation_angle(region.l2_m, h_m) - elevation_angle(region.l1_m, h_m)


def boresight_bounds(h_m: float, region: UserRegion, phi_e_rad: float):
    """Extreme boresight ground distances (d1, d2) that keep the footprint inside the region.

    At ``d1`` the footprint's inner edge touches ``l1``; at ``d2`` the outer edge
    touches ``l2``.  Returns ``None`` when the region is already fully coverable
    (``phi_r <= phi_e``), i.e. no scanning is needed.
    """
    if not (0.0 < phi_e_rad < math.pi):
        raise ValueError(f"phi_e_rad must be in (0, pi), got {phi_e_rad}")
    if required_vertical_angle(h_m, region) <= phi_e_rad:
        return None
    d1 = h_m * math.tan(elevation_angle(region.l1_m, h_m) + 0.5 * phi_e_rad)
    d2 = h_m * math.tan(elevation_angle(region.l2_m, h_m) - 0.5 * phi_e_rad)
    return d1, d2


def radiated_interval(beam: BeamGeometry) -> RadiatedInterval:
    """Ground footprint of the beam; the outer edge is +inf past the horizon."""
    psi = elevation_angle(beam.boresight_distance_m, beam.altitude_m)
    half = 0.5 * beam.vertical_beamwidth_rad
    ell1 = beam.altitude_m * math.tan(max(psi - half, 0.0))
    if psi + half < 0.5 * math.pi:
        ell2 = beam.altitude_m * math.tan(psi + half)
    else:
        ell2 = math.inf
    return RadiatedInterval(ell1, ell2)


def coverage_fraction(beam: BeamGeometry, region: UserRegion) -> float:
    """Fraction of the user-region area inside the beam footprint, in [0, 1]."""
    footprint = radiated_interval(beam)
    lo = max(footprint.ell1_m, region.l1_m)
    hi = min(footprint.ell2_m, region.l2_m)
    denom = region.l2_m**2 - region.l1_m**2
    if denom == 0.0:
        # pinpoint region: covered or not
        return 1.0 if footprint.contains(region.l1_m) else 0.0
    return max(hi**2 - lo**2, 0.0) / denom
