"""Two-user power-domain superposition outcomes: ordering, SIC, outage, realized rates.

The weak user (lowest effective gain, index i) gets the larger power share and
decodes its own message treating the strong user's as noise.  The strong user
(highest gain, index j) must first decode-and-cancel the weak user's message,
then decode its own interference-free.  OMA serves the same pair in orthogonal
slots with a degrees-of-freedom penalty.

When the beam footprint covers only part of the user region, the selected pair
falls into one of three situations: both users inside the footprint (normal
operation), exactly one inside (that user is served alone at full power, the
other is in complete outage, and OMA equals the superposition scheme for the
served user), or neither inside (no transmission, both in outage).

All outcome functions accept scalars or aligned numpy arrays and evaluate the
decision inequalities directly on SINRs, so the same code path serves both the
single-drop API and the vectorized Monte Carlo engine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import RadiatedInterval
from .population import DropPopulation

__all__ = [
    "OmaDof",
    "DropCase",
    "NomaConfig",
    "DropResult",
    "order_and_select",
    "epsilon",
    "noma_pair_outcome",
    "oma_pair_outcome",
    "single_user_outcome",
    "drop_outcome",
    "analytic_single_user_outage",
]


class OmaDof(str, enum.Enum):
    """Degrees-of-freedom penalty for OMA: fixed 1/2 (two served users) or 1/K."""

    HALF = "half"
    ONE_OVER_K = "one_over_k"


class DropCase(str, enum.Enum):
    NO_USERS = "no_users"
    SINGLE = "single"
    BOTH_IN = "both_in"
    ONE_IN = "one_in"
    NONE_IN = "none_in"


@dataclass(frozen=True)
class NomaConfig:
    """Pair targets, power split, transmit/noise powers (linear mW)."""

    beta_i_sq: float        # weak-user power fraction
    beta_j_sq: float        # strong-user power fraction
    r_i_bpcu: float         # weak-user target rate
    r_j_bpcu: float         # strong-user target rate
    ptx_mw: float
    n0_mw: float
    oma_dof: OmaDof = OmaDof.HALF

    def __post_init__(self):
        if not math.isclose(self.beta_i_sq + self.beta_j_sq, 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ValueError(
                f"power fractions must sum to 1, got {self.beta_i_sq} + {self.beta_j_sq}"
            )
        if self.beta_i_sq < self.beta_j_sq:
            raise ValueError("weak user must get the larger power share (beta_i_sq >= beta_j_sq)")
        if not (self.ptx_mw > 0.0 and self.n0_mw > 0.0):
            raise ValueError("ptx_mw and n0_mw must be > 0")
        if not (self.r_i_bpcu > 0.0 and self.r_j_bpcu > 0.0):
            raise ValueError("target rates must be > 0")

    @property
    def epsilon_i(self) -> float:
        return epsilon(self.r_i_bpcu)

    @property
    def epsilon_j(self) -> float:
        return epsilon(self.r_j_bpcu)


@dataclass
class DropResult:
    """Outcome of one Monte Carlo drop.

    Outage flags for a user that does not exist in the drop (j when k < 2,
    both when k = 0) are reported as True: a non-existent user is never served.
    Realized rates are the sum of (1 - outage) * target over the pair.
    """

    k: int
    case: DropCase
    noma_outage_i: bool
    noma_outage_j: bool
    oma_outage_i: bool
    oma_outage_j: bool
    noma_rate_bpcu: float
    oma_rate_bpcu: float


def order_and_select(gains) -> tuple[int, int]:
    """Indices of the weakest and strongest effective gains.

    Ties break by index: lowest index wins the minimum, highest the maximum
    (a probability-zero event under continuous fading).  A single-element list
    returns the same index twice.
    """
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gains must be a nonempty 1-D sequence")
    i = int(np.argmin(g))
    j = int(g.size - 1 - np.argmax(g[::-1]))
    return i, j


def epsilon(rate_bpcu):
    """SINR threshold for a target rate: 2^rate - 1."""
    if np.any(np.asarray(rate_bpcu) < 0.0):
        raise ValueError("rate_bpcu must be >= 0")
    return 2.0**rate_bpcu - 1.0


def noma_pair_outcome(g_i, g_j, cfg: NomaConfig):
    """Outage flags for a served pair under superposition with SIC.

    Positional contract: ``g_i`` is the user holding the weak role and ``g_j``
    the strong role; callers pass them from ordering.  The weak user is in
    outage when its own SINR (strong user's signal as noise) misses its
    threshold.  The strong user is in outage unless it can both decode the weak
    message (same threshold, interference-limited) and its own (noise-limited).
    """
    scalar = np.isscalar(g_i) and np.isscalar(g_j)
    gi = np.asarray(g_i, dtype=float)
    gj = np.asarray(g_j, dtype=float)
    p, n0 = cfg.ptx_mw, cfg.n0_mw
    eps_i, eps_j = cfg.epsilon_i, cfg.epsilon_j
    sinr_i = p * gi * cfg.beta_i_sq / (p * gi * cfg.beta_j_sq + n0)
    outage_i = sinr_i < eps_i
    sinr_i_at_j = p * gj * cfg.beta_i_sq / (p * gj * cfg.beta_j_sq + n0)
    sinr_j = p * gj * cfg.beta_j_sq / n0
    outage_j = ~((sinr_i_at_j >= eps_i) & (sinr_j >= eps_j))
    if scalar:
        return bool(outage_i), bool(outage_j)
    return outage_i, outage_j


def _oma_dof(cfg: NomaConfig, n_users):
    if cfg.oma_dof is OmaDof.HALF:
        return 0.5
    return 1.0 / np.asarray(n_users, dtype=float)


def oma_pair_outcome(g_i, g_j, cfg: NomaConfig, n_users=2):
    """Outage flags for the pair under orthogonal access with a DoF penalty.

    ``n_users`` is the drop's user count; it only matters under the
    ``ONE_OVER_K`` penalty variant.
    """
    dof = _oma_dof(cfg, n_users)
    snr_i = cfg.ptx_mw * np.asarray(g_i, dtype=float) / cfg.n0_mw
    snr_j = cfg.ptx_mw * np.asarray(g_j, dtype=float) / cfg.n0_mw
    outage_i = dof * np.log2(1.0 + snr_i) < cfg.r_i_bpcu
    outage_j = dof * np.log2(1.0 + snr_j) < cfg.r_j_bpcu
    if np.isscalar(g_i) and np.isscalar(g_j):
        return bool(outage_i), bool(outage_j)
    return outage_i, outage_j


def single_user_outcome(g, target_rate_bpcu, cfg: NomaConfig):
    """Outage flag for a user served alone at full power (no DoF loss)."""
    snr = cfg.ptx_mw * np.asarray(g, dtype=float) / cfg.n0_mw
    outage = np.log2(1.0 + snr) < target_rate_bpcu
    return bool(outage) if np.isscalar(g) else outage


def drop_outcome(
    population: DropPopulation,
    gains,
    radiated: RadiatedInterval | None,
    cfg: NomaConfig,
) -> DropResult:
    """Per-drop outage flags and realized rates for both schemes.

    ``gains`` must hold the effective gains of every user in the region, in
    population order; the pair is selected over all of them.  ``radiated`` is
    the beam footprint for the membership test, or ``None`` when the beam
    covers the whole region.
    """
    g = np.asarray(gains, dtype=float)
    if g.shape != (population.count,):
        raise ValueError(f"gains shape {g.shape} does not match population of {population.count}")
    k = population.count

    if k == 0:
        return DropResult(0, DropCase.NO_USERS, True, True, True, True, 0.0, 0.0)

    if k == 1:
        flag = single_user_outcome(float(g[0]), cfg.r_i_bpcu, cfg)
        rate = (not flag) * cfg.r_i_bpcu
        return DropResult(1, DropCase.SINGLE, flag, True, flag, True, rate, rate)

    i, j = order_and_select(g)
    g_i, g_j = float(g[i]), float(g[j])
    if radiated is None:
        i_in = j_in = True
    else:
        i_in = bool(radiated.contains(population.users[i].r_m))
        j_in = bool(radiated.contains(population.users[j].r_m))

    noma_i = noma_j = oma_i = oma_j = True
    if i_in and j_in:
        case = DropCase.BOTH_IN
        noma_i, noma_j = noma_pair_outcome(g_i, g_j, cfg)
        oma_i, oma_j = oma_pair_outcome(g_i, g_j, cfg, k)
    elif i_in:
        case = DropCase.ONE_IN
        noma_i = oma_i = single_user_outcome(g_i, cfg.r_i_bpcu, cfg)
    elif j_in:
        case = DropCase.ONE_IN
        noma_j = oma_j = single_user_outcome(g_j, cfg.r_j_bpcu, cfg)
    else:
        case = DropCase.NONE_IN

    noma_rate = (not noma_i) * cfg.r_i_bpcu + (not noma_j) * cfg.r_j_bpcu
    oma_rate = (not oma_i) * cfg.r_i_bpcu + (not oma_j) * cfg.r_j_bpcu
    return DropResult(k, case, noma_i, noma_j, oma_i, oma_j, noma_rate, oma_rate)


def analytic_single_user_outage(c: float, eps: float, ptx_mw: float, n0_mw: float) -> float:
    """Closed-form outage probability of a fixed-position single user.

    With the deterministic gain factor ``c`` (so g = |alpha|^2 * c) and unit-mean
    exponential |alpha|^2, the full-power outage event has probability
    1 - exp(-eps * n0 / (ptx * c)).  Used as an independent oracle for the
    Monte Carlo pipeline.
    """
    if not (c > 0.0):
        raise ValueError(f"c must be > 0, got {c}")
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    return 1.0 - math.exp(-eps * n0_mw / (ptx_mw * c))
