"""Monte Carlo engine: drop pipeline, metric estimation, boresight search, altitude sweeps.

Determinism
-----------
Drop ``d`` of a scenario always consumes the substream derived from
``(seed, d)`` (see :mod:`uavnoma.population`), regardless of altitude,
boresight point, or execution order.  Consequences:

* a boresight grid at one altitude evaluates every candidate on the same user
  and fading realizations (common random numbers), so the estimated rate is a
  deterministic function of geometry given the seed;
* sequential and parallel sweeps produce identical rows, bit for bit;
* reductions use numpy's pairwise summation over drop-index-ordered arrays,
  which is itself deterministic for a fixed drop count.

The vectorized batch path and the single-drop path (:func:`run_drop`) share
the channel and outcome code, so they agree drop for drop.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import PathLossModel, _gain_from_sines, path_loss_linear
from .geometry import (
    BeamGeometry,
    RadiatedInterval,
    UserRegion,
    boresight_bounds,
    coverage_fraction,
    elevation_angle,
    radiated_interval,
    required_vertical_angle,
)
from .noma import (
    DropResult,
    NomaConfig,
    drop_outcome,
    noma_pair_outcome,
    oma_pair_outcome,
    single_user_outcome,
)
from .population import drop_rng, mean_user_count, sample_count, sample_drop, sample_positions

__all__ = [
    "ScenarioConfig",
    "PopulationBatch",
    "DropOutcomes",
    "PointEstimate",
    "BoresightScan",
    "SweepRow",
    "ScanNotNeededError",
    "sample_batch",
    "run_drop",
    "evaluate_drops",
    "estimate",
    "optimize_boresight",
    "altitude_sweep",
    "WORKERS_ENV_VAR",
]

WORKERS_ENV_VAR = "UAVNOMA_WORKERS"


class ScanNotNeededError(ValueError):
    """Raised when a boresight scan is requested but the beam already covers the region."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Full experiment description; everything the engine needs for one run."""

    region: UserRegion
    density_per_m2: float
    n_elements: int
    phi_e_rad: float
    path_loss: PathLossModel
    noma: NomaConfig
    altitudes_m: tuple[float, ...]
    fixed_user_count: int | None = None
    boresight_grid_n: int = 25
    drops: int = 20_000
    seed: int = 1

    def __post_init__(self):
        if self.drops < 1:
            raise ValueError(f"drops must be >= 1, got {self.drops}")
        if self.boresight_grid_n < 2:
            raise ValueError(f"boresight_grid_n must be >= 2, got {self.boresight_grid_n}")
        if len(self.altitudes_m) == 0:
            raise ValueError("altitudes_m must be nonempty")
        if any(not (h > 0.0) for h in self.altitudes_m):
            raise ValueError("altitudes_m must all be > 0")
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {self.n_elements}")
        if not (0.0 < self.phi_e_rad < math.pi):
            raise ValueError(f"phi_e_rad must be in (0, pi), got {self.phi_e_rad}")
        if not (self.density_per_m2 > 0.0):
            raise ValueError(f"density_per_m2 must be > 0, got {self.density_per_m2}")
        if self.fixed_user_count is not None and self.fixed_user_count < 0:
            raise ValueError(f"fixed_user_count must be >= 0, got {self.fixed_user_count}")

    @property
    def mean_count(self) -> float:
        return mean_user_count(self.region, self.density_per_m2)

    def covering_boresight_rad(self, h_m: float) -> float:
        """Beam departure angle that centers the footprint on the region (full coverage)."""
        return elevation_angle(self.region.l1_m, h_m) + 0.5 * required_vertical_angle(h_m, self.region)


@dataclass
class PopulationBatch:
    """Flat per-user arrays for ``n_drops`` drops, plus per-drop counts/offsets."""

    counts: np.ndarray   # (n_drops,) int64
    offsets: np.ndarray  # (n_drops + 1,) int64, offsets[d]:offsets[d+1] slices drop d
    r_m: np.ndarray      # flat float64
    psi_rad: np.ndarray  # flat float64
    alpha: np.ndarray    # flat complex128
    _alpha_sq: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_drops(self) -> int:
        return int(self.counts.size)

    @property
    def alpha_sq(self) -> np.ndarray:
        if self._alpha_sq is None:
            self._alpha_sq = self.alpha.real**2 + self.alpha.imag**2
        return self._alpha_sq


def sample_batch(scenario: ScenarioConfig, n_drops: int | None = None) -> PopulationBatch:
    """Sample drops ``0 .. n_drops-1`` from their per-drop substreams."""
    n = int(n_drops if n_drops is not None else scenario.drops)
    mu = scenario.mean_count
    counts = np.empty(n, dtype=np.int64)
    r_parts, psi_parts, alpha_parts = [], [], []
    for d in range(n):
        rng = drop_rng(scenario.seed, d)
        k = sample_count(mu, rng, scenario.fixed_user_count)
        counts[d] = k
        r, psi, alpha = sample_positions(scenario.region, k, rng)
        r_parts.append(r)
        psi_parts.append(psi)
        alpha_parts.append(alpha)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return PopulationBatch(
        counts=counts,
        offsets=offsets,
        r_m=np.concatenate(r_parts) if r_parts else np.empty(0),
        psi_rad=np.concatenate(psi_parts) if psi_parts else np.empty(0),
        alpha=np.concatenate(alpha_parts) if alpha_parts else np.empty(0, dtype=complex),
    )


# ----------------------------------------------------------------------------
# Per-point evaluation
# ----------------------------------------------------------------------------


@dataclass
class DropOutcomes:
    """Per-drop outcome arrays at one (altitude, boresight) point, drop-index ordered."""

    counts: np.ndarray
    noma_outage_i: np.ndarray
    noma_outage_j: np.ndarray
    oma_outage_i: np.ndarray
    oma_outage_j: np.ndarray
    noma_rate_bpcu: np.ndarray
    oma_rate_bpcu: np.ndarray


@dataclass
class PointEstimate:
    """Sample means and standard errors at one (altitude, boresight) point."""

    noma_rate: float
    noma_rate_se: float
    oma_rate: float
    oma_rate_se: float
    p_noma_i: float
    p_noma_j: float
    p_oma_i: float
    p_oma_j: float
    p_noma_i_se: float
    p_noma_j_se: float
    p_oma_i_se: float
    p_oma_j_se: float
    drops: int


class _AltitudeView:
    """Boresight-independent per-user terms at one altitude: sin(theta) and path loss."""

    def __init__(self, batch: PopulationBatch, h_m: float, model: PathLossModel):
        theta = np.arctan(batch.r_m / h_m)
        dist = np.sqrt(h_m * h_m + batch.r_m * batch.r_m)
        self.sin_theta = np.sin(theta)
        self.pl = path_loss_linear(model, dist) if dist.size else np.empty(0)


def _segmented_pair_select(gains: np.ndarray, counts: np.ndarray, offsets: np.ndarray):
    """Flat indices of each drop's min and max gain (ties: lowest / highest index).

    Returns index arrays of the batch's flat layout; entries for empty drops
    are 0 and must be masked by the caller.
    """
    n = counts.size
    total = gains.size
    idx_i = np.zeros(n, dtype=np.int64)
    idx_j = np.zeros(n, dtype=np.int64)
    nonempty = counts > 0
    if total == 0 or not np.any(nonempty):
        return idx_i, idx_j
    starts = offsets[:-1][nonempty]
    vmin = np.minimum.reduceat(gains, starts)
    vmax = np.maximum.reduceat(gains, starts)
    per_elem_min = np.repeat(vmin, counts[nonempty])
    per_elem_max = np.repeat(vmax, counts[nonempty])
    flat = np.arange(total, dtype=np.int64)
    cand_min = np.where(gains == per_elem_min, flat, total)
    cand_max = np.where(gains == per_elem_max, flat, -1)
    idx_i[nonempty] = np.minimum.reduceat(cand_min, starts)
    idx_j[nonempty] = np.maximum.reduceat(cand_max, starts)
    return idx_i, idx_j


def evaluate_drops(
    batch: PopulationBatch,
    scenario: ScenarioConfig,
    h_m: float,
    d_m: float | None = None,
    _view: _AltitudeView | None = None,
) -> DropOutcomes:
    """Vectorized per-drop outcomes at one altitude and boresight point.

    ``d_m=None`` means the beam is aimed to cover the whole region (no
    membership test); otherwise the footprint of the beam at boresight ground
    distance ``d_m`` decides which of the selected pair is actually served.
    """
    cfg = scenario.noma
    view = _view if _view is not None else _AltitudeView(batch, h_m, scenario.path_loss)
    if d_m is None:
        boresight = scenario.covering_boresight_rad(h_m)
        footprint: RadiatedInterval | None = None
    else:
        boresight = elevation_angle(d_m, h_m)
        footprint = radiated_interval(BeamGeometry(h_m, d_m, scenario.phi_e_rad))

    gains = _gain_from_sines(
        batch.alpha_sq, view.sin_theta, view.pl, np.sin(boresight), scenario.n_elements
    )

    n = batch.n_drops
    counts = batch.counts
    idx_i, idx_j = _segmented_pair_select(gains, counts, batch.offsets)
    has_any = counts >= 1
    g_i = np.where(has_any, gains[idx_i] if gains.size else 0.0, 0.0)
    g_j = np.where(has_any, gains[idx_j] if gains.size else 0.0, 0.0)
    if footprint is None:
        i_in = has_any.copy()
        j_in = has_any.copy()
    else:
        r_i = np.where(has_any, batch.r_m[idx_i] if gains.size else 0.0, 0.0)
        r_j = np.where(has_any, batch.r_m[idx_j] if gains.size else 0.0, 0.0)
        i_in = has_any & footprint.contains(r_i)
        j_in = has_any & footprint.contains(r_j)

    # start from complete outage; serve per case
    noma_i = np.ones(n, dtype=bool)
    noma_j = np.ones(n, dtype=bool)
    oma_i = np.ones(n, dtype=bool)
    oma_j = np.ones(n, dtype=bool)

    lone = counts == 1
    if np.any(lone):
        flag = single_user_outcome(g_i[lone], cfg.r_i_bpcu, cfg)
        noma_i[lone] = flag
        oma_i[lone] = flag

    pair = counts >= 2
    both_in = pair & i_in & j_in
    if np.any(both_in):
        n_i, n_j = noma_pair_outcome(g_i[both_in], g_j[both_in], cfg)
        noma_i[both_in] = n_i
        noma_j[both_in] = n_j
        o_i, o_j = oma_pair_outcome(g_i[both_in], g_j[both_in], cfg, counts[both_in])
        oma_i[both_in] = o_i
        oma_j[both_in] = o_j
    only_i = pair & i_in & ~j_in
    if np.any(only_i):
        flag = single_user_outcome(g_i[only_i], cfg.r_i_bpcu, cfg)
        noma_i[only_i] = flag
        oma_i[only_i] = flag
    only_j = pair & ~i_in & j_in
    if np.any(only_j):
        flag = single_user_outcome(g_j[only_j], cfg.r_j_bpcu, cfg)
        noma_j[only_j] = flag
        oma_j[only_j] = flag

    noma_rate = (~noma_i) * cfg.r_i_bpcu + (~noma_j) * cfg.r_j_bpcu
    oma_rate = (~oma_i) * cfg.r_i_bpcu + (~oma_j) * cfg.r_j_bpcu
    return DropOutcomes(counts, noma_i, noma_j, oma_i, oma_j, noma_rate, oma_rate)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    x = np.asarray(values, dtype=float)
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return mean, se


def reduce_outcomes(outcomes: DropOutcomes) -> PointEstimate:
    """Collapse per-drop outcomes into means and standard errors."""
    noma_rate, noma_rate_se = _mean_se(outcomes.noma_rate_bpcu)
    oma_rate, oma_rate_se = _mean_se(outcomes.oma_rate_bpcu)
    p_ni, p_ni_se = _mean_se(outcomes.noma_outage_i)
    p_nj, p_nj_se = _mean_se(outcomes.noma_outage_j)
    p_oi, p_oi_se = _mean_se(outcomes.oma_outage_i)
    p_oj, p_oj_se = _mean_se(outcomes.oma_outage_j)
    return PointEstimate(
        noma_rate, noma_rate_se, oma_rate, oma_rate_se,
        p_ni, p_nj, p_oi, p_oj,
        p_ni_se, p_nj_se, p_oi_se, p_oj_se,
        drops=int(outcomes.counts.size),
    )


def run_drop(
    scenario: ScenarioConfig, h_m: float, d_m: float | None, drop_index: int
) -> DropResult:
    """Single-drop reference path: sample, compute gains, resolve the outcome.

    Deterministic given (seed, drop_index); agrees with the batched engine.
    """
    rng = drop_rng(scenario.seed, drop_index)
    population = sample_drop(
        scenario.region, scenario.mean_count, rng, scenario.fixed_user_count, h_m=h_m
    )
    if d_m is None:
        boresight = scenario.covering_boresight_rad(h_m)
        footprint = None
    else:
        boresight = elevation_angle(d_m, h_m)
        footprint = radiated_interval(BeamGeometry(h_m, d_m, scenario.phi_e_rad))

    r = np.array([u.r_m for u in population.users])
    alpha = np.array([u.alpha for u in population.users], dtype=complex)
    theta = np.arctan(r / h_m)
    dist = np.sqrt(h_m * h_m + r * r)
    pl = path_loss_linear(scenario.path_loss, dist) if r.size else np.empty(0)
    alpha_sq = alpha.real**2 + alpha.imag**2
    gains = _gain_from_sines(
        alpha_sq, np.sin(theta), pl, np.sin(boresight), scenario.n_elements
    )
    for user, t, dd, p in zip(population.users, theta, dist, pl):
        user.theta_rad = float(t)
        user.d_m = float(dd)
        user.pl_linear = float(p)
    return drop_outcome(population, gains, footprint, scenario.noma)


def estimate(
    scenario: ScenarioConfig,
    h_m: float,
    d_m: float | None = None,
    n_drops: int | None = None,
    batch: PopulationBatch | None = None,
) -> PointEstimate:
    """Monte Carlo estimate of rates and outage probabilities at one point."""
    if batch is None:
        batch = sample_batch(scenario, n_drops)
    elif n_drops is not None and n_drops != batch.n_drops:
        raise ValueError(f"n_drops={n_drops} conflicts with batch of {batch.n_drops}")
    return reduce_outcomes(evaluate_drops(batch, scenario, h_m, d_m))


# ----------------------------------------------------------------------------
# Boresight optimization and altitude sweep
# ----------------------------------------------------------------------------


@dataclass
class BoresightScan:
    """Grid-search result over boresight ground distances [d1, d2]."""

    d_grid_m: np.ndarray
    estimates: list[PointEstimate]
    best_index: int

    @property
    def d_star_m(self) -> float:
        return float(self.d_grid_m[self.best_index])

    @property
    def best(self) -> PointEstimate:
        return self.estimates[self.best_index]


def optimize_boresight(
    scenario: ScenarioConfig,
    h_m: float,
    grid_n: int | None = None,
    batch: PopulationBatch | None = None,
) -> BoresightScan:
    """Grid search of the boresight point maximizing the estimated NOMA rate.

    All grid points are evaluated on the same drops (common random numbers);
    ties pick the smaller distance.  Raises :class:`ScanNotNeededError` when
    the region is already fully coverable at this altitude.
    """
    bounds = boresight_bounds(h_m, scenario.region, scenario.phi_e_rad)
    if bounds is None:
        raise ScanNotNeededError(f"no scan needed at h={h_m}: the beam covers the region")
    if batch is None:
        batch = sample_batch(scenario)
    n = int(grid_n if grid_n is not None else scenario.boresight_grid_n)
    if n < 2:
        raise ValueError(f"grid_n must be >= 2, got {n}")
    d_grid = np.linspace(bounds[0], bounds[1], n)
    view = _AltitudeView(batch, h_m, scenario.path_loss)
    estimates = [
        reduce_outcomes(evaluate_drops(batch, scenario, h_m, float(d), _view=view))
        for d in d_grid
    ]
    rates = np.array([e.noma_rate for e in estimates])
    best = int(np.argmax(rates))  # first maximum = smallest d on ties
    return BoresightScan(d_grid, estimates, best)


@dataclass
class SweepRow:
    """Aggregated metrics at one altitude (operating boresight already chosen)."""

    h_m: float
    phi_r_rad: float
    coverage: float
    d_star_m: float
    scanning: bool
    est: PointEstimate


def _sweep_one(scenario: ScenarioConfig, h_m: float, batch: PopulationBatch) -> SweepRow:
    phi_r = required_vertical_angle(h_m, scenario.region)
    if phi_r <= scenario.phi_e_rad:
        est = reduce_outcomes(evaluate_drops(batch, scenario, h_m, None))
        d_star = h_m * math.tan(scenario.covering_boresight_rad(h_m))
        return SweepRow(h_m, phi_r, 1.0, d_star, False, est)
    scan = optimize_boresight(scenario, h_m, batch=batch)
    beam = BeamGeometry(h_m, scan.d_star_m, scenario.phi_e_rad)
    cov = coverage_fraction(beam, scenario.region)
    return SweepRow(h_m, phi_r, cov, scan.d_star_m, True, scan.best)


# per-process batch cache so parallel workers sample each scenario once
_BATCH_CACHE: dict[tuple, PopulationBatch] = {}


def _batch_key(scenario: ScenarioConfig) -> tuple:
    return (
        scenario.seed,
        scenario.drops,
        scenario.fixed_user_count,
        scenario.density_per_m2,
        scenario.region.l1_m,
        scenario.region.l2_m,
        scenario.region.half_azimuth_rad,
    )


def _cached_batch(scenario: ScenarioConfig) -> PopulationBatch:
    key = _batch_key(scenario)
    if key not in _BATCH_CACHE:
        _BATCH_CACHE.clear()  # hold at most one batch; sweeps reuse it across altitudes
        _BATCH_CACHE[key] = sample_batch(scenario)
    return _BATCH_CACHE[key]


def _sweep_worker(args: tuple[ScenarioConfig, float]) -> SweepRow:
    scenario, h_m = args
    return _sweep_one(scenario, h_m, _cached_batch(scenario))


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else the environment override, else 1."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        return max(1, int(env))
    return 1


def altitude_sweep(scenario: ScenarioConfig, workers: int | None = None) -> list[SweepRow]:
    """One row per altitude: full-coverage estimate or boresight-optimized scan.

    Rows are deterministic functions of (scenario, seed); the worker count
    changes wall-clock time only, never the output.
    """
    n_workers = resolve_workers(workers)
    tasks = [(scenario, float(h)) for h in scenario.altitudes_m]
    if n_workers == 1 or len(tasks) == 1:
        batch = _cached_batch(scenario)
        return [_sweep_one(scenario, h, batch) for _, h in tasks]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_sweep_worker, tasks, chunksize=max(1, len(tasks) // (4 * n_workers))))
