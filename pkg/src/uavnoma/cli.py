"""Command-line entry point: config parsing, experiment orchestration, CSV output.

Commands
--------
``sweep``     one CSV row per altitude (rates, outage probabilities, chosen boresight)
``coverage``  per-altitude required vertical angle and best-case radiated-area percentage
``scan``      boresight grid at one altitude, optimum flagged
``validate``  built-in oracle suite (closed-form outage, kernel mean, sampling moments)

Units at this boundary are human-facing: degrees, dBm, BPCU.  Internally the
package works in radians and linear milliwatts.  Exit codes: 0 success,
1 configuration/validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .channel import CloseInReference, DistancePowerLaw, array_gain_factor, path_loss_linear
from .geometry import BeamGeometry, UserRegion, boresight_bounds, coverage_fraction, radiated_interval, required_vertical_angle
from .montecarlo import (
    WORKERS_ENV_VAR,
    ScanNotNeededError,
    ScenarioConfig,
    altitude_sweep,
    estimate,
    optimize_boresight,
)
from .noma import NomaConfig, OmaDof, analytic_single_user_outage, epsilon
from .population import drop_rng, mean_user_count, sample_count, sample_positions

__all__ = ["ConfigError", "RunManifest", "load_scenario", "main"]

SWEEP_SCHEMA = "uavnoma.sweep.v1"
COVERAGE_SCHEMA = "uavnoma.coverage.v1"
SCAN_SCHEMA = "uavnoma.scan.v1"

SWEEP_COLUMNS = (
    "h_m,phi_r_deg,coverage_pct,d_star_m,"
    "noma_rate_bpcu,noma_rate_se,oma_rate_bpcu,oma_rate_se,"
    "p_out_noma_i,p_out_noma_j,p_out_oma_i,p_out_oma_j,"
    "p_out_noma_i_se,p_out_noma_j_se,p_out_oma_i_se,p_out_oma_j_se,drops"
)
COVERAGE_COLUMNS = "h_m,phi_r_deg,coverage_pct"
SCAN_COLUMNS = "d_m,noma_rate_bpcu,noma_rate_se,oma_rate_bpcu,oma_rate_se,is_d_star"


class ConfigError(ValueError):
    """Configuration problem; the message names the offending key."""


@dataclass
class RunManifest:
    """What a command is about to run; validated before any simulation starts."""

    command: str
    config_path: str | None
    out_path: str | None
    seed: int
    timestamp: str
    scenario: ScenarioConfig | None = None


def dbm_to_mw(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0)


# ----------------------------------------------------------------------------
# Config loading
# ----------------------------------------------------------------------------

_KNOWN_KEYS = {
    "l1_m", "l2_m", "delta_total_deg", "phi_e_deg", "lambda_per_m2",
    "n0_dbm", "ptx_dbm", "gamma", "fc_ghz", "m_elements",
    "beta_i_sq", "r_i_bpcu", "r_j_bpcu", "oma_dof", "fixed_k",
    "altitudes", "drops", "seed", "pl_model", "boresight_grid",
}


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config key '{key}': missing")
    return cfg[key]


def _number(cfg: dict, key: str, lo: float | None = None, hi: float | None = None) -> float:
    raw = _need(cfg, key)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"config key '{key}': expected a number, got {raw!r}")
    value = float(raw)
    if lo is not None and value < lo:
        raise ConfigError(f"config key '{key}': must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"config key '{key}': must be <= {hi}, got {value}")
    return value


def _integer(cfg: dict, key: str, lo: int | None = None) -> int:
    raw = _need(cfg, key)
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"config key '{key}': expected an integer, got {raw!r}")
    if lo is not None and raw < lo:
        raise ConfigError(f"config key '{key}': must be >= {lo}, got {raw}")
    return raw


def _altitudes(cfg: dict) -> tuple[float, ...]:
    raw = _need(cfg, "altitudes")
    if isinstance(raw, dict):
        extra = set(raw) - {"start", "stop", "step"}
        if extra:
            raise ConfigError(f"config key 'altitudes': unknown subkeys {sorted(extra)}")
        start = float(raw.get("start", 0.0))
        stop = float(raw.get("stop", 0.0))
        step = float(raw.get("step", 1.0))
        if step <= 0 or stop < start or start <= 0:
            raise ConfigError(
                f"config key 'altitudes': need 0 < start <= stop and step > 0, got {raw!r}"
            )
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + k * step for k in range(n))
    if isinstance(raw, list) and raw and all(isinstance(v, (int, float)) for v in raw):
        values = tuple(float(v) for v in raw)
        if any(v <= 0 for v in values):
            raise ConfigError("config key 'altitudes': all altitudes must be > 0")
        return values
    raise ConfigError(
        "config key 'altitudes': expected a nonempty number list or {start, stop, step}"
    )


def load_scenario(path: str) -> ScenarioConfig:
    """Parse and validate a TOML scenario file."""
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config '{path}': {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config '{path}' is not valid TOML: {exc}") from exc

    unknown = set(cfg) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"config key '{sorted(unknown)[0]}': unknown key")

    l1 = _number(cfg, "l1_m", lo=0.0)
    l2 = _number(cfg, "l2_m", lo=0.0)
    if l2 < l1:
        raise ConfigError(f"config key 'l2_m': must be >= l1_m ({l1}), got {l2}")
    delta_total_deg = _number(cfg, "delta_total_deg")
    if not (0.0 < delta_total_deg < 360.0):
        raise ConfigError(f"config key 'delta_total_deg': must be in (0, 360), got {delta_total_deg}")
    phi_e_deg = _number(cfg, "phi_e_deg")
    if not (0.0 < phi_e_deg < 180.0):
        raise ConfigError(f"config key 'phi_e_deg': must be in (0, 180), got {phi_e_deg}")
    lam = _number(cfg, "lambda_per_m2")
    if lam <= 0:
        raise ConfigError(f"config key 'lambda_per_m2': must be > 0, got {lam}")

    pl_model = _need(cfg, "pl_model")
    if pl_model == "distance_power":
        gamma = _number(cfg, "gamma") if "gamma" in cfg else 2.0
        if gamma <= 0:
            raise ConfigError(f"config key 'gamma': must be > 0, got {gamma}")
        path_loss = DistancePowerLaw(gamma=gamma)
    elif pl_model == "close_in":
        fc = _number(cfg, "fc_ghz") if "fc_ghz" in cfg else 30.0
        if fc <= 0:
            raise ConfigError(f"config key 'fc_ghz': must be > 0, got {fc}")
        path_loss = CloseInReference(fc_ghz=fc)
    else:
        raise ConfigError(
            f"config key 'pl_model': expected 'distance_power' or 'close_in', got {pl_model!r}"
        )

    beta_i_sq = _number(cfg, "beta_i_sq")
    if not (0.5 <= beta_i_sq < 1.0):
        raise ConfigError(f"config key 'beta_i_sq': must be in [0.5, 1), got {beta_i_sq}")
    oma_dof_raw = cfg.get("oma_dof", "half")
    try:
        oma_dof = OmaDof(oma_dof_raw)
    except ValueError:
        raise ConfigError(
            f"config key 'oma_dof': expected 'half' or 'one_over_k', got {oma_dof_raw!r}"
        ) from None

    noma = NomaConfig(
        beta_i_sq=beta_i_sq,
        beta_j_sq=1.0 - beta_i_sq,
        r_i_bpcu=_number(cfg, "r_i_bpcu"),
        r_j_bpcu=_number(cfg, "r_j_bpcu"),
        ptx_mw=dbm_to_mw(_number(cfg, "ptx_dbm")),
        n0_mw=dbm_to_mw(_number(cfg, "n0_dbm")),
        oma_dof=oma_dof,
    )

    fixed_k = _integer(cfg, "fixed_k", lo=0) if "fixed_k" in cfg else None
    try:
        return ScenarioConfig(
            region=UserRegion(l1, l2, math.radians(delta_total_deg) / 2.0),
            density_per_m2=lam,
            n_elements=_integer(cfg, "m_elements", lo=1),
            phi_e_rad=math.radians(phi_e_deg),
            path_loss=path_loss,
            noma=noma,
            altitudes_m=_altitudes(cfg),
            fixed_user_count=fixed_k,
            boresight_grid_n=_integer(cfg, "boresight_grid", lo=2) if "boresight_grid" in cfg else 25,
            drops=_integer(cfg, "drops", lo=1),
            seed=_integer(cfg, "seed", lo=0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ----------------------------------------------------------------------------
# CSV output (deterministic byte-for-byte: repr of python floats)
# ----------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, schema: str, header: str, rows) -> None:
    lines = [f"# schema={schema}", header]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _sweep_csv_rows(rows):
    for row in rows:
        e = row.est
        yield (
            row.h_m, math.degrees(row.phi_r_rad), 100.0 * row.coverage, row.d_star_m,
            e.noma_rate, e.noma_rate_se, e.oma_rate, e.oma_rate_se,
            e.p_noma_i, e.p_noma_j, e.p_oma_i, e.p_oma_j,
            e.p_noma_i_se, e.p_noma_j_se, e.p_oma_i_se, e.p_oma_j_se,
            e.drops,
        )


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def cmd_sweep(scenario: ScenarioConfig, out_path: str, workers: int | None = None) -> None:
    rows = altitude_sweep(scenario, workers=workers)
    _write_csv(out_path, SWEEP_SCHEMA, SWEEP_COLUMNS, _sweep_csv_rows(rows))


def best_coverage_fraction(scenario: ScenarioConfig, h_m: float) -> float:
    """Largest radiated-area fraction over the admissible boresight interval."""
    bounds = boresight_bounds(h_m, scenario.region, scenario.phi_e_rad)
    if bounds is None:
        return 1.0
    d_grid = np.linspace(bounds[0], bounds[1], scenario.boresight_grid_n)
    return max(
        coverage_fraction(BeamGeometry(h_m, float(d), scenario.phi_e_rad), scenario.region)
        for d in d_grid
    )


def cmd_coverage(scenario: ScenarioConfig, out_path: str) -> None:
    rows = []
    for h in scenario.altitudes_m:
        phi_r = required_vertical_angle(h, scenario.region)
        pct = 100.0 * best_coverage_fraction(scenario, h)
        rows.append((h, math.degrees(phi_r), pct))
    _write_csv(out_path, COVERAGE_SCHEMA, COVERAGE_COLUMNS, rows)


def cmd_scan(scenario: ScenarioConfig, h_m: float, out_path: str) -> None:
    scan = optimize_boresight(scenario, h_m)
    rows = []
    for n, d in enumerate(scan.d_grid_m):
        e = scan.estimates[n]
        rows.append((float(d), e.noma_rate, e.noma_rate_se, e.oma_rate, e.oma_rate_se,
                     n == scan.best_index))
    _write_csv(out_path, SCAN_SCHEMA, SCAN_COLUMNS, rows)


# ----------------------------------------------------------------------------
# validate: built-in oracle suite
# ----------------------------------------------------------------------------


def _validation_checks(seed: int):
    """Yield (name, measured, expected, tolerance) for each built-in property."""
    rng = np.random.default_rng(seed)

    # closed-form single-user outage vs the Monte Carlo pipeline
    region = UserRegion(40.0, 40.0, math.radians(0.2))
    for trial in range(3):
        h = float(rng.uniform(30.0, 120.0))
        m_elements = 10
        pl = path_loss_linear(DistancePowerLaw(2.0), math.sqrt(h * h + 40.0 * 40.0))
        c = m_elements * 1.0 / pl  # boresight on the user, so the array factor is 1
        eps = epsilon(0.5)
        n0_mw = dbm_to_mw(-35.0)
        ptx_mw = eps * n0_mw / (c * float(rng.uniform(0.3, 1.5)))
        scenario = ScenarioConfig(
            region=region,
            density_per_m2=1.0,
            n_elements=m_elements,
            phi_e_rad=math.radians(28.0),
            path_loss=DistancePowerLaw(2.0),
            noma=NomaConfig(0.75, 0.25, 0.5, 6.0, ptx_mw, n0_mw),
            altitudes_m=(h,),
            fixed_user_count=1,
            drops=20_000,
            seed=seed + trial,
        )
        est = estimate(scenario, h)
        expected = analytic_single_user_outage(c, eps, ptx_mw, n0_mw)
        se = math.sqrt(max(expected * (1.0 - expected), 1e-12) / scenario.drops)
        yield (f"single-user outage vs closed form #{trial + 1}", est.p_noma_i, expected, 4.0 * se)

    # beam-pattern energy: mean of the gain factor over offsets is 1/M
    for m in (4, 10, 64):
        x = rng.uniform(-1.0, 1.0, 200_000)
        theta = np.arcsin(np.clip(-x, -1.0, 1.0))  # sin(0) - sin(theta) = x
        f = array_gain_factor(theta, 0.0, m)
        measured = float(np.mean(f))
        se = float(np.std(f, ddof=1) / math.sqrt(f.size))
        yield (f"array factor mean = 1/M (M={m})", measured, 1.0 / m, 4.0 * se)

    # Poisson count moment
    region_t1 = UserRegion(25.0, 100.0, math.radians(0.2))
    mu = mean_user_count(region_t1, 1.0)
    n = 100_000
    counts = np.array([
        sample_count(mu, drop_rng(seed, d)) for d in range(n)
    ], dtype=float)
    yield ("poisson count mean", float(np.mean(counts)), mu, 4.0 * math.sqrt(mu / n))

    # area-uniform radius moment
    r, _, _ = sample_positions(region_t1, 200_000, np.random.default_rng(seed + 99))
    expected_r2 = (region_t1.l1_m**2 + region_t1.l2_m**2) / 2.0
    se_r2 = float(np.std(r**2, ddof=1) / math.sqrt(r.size))
    yield ("area-uniform E[r^2]", float(np.mean(r**2)), expected_r2, 4.0 * se_r2)

    # footprint round trips at the admissible boresight extremes
    for h in (30.0, 60.0, 100.0):
        bounds = boresight_bounds(h, region_t1, math.radians(28.0))
        d1, d2 = bounds
        inner = radiated_interval(BeamGeometry(h, d1, math.radians(28.0))).ell1_m
        outer = radiated_interval(BeamGeometry(h, d2, math.radians(28.0))).ell2_m
        yield (f"footprint inner edge at d1 (h={h:g})", inner, region_t1.l1_m, 1e-9 * region_t1.l1_m)
        yield (f"footprint outer edge at d2 (h={h:g})", outer, region_t1.l2_m, 1e-9 * region_t1.l2_m)


def cmd_validate(seed: int = 2024) -> int:
    failures = 0
    for name, measured, expected, tol in _validation_checks(seed):
        ok = abs(measured - expected) <= tol
        failures += 0 if ok else 1
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: measured={measured:.6g} expected={expected:.6g} tol={tol:.3g}")
    print(f"validate: {failures} failure(s)")
    return 0 if failures == 0 else 1


# ----------------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavnoma",
        description="Monte Carlo simulator for two-user downlink NOMA from a UAV base station",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="altitude sweep to CSV")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--workers", type=int, default=None,
                         help=f"worker processes (default 1; env {WORKERS_ENV_VAR} overrides)")

    p_cov = sub.add_parser("coverage", help="required vertical angle and radiated-area percentage")
    p_cov.add_argument("--config", required=True)
    p_cov.add_argument("--out", required=True)

    p_scan = sub.add_parser("scan", help="boresight grid at one altitude")
    p_scan.add_argument("--config", required=True)
    p_scan.add_argument("--altitude", type=float, required=True, help="altitude in metres")
    p_scan.add_argument("--out", required=True)

    p_val = sub.add_parser("validate", help="run the built-in oracle suite")
    p_val.add_argument("--seed", type=int, default=2024)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            manifest = RunManifest("validate", None, None, args.seed,
                                   datetime.now(timezone.utc).isoformat())
            print(f"uavnoma validate (seed={manifest.seed})", file=sys.stderr)
            return cmd_validate(args.seed)

        scenario = load_scenario(args.config)
        manifest = RunManifest(args.command, args.config, args.out, scenario.seed,
                               datetime.now(timezone.utc).isoformat(), scenario)
        print(
            f"uavnoma {manifest.command}: config={manifest.config_path} out={manifest.out_path} "
            f"seed={manifest.seed} at {manifest.timestamp}",
            file=sys.stderr,
        )
        if args.command == "sweep":
            cmd_sweep(scenario, args.out, workers=args.workers)
        elif args.command == "coverage":
            cmd_coverage(scenario, args.out)
        elif args.command == "scan":
            cmd_scan(scenario, args.altitude, args.out)
        else:  # pragma: no cover - argparse enforces the choices
            raise RuntimeError(f"unknown command {args.command}")
        return 0
    except (ConfigError, ScanNotNeededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
