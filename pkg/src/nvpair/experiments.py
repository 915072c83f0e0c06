"""Figure-level drivers: angle sweeps, zero-field scan, RWA validation.

Each driver produces a serializable result with full parameter provenance.
Sweeps use one shared time grid across all angles (so heatmap rows are
comparable) and are deterministic: fixed grids, no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import propagate_static, propagate_periodic
from .dynamics import (default_t_final, first_peak, refine_detuning,
                       run_protocol_zero_field)
from .effective import fallback_detuning, zero_field_coupling
from .io import write_csv, write_json
from .model import (SYM_LABELS, ModelParams, dipole_coeffs, hamiltonian_rwa,
                    lab_parts, params_from_coeffs, symmetric_transform,
                    to_symmetric, with_delta)
from .core import propagate_series

DEGENERACY_WINDOW_FACTOR = 1e-3   # |Azz| or |Axx| below this flags the point


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    delta: float
    tuned_delta_seed: float
    degenerate: bool
    t_peak: float
    p_peak: float


@dataclass(frozen=True)
class SweepResult:
    protocol: str
    tuning: str
    theta_grid: np.ndarray
    time_grid: np.ndarray
    population_map: np.ndarray        # (n_theta, n_time) target populations
    points: tuple[SweepPoint, ...]
    base_params: ModelParams
    metadata: dict

    @property
    def max_curve(self) -> np.ndarray:
        return np.array([[p.t_peak, p.p_peak] for p in self.points])


def _sweep_meta(result_kind: str, params: ModelParams, extra: dict) -> dict:
    from . import __version__
    meta = {
        "kind": result_kind,
        "tool_version": __version__,
        "omega_rabi": params.omega_rabi,
        "mu_b": params.mu_b,
        "dip_prefactor": params.dip_prefactor,
        "theta": params.theta,
        "delta": params.delta,
    }
    meta.update(extra)
    return meta


def sweep_theta(protocol: str, base_params: ModelParams, theta_range=(0.0, np.pi / 2),
                n_theta: int = 200, tuning: str = "tuned",
                t_max: float | None = None, n_time: int = 2000) -> SweepResult:
    """Angle sweep of the transfer protocol.

    For each angle the dipole couplings are recomputed and the detuning is
    either tuned (polynomial root polished against the simulated peak inside
    the shared window) or fixed at the -+Azz/2 fallback.  Angles inside the
    degeneracy window are flagged and run with zero detuning rather than
    skipped.  Per-point failures are recorded in the metadata and the sweep
    continues.
    """
    if n_theta < 2:
        raise ValueError("n_theta must be >= 2")
    proto = protocol.upper()
    if tuning not in ("tuned", "fixed_half_azz"):
        raise ValueError("tuning must be 'tuned' or 'fixed_half_azz'")
    target = "N" if proto == "N" else "P"
    t_idx = SYM_LABELS.index(target)
    thetas = np.linspace(theta_range[0], theta_range[1], n_theta)
    if t_max is None:
        t_max = default_sweep_window(proto)
    times = np.linspace(0.0, t_max, n_time)
    pop_map = np.zeros((n_theta, n_time))
    points = []
    failures = {}
    for i, th in enumerate(thetas):
        p_i = ModelParams(omega_rabi=base_params.omega_rabi, delta=0.0,
                          mu_b=base_params.mu_b,
                          dip_prefactor=base_params.dip_prefactor, theta=float(th))
        co = dipole_coeffs(p_i)
        degen = (abs(co.azz) < DEGENERACY_WINDOW_FACTOR * p_i.omega_rabi
                 or abs(co.axx) < DEGENERACY_WINDOW_FACTOR * p_i.omega_rabi)
        try:
            if tuning == "fixed_half_azz":
                delta = fallback_detuning(proto, p_i)
                seed = delta
            else:
                ref = refine_detuning(proto, p_i, t_max=t_max)
                delta, seed = ref.delta, ref.seed_delta
        except Exception as exc:          # record and continue with fallback
            failures[f"theta_{i}"] = f"{type(exc).__name__}: {exc}"
            delta = fallback_detuning(proto, p_i)
            seed = delta
        psi0 = np.zeros(9, dtype=complex)
        psi0[0] = 1.0

        def target_series(d):
            h_sym = to_symmetric(hamiltonian_rwa(with_delta(p_i, d)))
            states = propagate_series(h_sym, psi0, times)
            return np.abs(states[:, t_idx]) ** 2

        series = target_series(delta)
        if tuning == "tuned":
            # tuned output must dominate the fallback on this exact grid
            fb = fallback_detuning(proto, p_i)
            fb_series = target_series(fb)
            if first_peak(times, fb_series).value > first_peak(times, series).value:
                delta, series = fb, fb_series
        pop_map[i] = series
        pk = first_peak(times, series)
        points.append(SweepPoint(theta=float(th), delta=float(delta),
                                 tuned_delta_seed=float(seed),
                                 degenerate=bool(degen),
                                 t_peak=pk.time, p_peak=pk.value))
    meta = _sweep_meta("theta_sweep", base_params, {
        "protocol": proto, "tuning": tuning, "n_theta": n_theta,
        "n_time": n_time, "t_max": t_max,
        "theta_min": theta_range[0], "theta_max": theta_range[1],
        "degeneracy_window_factor": DEGENERACY_WINDOW_FACTOR,
    })
    meta.update(failures)
    return SweepResult(protocol=proto, tuning=tuning, theta_grid=thetas,
                       time_grid=times, population_map=pop_map,
                       points=tuple(points), base_params=base_params,
                       metadata=meta)


def default_sweep_window(protocol: str) -> float:
    """Shared sweep window: covers every efficient-region first transfer.

    Chosen so the slowest efficient-angle transfer still completes while the
    degenerate-coupling window remains visibly incomplete, as in the
    reference heatmaps.
    """
    return 67.0 if protocol.upper() == "N" else 320.0


def sweep_to_tables(result: SweepResult):
    """(columns, rows) pairs for the map table and the max-curve table."""
    map_cols = ["theta", "t", "population"]
    map_rows = []
    for i, th in enumerate(result.theta_grid):
        for j, t in enumerate(result.time_grid):
            map_rows.append((th, t, result.population_map[i, j]))
    curve_cols = ["theta", "delta", "tuned_delta_seed", "degenerate",
                  "t_peak", "p_peak", "axx", "azz"]
    curve_rows = []
    for p in result.points:
        co = dipole_coeffs(ModelParams(
            omega_rabi=result.base_params.omega_rabi,
            mu_b=result.base_params.mu_b,
            dip_prefactor=result.base_params.dip_prefactor, theta=p.theta))
        curve_rows.append((p.theta, p.delta, p.tuned_delta_seed, p.degenerate,
                           p.t_peak, p.p_peak, co.axx, co.azz))
    return (map_cols, map_rows), (curve_cols, curve_rows)


def save_sweep(result: SweepResult, path_base: str, fmt: str = "csv") -> list[str]:
    (map_cols, map_rows), (curve_cols, curve_rows) = sweep_to_tables(result)
    written = []
    if fmt == "csv":
        write_csv(f"{path_base}_map.csv", result.metadata, map_cols, map_rows)
        write_csv(f"{path_base}_curve.csv", result.metadata, curve_cols, curve_rows)
        written += [f"{path_base}_map.csv", f"{path_base}_curve.csv"]
    else:
        write_json(f"{path_base}.json", result.metadata, {
            "theta_grid": result.theta_grid,
            "time_grid": result.time_grid,
            "population_map": result.population_map,
            "max_curve": {c: [r[k] for r in curve_rows]
                          for k, c in enumerate(curve_cols)},
        })
        written.append(f"{path_base}.json")
    return written


@dataclass(frozen=True)
class TrendReport:
    thetas: np.ndarray
    t_peaks: np.ndarray
    increasing_fraction: float
    excluded: np.ndarray


def first_transfer_time(times: np.ndarray, series: np.ndarray,
                        frac: float = 0.8) -> float:
    """Time of the first local maximum reaching frac of the global maximum.

    Late revivals can marginally exceed the first transfer lobe at angles
    with imperfect transfer; the protocol's transfer time is the first
    substantial peak, not the revival.
    """
    vmax = float(series.max())
    if vmax <= 0:
        return float(times[-1])
    interior = (series[1:-1] >= series[:-2]) & (series[1:-1] >= series[2:])
    idx = np.where(interior & (series[1:-1] >= frac * vmax))[0]
    if idx.size == 0:
        return float(times[int(np.argmax(series))])
    return float(times[idx[0] + 1])


def transfer_rate_trend(result: SweepResult, theta_max: float = 0.3 * np.pi
                        ) -> TrendReport:
    """First-transfer-time series over the slow-growth angle range.

    Reports the first substantial peak time per angle on [0, theta_max] with
    degenerate windows excluded, plus the fraction of consecutive increases;
    transfer slows as the intermediate state detunes away with growing
    angle.
    """
    if len(result.points) < 2:
        raise ValueError("trend needs at least two sweep points")
    sel = [(p.theta, i, p.degenerate) for i, p in enumerate(result.points)
           if p.theta <= theta_max]
    if len(sel) < 2:
        raise ValueError("not enough points below theta_max")
    thetas = np.array([s[0] for s in sel])
    tp = np.array([first_transfer_time(result.time_grid,
                                       result.population_map[s[1]])
                   for s in sel])
    excl = np.array([s[2] for s in sel])
    keep = ~excl
    diffs = np.diff(tp[keep])
    frac = float((diffs > 0).sum() / max(len(diffs), 1))
    return TrendReport(thetas=thetas, t_peaks=tp, increasing_fraction=frac,
                       excluded=excl)


# ---------------------------------------------------------------------------
# zero-field scan


@dataclass(frozen=True)
class ZeroFieldPoint:
    ratio: float
    axx: float
    in_raman_regime: bool
    p00: float
    doe: float
    bell_fidelity: float       # best-phase DQ Bell fidelity at depletion
    fidelity_to_target: float  # fidelity to the -pi/4 superposition
    relative_phase: float
    t_depletion: float


@dataclass(frozen=True)
class ZeroFieldScan:
    points: tuple[ZeroFieldPoint, ...]
    best_ratio: float
    candidate_report: dict
    metadata: dict


def params_for_zero_field(ratio: float, omega_over_azz: float = 40.0,
                          azz: float = 1.0) -> ModelParams:
    """Geometry whose effective coupling magnitude is ratio*azz at zero field.

    The xx coupling follows from the exact reduction
    omega_eff = -Omega^2/(2 Axx); with azz > 0 the angle sits just above
    arccos(1/sqrt 3), where axx < 0 and the coupling is positive.
    """
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    omega = omega_over_azz * azz
    axx = -omega ** 2 / (2.0 * ratio * azz)
    return params_from_coeffs(azz=azz, axx=axx, omega_rabi=omega)


def _zero_field_point(ratio: float, omega_over_azz: float) -> ZeroFieldPoint:
    params = params_for_zero_field(ratio, omega_over_azz)
    co = dipole_coeffs(params)
    traj, rep = run_protocol_zero_field(params)
    i = int(np.argmin(traj.populations["00"]))
    psi = traj.states[i]
    app, amm = psi[2], psi[3]
    bell = float((abs(app) + abs(amm)) ** 2 / 2.0)
    return ZeroFieldPoint(
        ratio=float(ratio), axx=float(co.axx),
        in_raman_regime=bool(params.omega_rabi / 2.0 < abs(co.axx)),
        p00=rep.p00, doe=rep.doe, bell_fidelity=bell,
        fidelity_to_target=rep.fidelity_to_target,
        relative_phase=rep.relative_phase, t_depletion=rep.time)


def zero_field_scan(ratio_range=(0.05, 2.0), n_points: int = 40,
                    omega_over_azz: float = 40.0) -> ZeroFieldScan:
    """Scan the effective-coupling ratio and adjudicate the magic value.

    best_ratio maximizes the best-phase Bell fidelity of the depletion-time
    state (the clamped entanglement degree saturates at 1 over a wide ratio
    plateau, so it cannot rank points on its own; both are recorded).  The
    two literature candidates 0.1293 and 1.293 are always evaluated and
    reported side by side.
    """
    ratios = np.linspace(ratio_range[0], ratio_range[1], n_points)
    points = [_zero_field_point(float(r), omega_over_azz) for r in ratios]
    best = max(points, key=lambda p: p.bell_fidelity)
    candidates = {}
    for cand in (0.1293, 1.293):
        cp = _zero_field_point(cand, omega_over_azz)
        candidates[str(cand)] = {
            "ratio": cand, "p00": cp.p00, "doe": cp.doe,
            "bell_fidelity": cp.bell_fidelity,
            "fidelity_to_target": cp.fidelity_to_target,
            "relative_phase": cp.relative_phase,
        }
    within = {c: abs(best.ratio - float(c)) / float(c) <= 0.05 for c in candidates}
    meta = {
        "kind": "zero_field_scan",
        "omega_over_azz": omega_over_azz,
        "ratio_min": ratio_range[0], "ratio_max": ratio_range[1],
        "n_points": n_points,
        "best_ratio": best.ratio,
        "adjudicated_candidate": next((c for c, ok in within.items() if ok), "none"),
    }
    return ZeroFieldScan(points=tuple(points), best_ratio=best.ratio,
                         candidate_report=candidates, metadata=meta)


def save_zero_field_scan(scan: ZeroFieldScan, path_base: str, fmt: str = "csv"
                         ) -> list[str]:
    cols = ["ratio", "axx", "in_raman_regime", "p00", "doe", "bell_fidelity",
            "fidelity_to_target", "relative_phase", "t_depletion"]
    rows = [(p.ratio, p.axx, p.in_raman_regime, p.p00, p.doe, p.bell_fidelity,
             p.fidelity_to_target, p.relative_phase, p.t_depletion)
            for p in scan.points]
    if fmt == "csv":
        write_csv(f"{path_base}.csv", scan.metadata, cols, rows)
        return [f"{path_base}.csv"]
    write_json(f"{path_base}.json", scan.metadata, {
        "points": [dict(zip(cols, r)) for r in rows],
        "candidates": scan.candidate_report,
    })
    return [f"{path_base}.json"]


# ---------------------------------------------------------------------------
# rotating-frame validation


@dataclass(frozen=True)
class RwaComparison:
    carrier_ratio: float
    overlap: float
    target_pop_lab: float
    target_pop_rwa: float


def rwa_validation(params: ModelParams, carrier_ratios, t_span: float | None = None,
                   steps_per_period: int = 128) -> list[RwaComparison]:
    """Propagate the full lab-frame model and compare against the averaged one.

    For each carrier-to-Rabi ratio the lab state is rotated back by
    exp(+i H0 t) and overlapped with the rotating-frame propagation over a
    span covering one full transfer.  The counter-rotating dipole terms
    shift the sharp transfer resonance by ~(coupling)^2/carrier, so overlap
    approaches one only once the carrier dwarfs that scale; it must improve
    as the ratio grows.
    """
    for r in carrier_ratios:
        if r < 50:
            raise ValueError("carrier ratios below 50 are meaningless here")
    if t_span is None:
        t_span = default_t_final(params, "N") / 4.0   # one full transfer
    psi0 = np.zeros(9, dtype=complex)
    psi0[4] = 1.0   # |00> canonical
    h_rwa = hamiltonian_rwa(params)
    psi_rwa = propagate_static(h_rwa, psi0, t_span)
    n_idx = SYM_LABELS.index("N")
    u = symmetric_transform().u
    out = []
    for ratio in carrier_ratios:
        p_lab = ModelParams(omega_rabi=params.omega_rabi, delta=params.delta,
                            mu_b=params.mu_b, dip_prefactor=params.dip_prefactor,
                            theta=params.theta,
                            omega_carrier=float(ratio) * params.omega_rabi)
        h_static, v_drive = lab_parts(p_lab)
        psi_lab = propagate_periodic(h_static, v_drive, p_lab.omega_carrier,
                                     psi0, t_span, steps_per_period)
        # rotate back by exp(+i w Sz2_tot t); Sz2_tot is diagonal canonically
        m2 = np.array([2, 1, 2, 1, 0, 1, 2, 1, 2], dtype=float)
        psi_rot = np.exp(1j * p_lab.omega_carrier * m2 * t_span) * psi_lab
        overlap = float(abs(np.vdot(psi_rwa, psi_rot)) ** 2)
        pop_lab = float(abs(np.vdot(u[:, n_idx], psi_rot)) ** 2)
        pop_rwa = float(abs(np.vdot(u[:, n_idx], psi_rwa)) ** 2)
        out.append(RwaComparison(carrier_ratio=float(ratio), overlap=overlap,
                                 target_pop_lab=pop_lab, target_pop_rwa=pop_rwa))
    return out


def save_rwa_validation(comparisons: list[RwaComparison], meta: dict,
                        path_base: str, fmt: str = "csv") -> list[str]:
    cols = ["carrier_ratio", "overlap", "target_pop_lab", "target_pop_rwa"]
    rows = [(c.carrier_ratio, c.overlap, c.target_pop_lab, c.target_pop_rwa)
            for c in comparisons]
    if fmt == "csv":
        write_csv(f"{path_base}.csv", meta, cols, rows)
        return [f"{path_base}.csv"]
    write_json(f"{path_base}.json", meta, {"points": [dict(zip(cols, r)) for r in rows]})
    return [f"{path_base}.json"]
