"""Trajectory ensembles reduced to time-resolved moments, SNR, and errors.

Reproducibility contract: trajectory i always draws from the counter-based
stream Philox(master_seed).jumped(i) (4 standard normals for the initial
point, then the thermal-noise increments), and chunk reduction happens in
fixed trajectory order, so results are bit-identical for any worker count.
The bootstrap has its own reserved stream.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool

import numpy as np

from .integrator import (SCHEME_ID, KernelParams, NoiseSpec, default_dt_nd,
                         get_backend, plan_substeps, run_batch)
from .states import GaussianState
from .units import SystemConfig, make_unit_scales

VAR_NAMES = ("z1", "p1", "z2", "p2")
_BOOTSTRAP_JUMP = 2 ** 48
_BOOTSTRAP_BLOCK = 250
# Noise-buffer budget (doubles) used to pick the trajectory chunk size.
_CHUNK_BUDGET = 3 * 10 ** 7


class CensorPolicy(Enum):
    EXCLUDE_AFTER_CENSOR = "exclude_after"
    DROP_CENSORED_ENTIRELY = "drop"


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble size, seeding, output schedule (SI seconds), and reduction
    controls.  n_bootstrap = 0 skips the bootstrap (analytic fallbacks for
    the mean/std standard errors, no SNR band)."""

    n_trajectories: int
    master_seed: int
    output_schedule: np.ndarray
    censor_policy: CensorPolicy = CensorPolicy.EXCLUDE_AFTER_CENSOR
    n_bootstrap: int = 1000
    chunk_size: int | None = None  # None: memory-budget heuristic

    def __post_init__(self):
        if self.n_trajectories < 2:
            raise ValueError("n_trajectories must be >= 2")
        if self.master_seed < 0:
            raise ValueError("master_seed must be >= 0")
        sched = np.asarray(self.output_schedule, dtype=np.float64)
        if sched.ndim != 1 or sched.size == 0:
            raise ValueError("output_schedule must be a nonempty 1-d array")
        if sched[0] <= 0 or np.any(np.diff(sched) <= 0):
            raise ValueError("output_schedule must be strictly increasing, > 0")
        object.__setattr__(self, "output_schedule", sched)
        if self.n_bootstrap < 0:
            raise ValueError("n_bootstrap must be >= 0")
        if self.chunk_size is not None and self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")


@dataclass
class MomentSeries:
    """Ensemble statistics per output time (SI units; row 0 is t = 0).

    Undefined entries (SNR with zero spread, errors with < 2 alive
    trajectories) are NaN and flagged via snr_defined / n_alive.
    """

    times: np.ndarray          # (T+1,)
    mean: np.ndarray           # (T+1, 4), columns ordered as VAR_NAMES
    std: np.ndarray            # (T+1, 4), ddof=1
    se_mean: np.ndarray        # (T+1, 4)
    se_std: np.ndarray         # (T+1, 4)
    snr_p2: np.ndarray         # (T+1,)
    snr_defined: np.ndarray    # (T+1,) bool
    se_snr: np.ndarray         # (T+1,)
    snr_lo: np.ndarray         # (T+1,) bootstrap 16th percentile
    snr_hi: np.ndarray         # (T+1,) bootstrap 84th percentile
    n_alive: np.ndarray        # (T+1,) int
    censored_count: int
    censored_fraction: float
    truncated_at: int | None
    initial_sigma: np.ndarray  # (4,) configured spreads, for normalization
    metadata: dict = field(default_factory=dict)
    raw_trajectories: np.ndarray | None = None  # (K, T+1, 4) opt-in dump


@dataclass(frozen=True)
class _ChunkContext:
    master_seed: int
    kp: KernelParams
    noise_spec: NoiseSpec
    rel_times: np.ndarray
    dt_target: float
    n_substeps: int
    means: tuple
    sigmas: tuple
    backend_name: str


def _trajectory_generator(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=master_seed).jumped(index))


def _run_chunk(payload):
    start, size, ctx = payload
    backend = get_backend(ctx.backend_name)
    state0 = np.empty((size, 4))
    has_noise = ctx.noise_spec.has_noise
    noise = np.empty((size, ctx.n_substeps, 2)) if has_noise else None
    mz1, mp1, mz2, mp2 = ctx.means
    sz1, sp1, sz2, sp2 = ctx.sigmas
    base = np.random.Philox(key=ctx.master_seed)
    for i in range(size):
        gen = np.random.Generator(base.jumped(start + i))
        x = gen.standard_normal(4)
        state0[i, 0] = mz1 + sz1 * x[0]
        state0[i, 1] = mp1 + sp1 * x[1]
        state0[i, 2] = mz2 + sz2 * x[2]
        state0[i, 3] = mp2 + sp2 * x[3]
        if has_noise:
            noise[i] = gen.standard_normal((ctx.n_substeps, 2))
    out, censor = run_batch(state0, ctx.rel_times, ctx.kp, ctx.noise_spec,
                            noise, dt_target=ctx.dt_target, backend=backend)
    return start, state0, out, censor


def _chunk_size(n_substeps: int, has_noise: bool) -> int:
    if not has_noise:
        return 4096
    return max(64, min(4096, _CHUNK_BUDGET // max(1, 2 * n_substeps)))


def _resolve_workers(n_workers: int | None) -> int:
    if n_workers is None:
        n_workers = int(os.environ.get("COULOMBSIM_WORKERS", "1"))
    return max(1, n_workers)


def run_ensemble(system: SystemConfig,
                 states: tuple[GaussianState, GaussianState],
                 ens: EnsembleConfig, n_workers: int | None = None,
                 keep_raw: int = 0) -> MomentSeries:
    """Run the ensemble and reduce it to a MomentSeries.

    Deterministic for a fixed master_seed regardless of worker count.  If
    fewer than two trajectories remain alive at some output time, the series
    is truncated there and flagged in metadata["status"].
    """
    n = ens.n_trajectories
    n_workers = _resolve_workers(n_workers)
    backend = get_backend()
    scales = make_unit_scales(system)
    kp = KernelParams.from_system(system, scales)
    noise_spec = NoiseSpec.from_system(system, scales)

    L0 = scales.length_L0
    P0 = scales.momentum_scale
    rel_times = ens.output_schedule / scales.time_T0
    dt_target = (system.dt / scales.time_T0 if system.dt is not None
                 else default_dt_nd(kp))
    substeps, _ = plan_substeps(rel_times, dt_target, kp)
    n_substeps = int(substeps.sum())

    s1, s2 = states
    ctx = _ChunkContext(
        master_seed=ens.master_seed, kp=kp, noise_spec=noise_spec,
        rel_times=rel_times, dt_target=dt_target, n_substeps=n_substeps,
        means=(s1.mean_z / L0, s1.mean_p / P0, s2.mean_z / L0, s2.mean_p / P0),
        sigmas=(s1.sigma_z / L0, s1.sigma_p / P0,
                s2.sigma_z / L0, s2.sigma_p / P0),
        backend_name=getattr(backend, "BACKEND_NAME", "numpy"),
    )

    chunk = ens.chunk_size or _chunk_size(n_substeps, noise_spec.has_noise)
    payloads = [(start, min(chunk, n - start), ctx)
                for start in range(0, n, chunk)]
    if n_workers == 1 or len(payloads) == 1:
        results = [_run_chunk(p) for p in payloads]
    else:
        with Pool(processes=min(n_workers, len(payloads))) as pool:
            results = pool.map(_run_chunk, payloads)
    results.sort(key=lambda r: r[0])

    n_times = rel_times.size
    values = np.empty((n, n_times + 1, 4))
    censor_nd = np.empty(n)
    for start, state0, out, censor in results:
        size = state0.shape[0]
        values[start:start + size, 0, :] = state0
        values[start:start + size, 1:, :] = out
        censor_nd[start:start + size] = censor

    # SI at the I/O boundary.
    values[:, :, 0] *= L0
    values[:, :, 1] *= P0
    values[:, :, 2] *= L0
    values[:, :, 3] *= P0
    censored = ~np.isnan(censor_nd)
    censor_times_s = censor_nd * scales.time_T0

    if ens.censor_policy is CensorPolicy.DROP_CENSORED_ENTIRELY:
        values[censored, :, :] = np.nan
    else:
        values[censor_nd == 0.0, 0, :] = np.nan

    times = np.concatenate(([0.0], ens.output_schedule))
    series = _reduce(values, times, ens)
    series.censored_count = int(censored.sum())
    series.censored_fraction = float(censored.sum()) / n
    series.initial_sigma = np.array([s1.sigma_z, s1.sigma_p,
                                     s2.sigma_z, s2.sigma_p])
    if keep_raw > 0:
        series.raw_trajectories = values[:min(keep_raw, n)].copy()
    series.metadata = {
        "seed": ens.master_seed,
        "n_trajectories": n,
        "scheme": SCHEME_ID,
        "backend": ctx.backend_name,
        "dt_target_nd": dt_target,
        "dt_target_s": dt_target * scales.time_T0,
        "n_substeps_total": n_substeps,
        "censor_policy": ens.censor_policy.value,
        "n_bootstrap": ens.n_bootstrap,
        "n_workers": n_workers,
        "regime": system.regime,
        "force_mode": system.coupling.force_mode.value,
        "scales": {"length_L0": L0, "time_T0": scales.time_T0,
                   "mass_M0": scales.mass_M0,
                   "cubic_coupling_g": scales.cubic_coupling_g},
        "noise_amp_nd": [noise_spec.sigma1, noise_spec.sigma2],
        "censored_count": int(censored.sum()),
        "censored_fraction": float(censored.sum()) / n,
        "first_censor_time_s": (float(np.nanmin(censor_times_s))
                                if censored.any() else None),
        "status": ("truncated" if series.truncated_at is not None else "ok"),
    }
    return series


def _reduce(values: np.ndarray, times: np.ndarray,
            ens: EnsembleConfig) -> MomentSeries:
    n, n_rows, _ = values.shape
    finite = np.isfinite(values[:, :, 0])
    n_alive = finite.sum(axis=0)

    truncated_at = None
    bad = np.nonzero(n_alive < 2)[0]
    if bad.size:
        truncated_at = int(bad[0])
        times = times[:truncated_at]
        values = values[:, :truncated_at, :]
        finite = finite[:, :truncated_at]
        n_alive = n_alive[:truncated_at]
        n_rows = truncated_at

    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.nanmean(values, axis=0)
        std = np.nanstd(values, axis=0, ddof=1)
        snr = mean[:, 3] / std[:, 3]
    snr_defined = (std[:, 3] > 0) & (n_alive >= 2)
    snr = np.where(snr_defined, snr, np.nan)

    if ens.n_bootstrap > 0:
        se_mean, se_std, se_snr, snr_lo, snr_hi = _bootstrap(
            values, finite, mean, ens.master_seed, ens.n_bootstrap)
    else:
        counts = np.maximum(n_alive, 2)[:, None].astype(float)
        se_mean = std / np.sqrt(counts)
        se_std = std / np.sqrt(2.0 * (counts - 1.0))
        nanrow = np.full(n_rows, np.nan)
        se_snr, snr_lo, snr_hi = nanrow, nanrow.copy(), nanrow.copy()

    return MomentSeries(
        times=times, mean=mean, std=std, se_mean=se_mean, se_std=se_std,
        snr_p2=snr, snr_defined=snr_defined, se_snr=se_snr,
        snr_lo=snr_lo, snr_hi=snr_hi, n_alive=n_alive,
        censored_count=0, censored_fraction=0.0,
        truncated_at=truncated_at, initial_sigma=np.zeros(4))


def _bootstrap(values, finite, mean, master_seed, n_bootstrap):
    """Multinomial-weight trajectory bootstrap for SE(mean), SE(std), and the
    SNR band, sharing one joint resampling across variables and times."""
    n, n_rows, _ = values.shape
    rng = np.random.Generator(
        np.random.Philox(key=master_seed).jumped(_BOOTSTRAP_JUMP))
    mask = finite.astype(np.float64)
    centered = np.nan_to_num(values - mean[None, :, :], nan=0.0)

    mean_parts, std_parts = [], []
    done = 0
    while done < n_bootstrap:
        block = min(_BOOTSTRAP_BLOCK, n_bootstrap - done)
        idx = rng.integers(0, n, size=(block, n))
        weights = np.empty((block, n))
        for b in range(block):
            weights[b] = np.bincount(idx[b], minlength=n)
        counts = weights @ mask                      # (block, n_rows)
        with np.errstate(invalid="ignore", divide="ignore"):
            mean_b = np.empty((block, n_rows, 4))
            std_b = np.empty((block, n_rows, 4))
            for v in range(4):
                xc = centered[:, :, v]
                s1 = weights @ xc
                s2 = weights @ (xc * xc)
                mb = s1 / counts
                var = (s2 - s1 * mb) / (counts - 1.0)
                mean_b[:, :, v] = mean[None, :, v] + mb
                std_b[:, :, v] = np.sqrt(np.maximum(var, 0.0))
            bad = counts < 2
            mean_b[bad] = np.nan
            std_b[bad] = np.nan
        mean_parts.append(mean_b)
        std_parts.append(std_b)
        done += block

    mean_b = np.concatenate(mean_parts, axis=0)
    std_b = np.concatenate(std_parts, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        snr_b = mean_b[:, :, 3] / std_b[:, :, 3]
        snr_b[std_b[:, :, 3] <= 0] = np.nan
        se_mean = np.nanstd(mean_b, axis=0, ddof=1)
        se_std = np.nanstd(std_b, axis=0, ddof=1)
        all_nan = np.all(np.isnan(snr_b), axis=0)
        se_snr = np.full(n_rows, np.nan)
        snr_lo = np.full(n_rows, np.nan)
        snr_hi = np.full(n_rows, np.nan)
        if not all_nan.all():
            cols = ~all_nan
            se_snr[cols] = np.nanstd(snr_b[:, cols], axis=0, ddof=1)
            snr_lo[cols] = np.nanpercentile(snr_b[:, cols], 16, axis=0)
            snr_hi[cols] = np.nanpercentile(snr_b[:, cols], 84, axis=0)
    return se_mean, se_std, se_snr, snr_lo, snr_hi


def snr_series(series: MomentSeries):
    """Per-time SNR of p_z2 with its bootstrap band.

    Returns (times, snr, lo, hi, defined); entries where the SNR is
    undefined (zero spread or < 2 alive) are NaN with defined = False.
    """
    return (series.times, series.snr_p2, series.snr_lo, series.snr_hi,
            series.snr_defined)


@dataclass(frozen=True)
class TargetCrossing:
    """First crossing of a target SNR, or the argmax when never crossed."""

    crossed: bool
    t_star: float
    p_at: float
    sigma_at: float
    snr_at: float
    index: int


def target_crossing(series: MomentSeries, target: float,
                    tol: float = 0.01) -> TargetCrossing:
    """First time with SNR >= target*(1-tol); falls back to the SNR argmax.

    target must be positive (it may be +inf, which reports the argmax with
    crossed=False).
    """
    if not target > 0:
        raise ValueError("target must be positive")
    snr = series.snr_p2
    defined = series.snr_defined & np.isfinite(snr)
    threshold = target * (1.0 - tol)
    hits = np.nonzero(defined & (snr >= threshold))[0]
    if hits.size:
        i = int(hits[0])
        crossed = True
    elif defined.any():
        masked = np.where(defined, snr, -np.inf)
        i = int(np.argmax(masked))
        crossed = False
    else:
        return TargetCrossing(False, math.nan, math.nan, math.nan,
                              math.nan, -1)
    return TargetCrossing(
        crossed=crossed, t_star=float(series.times[i]),
        p_at=float(series.mean[i, 3]), sigma_at=float(series.std[i, 3]),
        snr_at=float(snr[i]), index=i)
