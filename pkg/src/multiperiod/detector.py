"""End-to-end multi-periodicity detection pipeline.

Preprocess, decompose into wavelet levels, rank levels by robust variance
share, then per qualifying level: pad, build the hybrid periodogram, test
spectral significance, and validate the dominant candidate against the
autocorrelation peak structure. Validated periods from different levels
are deduplicated before reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acf import (
    DEFAULT_MIN_DISTANCE,
    DEFAULT_PEAK_HEIGHT,
    find_peaks,
    full_range_periodogram,
    huber_acf,
    period_from_peaks,
)
from .modwt import daubechies_filters, max_level, modwt_decompose, rank_levels
from .preprocess import PreprocessConfig, preprocess
from .series import InvalidInputError, TimeSeries
from .spectral import AdmmConfig, fisher_test, huber_periodogram, zero_pad

MIN_DETECTION_LENGTH = 64

DEFAULT_SHARE_THRESHOLD = 0.05
DEFAULT_FISHER_ALPHA = 1e-10
DEFAULT_MERGE_TOLERANCE = 0.03


@dataclass(frozen=True)
class DetectorConfig:
    """Pipeline settings; defaults mirror the published fixed configuration."""

    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    wavelet_order: int = 4
    share_threshold: float = DEFAULT_SHARE_THRESHOLD
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    fisher_alpha: float = DEFAULT_FISHER_ALPHA
    acf_height: float = DEFAULT_PEAK_HEIGHT
    merge_tolerance: float = DEFAULT_MERGE_TOLERANCE
    robust_mode: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.fisher_alpha < 1.0):
            raise InvalidInputError("fisher_alpha must lie in (0, 1)")
        if not (0.0 <= self.share_threshold <= 1.0):
            raise InvalidInputError("share_threshold must lie in [0, 1]")
        if not (0.0 < self.acf_height < 1.0):
            raise InvalidInputError("acf_height must lie in (0, 1)")
        if self.merge_tolerance < 0:
            raise InvalidInputError("merge_tolerance must be nonnegative")


@dataclass(frozen=True)
class PeriodRecord:
    """One detected period with its per-level evidence."""

    length: float
    level: int
    p_value: float
    variance_share: float
    acf_median_distance: float


@dataclass(frozen=True)
class PeriodReport:
    periods: tuple[PeriodRecord, ...]
    levels_examined: int
    degenerate: bool
    config: DetectorConfig

    @property
    def period_lengths(self) -> list[float]:
        return [record.length for record in self.periods]


def detect_level(
    w: np.ndarray,
    level: int,
    cfg: DetectorConfig,
    variance_share: float = 0.0,
) -> PeriodRecord | None:
    """Single-period detection on one level's coefficient series.

    Pipeline: pad -> hybrid periodogram -> g-test (bins 1..N-1 of the half
    spectrum); insignificant levels return None. Otherwise the dominant bin
    must be corroborated: the autocorrelation's qualifying-peak median
    spacing has to land inside the bin's resolution window, and that median
    is the reported period length.
    """
    x = zero_pad(w)
    if not np.any(x):
        return None
    half = x.size // 2
    hybrid = huber_periodogram(x, level, cfg.admm, robust=cfg.robust_mode)
    outcome = fisher_test(hybrid.power, np.arange(1, half), cfg.fisher_alpha)
    if not outcome.significant:
        return None
    spectrum = full_range_periodogram(hybrid, x)
    acf = huber_acf(spectrum, half)
    if acf.degenerate:
        return None
    peaks = find_peaks(acf, height=cfg.acf_height, min_distance=DEFAULT_MIN_DISTANCE)
    period = period_from_peaks(peaks, outcome.k_star, x.size)
    if period is None:
        return None
    return PeriodRecord(
        length=period,
        level=level,
        p_value=outcome.p_value,
        variance_share=variance_share,
        acf_median_distance=period,
    )


def merge_periods(
    records: list[PeriodRecord], tolerance: float = DEFAULT_MERGE_TOLERANCE
) -> list[PeriodRecord]:
    """Collapse near-duplicate lengths across levels, keeping the best-backed.

    Lengths differing by less than ``tolerance`` relative (to the larger)
    are chained into one cluster; the record with the largest variance
    share survives (ties: lower level). Output is sorted by length.
    """
    if not records:
        return []
    ordered = sorted(records, key=lambda r: r.length)
    clusters: list[list[PeriodRecord]] = [[ordered[0]]]
    for record in ordered[1:]:
        prev = clusters[-1][-1]
        if abs(record.length - prev.length) < tolerance * max(record.length, prev.length):
            clusters[-1].append(record)
        else:
            clusters.append([record])
    merged = [
        min(cluster, key=lambda r: (-r.variance_share, r.level)) for cluster in clusters
    ]
    merged.sort(key=lambda r: r.length)
    return merged


def robust_period(series: TimeSeries, cfg: DetectorConfig | None = None) -> PeriodReport:
    """Detect every interlaced periodicity in a series.

    Deterministic for a fixed input and configuration. Constant input
    short-circuits to an empty degenerate report. ``robust_mode=False``
    swaps in the plain periodogram everywhere and plain sample variance for
    level ranking, keeping the rest of the procedure identical.
    """
    if cfg is None:
        cfg = DetectorConfig()
    if series.length < MIN_DETECTION_LENGTH:
        raise InvalidInputError(
            f"detection requires at least {MIN_DETECTION_LENGTH} samples, got {series.length}"
        )
    cleaned = preprocess(series, cfg.preprocess)
    if not np.any(cleaned.values):
        return PeriodReport(periods=(), levels_examined=0, degenerate=True, config=cfg)

    filters = daubechies_filters(cfg.wavelet_order)
    j0 = max_level(series.length, filters.L1)
    decomp = modwt_decompose(cleaned, filters, j0, robust=cfg.robust_mode)
    ranked = rank_levels(decomp, cfg.share_threshold)

    found: list[PeriodRecord] = []
    for j in ranked:
        lev = decomp.level(j)
        record = detect_level(lev.w, j, cfg, variance_share=lev.share)
        if record is not None:
            found.append(record)

    merged = merge_periods(found, cfg.merge_tolerance)
    return PeriodReport(
        periods=tuple(merged),
        levels_examined=len(ranked),
        degenerate=False,
        config=cfg,
    )
