"""Degree distributions, power-law fitting and simple usage counts."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from ..netcore import NodeVector, Partition, TwoModeNetwork, binarize

logger = logging.getLogger(__name__)

ALPHA_BOUNDS = (1.0 + 1e-6, 20.0)


class PowerLawFitError(ValueError):
    pass


class NoSamplesAboveXmin(PowerLawFitError):
    pass


class DegenerateSample(PowerLawFitError):
    pass


@dataclass(frozen=True)
class DistributionTable:
    """Frequencies ``f`` of each positive value and the tail sums ``g``."""

    values: np.ndarray
    f: np.ndarray
    g: np.ndarray
    zero_count: int = 0

    def rows(self) -> List[Tuple[int, int, int]]:
        return [(int(v), int(f), int(g)) for v, f, g in zip(self.values, self.f, self.g)]


def distribution(vec: NodeVector | Sequence[float]) -> DistributionTable:
    """Count how many nodes take each positive integer value.

    Zero values are reported in ``zero_count`` and left out of ``f``.
    """
    raw = vec.values if isinstance(vec, NodeVector) else np.asarray(vec, dtype=np.float64)
    values = np.rint(raw).astype(np.int64)
    if raw.size and not np.allclose(raw, values):
        raise ValueError("distribution needs integer-valued data")
    if values.size and values.min() < 0:
        raise ValueError("distribution needs non-negative values")
    positive = values[values > 0]
    uniq, f = np.unique(positive, return_counts=True)
    g = np.cumsum(f[::-1])[::-1]
    return DistributionTable(uniq, f, g, int((values == 0).sum()))


def _approx_alpha(x: np.ndarray, x_min: int) -> float:
    return 1.0 + x.size / np.log(x / (x_min - 0.5)).sum()


def powerlaw_alpha(samples: Sequence[int], x_min: int = 1, method: str = "exact") -> float:
    """Maximum-likelihood exponent of a discrete power law over ``samples >= x_min``.

    ``method="approx"`` uses ``1 + n / sum(ln(x / (x_min - 1/2)))``;
    ``method="exact"`` maximises the Hurwitz-zeta likelihood, which stays
    unbiased for small ``x_min``.
    """
    if x_min < 1:
        raise ValueError(f"x_min must be at least 1, got {x_min}")
    x = np.asarray(samples, dtype=np.float64)
    x = x[x >= x_min]
    if x.size == 0:
        raise NoSamplesAboveXmin(f"no samples at or above x_min={x_min}")
    if np.all(x == x_min):
        raise DegenerateSample(f"all {x.size} samples equal x_min={x_min}")
    if method == "approx":
        return float(_approx_alpha(x, x_min))
    if method != "exact":
        raise ValueError(f"unknown fitting method {method!r}")

    n = x.size
    log_sum = np.log(x).sum()

    def neg_log_likelihood(alpha: float) -> float:
        return n * np.log(zeta(alpha, x_min)) + alpha * log_sum

    result = minimize_scalar(neg_log_likelihood, bounds=ALPHA_BOUNDS, method="bounded",
                             options={"xatol": 1e-8})
    if not result.success:  # pragma: no cover - bounded search always terminates
        raise PowerLawFitError(result.message)
    logger.debug("Power-law fit: alpha=%.4f (closed form %.4f) from %d samples",
                 result.x, _approx_alpha(x, x_min), n)
    return float(result.x)


def synthetic_powerlaw_sample(alpha: float, n: int, seed: int = 0) -> np.ndarray:
    """``n`` draws from the discrete power law ``P(k) ~ k^-alpha`` on ``k >= 1``."""
    return np.random.default_rng(seed).zipf(alpha, n)


def year_histogram(year: Partition) -> Tuple[List[Tuple[int, int]], int]:
    """``([(year, works), ...], works without a year)``."""
    classes, counts = np.unique(year.classes, return_counts=True)
    rows = [(int(c), int(n)) for c, n in zip(classes, counts) if c > 0]
    missing = int(counts[classes == 0].sum()) if classes.size else 0
    return rows, missing


def msc_usage(wm: TwoModeNetwork, k: Optional[int] = None) -> List[Tuple[str, int]]:
    """Works per MSC code, most used first."""
    counts = np.asarray(binarize(wm).matrix.sum(axis=0)).ravel()
    rows = [(label, int(c)) for label, c in zip(wm.cols.labels, counts) if c > 0]
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows if k is None else rows[:k]
