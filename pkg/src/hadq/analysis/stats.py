"""Goodness-of-fit and independence tests used by the experiments.

All tests return a :class:`TestResult`; the thin wrappers named in the
public API return just the p-value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..core import Configuration
from ..errors import TooFewSamples

MIN_SAMPLES = 30


@dataclass(frozen=True)
class TestResult:
    name: str
    n: int
    statistic: float
    p: float | None

    def to_dict(self) -> dict:
        return {"name": self.name, "n": self.n, "statistic": _finite(self.statistic), "p": _finite(self.p)}


def _finite(v):
    if v is None:
        return None
    v = float(v)
    return v if np.isfinite(v) else None


def _need(n: int, what: str) -> None:
    if n < MIN_SAMPLES:
        raise TooFewSamples(f"{what}: {n} values, at least {MIN_SAMPLES} needed")


def exponential_ks(gaps, rate: float, name: str = "exponential-ks") -> TestResult:
    """One-sample KS test of `gaps` against Exponential(rate)."""
    g = np.asarray(gaps, dtype=np.float64)
    _need(g.size, name)
    res = stats.kstest(g, "expon", args=(0.0, 1.0 / rate))
    return TestResult(name, int(g.size), float(res.statistic), float(res.pvalue))


def config_gaps(config: Configuration, *, wrap: bool = False) -> np.ndarray:
    """Consecutive spacings; `wrap` adds the cyclic gap from the last particle
    back round to the first."""
    p = config.positions
    gaps = np.diff(p)
    if wrap and config.geometry.is_cycle and p.size:
        gaps = np.append(gaps, p[0] + config.geometry.length - p[-1])
    return gaps


def gof_exponential_gaps(config: Configuration, rate: float, *, uniform_spacings: bool = False) -> float:
    """KS p-value of the inter-particle gaps.

    By default the gaps are tested against Exponential(rate) and the cyclic
    wrap gap is left out.  With ``uniform_spacings`` the configuration is
    treated as m fixed-count uniform points on a cycle: all m spacings,
    wrap included, are tested against the N * Beta(1, m - 1) marginal and
    `rate` is ignored.
    """
    if uniform_spacings:
        if not config.geometry.is_cycle:
            raise ValueError("uniform spacings are defined on a cycle")
        g = config_gaps(config, wrap=True)
        _need(g.size, "uniform spacings")
        n = config.geometry.length
        res = stats.kstest(g / n, "beta", args=(1.0, g.size - 1.0))
        return float(res.pvalue)
    return exponential_ks(config_gaps(config), rate).p


def two_sample(a, b, name: str = "two-sample-ks") -> TestResult:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _need(min(a.size, b.size), name)
    res = stats.ks_2samp(a, b)
    return TestResult(name, int(a.size + b.size), float(res.statistic), float(res.pvalue))


def two_sample_test(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov p-value."""
    return two_sample(sample_a, sample_b).p


def poisson_counts_chi2(counts, expected: float, name: str = "poisson-chi2") -> TestResult:
    """Pearson chi-square of cell counts against a known Poisson mean.

    The mean is not fitted, so the reference law has one degree of freedom
    per cell.
    """
    c = np.asarray(counts, dtype=np.float64).reshape(-1)
    _need(c.size, name)
    stat = float(np.sum((c - expected) ** 2) / expected)
    return TestResult(name, int(c.size), stat, float(stats.chi2.sf(stat, c.size)))


def correlation_z(x, y, name: str = "correlation") -> TestResult:
    """Pearson correlation turned into a Fisher z-score.

    ``statistic`` is z = atanh(r) * sqrt(n - 3), approximately standard
    normal under independence; ``p`` is its two-sided p-value.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("paired samples must have equal length")
    _need(x.size, name)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return TestResult(name, int(x.size), float("nan"), None)
    r = float(np.corrcoef(x, y)[0, 1])
    r = min(max(r, -0.999999), 0.999999)
    z = float(np.arctanh(r) * np.sqrt(x.size - 3))
    return TestResult(name, int(x.size), z, float(2.0 * stats.norm.sf(abs(z))))
