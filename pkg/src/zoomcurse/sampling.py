"""Noise samplers, reusable sample banks, and Monte-Carlo quantiles.

Banks are drawn in fixed-size blocks whose generators are seeded by hashing
(master seed, block index) through numpy's SeedSequence.  The bank contents
therefore depend only on the seed and the row range, never on how many
workers drew the blocks, and a bank drawn with a larger ``n`` extends a
smaller one row-for-row.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BLOCK_ROWS = 1 << 16


@dataclass(frozen=True)
class EquicorrelatedSampler:
    """Unit-variance Gaussian noise with a common pairwise correlation.

    Draws xi_i = sqrt(rho) * Z0 + sqrt(1 - rho) * Z_i with Z0, Z_i iid
    standard normal (Z0 first in the stream, then the Z block).
    """

    m: int
    rho: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")

    @property
    def exchangeable(self) -> bool:
        return True

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        z0 = rng.standard_normal(n)
        z = rng.standard_normal((n, self.m))
        return math.sqrt(self.rho) * z0[:, None] + math.sqrt(1.0 - self.rho) * z


@dataclass(frozen=True)
class DiagonalGaussianSampler:
    """Independent centered Gaussian noise with per-coordinate scales."""

    scales: tuple

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=float)
        if scales.ndim != 1 or scales.size == 0:
            raise ValueError("scales must be a non-empty 1-d sequence")
        if np.any(~np.isfinite(scales)) or np.any(scales <= 0):
            raise ValueError("scales must be positive and finite")
        object.__setattr__(self, "scales", tuple(float(s) for s in scales))

    @property
    def m(self) -> int:
        return len(self.scales)

    @property
    def exchangeable(self) -> bool:
        return len(set(self.scales)) == 1

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_normal((n, self.m)) * np.asarray(self.scales)


@dataclass(frozen=True)
class TableSampler:
    """Fixed table of noise rows, passed through verbatim (no resampling)."""

    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise ValueError("table must be a non-empty 2-d array")
        if not np.all(np.isfinite(rows)):
            raise ValueError("table entries must be finite")
        object.__setattr__(self, "rows", rows)

    @property
    def m(self) -> int:
        return self.rows.shape[1]

    @property
    def exchangeable(self) -> bool:
        return False  # unknown joint law: never assume symmetry

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n > self.rows.shape[0]:
            raise ValueError(f"requested {n} rows but table has {self.rows.shape[0]}")
        return self.rows[:n]


@dataclass(frozen=True)
class SampleBank:
    """Read-only matrix of noise draws shared across radius evaluations."""

    samples: np.ndarray = field(repr=False)
    seed: int | None = None
    exchangeable: bool = False

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] == 0:
            raise ValueError("bank must be a non-empty 2-d array")
        samples = samples.copy() if samples.flags.writeable else samples
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def m(self) -> int:
        return self.samples.shape[1]


def draw_bank(sampler, n: int, seed: int) -> SampleBank:
    """Draw ``n`` rows from ``sampler`` into an immutable bank.

    Table samplers pass their rows through verbatim (the seed is recorded
    but unused).  Random samplers are drawn block-by-block with per-block
    generators seeded from SeedSequence((seed, block)), so the result is
    bit-identical however the blocks are scheduled.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(sampler, TableSampler):
        return SampleBank(sampler.draw(np.random.default_rng(0), n), seed=seed,
                          exchangeable=sampler.exchangeable)
    parts = []
    for block, start in enumerate(range(0, n, BLOCK_ROWS)):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), block]))
        # draw the full block even when fewer rows are needed: a bank of
        # size n must be a bit-exact prefix of any larger bank
        parts.append(sampler.draw(rng, BLOCK_ROWS)[:n - start])
    return SampleBank(np.concatenate(parts, axis=0), seed=seed,
                      exchangeable=sampler.exchangeable)


def m_statistic(bank, gaps) -> np.ndarray:
    """Per-row max of |xi_j| over coordinates with |xi_j| > gaps_j / 2.

    Rows where no coordinate clears its half-gap contribute 0.  Infinite
    gaps knock their coordinate out entirely.
    """
    samples = getattr(bank, "samples", bank)
    gaps = np.asarray(gaps, dtype=float)
    if gaps.ndim != 1 or gaps.size != samples.shape[1]:
        raise ValueError("gaps must be 1-d with one entry per coordinate")
    if np.any(np.isnan(gaps)) or np.any(gaps < 0):
        raise ValueError("gaps must be non-negative")
    a = np.abs(samples)
    return np.max(np.where(a > 0.5 * gaps, a, 0.0), axis=1)


def mc_order_index(level: float, n: int) -> int:
    """1-based order-statistic index ceil(level * n), guarding float round-up.

    Never interpolates; exact multiples resolve to the mathematically
    correct index even when ``level * n`` rounds up in floating point.
    """
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if n < 1:
        raise ValueError("need at least one value")
    k = int(math.ceil(level * n - 1e-9))
    return min(max(k, 1), n)


def mc_quantile(values, level: float) -> float:
    """Conservative Monte-Carlo quantile: the order statistic at ceil(level*n)."""
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == 0:
        raise ValueError("need at least one value")
    if np.any(np.isnan(values)):
        raise ValueError("values must not contain NaN")
    k = mc_order_index(level, values.size)
    return float(np.partition(values, k - 1)[k - 1])
