"""Log likelihood and log posterior for heat-kernel regression.

The model observes x_i ~ p_{sigma^2}(f(t_i), .) independently given the path
f, so the log likelihood is sum_i log p_{sigma^2}(f(t_i), x_i).  The noise
level is either known or marginalized over a uniform prior on [1/A, A] via
fixed Gauss-Legendre quadrature:

    log sum_j w_j p_{s_j}(f(t_i), x_i) / (A - 1/A)

The (unnormalized) log posterior adds the discretized Brownian-motion log
prior; factors p(t_i) of the predictor density do not depend on f and are
dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from bmreg.data import Dataset, EmptyDatasetError
from bmreg.manifolds import Manifold
from bmreg.paths import PiecewiseGeodesicPath, PriorSpec, eval_path_like, log_prior


@dataclass(frozen=True)
class KnownVariance:
    """Fixed noise time sigma^2 > 0."""

    sigma2: float

    def __post_init__(self):
        if self.sigma2 <= 0.0:
            raise ValueError("sigma2 must be positive")


@dataclass(frozen=True)
class MarginalVariance:
    """Noise time marginalized over Uniform[1/A, A], A > 1, by Gauss-Legendre."""

    bound: float
    nodes: int = 16

    def __post_init__(self):
        if self.bound <= 1.0:
            raise ValueError("bound must exceed 1")
        if self.nodes < 2:
            raise ValueError("need at least 2 quadrature nodes")

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """(times, weights) on [1/A, A]; weights sum to A - 1/A."""
        lo, hi = 1.0 / self.bound, self.bound
        u, w = np.polynomial.legendre.leggauss(self.nodes)
        times = 0.5 * (hi - lo) * u + 0.5 * (hi + lo)
        return times, 0.5 * (hi - lo) * w


SigmaMode = Union[KnownVariance, MarginalVariance]


def log_likelihood(f, data: Dataset, sigma: SigmaMode, m: Manifold) -> float:
    """Log likelihood of the dataset under path (or callable) f."""
    if data.n == 0:
        raise EmptyDatasetError("dataset has no observations")
    values = eval_path_like(f, data.ts, m)
    if isinstance(sigma, KnownVariance):
        dens = m.heat_kernel_pairwise(sigma.sigma2, values, data.points)
        return float(np.sum(np.log(dens)))
    times, weights = sigma.quadrature()
    span = float(np.sum(weights))
    per_obs = np.zeros(data.n)
    for t_j, w_j in zip(times, weights):
        per_obs += w_j * m.heat_kernel_pairwise(float(t_j), values, data.points)
    return float(np.sum(np.log(per_obs / span)))


def log_posterior(
    path: PiecewiseGeodesicPath,
    data: Dataset,
    sigma: SigmaMode,
    prior: PriorSpec,
) -> float:
    """Unnormalized log posterior: log prior + log likelihood."""
    m = path.manifold
    return log_prior(path, prior) + log_likelihood(path, data, sigma, m)


def restricted_weight(t: float, density, threshold: float) -> float:
    """Predictor weight p(t) clipped to zero below the threshold.

    Used for error quadrature restricted to {t : p(t) >= r}.
    """
    if threshold < 0.0:
        raise ValueError("threshold must be nonnegative")
    p = float(density.pdf(t))
    return p if p >= threshold else 0.0
