"""Fluorescence readout: Poisson photon counts, threshold decisions and seeded streams."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats


class Outcome(Enum):
    BRIGHT = "bright"
    DARK = "dark"


@dataclass(frozen=True)
class FluorescenceParams:
    """Mean photon counts per detection window and the Bright threshold.

    The defaults are placeholders, not measured values.
    """

    lambda_bright: float = 10.0
    lambda_dark: float = 1.0
    threshold: int = 3

    def __post_init__(self):
        if not self.lambda_bright > self.lambda_dark >= 0:
            raise ValueError("need lambda_bright > lambda_dark >= 0")
        if int(self.threshold) != self.threshold or self.threshold < 1:
            raise ValueError("threshold must be an integer >= 1")


def seeded_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent generator fully determined by ``(seed, stream_id)``."""
    mask = (1 << 64) - 1
    ss = np.random.SeedSequence([seed & mask, stream_id & mask])
    return np.random.Generator(np.random.PCG64(ss))


def sample_photon_count(bright: bool, fp: FluorescenceParams, rng: np.random.Generator) -> int:
    lam = fp.lambda_bright if bright else fp.lambda_dark
    return int(rng.poisson(lam))


def classify(count: int, fp: FluorescenceParams) -> Outcome:
    return Outcome.BRIGHT if count >= fp.threshold else Outcome.DARK


def discrimination_error(fp: FluorescenceParams):
    """Exact misclassification probabilities ``(bright_as_dark, dark_as_bright)``."""
    k = np.arange(fp.threshold)
    bright_as_dark = float(stats.poisson.pmf(k, fp.lambda_bright).sum())
    dark_as_bright = 1.0 - float(stats.poisson.pmf(k, fp.lambda_dark).sum()) if fp.lambda_dark > 0 else 0.0
    return bright_as_dark, dark_as_bright


def _poisson_pmf(k: int, lam: float) -> float:
    # scalar pmf; scipy.stats' per-call overhead dominates the detect step
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def count_likelihoods(count: int, fp: FluorescenceParams):
    """``(P(count | bright), P(count | dark))``."""
    return _poisson_pmf(count, fp.lambda_bright), _poisson_pmf(count, fp.lambda_dark)
