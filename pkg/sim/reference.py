"""Normal-approximation benchmark for the binary-input AWGN channel.

Uses the same SNR convention as the codec (sigma^2 = 10^(-SNR/10), BPSK
+-1). This is the plain normal approximation with the log(n)/(2n) term.
"""
import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import integrate, optimize
from scipy.stats import norm

logger = logging.getLogger(__name__)

SNR_BRACKET_DB = (-15.0, 25.0)


class NoRootError(ValueError):
    """The target rate is not crossed inside the SNR bracket."""


def _information_density(y: np.ndarray, sigma2: float) -> np.ndarray:
    # transmitted +1; i(y) = 1 - log2(1 + exp(-2y/sigma^2))
    return 1.0 - np.logaddexp(0.0, -2.0 * y / sigma2) / math.log(2.0)


@lru_cache(maxsize=1024)
def capacity_dispersion(snr_db: float) -> Tuple[float, float]:
    """(C in bit/use, V in bit^2/use) of the BI-AWGN channel."""
    sigma2 = 10.0 ** (-snr_db / 10.0)
    sigma = math.sqrt(sigma2)
    lo, hi = 1.0 - 12.0 * sigma, 1.0 + 12.0 * sigma

    def moment(power):
        f = lambda y: _information_density(y, sigma2) ** power * norm.pdf(y, loc=1.0, scale=sigma)
        value, _ = integrate.quad(f, lo, hi, limit=200, points=[0.0] if lo < 0.0 < hi else None)
        return value

    c = moment(1)
    v = max(moment(2) - c * c, 0.0)
    return c, v


def capacity(snr_db: float) -> float:
    return capacity_dispersion(snr_db)[0]


def dispersion(snr_db: float) -> float:
    return capacity_dispersion(snr_db)[1]


def normal_approximation_rate(snr_db: float, n_prime: int, epsilon: float) -> float:
    c, v = capacity_dispersion(snr_db)
    return c - math.sqrt(v / n_prime) * norm.isf(epsilon) + math.log2(n_prime) / (2.0 * n_prime)


def _solve(f, label: str) -> float:
    lo, hi = SNR_BRACKET_DB
    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi > 0:
        raise NoRootError(f"No SNR in [{lo}, {hi}] dB reaches {label}")
    return optimize.bisect(f, lo, hi, xtol=1e-6)


def na_reference(n_prime: int, rate: float, epsilon: float) -> float:
    """SNR [dB] at which the normal approximation achieves ``rate`` at error probability ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n_prime < 1 or not 0.0 < rate < 1.0:
        raise ValueError(f"Need n' >= 1 and 0 < rate < 1, got n'={n_prime}, rate={rate}")
    snr = _solve(lambda s: normal_approximation_rate(s, n_prime, epsilon) - rate,
                 f"rate {rate} at n'={n_prime}, eps={epsilon}")
    logger.info(f"Normal approximation: n'={n_prime}, R={rate}, eps={epsilon} -> {snr:.3f} dB")
    return snr


def shannon_limit(rate: float) -> float:
    """SNR [dB] where the BI-AWGN capacity equals ``rate``."""
    return _solve(lambda s: capacity(s) - rate, f"capacity {rate}")
