"""Encoding, puncturing, BPSK over AWGN and channel LLRs.

Conventions
-----------
* SNR is 1/sigma^2 for unit-energy BPSK: sigma^2 = 10^(-SNR/10), so
  SNR = Eb/N0 + 10 log10(2R) with R = k/n'.
* bit 0 -> +1, bit 1 -> -1; a positive LLR favours bit 0.
* Every function accepts a single vector or a batch shaped (frames, length).
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from core.codegen import RateConfig
from core.gf2 import Gf2Matrix, derive_generator, row_basis

logger = logging.getLogger(__name__)

LLR_MAX = 127.75


class LengthMismatchError(ValueError):
    pass


def _check_length(x: np.ndarray, expected: int, name: str):
    if x.shape[-1] != expected:
        raise LengthMismatchError(f"{name} has length {x.shape[-1]}, expected {expected}")


@dataclass
class ChannelParams:
    snr_db: float
    rng_seed: Optional[int] = None
    llr_max: float = LLR_MAX

    @property
    def sigma2(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @classmethod
    def from_ebn0(cls, ebn0_db: float, rate: float, **kwargs) -> 'ChannelParams':
        return cls(snr_db=ebn0_to_snr(ebn0_db, rate), **kwargs)

    @classmethod
    def noiseless(cls, **kwargs) -> 'ChannelParams':
        return cls(snr_db=math.inf, **kwargs)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ChannelParams':
        return cls(snr_db=float(data['snr_db']), rng_seed=data.get('rng_seed'),
                   llr_max=float(data.get('llr_max', LLR_MAX)))


def ebn0_to_snr(ebn0_db: float, rate: float) -> float:
    """SNR [dB] = Eb/N0 [dB] + 10 log10(2R), one coded bit per BPSK symbol, R = k/n'."""
    return ebn0_db + 10.0 * math.log10(2.0 * float(rate))


def snr_to_ebn0(snr_db: float, rate: float) -> float:
    return snr_db - 10.0 * math.log10(2.0 * float(rate))


@dataclass
class LlrVector:
    values: np.ndarray
    punctured_mask: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[-1]


# --------------------------------------------------------------------------- #
# Encoder
# --------------------------------------------------------------------------- #
def encode(g: Gf2Matrix, info) -> np.ndarray:
    """Codeword ``G·b`` (G is n x k)."""
    b = np.asarray(info, dtype=np.uint8) & 1
    _check_length(b, g.cols, 'information word')
    return (b.astype(np.int64) @ g.bits.T.astype(np.int64) % 2).astype(np.uint8)


@dataclass
class Encoder:
    """Systematic encoder for one rate of the code family.

    ``info_positions`` are local to the rate's n-column window and always
    contain the punctured columns. When the parity-check matrix is rank
    deficient the code has more than ``cfg.k`` free positions; the surplus
    (highest-index non-punctured ones) is frozen to zero and listed in
    ``frozen_positions``.
    """

    cfg: RateConfig
    g: Gf2Matrix
    info_positions: List[int]
    frozen_positions: List[int]
    rank: int

    @classmethod
    def from_parity_check(cls, h_full: Gf2Matrix, cfg: RateConfig) -> 'Encoder':
        sub = cfg.restrict(h_full)
        punctured = cfg.local_puncture
        basis = row_basis(sub, punctured)
        g, info = derive_generator(basis, punctured)
        surplus = len(info) - cfg.k
        if surplus < 0:
            raise LengthMismatchError(f"Code dimension {len(info)} is below the nominal k={cfg.k}")
        frozen: List[int] = []
        if surplus:
            candidates = [p for p in info if p not in set(punctured)]
            frozen = sorted(candidates)[-surplus:]
            logger.info(f"Rate {cfg.rate}: rank {basis.rows}, freezing {surplus} surplus "
                        f"information positions {frozen}")
        keep = [t for t, p in enumerate(info) if p not in set(frozen)]
        return cls(
            cfg=cfg,
            g=Gf2Matrix(g.bits[:, keep]),
            info_positions=[info[t] for t in keep],
            frozen_positions=frozen,
            rank=basis.rows,
        )

    @property
    def k(self) -> int:
        return self.g.cols

    def encode(self, info) -> np.ndarray:
        return encode(self.g, info)

    def extract_info(self, codeword) -> np.ndarray:
        return np.asarray(codeword)[..., self.info_positions]


# --------------------------------------------------------------------------- #
# Puncturing
# --------------------------------------------------------------------------- #
def _kept_positions(n: int, punctured) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[list(punctured)] = False
    return np.flatnonzero(mask)


def puncture(c, cfg: RateConfig) -> np.ndarray:
    """Drop the punctured positions; survivors keep their order."""
    c = np.asarray(c)
    _check_length(c, cfg.n, 'codeword')
    return c[..., _kept_positions(cfg.n, cfg.local_puncture)]


def depuncture(values, cfg: RateConfig, fill: float = 0.0) -> np.ndarray:
    """Inverse of :func:`puncture`; punctured positions receive ``fill``."""
    values = np.asarray(values)
    _check_length(values, cfg.n_prime, 'punctured vector')
    out = np.full(values.shape[:-1] + (cfg.n,), fill, dtype=np.result_type(values, type(fill)))
    out[..., _kept_positions(cfg.n, cfg.local_puncture)] = values
    return out


def punctured_mask(cfg: RateConfig) -> np.ndarray:
    mask = np.zeros(cfg.n, dtype=bool)
    mask[list(cfg.local_puncture)] = True
    return mask


# --------------------------------------------------------------------------- #
# Channel
# --------------------------------------------------------------------------- #
def bpsk(bits) -> np.ndarray:
    return 1.0 - 2.0 * (np.asarray(bits, dtype=np.float64))


def transmit(c_punct, p: ChannelParams, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """y = BPSK(c') + N(0, sigma^2)."""
    x = bpsk(c_punct)
    if p.sigma2 == 0.0:
        return x
    rng = rng if rng is not None else np.random.default_rng(p.rng_seed)
    return x + p.sigma * rng.standard_normal(x.shape)


def channel_llr(y, p: ChannelParams, cfg: RateConfig) -> LlrVector:
    """l_i = 2 y_i / sigma^2, de-punctured to n with zeros, clipped to +-llr_max."""
    y = np.asarray(y, dtype=np.float64)
    _check_length(y, cfg.n_prime, 'channel output')
    if p.sigma2 == 0.0:
        llr = np.sign(y) * p.llr_max
    else:
        llr = np.clip(2.0 * y / p.sigma2, -p.llr_max, p.llr_max)
    return LlrVector(depuncture(llr, cfg, 0.0), punctured_mask(cfg))
