import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from core.codec import ChannelParams, Encoder, channel_llr, encode, puncture, transmit
from core.codegen import QcMatrix, RateConfig, expand_qc, rate_config
from core.gf2 import Gf2Matrix, derive_generator, row_basis
from decoders.graph import TannerGraph

logger = logging.getLogger(__name__)


@dataclass
class FrameBatch:
    info: np.ndarray
    codewords: np.ndarray
    llr: np.ndarray


@dataclass
class CodeContext:
    """Everything needed to simulate one code at one rate.

    Positions in ``rate_cfg.local_puncture`` are not transmitted and reach
    the decoder as LLR 0.
    """

    graph: TannerGraph
    g: Gf2Matrix
    info_positions: np.ndarray
    rate_cfg: RateConfig
    digest: Optional[str] = None
    rate_label: Optional[str] = None

    @classmethod
    def from_qc(cls, qc: QcMatrix, rate) -> 'CodeContext':
        cfg = rate_config(rate, qc.z)
        h_full = expand_qc(qc)
        encoder = Encoder.from_parity_check(h_full, cfg)
        logger.info(f"Code {qc.digest()[:12]} at rate {cfg.rate}: k={encoder.k}, n={cfg.n}, "
                    f"n'={cfg.n_prime}, rank {encoder.rank}")
        return cls(
            graph=TannerGraph.for_rate(h_full, cfg),
            g=encoder.g,
            info_positions=np.asarray(encoder.info_positions),
            rate_cfg=cfg,
            digest=qc.digest(),
            rate_label=cfg.label,
        )

    @classmethod
    def from_parity_check(cls, h: Gf2Matrix, punctured: Sequence[int] = ()) -> 'CodeContext':
        """Context for an arbitrary (small) code, mainly for tests."""
        punctured = tuple(int(p) for p in punctured)
        basis = row_basis(h, punctured)
        g, info = derive_generator(basis, punctured)
        n_prime = h.cols - len(punctured)
        cfg = RateConfig(rate=Fraction(len(info), n_prime), removed_block_cols=0, active_cols=range(h.cols),
                         puncture_cols=punctured, k=len(info), n=h.cols, n_prime=n_prime, z=1)
        return cls(TannerGraph.from_parity_check(h), g, np.asarray(info), cfg)

    @property
    def k(self) -> int:
        return self.g.cols

    @property
    def n(self) -> int:
        return self.g.rows

    @property
    def rate(self) -> float:
        return self.k / self.rate_cfg.n_prime

    def sample(self, rng: np.random.Generator, snr_db: float, frames: int) -> FrameBatch:
        """Random information words through encode, puncture, transmit and channel_llr."""
        info = rng.integers(0, 2, size=(frames, self.k), dtype=np.uint8)
        codewords = encode(self.g, info)
        params = ChannelParams(snr_db)
        y = transmit(puncture(codewords, self.rate_cfg), params, rng)
        llr = channel_llr(y, params, self.rate_cfg)
        return FrameBatch(info, codewords, llr.values)
