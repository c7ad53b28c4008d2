"""Bit-accurate fixed-point model of the decoder datapath.

Numbers are carried as integer counts of quarters (2 fractional bits).
Messages between the pipeline registers are 7-bit sign-magnitude words
(magnitude 0..63, i.e. up to 15.75); the variable-node adder works in
two's complement with one extra integer bit (-127..127 quarters) and
saturates. Check-node outputs are scaled by weights on a 1/16 grid with
round-to-nearest, ties away from zero.

The scalar helpers mirror single hardware blocks and are what the unit
tests pin; :class:`FxpDatapath` runs the same arithmetic vectorized over
every edge of a batch of frames.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from fixedpoint import FixedPoint

from core.codec import LengthMismatchError
from decoders.base import AbstractDecoder, CycleReport, DecodeResult
from decoders.float_mp import EdgeWeights
from decoders.graph import DegreeError, TannerGraph

logger = logging.getLogger(__name__)

FRAC_BITS = 2
WORD_MAG_MAX = 63          # 6-bit magnitude
ACCUM_MAX = 127            # 8-bit two's complement, symmetric
WEIGHT_SHIFT = 4
WEIGHT_ONE = 1 << WEIGHT_SHIFT


# --------------------------------------------------------------------------- #
# Words
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class FxpWord:
    """Sign-magnitude message word; +0 and -0 compare equal."""

    sign: int
    magnitude: int

    def __post_init__(self):
        if self.sign not in (0, 1):
            raise ValueError(f"Sign bit must be 0 or 1, got {self.sign}")
        if not 0 <= self.magnitude <= WORD_MAG_MAX:
            raise ValueError(f"Magnitude {self.magnitude} outside 0..{WORD_MAG_MAX}")

    @property
    def quarters(self) -> int:
        return -self.magnitude if self.sign else self.magnitude

    @property
    def value(self) -> float:
        return self.quarters / 4.0

    @property
    def encoding(self) -> int:
        return (self.sign << 6) | self.magnitude

    @classmethod
    def from_encoding(cls, bits: int) -> 'FxpWord':
        return cls((bits >> 6) & 1, bits & WORD_MAG_MAX)

    @classmethod
    def from_quarters(cls, q: int) -> 'FxpWord':
        q = max(-WORD_MAG_MAX, min(WORD_MAG_MAX, int(q)))
        return cls(1 if q < 0 else 0, abs(q))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FxpWord):
            return NotImplemented
        return self.quarters == other.quarters

    def __hash__(self):
        return hash(self.quarters)

    def __repr__(self):
        return f"FxpWord({'-' if self.sign else '+'}{self.magnitude / 4})"


@dataclass(frozen=True)
class FxpAccum:
    """Two's-complement adder word, -31.75..31.75."""

    raw: int

    def __post_init__(self):
        if not -ACCUM_MAX <= self.raw <= ACCUM_MAX:
            raise ValueError(f"Accumulator value {self.raw} outside +-{ACCUM_MAX}")

    @property
    def value(self) -> float:
        return self.raw / 4.0

    @property
    def encoding(self) -> int:
        return self.raw & 0xFF

    @classmethod
    def saturate(cls, q: int) -> 'FxpAccum':
        return cls(max(-ACCUM_MAX, min(ACCUM_MAX, int(q))))


# --------------------------------------------------------------------------- #
# Quantization
# --------------------------------------------------------------------------- #
def quantize(x: float) -> FxpWord:
    """Nearest multiple of 0.25 (ties away from zero), saturated to +-15.75."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("Cannot quantize NaN")
    clipped = max(-16.0, min(16.0, x))
    fp = FixedPoint(clipped, signed=True, m=6, n=FRAC_BITS, rounding='out',
                    overflow='clamp', overflow_alert='ignore', implicit_cast_alert='ignore')
    return FxpWord.from_quarters(round(float(fp) * 4))


def quantize_array(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`quantize`; returns signed quarter counts."""
    x = np.asarray(x, dtype=np.float64)
    q = np.sign(x) * np.floor(np.minimum(np.abs(x), 16.0) * 4.0 + 0.5)
    return np.clip(q, -WORD_MAG_MAX, WORD_MAG_MAX).astype(np.int64)


def quantize_weights(weights: EdgeWeights) -> np.ndarray:
    """Snap weights to multiples of 1/16 in [1/16, 1]; returns sixteenths."""
    scaled = np.floor(np.abs(weights.alpha) * WEIGHT_ONE + 0.5)
    w16 = np.clip(scaled, 1, WEIGHT_ONE).astype(np.int64)
    snapped = w16 / WEIGHT_ONE
    moved = int(np.count_nonzero(np.abs(snapped - weights.alpha) > 0.5 / WEIGHT_ONE))
    if moved:
        logger.warning(f"{moved} edge weights were clipped into [1/16, 1]")
    return w16


def sm_to_2c(w: FxpWord) -> FxpAccum:
    return FxpAccum(w.quarters)


def two_c_to_sm(a: FxpAccum) -> FxpWord:
    return FxpWord.from_quarters(a.raw)


# --------------------------------------------------------------------------- #
# Blocks
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class CnBlockOutput:
    min1: int
    min2: int
    min1_index: int
    sign_products: Tuple[int, ...]
    parity: int


def cn_block(inputs: Sequence[FxpWord]) -> CnBlockOutput:
    if len(inputs) < 2:
        raise DegreeError(f"Check node block needs degree >= 2, got {len(inputs)}")
    mags = [w.magnitude for w in inputs]
    idx = min(range(len(mags)), key=lambda i: (mags[i], i))
    min2 = min(m for i, m in enumerate(mags) if i != idx)
    parity = 0
    for w in inputs:
        parity ^= w.sign
    return CnBlockOutput(mags[idx], min2, idx, tuple(parity ^ w.sign for w in inputs), parity)


def scale_magnitude(selected: int, w16: int) -> int:
    return min(WORD_MAG_MAX, (selected * w16 + WEIGHT_ONE // 2) >> WEIGHT_SHIFT)


def pu_select_scale(own: FxpWord, cn: CnBlockOutput, w16: int) -> FxpWord:
    """Processing unit of one edge: MUX2 on the own magnitude, then the constant multiply."""
    if not 1 <= w16 <= WEIGHT_ONE:
        raise ValueError(f"Quantized weight {w16} outside 1..{WEIGHT_ONE}")
    selected = cn.min2 if own.magnitude == cn.min1 else cn.min1
    return FxpWord(cn.parity ^ own.sign, scale_magnitude(selected, w16))


def vn_block(channel: FxpWord, incoming: Sequence[FxpWord]) -> Tuple[FxpAccum, List[FxpWord]]:
    total = channel.quarters + sum(w.quarters for w in incoming)
    intrinsic = FxpAccum.saturate(total)
    outgoing = [FxpWord.from_quarters(intrinsic.raw - w.quarters) for w in incoming]
    return intrinsic, outgoing


# --------------------------------------------------------------------------- #
# Vectorized datapath
# --------------------------------------------------------------------------- #
class FxpDatapath:
    """Register state of one or more codewords in the two-stage datapath.

    ``r1`` holds the VN->CN words, ``r2`` the selected and scaled CN->VN
    words, both as signed quarter counts per edge. A frozen frame keeps its
    registers and is skipped by both stages.
    """

    def __init__(self, graph: TannerGraph, w16: np.ndarray, channel: np.ndarray):
        self.graph = graph
        self.w16_slots = graph.gather(np.asarray(w16, dtype=np.int64), 0)
        self.channel = np.atleast_2d(channel).astype(np.int64)
        frames = self.channel.shape[0]
        self.r1 = self.channel[:, graph.edge_vn].copy()
        self.r2 = np.zeros((frames, graph.num_edges), dtype=np.int64)
        self.intrinsic = self.channel.copy()
        self.iterations = np.zeros(frames, dtype=np.int64)
        self.satisfied = np.zeros(frames, dtype=bool)
        self.frozen = np.zeros(frames, dtype=bool)
        self.writes = np.zeros(frames, dtype=np.int64)
        self.toggles = np.zeros(frames, dtype=np.int64)
        self.cycles = np.zeros(frames, dtype=np.int64)

    @property
    def frames(self) -> int:
        return self.channel.shape[0]

    def _record(self, rows: np.ndarray, old: np.ndarray, new: np.ndarray):
        self.writes[rows] += self.graph.num_edges
        self.toggles[rows] += np.count_nonzero(old != new, axis=-1)
        self.cycles[rows] += 1

    def check_node_stage(self):
        """R1 -> CN block -> processing units -> R2."""
        rows = np.flatnonzero(~self.frozen)
        if rows.size == 0:
            return
        g = self.graph
        msgs = g.gather(self.r1[rows], 0)
        mag = np.where(g.slot_valid, np.abs(msgs), WORD_MAG_MAX + 1)
        neg = (msgs < 0) & g.slot_valid

        min1 = mag.min(axis=-1, keepdims=True)
        idx1 = np.argmin(mag, axis=-1)[..., None]
        min2 = np.where(np.arange(mag.shape[-1]) == idx1, WORD_MAG_MAX + 1, mag).min(axis=-1, keepdims=True)
        selected = np.where(mag == min1, min2, min1)
        scaled = np.minimum(WORD_MAG_MAX, (selected * self.w16_slots + WEIGHT_ONE // 2) >> WEIGHT_SHIFT)
        parity = (neg.sum(axis=-1, keepdims=True) % 2).astype(bool)
        out = g.scatter(np.where(parity ^ neg, -scaled, scaled))

        self._record(rows, self.r2[rows], out)
        self.r2[rows] = out

    def variable_node_stage(self, et_enabled: bool) -> np.ndarray:
        """R2 -> 2C -> multi-operand adder -> SM -> R1, then the ET check.

        Returns the rows that terminated in this stage.
        """
        rows = np.flatnonzero(~self.frozen)
        if rows.size == 0:
            return rows
        g = self.graph
        c2v = self.r2[rows]
        total = self.channel[rows] + np.rint(g.accumulate(c2v)).astype(np.int64)
        intr = np.clip(total, -ACCUM_MAX, ACCUM_MAX)
        out = np.clip(intr[:, g.edge_vn] - c2v, -WORD_MAG_MAX, WORD_MAG_MAX)

        self._record(rows, self.r1[rows], out)
        self.r1[rows] = out
        self.intrinsic[rows] = intr
        self.iterations[rows] += 1
        ok = g.parity_ok(intr < 0)
        self.satisfied[rows] = ok
        done = rows[ok] if et_enabled else rows[:0]
        self.frozen[done] = True
        return done

    def iterate(self, et_enabled: bool) -> np.ndarray:
        self.check_node_stage()
        return self.variable_node_stage(et_enabled)

    def result(self) -> DecodeResult:
        return DecodeResult(
            hard_bits=(self.intrinsic < 0).astype(np.uint8),
            soft_intrinsic=self.intrinsic / 4.0,
            iterations_used=self.iterations.copy(),
            parity_satisfied=self.satisfied.copy(),
        )

    def report(self) -> CycleReport:
        return CycleReport(cycles=self.cycles.copy(), activity=self.writes.copy(),
                           toggles=self.toggles.copy())


def decode_fxp(graph: TannerGraph, w16: np.ndarray, llr, i_max: int,
               et_enabled: bool = True) -> Tuple[DecodeResult, CycleReport]:
    """Fixed-point flooding decode of one frame or a (frames, n) batch.

    Channel LLRs are quantized on entry. Each iteration is one check-node
    stage and one variable-node stage, so ``cycles = 2 * iterations_used``.
    """
    if i_max < 1:
        raise ValueError(f"i_max must be >= 1, got {i_max}")
    values = np.asarray(getattr(llr, 'values', llr), dtype=np.float64)
    single = values.ndim == 1
    values = np.atleast_2d(values)
    if values.shape[-1] != graph.num_vn:
        raise LengthMismatchError(f"LLR length {values.shape[-1]} != {graph.num_vn} variable nodes")
    if len(w16) != graph.num_edges:
        raise LengthMismatchError(f"Expected {graph.num_edges} quantized weights, got {len(w16)}")

    path = FxpDatapath(graph, w16, quantize_array(values))
    for _ in range(i_max):
        path.iterate(et_enabled)
        if path.frozen.all():
            break
    result, report = path.result(), path.report()
    if single:
        return result.frame(0), CycleReport(int(report.cycles[0]), int(report.activity[0]),
                                            int(report.toggles[0]))
    return result, report


class FxpDecoder(AbstractDecoder):
    kind = 'fxp'

    def __init__(self, graph: TannerGraph, weights: EdgeWeights, config: Optional[Dict[str, Any]] = None):
        super().__init__(graph, config)
        self.weights = weights
        self.w16 = quantize_weights(weights)

    def validate_config(self) -> bool:
        if len(self.w16) != self.graph.num_edges:
            logger.error(f"fxp decoder needs {self.graph.num_edges} edge weights, got {len(self.w16)}")
            return False
        return True

    def decode_batch(self, llr: np.ndarray, i_max: int, et_enabled: bool = True):
        return decode_fxp(self.graph, self.w16, np.atleast_2d(llr), i_max, et_enabled)
