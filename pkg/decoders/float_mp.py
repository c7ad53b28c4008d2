"""Floating-point flooding decoders: per-edge normalized min-sum, uniform NMS and sum-product.

All kernels work on batches. Check-node messages are gathered into the
graph's padded (num_cn, max_degree) layout, so one numpy expression updates
every check node of every frame at once.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from core.codec import LLR_MAX, LengthMismatchError
from decoders.base import AbstractDecoder, DecodeResult
from decoders.graph import DegreeError, TannerGraph

logger = logging.getLogger(__name__)

CN_RULES = ('anms', 'nms', 'spa')


@dataclass
class EdgeWeights:
    """One CN->VN weight per edge id, shared by every iteration."""

    alpha: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        if self.alpha.ndim != 1:
            raise ValueError("Edge weights must be a 1-D vector")

    def __len__(self) -> int:
        return self.alpha.size

    @property
    def is_uniform(self) -> bool:
        return bool(self.alpha.size == 0 or np.all(self.alpha == self.alpha[0]))

    def clipped(self, low: float, high: float) -> 'EdgeWeights':
        return EdgeWeights(np.clip(self.alpha, low, high))

    def to_dict(self) -> Dict[str, Any]:
        return {'alpha': self.alpha.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EdgeWeights':
        return cls(np.asarray(data['alpha'], dtype=np.float64))


def nms_uniform(alpha: float, num_edges: int) -> EdgeWeights:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"NMS weight must lie in (0, 1], got {alpha}")
    return EdgeWeights(np.full(num_edges, float(alpha)))


# --------------------------------------------------------------------------- #
# Check-node kernels on the padded layout (..., num_cn, max_degree)
# --------------------------------------------------------------------------- #
def _sign_negative(x: np.ndarray) -> np.ndarray:
    # sign(0) = +1
    return x < 0


def _min_sum_padded(x: np.ndarray, valid: np.ndarray) -> np.ndarray:
    mag = np.where(valid, np.abs(x), np.inf)
    neg = _sign_negative(x) & valid

    idx1 = np.argmin(mag, axis=-1)
    min1 = np.take_along_axis(mag, idx1[..., None], axis=-1)
    own_is_min = np.arange(mag.shape[-1]) == idx1[..., None]
    min2 = np.where(own_is_min, np.inf, mag).min(axis=-1, keepdims=True)
    selected = np.where(own_is_min, min2, min1)

    parity = (neg.sum(axis=-1, keepdims=True) % 2).astype(bool)
    return np.where(parity ^ neg, -selected, selected)


def _spa_padded(x: np.ndarray, valid: np.ndarray) -> np.ndarray:
    t = np.where(valid, np.tanh(np.clip(x, -LLR_MAX, LLR_MAX) / 2.0), 1.0)
    ones = np.ones(t.shape[:-1] + (1,))
    prefix = np.cumprod(np.concatenate([ones, t[..., :-1]], axis=-1), axis=-1)
    suffix = np.cumprod(np.concatenate([ones, t[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    with np.errstate(divide='ignore'):
        out = 2.0 * np.arctanh(prefix * suffix)
    return np.clip(out, -LLR_MAX, LLR_MAX)


def _as_check_inputs(in_msgs: Sequence[float]) -> np.ndarray:
    x = np.asarray(in_msgs, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise DegreeError(f"Check node update needs degree >= 2, got {x.size}")
    return x


def cn_update_anms(in_msgs: Sequence[float], weights: Sequence[float]) -> np.ndarray:
    """out_j = w_j * prod_{k!=j} sign(in_k) * min_{k!=j} |in_k|"""
    x = _as_check_inputs(in_msgs)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != x.shape:
        raise LengthMismatchError(f"{w.size} weights for a degree-{x.size} check node")
    return w * _min_sum_padded(x, np.ones_like(x, dtype=bool))


def cn_update_spa(in_msgs: Sequence[float]) -> np.ndarray:
    x = _as_check_inputs(in_msgs)
    return _spa_padded(x, np.ones_like(x, dtype=bool))


def vn_update(channel_llr: float, incoming: Sequence[float]):
    """Returns (intrinsic, outgoing) with outgoing_j = intrinsic - incoming_j."""
    inc = np.asarray(incoming, dtype=np.float64)
    intrinsic = float(channel_llr) + float(inc.sum())
    return intrinsic, intrinsic - inc


# --------------------------------------------------------------------------- #
# Flooding decoder
# --------------------------------------------------------------------------- #
def _check_node_pass(graph: TannerGraph, v2c: np.ndarray, alpha_slots: Optional[np.ndarray],
                     cn_rule: str) -> np.ndarray:
    x = graph.gather(v2c, 0.0)
    if cn_rule == 'spa':
        out = _spa_padded(x, graph.slot_valid)
    else:
        out = _min_sum_padded(x, graph.slot_valid) * alpha_slots
    return graph.scatter(out)


def decode(graph: TannerGraph, weights: Optional[EdgeWeights], llr, i_max: int,
           et_enabled: bool = True, cn_rule: str = 'anms',
           trace: Optional[List[Dict[str, np.ndarray]]] = None) -> DecodeResult:
    """Flooding message passing on one frame (length n) or a batch (frames, n).

    Each iteration runs every check node, then every variable node, then the
    parity check on the signs of the intrinsic LLRs. With ``et_enabled`` a
    frame stops at the first iteration whose hard decisions form a codeword.
    ``trace``, when given, receives the per-iteration message arrays.
    """
    if cn_rule not in CN_RULES:
        raise ValueError(f"Unknown check node rule: {cn_rule}")
    if i_max < 1:
        raise ValueError(f"i_max must be >= 1, got {i_max}")

    values = np.asarray(getattr(llr, 'values', llr), dtype=np.float64)
    single = values.ndim == 1
    values = np.atleast_2d(values)
    if values.shape[-1] != graph.num_vn:
        raise LengthMismatchError(f"LLR length {values.shape[-1]} != {graph.num_vn} variable nodes")

    alpha_slots = None
    if cn_rule != 'spa':
        if weights is None or len(weights) != graph.num_edges:
            raise LengthMismatchError(f"Expected {graph.num_edges} edge weights")
        if cn_rule == 'nms' and not weights.is_uniform:
            raise ValueError("NMS decoding expects a uniform weight vector")
        alpha_slots = graph.gather(weights.alpha, 0.0)

    frames = values.shape[0]
    v2c = values[:, graph.edge_vn]
    intrinsic = values.copy()
    iterations = np.zeros(frames, dtype=np.int64)
    satisfied = np.zeros(frames, dtype=bool)
    active = np.ones(frames, dtype=bool)

    for it in range(1, i_max + 1):
        rows = np.flatnonzero(active)
        c2v = _check_node_pass(graph, v2c[rows], alpha_slots, cn_rule)
        intr = values[rows] + graph.accumulate(c2v)
        v2c[rows] = intr[:, graph.edge_vn] - c2v
        ok = graph.parity_ok(intr < 0)

        intrinsic[rows] = intr
        iterations[rows] = it
        satisfied[rows] = ok
        if trace is not None:
            trace.append({'iteration': it, 'rows': rows, 'c2v': c2v.copy(),
                          'v2c': v2c[rows].copy(), 'intrinsic': intr.copy()})
        if et_enabled:
            active[rows[ok]] = False
            if not active.any():
                break

    result = DecodeResult(
        hard_bits=(intrinsic < 0).astype(np.uint8),
        soft_intrinsic=intrinsic,
        iterations_used=iterations,
        parity_satisfied=satisfied,
    )
    return result.frame(0) if single else result


class FloatDecoder(AbstractDecoder):
    """Floating-point flooding decoder for one check-node rule."""

    def __init__(self, graph: TannerGraph, weights: Optional[EdgeWeights], cn_rule: str = 'anms',
                 config: Optional[Dict[str, Any]] = None):
        super().__init__(graph, config)
        self.weights = weights
        self.cn_rule = cn_rule
        self.kind = cn_rule

    def validate_config(self) -> bool:
        if self.cn_rule not in CN_RULES:
            logger.error(f"Unknown check node rule: {self.cn_rule}")
            return False
        if self.cn_rule != 'spa' and (self.weights is None or len(self.weights) != self.graph.num_edges):
            logger.error(f"{self.cn_rule} decoder needs {self.graph.num_edges} edge weights")
            return False
        return True

    def decode_batch(self, llr: np.ndarray, i_max: int, et_enabled: bool = True):
        return decode(self.graph, self.weights, np.atleast_2d(llr), i_max, et_enabled, self.cn_rule), None
