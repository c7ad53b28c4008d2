"""Offline training of per-edge check-node weights.

The gradient is estimated by simultaneous perturbation (SPSA): every edge
weight is moved by +-delta with random signs, the loss is measured on both
sides over the same frames, and the difference gives a two-point estimate
of the full gradient. Only forward decodes are needed.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from typing_extensions import Self

from core.codec import LengthMismatchError
from decoders.float_mp import EdgeWeights, decode, nms_uniform
from sim.context import CodeContext, FrameBatch

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 1.0 / 16.0
WEIGHT_CEIL = 1.0


@dataclass
class TrainConfig:
    snr_grid_db: List[float] = field(default_factory=lambda: [3.5, 4.0, 4.5])
    snr_weights: Optional[List[float]] = None
    batch_size: int = 200
    steps: int = 200
    step_size: float = 0.05
    perturbation: float = 0.01
    seed: int = 1
    i_max_train: int = 10
    beta: float = 10.0
    init_alpha: float = 0.75
    validation_frames: int = 1000
    validation_seed: int = 12345

    def __post_init__(self):
        if not self.snr_grid_db:
            raise ValueError("Training needs at least one SNR point")
        weights = np.ones(len(self.snr_grid_db)) if self.snr_weights is None \
            else np.asarray(self.snr_weights, dtype=np.float64)
        if weights.shape != (len(self.snr_grid_db),) or (weights < 0).any() or weights.sum() <= 0:
            raise ValueError("snr_weights must be non-negative, one per SNR point, not all zero")
        self.snr_weights = (weights / weights.sum()).tolist()
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)

    @classmethod
    def from_file(cls, path) -> Self:
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrainStep:
    step: int
    train_loss: float
    validation_loss: float
    gradient_norm: float
    best: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrainingLog:
    initial_validation_loss: float
    steps: List[TrainStep] = field(default_factory=list)

    @property
    def best_validation_loss(self) -> float:
        return min([self.initial_validation_loss] + [s.validation_loss for s in self.steps])

    def to_dict(self) -> Dict[str, Any]:
        return {'initial_validation_loss': self.initial_validation_loss,
                'steps': [s.to_dict() for s in self.steps]}

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + '\n', encoding='utf-8')
        return path


# --------------------------------------------------------------------------- #
# Loss
# --------------------------------------------------------------------------- #
def bit_losses(soft_intrinsic: np.ndarray, true_bits: np.ndarray) -> np.ndarray:
    """Per-bit cross-entropy log(1 + exp(-s*l)), s = +1 for bit 0 and -1 for bit 1."""
    soft = np.asarray(soft_intrinsic, dtype=np.float64)
    bits = np.asarray(true_bits)
    if soft.shape != bits.shape:
        raise LengthMismatchError(f"Soft output shape {soft.shape} != bit shape {bits.shape}")
    s = 1.0 - 2.0 * bits
    return np.logaddexp(0.0, -s * soft)


def smooth_max(terms: np.ndarray, beta: float = 10.0) -> np.ndarray:
    """beta-norm over the last axis of non-negative terms.

    Never below the largest term, close to 0 when every term is close to 0.
    """
    top = terms.max(axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    norm = np.sum((terms / safe) ** beta, axis=-1, keepdims=True) ** (1.0 / beta)
    return np.where(top > 0, top * norm, 0.0)[..., 0]


def loss_frame(soft_intrinsic: np.ndarray, true_bits: np.ndarray, beta: float = 10.0):
    """Block-error surrogate of one frame (or per frame of a batch)."""
    return smooth_max(bit_losses(soft_intrinsic, true_bits), beta)


# --------------------------------------------------------------------------- #
# SPSA
# --------------------------------------------------------------------------- #
def draw_batches(context: CodeContext, cfg: TrainConfig, rng: np.random.Generator,
                 frames: Optional[int] = None) -> List[FrameBatch]:
    frames = frames or cfg.batch_size
    return [context.sample(rng, snr, frames) for snr in cfg.snr_grid_db]


def batch_loss(context: CodeContext, weights: EdgeWeights, batches: List[FrameBatch],
               cfg: TrainConfig) -> float:
    """SNR-weighted mean frame loss."""
    total = 0.0
    for snr_weight, batch in zip(cfg.snr_weights, batches):
        if snr_weight == 0.0:
            continue
        result = decode(context.graph, weights, batch.llr, cfg.i_max_train, et_enabled=True)
        total += snr_weight * float(np.mean(loss_frame(result.soft_intrinsic, batch.codewords, cfg.beta)))
    return total


def estimate_gradient(weights: EdgeWeights, cfg: TrainConfig, context: CodeContext,
                      rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    """Two-sided SPSA estimate; both sides see the same frames and noise.

    Returns the per-edge gradient estimate and the mean of the two losses.
    """
    delta = rng.choice([-1.0, 1.0], size=len(weights))
    batches = draw_batches(context, cfg, rng)
    plus = batch_loss(context, EdgeWeights(weights.alpha + cfg.perturbation * delta), batches, cfg)
    minus = batch_loss(context, EdgeWeights(weights.alpha - cfg.perturbation * delta), batches, cfg)
    gradient = (plus - minus) / (2.0 * cfg.perturbation) * delta
    return gradient, 0.5 * (plus + minus)


def project(alpha: np.ndarray) -> np.ndarray:
    return np.clip(alpha, WEIGHT_FLOOR, WEIGHT_CEIL)


def train_weights(cfg: TrainConfig, context: CodeContext,
                  init: Optional[EdgeWeights] = None) -> Tuple[EdgeWeights, TrainingLog]:
    """Projected SPSA descent with step size step_size/sqrt(t); returns the best weights by validation loss."""
    init = init or nms_uniform(cfg.init_alpha, context.graph.num_edges)
    if len(init) != context.graph.num_edges:
        raise LengthMismatchError(f"{len(init)} initial weights for {context.graph.num_edges} edges")

    validation = draw_batches(context, cfg, np.random.default_rng(cfg.validation_seed), cfg.validation_frames)
    best = EdgeWeights(init.alpha.copy())
    best_loss = batch_loss(context, best, validation, cfg)
    log = TrainingLog(initial_validation_loss=best_loss)
    logger.info(f"Training {len(init)} edge weights for {cfg.steps} steps, "
                f"initial validation loss {best_loss:.5f}")

    rng = np.random.default_rng(cfg.seed)
    current = EdgeWeights(init.alpha.copy())
    for t in range(1, cfg.steps + 1):
        gradient, train_loss = estimate_gradient(current, cfg, context, rng)
        current = EdgeWeights(project(current.alpha - cfg.step_size / math.sqrt(t) * gradient))
        val_loss = batch_loss(context, current, validation, cfg)
        improved = val_loss < best_loss
        if improved:
            best, best_loss = EdgeWeights(current.alpha.copy()), val_loss
        log.steps.append(TrainStep(t, train_loss, val_loss, float(np.linalg.norm(gradient)), improved))
        logger.info(f"Step {t}/{cfg.steps}: train {train_loss:.5f}, validation {val_loss:.5f}"
                    f"{' (best)' if improved else ''}")

    return best, log
