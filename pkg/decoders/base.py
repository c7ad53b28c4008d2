from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from decoders.graph import TannerGraph


@dataclass
class DecodeResult:
    """Outcome of decoding one frame or a batch of frames.

    For a batch every field carries a leading frames axis; ``iterations_used``
    and ``parity_satisfied`` are then arrays.
    """

    hard_bits: np.ndarray
    soft_intrinsic: np.ndarray
    iterations_used: Any
    parity_satisfied: Any

    def frame(self, i: int) -> 'DecodeResult':
        return DecodeResult(
            hard_bits=self.hard_bits[i],
            soft_intrinsic=self.soft_intrinsic[i],
            iterations_used=int(np.asarray(self.iterations_used)[i]),
            parity_satisfied=bool(np.asarray(self.parity_satisfied)[i]),
        )


@dataclass
class CycleReport:
    """Cycle and register-activity accounting of the fixed-point datapath."""

    cycles: Any
    activity: Any
    toggles: Any
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'cycles': np.asarray(self.cycles).tolist(),
            'activity': np.asarray(self.activity).tolist(),
            'toggles': np.asarray(self.toggles).tolist(),
            **self.extra,
        }


class AbstractDecoder(ABC):
    """Common surface of the decoders the harness and the trainer drive."""

    kind = 'abstract'

    def __init__(self, graph: TannerGraph, config: Optional[Dict[str, Any]] = None):
        self.graph = graph
        self.config = config or {}

    @abstractmethod
    def decode_batch(self, llr: np.ndarray, i_max: int, et_enabled: bool = True):
        """
        Decode a (frames, n) array of channel LLRs.

        Returns:
            (DecodeResult, Optional[CycleReport])
        """
        pass

    @abstractmethod
    def validate_config(self) -> bool:
        pass
