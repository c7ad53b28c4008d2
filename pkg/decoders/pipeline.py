"""Cycle model of the two-codeword interleaved pipeline.

Two codewords share the datapath: while one passes the check-node stage the
other passes the variable-node stage, and they swap every clock. When early
termination fires for one of them its slot freezes and stops writing its
registers; the surviving codeword optionally holds its outputs for one
extra cycle at that moment.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from core.codec import LengthMismatchError
from decoders.base import DecodeResult
from decoders.fxp import FxpDatapath, quantize_array
from decoders.graph import TannerGraph

logger = logging.getLogger(__name__)


@dataclass
class PipelineState:
    slot_a: FxpDatapath
    slot_b: FxpDatapath
    cycle_count: int = 0
    stall_cycles: int = 0
    freeze_cycle_a: Optional[int] = None
    freeze_cycle_b: Optional[int] = None

    @property
    def frozen_a(self) -> bool:
        return bool(self.slot_a.frozen[0])

    @property
    def frozen_b(self) -> bool:
        return bool(self.slot_b.frozen[0])

    @property
    def activity_a(self) -> int:
        return int(self.slot_a.writes[0])

    @property
    def activity_b(self) -> int:
        return int(self.slot_b.writes[0])


@dataclass
class PipelineReport:
    result_a: DecodeResult
    result_b: DecodeResult
    total_cycles: int
    activity_a: int
    activity_b: int
    freeze_cycle_a: Optional[int] = None
    freeze_cycle_b: Optional[int] = None
    stall_cycles: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'total_cycles': self.total_cycles,
            'activity_a': self.activity_a,
            'activity_b': self.activity_b,
            'iterations_a': int(self.result_a.iterations_used),
            'iterations_b': int(self.result_b.iterations_used),
            'freeze_cycle_a': self.freeze_cycle_a,
            'freeze_cycle_b': self.freeze_cycle_b,
            'stall_cycles': self.stall_cycles,
        }


def _slot(graph: TannerGraph, w16: np.ndarray, llr) -> FxpDatapath:
    values = np.asarray(getattr(llr, 'values', llr), dtype=np.float64)
    if values.ndim != 1 or values.size != graph.num_vn:
        raise LengthMismatchError(f"Pipeline slots take one frame of length {graph.num_vn}")
    return FxpDatapath(graph, w16, quantize_array(values))


def pipeline_sim(graph: TannerGraph, w16: np.ndarray, llr_a, llr_b, i_max: int,
                 et_enabled: bool = True, survivor_stall: bool = True) -> PipelineReport:
    """Run two codewords through the interleaved pipeline.

    Slot A takes the check-node stage on even cycles and slot B on odd
    cycles; each iteration of both codewords spans two cycles. The cycle
    count is ``2 * max(iterations)`` plus the survivor stall when exactly one
    codeword terminates early.
    """
    if i_max < 1:
        raise ValueError(f"i_max must be >= 1, got {i_max}")
    state = PipelineState(_slot(graph, w16, llr_a), _slot(graph, w16, llr_b))

    for _ in range(i_max):
        if state.frozen_a and state.frozen_b:
            break
        # cycle 2t: A check-node stage, B variable-node stage of its previous half
        state.slot_a.check_node_stage()
        state.cycle_count += 1
        state.slot_b.check_node_stage()
        done_a = state.slot_a.variable_node_stage(et_enabled).size > 0
        state.cycle_count += 1
        done_b = state.slot_b.variable_node_stage(et_enabled).size > 0

        if done_a:
            state.freeze_cycle_a = state.cycle_count
        if done_b:
            state.freeze_cycle_b = state.cycle_count
        if survivor_stall and done_a != done_b and not (state.frozen_a and state.frozen_b):
            state.stall_cycles += 1
            survivor = 'B' if done_a else 'A'
            logger.debug(f"Slot {'A' if done_a else 'B'} froze at cycle {state.cycle_count}; "
                         f"slot {survivor} holds its outputs one cycle")

    iters = max(int(state.slot_a.iterations[0]), int(state.slot_b.iterations[0]))
    return PipelineReport(
        result_a=state.slot_a.result().frame(0),
        result_b=state.slot_b.result().frame(0),
        total_cycles=2 * iters + state.stall_cycles,
        activity_a=state.activity_a,
        activity_b=state.activity_b,
        freeze_cycle_a=state.freeze_cycle_a,
        freeze_cycle_b=state.freeze_cycle_b,
        stall_cycles=state.stall_cycles,
    )
