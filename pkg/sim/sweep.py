"""Monte Carlo BLER/BER sweep over an SNR grid.

Frames are simulated in fixed-size chunks. Chunk ``c`` of SNR point ``p``
draws its random numbers from ``SeedSequence([seed, p, c])`` and chunks are
accumulated strictly in index order, so the outcome does not depend on the
number of workers.
"""
import asyncio
import logging
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from typing_extensions import Self

from artifacts.shift_table import ShiftTableFile
from artifacts.weights import WeightFile
from core.codegen import QcMatrix, parse_rate, rate_config
from core.records import ChunkCounts, SweepRecord
from decoders.factory import DECODER_KINDS, DecoderFactory
from decoders.float_mp import EdgeWeights
from sim.context import CodeContext

logger = logging.getLogger(__name__)


class SweepConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    rate: str = '12'
    snr_start_db: float = 1.0
    snr_stop_db: float = 4.0
    snr_step_db: float = 0.5
    max_frames: int = 100_000
    min_block_errors: int = 50
    i_max: int = 10
    decoder_kind: str = 'anms'
    et_enabled: bool = True
    weight_file: Optional[str] = None
    seed: int = 1
    code_file: Optional[str] = None
    chunk_frames: int = 1000
    workers: int = 1
    nms_alpha: float = 0.75

    def __post_init__(self):
        self.decoder_kind = 'fxp' if self.decoder_kind == 'fxp-anms' else self.decoder_kind
        self.validate()

    def validate(self):
        problems = []
        if self.decoder_kind not in DECODER_KINDS:
            problems.append(f"unknown decoder {self.decoder_kind!r}")
        if self.snr_step_db <= 0:
            problems.append("snr_step_db must be positive")
        if self.snr_stop_db < self.snr_start_db:
            problems.append("snr_stop_db is below snr_start_db")
        for name in ('max_frames', 'min_block_errors', 'i_max', 'chunk_frames', 'workers'):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if not 0.0 < self.nms_alpha <= 1.0:
            problems.append("nms_alpha must lie in (0, 1]")
        try:
            parse_rate(self.rate)
        except ValueError as e:
            problems.append(str(e))
        if problems:
            raise SweepConfigError("Invalid sweep configuration: " + "; ".join(problems))

    def snr_points(self) -> List[float]:
        count = int(math.floor((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9)) + 1
        return [round(self.snr_start_db + i * self.snr_step_db, 10) for i in range(count)]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ChunkJob:
    shifts: np.ndarray
    z: int
    rate: str
    decoder_kind: str
    alpha: Optional[np.ndarray]
    nms_alpha: float
    i_max: int
    et_enabled: bool
    snr_db: float
    frames: int
    entropy: Tuple[int, int, int]


_CONTEXTS: Dict[Tuple[str, str], CodeContext] = {}


def _context_for(shifts: np.ndarray, z: int, rate: str) -> CodeContext:
    qc = QcMatrix(shifts, z)
    key = (qc.digest(), rate)
    if key not in _CONTEXTS:
        _CONTEXTS[key] = CodeContext.from_qc(qc, rate)
    return _CONTEXTS[key]


def count_errors(context: CodeContext, info: np.ndarray, hard_bits: np.ndarray) -> Tuple[int, int]:
    """(block errors, bit errors) over the information positions."""
    wrong = hard_bits[:, context.info_positions] != info
    return int(wrong.any(axis=1).sum()), int(wrong.sum())


def simulate_chunk(job: ChunkJob) -> ChunkCounts:
    context = _context_for(job.shifts, job.z, job.rate)
    weights = EdgeWeights(job.alpha) if job.alpha is not None else None
    decoder = DecoderFactory.get_decoder(job.decoder_kind, context.graph, weights,
                                         {'nms_alpha': job.nms_alpha})
    rng = np.random.default_rng(np.random.SeedSequence(list(job.entropy)))
    batch = context.sample(rng, job.snr_db, job.frames)
    result, report = decoder.decode_batch(batch.llr, job.i_max, job.et_enabled)
    block_errors, bit_errors = count_errors(context, batch.info, result.hard_bits)
    logger.debug(f"Chunk {job.entropy}: {job.frames} frames, {block_errors} block errors")
    return ChunkCounts(
        frames=job.frames,
        block_errors=block_errors,
        bit_errors=bit_errors,
        iterations=int(np.sum(result.iterations_used)),
        cycles=None if report is None else int(np.sum(report.cycles)),
        activity=None if report is None else int(np.sum(report.activity)),
    )


class SweepRunner:
    """Runs the SNR points of one sweep; chunks go to a process pool when ``workers > 1``."""

    def __init__(self, cfg: SweepConfig, qc: QcMatrix, weights: Optional[EdgeWeights] = None):
        self.cfg = cfg
        self.qc = qc
        self.rate_cfg = rate_config(cfg.rate, qc.z)
        self.context = _context_for(qc.shifts, qc.z, self.rate_cfg.label)
        self.alpha = self._resolve_weights(weights)

    def _resolve_weights(self, weights: Optional[EdgeWeights]) -> Optional[np.ndarray]:
        cfg = self.cfg
        if cfg.decoder_kind in ('nms', 'spa'):
            if weights is not None or cfg.weight_file:
                logger.warning(f"{cfg.decoder_kind} decoder ignores trained weights")
            return None
        if weights is None and cfg.weight_file:
            weights = WeightFile({'path': cfg.weight_file}).load(
                expected_digest=self.context.digest,
                expected_rate=self.rate_cfg.label,
                num_edges=self.context.graph.num_edges,
            )
        if weights is None:
            logger.warning(f"No weight file for {cfg.decoder_kind}; using uniform alpha {cfg.nms_alpha}")
            return np.full(self.context.graph.num_edges, cfg.nms_alpha)
        if len(weights) != self.context.graph.num_edges:
            raise SweepConfigError(f"{len(weights)} weights for {self.context.graph.num_edges} edges")
        return weights.alpha

    def _job(self, point: int, chunk: int, snr_db: float, frames: int) -> ChunkJob:
        cfg = self.cfg
        return ChunkJob(self.qc.shifts, self.qc.z, self.rate_cfg.label, cfg.decoder_kind, self.alpha,
                        cfg.nms_alpha, cfg.i_max, cfg.et_enabled, snr_db, frames,
                        (cfg.seed, point, chunk))

    async def run_point(self, point: int, snr_db: float, executor: Optional[Executor]) -> SweepRecord:
        cfg = self.cfg
        loop = asyncio.get_running_loop()
        counts = ChunkCounts()
        chunk = 0
        while counts.block_errors < cfg.min_block_errors and counts.frames < cfg.max_frames:
            wave = []
            planned = counts.frames
            for _ in range(cfg.workers):
                size = min(cfg.chunk_frames, cfg.max_frames - planned)
                if size <= 0:
                    break
                wave.append(self._job(point, chunk, snr_db, size))
                chunk += 1
                planned += size
            results = await asyncio.gather(*[loop.run_in_executor(executor, simulate_chunk, job)
                                             for job in wave])
            for result in results:
                counts = counts + result
                if counts.block_errors >= cfg.min_block_errors:
                    break

        record = SweepRecord.from_counts(snr_db, counts, self.context.k)
        logger.info(f"SNR {snr_db:.2f} dB: {record.frames} frames, {record.block_errors} block errors, "
                    f"BLER {record.bler:.3e}, BER {record.ber:.3e}, avg iters {record.avg_iters:.2f}")
        return record

    async def run(self) -> List[SweepRecord]:
        cfg = self.cfg
        logger.info(f"Sweep: {cfg.decoder_kind} at rate {self.rate_cfg.rate}, "
                    f"SNR {cfg.snr_points()}, {cfg.workers} worker(s)")
        executor = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
        try:
            return [await self.run_point(i, snr, executor) for i, snr in enumerate(cfg.snr_points())]
        finally:
            if executor is not None:
                executor.shutdown()


def load_code(path) -> QcMatrix:
    return ShiftTableFile({'path': path}).load()


async def run_sweep_async(cfg: SweepConfig, qc: Optional[QcMatrix] = None,
                          weights: Optional[EdgeWeights] = None) -> List[SweepRecord]:
    if qc is None:
        if not cfg.code_file:
            raise SweepConfigError("No code given: set code_file or pass a shift table")
        qc = load_code(cfg.code_file)
    return await SweepRunner(cfg, qc, weights).run()


def run_sweep(cfg: SweepConfig, qc: Optional[QcMatrix] = None,
              weights: Optional[EdgeWeights] = None) -> List[SweepRecord]:
    return asyncio.run(run_sweep_async(cfg, qc, weights))
