from dataclasses import dataclass
from typing import Any, Dict, Optional

from typing_extensions import Self

RESULT_FIELDS = (
    'snr_db', 'frames', 'block_errors', 'bit_errors', 'bler', 'ber',
    'avg_iters', 'avg_cycles', 'avg_activity',
)


@dataclass
class ChunkCounts:
    """Raw counts of one batch of simulated frames; adding two is associative."""

    frames: int = 0
    block_errors: int = 0
    bit_errors: int = 0
    iterations: int = 0
    cycles: Optional[int] = None
    activity: Optional[int] = None

    def __add__(self, other: 'ChunkCounts') -> 'ChunkCounts':
        def merge(a, b):
            if a is None and b is None:
                return None
            return (a or 0) + (b or 0)

        return ChunkCounts(
            frames=self.frames + other.frames,
            block_errors=self.block_errors + other.block_errors,
            bit_errors=self.bit_errors + other.bit_errors,
            iterations=self.iterations + other.iterations,
            cycles=merge(self.cycles, other.cycles),
            activity=merge(self.activity, other.activity),
        )


@dataclass
class SweepRecord:
    """Error-rate measurement at one SNR point."""

    snr_db: float
    frames: int
    block_errors: int
    bit_errors: int
    bler: float
    ber: float
    avg_iters: float
    avg_cycles: Optional[float] = None
    avg_activity: Optional[float] = None

    @classmethod
    def from_counts(cls, snr_db: float, counts: ChunkCounts, k: int) -> Self:
        frames = max(counts.frames, 1)
        return cls(
            snr_db=float(snr_db),
            frames=int(counts.frames),
            block_errors=int(counts.block_errors),
            bit_errors=int(counts.bit_errors),
            bler=float(counts.block_errors / frames),
            ber=float(counts.bit_errors / (frames * k)),
            avg_iters=float(counts.iterations / frames),
            avg_cycles=None if counts.cycles is None else float(counts.cycles / frames),
            avg_activity=None if counts.activity is None else float(counts.activity / frames),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert the record to a dictionary in column order."""
        return {name: getattr(self, name) for name in RESULT_FIELDS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        """Create a SweepRecord from a dictionary; empty strings read as missing."""
        def opt_float(value):
            return None if value in (None, '') else float(value)

        return cls(
            snr_db=float(data['snr_db']),
            frames=int(data['frames']),
            block_errors=int(data['block_errors']),
            bit_errors=int(data['bit_errors']),
            bler=float(data['bler']),
            ber=float(data['ber']),
            avg_iters=float(data['avg_iters']),
            avg_cycles=opt_float(data.get('avg_cycles')),
            avg_activity=opt_float(data.get('avg_activity')),
        )
