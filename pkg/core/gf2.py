"""Dense GF(2) linear algebra for the parity-check and generator matrices.

Matrices are small (at most 96 x 288), so everything is kept as a dense
``uint8`` array of 0/1 entries and row operations are plain numpy XORs.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Set, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class DimensionError(ValueError):
    """Operand shapes do not line up."""


class RankDeficiencyError(ValueError):
    """The matrix does not have full row rank."""

    def __init__(self, rank: int, rows: int):
        super().__init__(f"Matrix has rank {rank} but {rows} rows (deficiency {rows - rank})")
        self.rank = rank
        self.rows = rows


@dataclass(frozen=True, eq=False)
class Gf2Matrix:
    """Binary matrix, row-major, entries in {0, 1}."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8) & 1
        if bits.ndim != 2:
            raise DimensionError(f"Expected a 2-D bit array, got shape {bits.shape}")
        bits.setflags(write=False)
        object.__setattr__(self, 'bits', bits)

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bits.shape

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'Gf2Matrix':
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, size: int) -> 'Gf2Matrix':
        return cls(np.eye(size, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> 'Gf2Matrix':
        return cls(np.array([list(r) for r in rows], dtype=np.uint8))

    def columns(self, index: Sequence[int]) -> 'Gf2Matrix':
        """Column restriction, keeping the given order."""
        return Gf2Matrix(self.bits[:, list(index)])

    def transpose(self) -> 'Gf2Matrix':
        return Gf2Matrix(self.bits.T.copy())

    def weight(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.shape, np.packbits(self.bits).tobytes()))


def _as_bits(vector, length: int, name: str) -> np.ndarray:
    v = np.asarray(vector, dtype=np.uint8) & 1
    if v.shape[-1] != length:
        raise DimensionError(f"{name} has length {v.shape[-1]}, expected {length}")
    return v


def syndrome(h: Gf2Matrix, c) -> np.ndarray:
    """H·c over GF(2). ``c`` may also be a batch of shape (frames, n)."""
    c = _as_bits(c, h.cols, 'codeword')
    return (c.astype(np.int64) @ h.bits.T.astype(np.int64) % 2).astype(np.uint8)


def row_reduce_with_pivot_preference(
    h: Gf2Matrix,
    forbidden_pivots: Iterable[int] = (),
) -> Tuple[Gf2Matrix, List[int], int]:
    """Gauss-Jordan elimination that keeps pivots out of ``forbidden_pivots``.

    Rows are processed top to bottom. For each row the pivot is the leftmost
    allowed column holding a 1; a forbidden column is used only when the
    row has no allowed 1 left. Every pivot column ends up a unit vector.
    Zero rows are moved to the bottom and the nonzero rows are ordered by
    pivot column.

    Returns the reduced matrix, the pivot columns (ascending) and the rank.
    """
    forbidden: Set[int] = set(int(f) for f in forbidden_pivots)
    bad = [f for f in forbidden if not 0 <= f < h.cols]
    if bad:
        raise DimensionError(f"Forbidden pivot columns out of range: {sorted(bad)}")

    a = h.bits.copy()
    allowed = np.ones(h.cols, dtype=bool)
    allowed[list(forbidden)] = False

    pivot_of_row = {}
    for r in range(h.rows):
        row = a[r]
        candidates = np.flatnonzero(row & allowed)
        if candidates.size == 0:
            candidates = np.flatnonzero(row)
            if candidates.size == 0:
                continue
            logger.debug(f"Row {r}: only forbidden columns left, pivoting on {candidates[0]}")
        col = int(candidates[0])
        others = np.flatnonzero(a[:, col])
        others = others[others != r]
        a[others] ^= a[r]
        pivot_of_row[r] = col

    order = sorted(pivot_of_row, key=pivot_of_row.get)
    zero_rows = [r for r in range(h.rows) if r not in pivot_of_row]
    reduced = a[order + zero_rows]
    pivots = [pivot_of_row[r] for r in order]
    return Gf2Matrix(reduced), pivots, len(pivots)


def rank(h: Gf2Matrix) -> int:
    return row_reduce_with_pivot_preference(h)[2]


def row_basis(h: Gf2Matrix, forbidden_pivots: Iterable[int] = ()) -> Gf2Matrix:
    """Independent rows spanning the row space of ``h`` (same null space)."""
    reduced, _, r = row_reduce_with_pivot_preference(h, forbidden_pivots)
    return Gf2Matrix(reduced.bits[:r])


def derive_generator(
    h: Gf2Matrix,
    forbidden_pivots: Iterable[int] = (),
) -> Tuple[Gf2Matrix, List[int]]:
    """Systematic generator matrix G (n x k) with H·G = 0.

    The information positions are the non-pivot columns of the reduced H,
    so every forbidden column lands among them whenever elimination
    permits. A codeword is ``G·b``; restricted to the returned positions it
    equals ``b``.
    """
    forbidden = list(forbidden_pivots)
    reduced, pivots, r = row_reduce_with_pivot_preference(h, forbidden)
    if r < h.rows:
        raise RankDeficiencyError(r, h.rows)

    pivot_set = set(pivots)
    info_positions = [j for j in range(h.cols) if j not in pivot_set]
    k = len(info_positions)

    g = np.zeros((h.cols, k), dtype=np.uint8)
    g[info_positions, np.arange(k)] = 1
    # parity bit at pivot p_i = sum over info columns of the reduced row i
    g[pivots, :] = reduced.bits[:r][:, info_positions]

    stray = set(forbidden) & pivot_set
    if stray:
        logger.warning(f"Columns {sorted(stray)} could not be kept out of the pivot set")
    logger.debug(f"Derived generator: n={h.cols}, k={k}, rank={r}")
    return Gf2Matrix(g), info_positions
