import logging
from pathlib import Path
from typing import List

import numpy as np

from core.gf2 import Gf2Matrix
from .base import AbstractArtifact, ArtifactFormatError

logger = logging.getLogger(__name__)


class AlistFile(AbstractArtifact):
    """Sparse matrix in alist layout (1-based indices, lists zero-padded to the max degree)."""

    def load(self, **kwargs) -> Gf2Matrix:
        _, body = self.split_header(self._read_lines())
        numbers = list(self.tokens(body))
        ptr = 0

        def take(count: int) -> List[int]:
            nonlocal ptr
            if ptr + count > len(numbers):
                raise ArtifactFormatError(f"{self.path}: file ends early")
            chunk = numbers[ptr:ptr + count]
            ptr += count
            return chunk

        n, m = take(2)
        max_dv, max_dc = take(2)
        col_degrees = take(n)
        row_degrees = take(m)

        h = np.zeros((m, n), dtype=np.uint8)
        for j in range(n):
            entries = take(max_dv)
            for i in entries[:col_degrees[j]]:
                if not 1 <= i <= m:
                    raise ArtifactFormatError(f"{self.path}: row index {i} out of range in column {j + 1}")
                h[i - 1, j] = 1

        # the row lists are redundant; check them when present
        if ptr < len(numbers):
            for i in range(m):
                entries = [j for j in take(max_dc)[:row_degrees[i]]]
                if sorted(j - 1 for j in entries) != np.flatnonzero(h[i]).tolist():
                    raise ArtifactFormatError(f"{self.path}: row {i + 1} disagrees with the column lists")

        logger.info(f"Loaded {m}x{n} alist matrix from {self.path}")
        return Gf2Matrix(h)

    def save(self, obj: Gf2Matrix, **kwargs) -> Path:
        h = obj.bits
        m, n = h.shape
        col_lists = [np.flatnonzero(h[:, j]) + 1 for j in range(n)]
        row_lists = [np.flatnonzero(h[i]) + 1 for i in range(m)]
        max_dv = max((len(c) for c in col_lists), default=0)
        max_dc = max((len(r) for r in row_lists), default=0)

        def padded(entries, width):
            return " ".join(str(int(v)) for v in list(entries) + [0] * (width - len(entries)))

        lines = [f"{n} {m}", f"{max_dv} {max_dc}",
                 " ".join(str(len(c)) for c in col_lists),
                 " ".join(str(len(r)) for r in row_lists)]
        lines += [padded(c, max_dv) for c in col_lists]
        lines += [padded(r, max_dc) for r in row_lists]
        path = self._write("\n".join(lines) + "\n")
        logger.info(f"Wrote {m}x{n} alist matrix to {path}")
        return path
