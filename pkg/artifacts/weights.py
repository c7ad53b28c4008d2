import logging
from pathlib import Path
from typing import Optional

import numpy as np

from decoders.float_mp import EdgeWeights
from .base import AbstractArtifact, ArtifactFormatError

logger = logging.getLogger(__name__)


class DigestMismatchError(ValueError):
    """Weights were trained for another code or rate."""


class WeightFile(AbstractArtifact):
    """One ``edgeId alpha`` line per edge under ``# code <digest>`` and ``# rate <r>`` headers."""

    def load(self, expected_digest: Optional[str] = None, expected_rate: Optional[str] = None,
             num_edges: Optional[int] = None, **kwargs) -> EdgeWeights:
        header, body = self.split_header(self._read_lines())
        digest = header.get('code')
        if expected_digest is not None:
            if digest is None:
                logger.warning(f"{self.path} carries no code digest; cannot verify it")
            elif digest != expected_digest:
                raise DigestMismatchError(
                    f"{self.path} was trained for code {digest[:12]}, not {expected_digest[:12]}")
        rate = header.get('rate')
        if expected_rate is not None and rate is not None and rate != str(expected_rate):
            raise DigestMismatchError(f"{self.path} was trained for rate {rate}, not {expected_rate}")

        pairs = {}
        for lineno, line in enumerate(body, 1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ArtifactFormatError(f"{self.path}:{lineno}: expected 'edgeId alpha'")
            try:
                pairs[int(parts[0])] = float(parts[1])
            except ValueError:
                raise ArtifactFormatError(f"{self.path}:{lineno}: malformed weight line {line!r}")

        count = len(pairs)
        if sorted(pairs) != list(range(count)):
            raise ArtifactFormatError(f"{self.path}: edge ids must be 0..{count - 1} without gaps")
        if num_edges is not None and count != num_edges:
            raise DigestMismatchError(f"{self.path} has {count} weights, the graph has {num_edges} edges")
        logger.info(f"Loaded {count} edge weights from {self.path}")
        return EdgeWeights(np.array([pairs[e] for e in range(count)]))

    def save(self, obj: EdgeWeights, code_digest: Optional[str] = None, rate: Optional[str] = None,
             **kwargs) -> Path:
        lines = []
        if code_digest:
            lines.append(f"# code {code_digest}")
        if rate:
            lines.append(f"# rate {rate}")
        lines += [f"{e} {float(a)!r}" for e, a in enumerate(obj.alpha)]
        path = self._write("\n".join(lines) + "\n")
        logger.info(f"Wrote {len(obj)} edge weights to {path}")
        return path
