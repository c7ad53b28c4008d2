import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.codegen import CodeAudit, QcMatrix
from .base import AbstractArtifact, ArtifactFormatError

logger = logging.getLogger(__name__)


class ShiftTableFile(AbstractArtifact):
    """``.qc`` shift table: ``cols rows z``, a blank line, then one row of shifts per line.

    Lines starting with ``#`` carry the digest and the construction audit and
    are not part of the digest.
    """

    def load(self, **kwargs) -> QcMatrix:
        qc, _ = self.load_with_header()
        return qc

    def load_with_header(self) -> Tuple[QcMatrix, Dict[str, str]]:
        header, body = self.split_header(self._read_lines())
        numbers = list(self.tokens(body))
        if len(numbers) < 3:
            raise ArtifactFormatError(f"{self.path}: missing 'cols rows z' header")
        cols, rows, z = numbers[:3]
        shifts = numbers[3:]
        if len(shifts) != rows * cols:
            raise ArtifactFormatError(f"{self.path}: expected {rows * cols} shifts, found {len(shifts)}")
        try:
            qc = QcMatrix(np.array(shifts, dtype=np.int64).reshape(rows, cols), z)
        except ValueError as e:
            raise ArtifactFormatError(f"{self.path}: {str(e)}")

        stored = header.get('digest')
        if stored and stored != qc.digest():
            logger.warning(f"{self.path}: stored digest {stored[:12]} does not match content {qc.digest()[:12]}")
        logger.info(f"Loaded {rows}x{cols} shift table (Z={z}) from {self.path}")
        return qc, header

    def save(self, obj: QcMatrix, audit: Optional[CodeAudit] = None, seed: Optional[int] = None,
             **kwargs) -> Path:
        lines = [f"# digest {obj.digest()}"]
        if seed is not None:
            lines.append(f"# seed {seed}")
        if audit is not None:
            lines.append(f"# audit {json.dumps(audit.to_dict(), sort_keys=True)}")
        path = self._write("\n".join(lines) + "\n" + obj.to_text())
        logger.info(f"Wrote shift table {obj.digest()[:12]} to {path}")
        return path

    @staticmethod
    def audit_from_header(header: Dict[str, str]) -> Optional[Dict[str, Any]]:
        text = header.get('audit')
        return json.loads(text) if text else None
