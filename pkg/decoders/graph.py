import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import sparse

from core.codegen import RateConfig
from core.gf2 import Gf2Matrix

logger = logging.getLogger(__name__)


class DegreeError(ValueError):
    """A check node with fewer than two edges."""


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Edge-indexed bipartite graph of a parity-check matrix.

    Edges are numbered in row-major order of H, so the edges of one check
    node are contiguous. ``cn_slots`` lays them out as a (num_cn, max_degree)
    table padded with -1, which is what the vectorized check-node kernels
    work on.
    """

    h: Gf2Matrix
    edge_vn: np.ndarray
    edge_cn: np.ndarray
    cn_slots: np.ndarray
    slot_valid: np.ndarray
    incidence: sparse.csr_matrix = field(repr=False)
    h_sparse: sparse.csr_matrix = field(repr=False)

    @classmethod
    def from_parity_check(cls, h: Gf2Matrix) -> 'TannerGraph':
        edge_cn, edge_vn = np.nonzero(h.bits)
        degrees = np.bincount(edge_cn, minlength=h.rows)
        if (degrees < 2).any():
            bad = np.flatnonzero(degrees < 2)
            raise DegreeError(f"Check nodes {bad.tolist()} have degree < 2")

        d_max = int(degrees.max())
        cn_slots = np.full((h.rows, d_max), -1, dtype=np.int64)
        starts = np.concatenate(([0], np.cumsum(degrees)[:-1]))
        for i in range(h.rows):
            cn_slots[i, :degrees[i]] = np.arange(starts[i], starts[i] + degrees[i])
        slot_valid = cn_slots >= 0

        n_edges = edge_vn.size
        incidence = sparse.csr_matrix(
            (np.ones(n_edges), (np.arange(n_edges), edge_vn)), shape=(n_edges, h.cols))
        graph = cls(
            h=h,
            edge_vn=edge_vn.astype(np.int64),
            edge_cn=edge_cn.astype(np.int64),
            cn_slots=cn_slots,
            slot_valid=slot_valid,
            incidence=incidence,
            h_sparse=sparse.csr_matrix(h.bits.astype(np.int64)),
        )
        logger.debug(f"Tanner graph: {graph.num_cn} CNs, {graph.num_vn} VNs, {graph.num_edges} edges")
        return graph

    @classmethod
    def for_rate(cls, h_full: Gf2Matrix, cfg: RateConfig) -> 'TannerGraph':
        return cls.from_parity_check(cfg.restrict(h_full))

    @property
    def num_vn(self) -> int:
        return self.h.cols

    @property
    def num_cn(self) -> int:
        return self.h.rows

    @property
    def num_edges(self) -> int:
        return self.edge_vn.size

    def vn_edges(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.edge_vn == v)

    def cn_edges(self, c: int) -> np.ndarray:
        row = self.cn_slots[c]
        return row[row >= 0]

    def vn_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_vn, minlength=self.num_vn)

    # ------------------------------------------------------------------ #
    def gather(self, per_edge: np.ndarray, pad) -> np.ndarray:
        """(frames, E) -> (frames, num_cn, max_degree), padding filled with ``pad``."""
        safe = np.where(self.slot_valid, self.cn_slots, 0)
        out = per_edge[..., safe]
        out[..., ~self.slot_valid] = pad
        return out

    def scatter(self, per_slot: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`gather` for the valid slots."""
        out = np.empty(per_slot.shape[:-2] + (self.num_edges,), dtype=per_slot.dtype)
        out[..., self.cn_slots[self.slot_valid]] = per_slot[..., self.slot_valid]
        return out

    def accumulate(self, per_edge: np.ndarray) -> np.ndarray:
        """Sum the per-edge values arriving at each VN: (frames, E) -> (frames, n)."""
        return np.asarray(self.incidence.T @ per_edge.T).T

    def parity_ok(self, hard_bits: np.ndarray) -> np.ndarray:
        """True for every frame whose hard decisions satisfy all checks."""
        s = np.asarray(self.h_sparse @ hard_bits.astype(np.int64).T) % 2
        return ~s.any(axis=0)

    def edge_list(self) -> List[tuple]:
        """(vn, cn, edge_id) triples."""
        return [(int(v), int(c), e) for e, (v, c) in enumerate(zip(self.edge_vn, self.edge_cn))]
