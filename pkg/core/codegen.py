"""Construction of the rate-compatible short-blocklength QC-LDPC family.

protograph --PEG, Z1=4--> base graph --ACE circulant lift, Z2=8--> QC matrix

Index conventions: everything in this module is 0-based. The 1-based
column ranges quoted for the code family (e.g. "columns 129..160") are
converted once, in ``RATES`` / ``rate_config``.
"""
import hashlib
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.gf2 import Gf2Matrix, row_reduce_with_pivot_preference

logger = logging.getLogger(__name__)

BASE_PROTOGRAPH = (
    (0, 0, 0, 0, 2, 0, 2, 0, 0),
    (3, 1, 3, 1, 0, 1, 3, 2, 0),
    (1, 3, 1, 3, 0, 3, 1, 0, 2),
)
# Order of the protograph columns in the 288-column frame. Frame block 4
# (columns 128..159) is punctured and holds the (0, 1, 3) column: each check
# of row block 1 has exactly one punctured neighbour.
FRAME_COLUMN_ORDER = (0, 1, 2, 3, 5, 4, 6, 7, 8)

ABSENT = -1
ACYCLIC = math.inf


class InfeasibleDegreeError(ValueError):
    """A protograph multiplicity cannot be realized with the lifting factor."""


class UnsupportedRateError(ValueError):
    pass


class AceLiftError(ValueError):
    """No shift assignment met the ACE constraint within the search budget."""

    def __init__(self, message: str, worst_cycle: Optional['CycleInfo'] = None,
                 violations: int = 0, best: Optional['QcMatrix'] = None):
        super().__init__(message)
        self.worst_cycle = worst_cycle
        self.violations = violations
        self.best = best


# --------------------------------------------------------------------------- #
# Graph types
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class Protograph:
    multiplicity: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.multiplicity, dtype=np.int64)
        if m.ndim != 2 or (m < 0).any():
            raise ValueError("Protograph must be a 2-D matrix of non-negative counts")
        m.setflags(write=False)
        object.__setattr__(self, 'multiplicity', m)

    @classmethod
    def default(cls) -> 'Protograph':
        return cls(np.array(BASE_PROTOGRAPH)[:, list(FRAME_COLUMN_ORDER)])

    @property
    def rows(self) -> int:
        return self.multiplicity.shape[0]

    @property
    def cols(self) -> int:
        return self.multiplicity.shape[1]

    @property
    def edge_count(self) -> int:
        return int(self.multiplicity.sum())

    def column_degrees(self) -> np.ndarray:
        return self.multiplicity.sum(axis=0)


@dataclass(frozen=True, eq=False)
class BaseGraph:
    """Simple bipartite graph obtained by expanding each protograph entry into a z1 x z1 block."""

    adjacency: np.ndarray
    z1: int = 1

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=np.uint8)
        a.setflags(write=False)
        object.__setattr__(self, 'adjacency', a)

    @property
    def rows(self) -> int:
        return self.adjacency.shape[0]

    @property
    def cols(self) -> int:
        return self.adjacency.shape[1]

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum())

    def edges(self) -> List[Tuple[int, int]]:
        """(row, col) pairs in row-major order."""
        r, c = np.nonzero(self.adjacency)
        return list(zip(r.tolist(), c.tolist()))


@dataclass(frozen=True, eq=False)
class QcMatrix:
    """Base matrix of circulant shifts; ``ABSENT`` marks an all-zero block."""

    shifts: np.ndarray
    z: int

    def __post_init__(self):
        s = np.asarray(self.shifts, dtype=np.int64)
        if s.ndim != 2:
            raise ValueError("Shift table must be 2-D")
        if ((s != ABSENT) & ((s < 0) | (s >= self.z))).any():
            raise ValueError(f"Shift values must be in 0..{self.z - 1} or {ABSENT}")
        s.setflags(write=False)
        object.__setattr__(self, 'shifts', s)

    @property
    def base_rows(self) -> int:
        return self.shifts.shape[0]

    @property
    def base_cols(self) -> int:
        return self.shifts.shape[1]

    @property
    def edge_count(self) -> int:
        return int((self.shifts != ABSENT).sum()) * self.z

    def base_adjacency(self) -> np.ndarray:
        return (self.shifts != ABSENT).astype(np.uint8)

    def to_text(self) -> str:
        """Shift table in the plain ``.qc`` layout: ``cols rows z``, blank line, one row per line."""
        lines = [f"{self.base_cols} {self.base_rows} {self.z}", ""]
        lines += [" ".join(str(int(v)) for v in row) for row in self.shifts]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode('ascii')).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, QcMatrix):
            return NotImplemented
        return self.z == other.z and bool(np.array_equal(self.shifts, other.shifts))

    def __hash__(self):
        return hash(self.digest())


# --------------------------------------------------------------------------- #
# PEG expansion
# --------------------------------------------------------------------------- #
def _cn_distances(v: int, vn_adj: List[set], cn_adj: List[set]) -> Dict[int, int]:
    """BFS depth (in VN-CN-VN hops) of every CN reachable from VN ``v``."""
    dist: Dict[int, int] = {}
    seen_vn = {v}
    frontier = [v]
    depth = 0
    while frontier:
        next_vns = []
        for u in frontier:
            for c in vn_adj[u]:
                if c in dist:
                    continue
                dist[c] = depth
                for w in cn_adj[c]:
                    if w not in seen_vn:
                        seen_vn.add(w)
                        next_vns.append(w)
        frontier = next_vns
        depth += 1
    return dist


def peg_expand(p: Protograph, z1: int = 4, seed: int = 0) -> BaseGraph:
    """Lift a protograph by ``z1`` with progressive edge growth.

    Every proto edge of multiplicity t between proto-CN i and proto-VN j
    gives each of the z1 VN copies t distinct CNs in block i, and each CN
    copy in block i receives exactly t of those edges. Among the feasible
    CNs the one farthest from the VN in the current graph wins (unreachable
    counts as farthest), ties broken by lowest current CN degree, then
    lowest index. The seed only shuffles the order in which VNs of equal
    degree are processed.
    """
    mult = p.multiplicity
    if (mult > z1).any():
        i, j = np.argwhere(mult > z1)[0]
        raise InfeasibleDegreeError(
            f"Protograph entry ({i}, {j}) has multiplicity {mult[i, j]} > z1={z1}")

    n_vn, n_cn = p.cols * z1, p.rows * z1
    vn_adj: List[set] = [set() for _ in range(n_vn)]
    cn_adj: List[set] = [set() for _ in range(n_cn)]
    # cap[c, j]: edges CN c still owes to proto column j
    cap = np.repeat(mult, z1, axis=0).astype(np.int64)
    pending = np.full(p.cols, z1, dtype=np.int64)

    rng = np.random.default_rng(seed)
    degrees = np.repeat(p.column_degrees(), z1)
    order = sorted(range(n_vn), key=lambda v: (degrees[v], rng.random()))

    for v in order:
        j = v // z1
        remaining = pending[j]
        for i in range(p.rows):
            t = int(mult[i, j])
            if t == 0:
                continue
            block = range(i * z1, (i + 1) * z1)
            mandatory = {c for c in block if cap[c, j] == remaining}
            for _ in range(t):
                pool = mandatory or {c for c in block if cap[c, j] > 0 and c not in vn_adj[v]}
                if not pool:
                    raise InfeasibleDegreeError(f"No CN left in block {i} for VN {v}")
                dist = _cn_distances(v, vn_adj, cn_adj) if vn_adj[v] else {}
                c = min(pool, key=lambda c: (-dist.get(c, math.inf), len(cn_adj[c]), c))
                vn_adj[v].add(c)
                cn_adj[c].add(v)
                cap[c, j] -= 1
                mandatory.discard(c)
        pending[j] -= 1

    adjacency = np.zeros((n_cn, n_vn), dtype=np.uint8)
    for v, cs in enumerate(vn_adj):
        adjacency[list(cs), v] = 1
    logger.info(f"PEG expansion: {n_cn}x{n_vn} base graph with {int(adjacency.sum())} edges (z1={z1}, seed={seed})")
    return BaseGraph(adjacency, z1)


# --------------------------------------------------------------------------- #
# Cycle enumeration and audits
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class CycleInfo:
    """A cycle as alternating (vn, cn) pairs: v0 - c0 - v1 - c1 - ... - v0."""

    vns: Tuple[int, ...]
    cns: Tuple[int, ...]
    ace: int

    @property
    def length(self) -> int:
        return 2 * len(self.vns)

    def __str__(self):
        path = " - ".join(f"v{v} - c{c}" for v, c in zip(self.vns, self.cns))
        return f"length {self.length}, ACE {self.ace}: {path} - v{self.vns[0]}"


def _adjacency_lists(bits: np.ndarray) -> Tuple[List[List[int]], List[List[int]]]:
    vn_adj = [np.flatnonzero(bits[:, j]).tolist() for j in range(bits.shape[1])]
    cn_adj = [np.flatnonzero(bits[i]).tolist() for i in range(bits.shape[0])]
    return vn_adj, cn_adj


def enumerate_cycles(bits: np.ndarray, max_len: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """All simple cycles of length <= ``max_len``, each reported once.

    A cycle is anchored at its smallest VN and oriented so that its first
    CN has a lower index than its last CN.
    """
    vn_adj, cn_adj = _adjacency_lists(bits)
    vn_sets = [set(cs) for cs in vn_adj]
    cycles = []
    half = max_len // 2

    def extend(v0, vns, cns):
        last = vns[-1]
        if len(vns) >= 2:
            for c in vn_adj[last]:
                if c > cns[0] and c not in cns and c in vn_sets[v0]:
                    cycles.append((tuple(vns), tuple(cns + [c])))
        if len(vns) == half:
            return
        for c in vn_adj[last]:
            if c in cns:
                continue
            for w in cn_adj[c]:
                if w > v0 and w not in vns:
                    vns.append(w)
                    cns.append(c)
                    extend(v0, vns, cns)
                    vns.pop()
                    cns.pop()

    for v0 in range(len(vn_adj)):
        extend(v0, [v0], [])
    return cycles


def _cycle_ace(vns: Sequence[int], vn_degrees: np.ndarray) -> int:
    return int(sum(int(vn_degrees[v]) - 2 for v in vns))


def short_cycles(h: Gf2Matrix, max_cycle_len: int) -> List[CycleInfo]:
    degrees = h.bits.sum(axis=0)
    return [CycleInfo(vns, cns, _cycle_ace(vns, degrees))
            for vns, cns in enumerate_cycles(h.bits, max_cycle_len)]


def ace_spectrum(h: Gf2Matrix, max_cycle_len: int) -> Dict[int, int]:
    """Minimum ACE per cycle length, for lengths up to ``max_cycle_len`` (<= 8)."""
    if max_cycle_len > 8:
        raise ValueError("Cycle enumeration is limited to length 8")
    spectrum: Dict[int, int] = {}
    for cyc in short_cycles(h, max_cycle_len):
        spectrum[cyc.length] = min(spectrum.get(cyc.length, cyc.ace), cyc.ace)
    return dict(sorted(spectrum.items()))


def girth(h: Gf2Matrix) -> Union[int, float]:
    """Length of the shortest Tanner-graph cycle, ``ACYCLIC`` if there is none.

    BFS from every VN; a non-tree edge closing at depths d1, d2 gives a
    closed walk of length d1 + d2 + 1 through the root, and the minimum over
    all roots is the girth.
    """
    m, n = h.shape
    vn_adj, cn_adj = _adjacency_lists(h.bits)
    # nodes 0..n-1 are VNs, n..n+m-1 are CNs
    neighbours = [[n + c for c in vn_adj[v]] for v in range(n)] + [list(vs) for vs in cn_adj]
    best = ACYCLIC
    for root in range(n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in neighbours[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def expand_qc(q: QcMatrix) -> Gf2Matrix:
    """Replace every shift s by the z x z identity rotated by s (row r has its 1 in column (r+s) mod z)."""
    z = q.z
    bits = np.zeros((q.base_rows * z, q.base_cols * z), dtype=np.uint8)
    r = np.arange(z)
    for i, j in zip(*np.nonzero(q.shifts != ABSENT)):
        s = int(q.shifts[i, j])
        bits[i * z + r, j * z + (r + s) % z] = 1
    return Gf2Matrix(bits)


# --------------------------------------------------------------------------- #
# ACE-constrained circulant lifting
# --------------------------------------------------------------------------- #
class _CycleConstraints:
    """Base-graph cycles whose lifted copies would break the ACE target.

    A base cycle v0 c0 v1 c1 ... lifts to length-L cycles exactly when the
    alternating shift sum  sum_k s(c_k, v_k) - s(c_k, v_k+1)  is 0 mod z.
    """

    def __init__(self, base: BaseGraph, z: int, cycles: Sequence[CycleInfo]):
        self.z = z
        edges = base.edges()
        self.edge_index = {e: k for k, e in enumerate(edges)}
        self.cycles: List[CycleInfo] = list(cycles)
        rows, signs = [], []
        for cyc in self.cycles:
            ids, sg = [], []
            for k, c in enumerate(cyc.cns):
                ids += [self.edge_index[(c, cyc.vns[k])],
                        self.edge_index[(c, cyc.vns[(k + 1) % len(cyc.vns)])]]
                sg += [1, -1]
            rows.append(ids)
            signs.append(sg)
        n_long = max(1, sum(1 for cyc in self.cycles if cyc.length > 4))
        # 4-cycles dominate every longer class combined
        self.weights = np.asarray([n_long + 1 if cyc.length == 4 else 1 for cyc in self.cycles],
                                  dtype=np.int64)
        width = max((len(r) for r in rows), default=0)
        count = len(rows)
        self.edges = np.zeros((count, width), dtype=np.int64)
        self.signs = np.zeros((count, width), dtype=np.int64)
        for k, (r, s) in enumerate(zip(rows, signs)):
            self.edges[k, :len(r)] = r
            self.signs[k, :len(s)] = s
        live = self.signs != 0
        self.by_edge: List[np.ndarray] = [np.flatnonzero(((self.edges == e) & live).any(axis=1))
                                          for e in range(len(edges))]
        self.n_edges = len(edges)

    def violated(self, shifts: np.ndarray, assigned: Optional[np.ndarray] = None) -> np.ndarray:
        if not self.cycles:
            return np.zeros(0, dtype=bool)
        sums = (shifts[self.edges] * self.signs).sum(axis=1) % self.z
        bad = sums == 0
        if assigned is not None:
            bad &= (assigned[self.edges] | (self.signs == 0)).all(axis=1)
        return bad

    def cost(self, shifts: np.ndarray) -> int:
        return int(self.weights[self.violated(shifts)].sum())

    def shift_costs(self, shifts: np.ndarray, e: int, assigned: Optional[np.ndarray] = None) -> np.ndarray:
        """Weighted violations among cycles through edge ``e`` for each candidate shift."""
        ids = self.by_edge[e]
        if ids.size == 0:
            return np.zeros(self.z, dtype=np.int64)
        edges, signs = self.edges[ids], self.signs[ids]
        on_e = (edges == e) & (signs != 0)
        coef = (signs * on_e).sum(axis=1)
        rest = (shifts[edges] * signs * ~on_e).sum(axis=1)
        cand = np.arange(self.z)
        bad = (rest[:, None] + coef[:, None] * cand[None, :]) % self.z == 0
        if assigned is not None:
            others_ready = (assigned[edges] | on_e | (signs == 0)).all(axis=1)
            bad &= others_ready[:, None]
        return (bad * self.weights[ids][:, None]).sum(axis=0)


def _low_ace_cycles(base: BaseGraph, d_ace: int, eta_ace: int) -> List[CycleInfo]:
    """Base cycles of length <= 2*d_ace with ACE below ``eta_ace``."""
    degrees = base.adjacency.sum(axis=0)
    found = (CycleInfo(vns, cns, _cycle_ace(vns, degrees))
             for vns, cns in enumerate_cycles(base.adjacency, 2 * d_ace))
    return [cyc for cyc in found if cyc.ace < eta_ace]


def _greedy_assign(cons: _CycleConstraints, rng: np.random.Generator) -> np.ndarray:
    """Seeded sequential trial: take the first shift that adds no violation, else the cheapest."""
    shifts = np.zeros(cons.n_edges, dtype=np.int64)
    assigned = np.zeros(cons.n_edges, dtype=bool)
    for e in rng.permutation(cons.n_edges):
        costs = cons.shift_costs(shifts, e, assigned)
        trial = rng.permutation(cons.z)
        ok = trial[costs[trial] == 0]
        shifts[e] = ok[0] if ok.size else trial[np.argmin(costs[trial])]
        assigned[e] = True
    return shifts


def _polish(cons: _CycleConstraints, shifts: np.ndarray, rng: np.random.Generator) -> int:
    """Steepest-descent single-edge moves on the weighted violation count."""
    cost = cons.cost(shifts)
    while cost > 0:
        bad = np.flatnonzero(cons.violated(shifts))
        touched = np.unique(cons.edges[bad][cons.signs[bad] != 0])
        best_gain, best_move = 0, None
        for e in rng.permutation(touched):
            costs = cons.shift_costs(shifts, e)
            gain = int(costs[shifts[e]] - costs.min())
            if gain > best_gain:
                best_gain, best_move = gain, (e, int(np.argmin(costs)))
        if best_move is None:
            break
        shifts[best_move[0]] = best_move[1]
        cost -= best_gain
    return cost


def _search(cons: _CycleConstraints, rng: np.random.Generator, max_restarts: int,
            patience: Optional[int], start: Optional[np.ndarray] = None) -> Tuple[np.ndarray, int, int]:
    """Restarted greedy trial plus repair; returns (best shifts, weighted violations, restarts run).

    A ``start`` lifting is repaired first and counts as the first restart.
    """
    best_shifts, best_cost, stale, runs = None, None, 0, 0
    for restart in range(max(1, max_restarts)):
        if restart == 0 and start is not None:
            shifts = start.copy()
        else:
            shifts = _greedy_assign(cons, rng)
        cost = _polish(cons, shifts, rng)
        runs = restart + 1
        logger.debug(f"ACE restart {restart}: weighted violations {cost}")
        if best_cost is None or cost < best_cost:
            best_shifts, best_cost, stale = shifts.copy(), cost, 0
        else:
            stale += 1
        if best_cost == 0 or (patience is not None and stale >= patience):
            break
    return best_shifts, best_cost, runs


def _ace_stages(cycles: Sequence[CycleInfo], strict: bool) -> List[List[CycleInfo]]:
    """Nested constraint sets: 4-cycles alone, then longer cycles added one ACE level at a time."""
    if strict:
        return [list(cycles)]
    four = [cyc for cyc in cycles if cyc.length == 4]
    longer = [cyc for cyc in cycles if cyc.length > 4]
    stages = [four]
    for level in sorted({cyc.ace for cyc in longer}):
        stages.append(four + [cyc for cyc in longer if cyc.ace <= level])
    return stages


def ace_lift(b: BaseGraph, z2: int = 8, d_ace: int = 3, eta_ace: int = 13, seed: int = 0,
             max_restarts: int = 10_000, patience: Optional[int] = None,
             strict: bool = True) -> QcMatrix:
    """Assign one circulant shift per base edge so short cycles meet the ACE target.

    Every lifted cycle of length <= 2*d_ace must have ACE >= eta_ace, where
    the ACE of a cycle is the sum over its VNs of (degree - 2). Lifting
    preserves degrees, so this means every base cycle of that length with
    ACE below target needs a nonzero alternating shift sum mod z2.

    Each restart is a seeded sequential trial followed by local repair,
    stopping at the first zero-violation lifting, after ``max_restarts``
    restarts, or after ``patience`` restarts without improvement.

    ``strict`` searches the full constraint set once and raises
    AceLiftError with the worst cycle if violations remain. Otherwise the
    search climbs: 4-cycles first, then the longer cycles of lowest ACE,
    one ACE level per stage, each stage starting from the previous
    lifting. The last stage solved exactly is returned, so the surviving
    short cycles are those of highest ACE. A surviving 4-cycle always
    raises.
    """
    edges = b.edges()
    cycles = _low_ace_cycles(b, d_ace, eta_ace)
    full = _CycleConstraints(b, z2, cycles)
    logger.info(f"ACE lift: {len(edges)} base edges, z2={z2}, d_ace={d_ace}, eta_ace={eta_ace}, "
                f"{len(cycles)} base cycles below target")

    rng = np.random.default_rng(seed)
    chosen, restarts = None, 0
    for stage, members in enumerate(_ace_stages(cycles, strict)):
        cons = _CycleConstraints(b, z2, members)
        shifts, cost, runs = _search(cons, rng, max_restarts, patience, start=chosen)
        restarts += runs
        logger.debug(f"ACE stage {stage}: {len(members)} constraints, weighted violations {cost}")
        if cost > 0 and chosen is not None:
            break
        chosen = shifts
        if cost > 0:
            break

    table = np.full((b.rows, b.cols), ABSENT, dtype=np.int64)
    for (r, c), s in zip(edges, chosen if chosen is not None else []):
        table[r, c] = s
    result = QcMatrix(table, z2)
    bad = np.flatnonzero(full.violated(chosen)) if chosen is not None else np.zeros(0, dtype=np.int64)
    if bad.size == 0:
        logger.info("ACE lift satisfied every short-cycle constraint")
        return result

    worst = min((full.cycles[k] for k in bad), key=lambda c: (c.length, c.ace))
    has_4_cycle = any(full.cycles[k].length == 4 for k in bad)
    message = (f"ACE target not met after {restarts} restarts: {bad.size} base cycles violate "
               f"(lifted {bad.size * z2}); worst {worst}")
    if strict or has_4_cycle:
        raise AceLiftError(message, worst, int(bad.size), result)
    logger.warning(message)
    return result


# --------------------------------------------------------------------------- #
# Rate configuration
# --------------------------------------------------------------------------- #
PUNCTURE_COLS = tuple(range(128, 160))   # 1-based columns 129..160 of the 288 frame
FRAME_COLS = 288


@dataclass(frozen=True)
class RateConfig:
    rate: Fraction
    removed_block_cols: int
    active_cols: range
    puncture_cols: Tuple[int, ...]
    k: int
    n: int
    n_prime: int
    z: int = 8

    @property
    def label(self) -> str:
        return f"{self.rate.numerator}{self.rate.denominator}"

    @property
    def local_puncture(self) -> Tuple[int, ...]:
        """Puncture positions inside the rate's own n-column window."""
        start = self.active_cols.start
        return tuple(c - start for c in self.puncture_cols)

    def restrict(self, h: Gf2Matrix) -> Gf2Matrix:
        return h.columns(self.active_cols)


_RATE_TABLE = {
    Fraction(1, 2): 16,
    Fraction(2, 3): 8,
    Fraction(3, 4): 0,
}
_RATE_ALIASES = {'12': Fraction(1, 2), '23': Fraction(2, 3), '34': Fraction(3, 4)}


def parse_rate(rate: Any) -> Fraction:
    if isinstance(rate, Fraction):
        value = rate
    elif isinstance(rate, str) and rate.strip() in _RATE_ALIASES:
        value = _RATE_ALIASES[rate.strip()]
    else:
        try:
            value = Fraction(str(rate).strip()).limit_denominator(16)
        except (ValueError, ZeroDivisionError):
            raise UnsupportedRateError(f"Unsupported rate: {rate!r}")
    if value not in _RATE_TABLE:
        raise UnsupportedRateError(f"Unsupported rate: {rate!r}; expected one of 1/2, 2/3, 3/4")
    return value


def rate_config(rate: Any, z: int = 8) -> RateConfig:
    value = parse_rate(rate)
    removed = _RATE_TABLE[value]
    start = removed * z
    n = FRAME_COLS - start
    n_prime = n - len(PUNCTURE_COLS)
    k = n - 12 * z
    return RateConfig(
        rate=value,
        removed_block_cols=removed,
        active_cols=range(start, FRAME_COLS),
        puncture_cols=PUNCTURE_COLS,
        k=k,
        n=n,
        n_prime=n_prime,
        z=z,
    )


ALL_RATES = tuple(rate_config(r) for r in ('1/2', '2/3', '3/4'))


# --------------------------------------------------------------------------- #
# Full construction
# --------------------------------------------------------------------------- #
@dataclass
class ConstructionConfig:
    seed: int = 1
    z1: int = 4
    z2: int = 8
    d_ace: int = 3
    eta_ace: int = 13
    max_restarts: int = 10_000
    patience: Optional[int] = 25
    strict_ace: bool = False
    attempts: int = 8

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ConstructionConfig':
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class CodeAudit:
    shape: Tuple[int, int]
    ones: int
    girth: Union[int, float]
    ace_spectrum: Dict[int, int]
    ace_violations: int
    rank_by_rate: Dict[str, int] = field(default_factory=dict)
    punctured_pivots_by_rate: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.girth >= 6 and not any(self.punctured_pivots_by_rate.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'shape': list(self.shape),
            'ones': self.ones,
            'girth': 'inf' if self.girth == ACYCLIC else int(self.girth),
            'ace_spectrum': {str(k): v for k, v in self.ace_spectrum.items()},
            'ace_violations': self.ace_violations,
            'rank_by_rate': self.rank_by_rate,
            'punctured_pivots_by_rate': self.punctured_pivots_by_rate,
        }


def audit_code(q: QcMatrix, d_ace: int = 3, eta_ace: int = 13) -> CodeAudit:
    h = expand_qc(q)
    cycles = short_cycles(h, 2 * d_ace)
    spectrum: Dict[int, int] = {}
    for cyc in cycles:
        spectrum[cyc.length] = min(spectrum.get(cyc.length, cyc.ace), cyc.ace)
    audit = CodeAudit(
        shape=h.shape,
        ones=h.weight(),
        girth=girth(h),
        ace_spectrum=dict(sorted(spectrum.items())),
        ace_violations=sum(1 for c in cycles if c.ace < eta_ace),
    )
    for cfg in ALL_RATES:
        sub = cfg.restrict(h)
        _, pivots, r = row_reduce_with_pivot_preference(sub, cfg.local_puncture)
        audit.rank_by_rate[cfg.label] = r
        audit.punctured_pivots_by_rate[cfg.label] = len(set(pivots) & set(cfg.local_puncture))
    return audit


@dataclass
class ConstructedCode:
    protograph: Protograph
    base: BaseGraph
    qc: QcMatrix
    audit: CodeAudit
    seed: int


def construct_code(cfg: ConstructionConfig, protograph: Optional[Protograph] = None) -> ConstructedCode:
    """PEG, ACE lift and audit; reseeds (seed, attempt) until the audit passes."""
    protograph = protograph or Protograph.default()
    last_error: Optional[Exception] = None
    for attempt in range(cfg.attempts):
        seed = int(np.random.SeedSequence([cfg.seed, attempt]).generate_state(1)[0])
        logger.info(f"Construction attempt {attempt + 1}/{cfg.attempts} (derived seed {seed})")
        base = peg_expand(protograph, cfg.z1, seed)
        try:
            qc = ace_lift(base, cfg.z2, cfg.d_ace, cfg.eta_ace, seed,
                          max_restarts=cfg.max_restarts, patience=cfg.patience,
                          strict=cfg.strict_ace)
        except AceLiftError as exc:
            logger.warning(f"Attempt {attempt + 1} failed: {exc}")
            last_error = exc
            continue
        audit = audit_code(qc, cfg.d_ace, cfg.eta_ace)
        logger.info(f"Audit: girth {audit.girth}, ACE spectrum {audit.ace_spectrum}, "
                    f"ranks {audit.rank_by_rate}")
        if audit.passed:
            return ConstructedCode(protograph, base, qc, audit, seed)
        logger.warning(f"Attempt {attempt + 1} rejected: girth {audit.girth}, "
                       f"punctured pivots {audit.punctured_pivots_by_rate}")
        last_error = AceLiftError("Audit failed", None, audit.ace_violations, qc)
    raise last_error if last_error else AceLiftError("No construction attempts configured")
