from fractions import Fraction

import numpy as np
import pytest

from core.codegen import (ACYCLIC, ABSENT, AceLiftError, BaseGraph, CycleInfo, InfeasibleDegreeError, Protograph,
                          QcMatrix, UnsupportedRateError, _ace_stages, ace_lift, ace_spectrum, enumerate_cycles,
                          expand_qc, girth, parse_rate, peg_expand, rate_config, short_cycles)
from core.gf2 import Gf2Matrix


def test_default_protograph_shape():
    p = Protograph.default()
    assert (p.rows, p.cols) == (3, 9)
    assert p.edge_count == 32
    assert p.column_degrees().tolist() == [4, 4, 4, 4, 4, 2, 6, 2, 2]
    # punctured frame block 4 touches no check of row block 0
    assert p.multiplicity[:, 4].tolist() == [0, 1, 3]


def test_peg_expand_respects_multiplicities():
    p = Protograph.default()
    base = peg_expand(p, z1=4, seed=3)
    assert base.adjacency.shape == (12, 36)
    assert base.edge_count == 128
    assert base.adjacency.max() == 1
    for i in range(p.rows):
        block = base.adjacency[4 * i:4 * (i + 1)]
        for j in range(p.cols):
            cols = block[:, 4 * j:4 * (j + 1)]
            # every VN copy and every CN copy sees the proto multiplicity
            assert (cols.sum(axis=0) == p.multiplicity[i, j]).all()
            assert (cols.sum(axis=1) == p.multiplicity[i, j]).all()


def test_peg_expand_is_deterministic():
    p = Protograph.default()
    a = peg_expand(p, 4, seed=11)
    b = peg_expand(p, 4, seed=11)
    assert np.array_equal(a.adjacency, b.adjacency)


def test_peg_expand_rejects_multiplicity_above_z1():
    with pytest.raises(InfeasibleDegreeError):
        peg_expand(Protograph(np.array([[5, 1]])), z1=4)


def test_expand_qc_places_rotated_identities():
    q = QcMatrix(np.array([[1, ABSENT], [0, 2]]), 3)
    h = expand_qc(q)
    assert h.shape == (6, 6)
    assert h.bits[0].tolist() == [0, 1, 0, 0, 0, 0]
    assert h.bits[3].tolist() == [1, 0, 0, 0, 0, 1]
    assert h.weight() == 9


def test_qc_matrix_rejects_bad_shift():
    with pytest.raises(ValueError):
        QcMatrix(np.array([[8]]), 8)


def test_qc_text_and_digest():
    q = QcMatrix(np.array([[0, ABSENT, 3]]), 4)
    assert q.to_text() == "3 1 4\n\n0 -1 3\n"
    assert q.digest() == QcMatrix(np.array([[0, -1, 3]]), 4).digest()
    assert q.digest() != QcMatrix(np.array([[1, -1, 3]]), 4).digest()


def test_cycle_enumeration_and_girth():
    four_cycle = Gf2Matrix.from_rows([[1, 1], [1, 1]])
    assert len(enumerate_cycles(four_cycle.bits, 4)) == 1
    assert girth(four_cycle) == 4
    assert girth(Gf2Matrix.identity(4)) == ACYCLIC

    hexagon = Gf2Matrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert girth(hexagon) == 6
    cycles = short_cycles(hexagon, 6)
    assert [c.length for c in cycles] == [6]
    assert cycles[0].ace == 0
    assert ace_spectrum(hexagon, 6) == {6: 0}


def test_cycles_reported_once_in_dense_matrix():
    # K_{3,3}: 9 four-cycles and 6 six-cycles
    full = np.ones((3, 3), dtype=np.uint8)
    cycles = enumerate_cycles(full, 6)
    assert sum(1 for vns, _ in cycles if len(vns) == 2) == 9
    assert sum(1 for vns, _ in cycles if len(vns) == 3) == 6


def test_rate_table():
    table = {r: (c.k, c.n, c.n_prime) for r, c in ((r, rate_config(r)) for r in ('12', '23', '34'))}
    assert table == {'12': (64, 160, 128), '23': (128, 224, 192), '34': (192, 288, 256)}
    for label in table:
        cfg = rate_config(label)
        assert cfg.active_cols.stop == 288
        assert len(cfg.local_puncture) == 32
        assert Fraction(cfg.k, cfg.n_prime) == cfg.rate


def test_parse_rate_aliases():
    assert parse_rate('12') == Fraction(1, 2)
    assert parse_rate('2/3') == Fraction(2, 3)
    assert parse_rate(Fraction(3, 4)) == Fraction(3, 4)
    with pytest.raises(UnsupportedRateError):
        parse_rate('5/6')


def test_strict_ace_target_is_reported():
    # with z = 1 every base 4-cycle survives the lift
    base = BaseGraph(np.ones((2, 2), dtype=np.uint8))
    with pytest.raises(AceLiftError) as err:
        ace_lift(base, 1, d_ace=2, eta_ace=1, seed=5, max_restarts=2, strict=True)
    assert err.value.worst_cycle.length == 4
    assert err.value.violations == 1


def test_surviving_four_cycle_fails_even_when_relaxed():
    base = BaseGraph(np.ones((2, 2), dtype=np.uint8))
    with pytest.raises(AceLiftError):
        ace_lift(base, 1, d_ace=2, eta_ace=1, max_restarts=1, strict=False)


def test_ace_lift_breaks_four_cycle():
    base = BaseGraph(np.ones((2, 2), dtype=np.uint8))
    q = ace_lift(base, 2, d_ace=2, eta_ace=1, seed=0, max_restarts=3)
    assert girth(expand_qc(q)) == 8


def test_ace_lift_keeps_base_support():
    base = peg_expand(Protograph.default(), 4, seed=5)
    q = ace_lift(base, 8, d_ace=2, eta_ace=0, seed=5, max_restarts=5, strict=True)
    assert q.shifts.shape == (12, 36)
    assert ((q.shifts == ABSENT) == (base.adjacency == 0)).all()


def test_constructed_code_audit(constructed_code):
    qc, audit = constructed_code.qc, constructed_code.audit
    assert qc.shifts.shape == (12, 36)
    assert qc.z == 8
    h = expand_qc(qc)
    assert h.shape == (96, 288)
    assert h.weight() == 1024
    assert audit.girth >= 6
    assert 4 not in audit.ace_spectrum
    # every column weight is even, so the rows always sum to zero
    for label, r in audit.rank_by_rate.items():
        assert r <= 95
        assert audit.punctured_pivots_by_rate[label] == 0
    assert audit.passed


def test_default_build_lifts_the_lowest_ace_six_cycles(constructed_code):
    # best-effort lifting clears the low-ACE 6-cycles before the higher ones
    spectrum = constructed_code.audit.ace_spectrum
    assert 4 not in spectrum
    assert spectrum.get(6, 13) >= 4
    h = expand_qc(constructed_code.qc)
    assert all(c.ace >= 4 for c in short_cycles(h, 6))


def test_relaxed_stages_add_one_ace_level_at_a_time():
    cycles = [CycleInfo((0, 1), (0, 1), 4), CycleInfo((0, 1, 2), (0, 1, 2), 3),
              CycleInfo((1, 2, 3), (0, 1, 2), 2), CycleInfo((0, 2, 3), (0, 1, 2), 3)]
    stages = _ace_stages(cycles, strict=False)
    assert [[c.ace for c in s] for s in stages] == [[4], [4, 2], [4, 3, 2, 3]]
    assert _ace_stages(cycles, strict=True) == [cycles]
