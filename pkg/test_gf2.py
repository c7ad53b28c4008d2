import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from core.gf2 import (DimensionError, Gf2Matrix, RankDeficiencyError, derive_generator, rank,
                      row_basis, row_reduce_with_pivot_preference, syndrome)


def test_syndrome_of_codeword_is_zero(hamming_h):
    assert syndrome(hamming_h, [0] * 7).tolist() == [0, 0, 0]
    assert syndrome(hamming_h, [1, 0, 0, 0, 0, 0, 0]).tolist() == [1, 1, 0]


def test_syndrome_batch(hamming_h):
    batch = np.array([[0] * 7, [1, 0, 0, 0, 0, 0, 0]])
    assert syndrome(hamming_h, batch).tolist() == [[0, 0, 0], [1, 1, 0]]


def test_syndrome_length_mismatch(hamming_h):
    with pytest.raises(DimensionError):
        syndrome(hamming_h, [0] * 6)


def test_row_reduce_identity_and_pivots():
    h = Gf2Matrix.from_rows([[1, 1, 0], [0, 1, 1]])
    reduced, pivots, r = row_reduce_with_pivot_preference(h)
    assert r == 2
    assert pivots == [0, 1]
    assert reduced.bits.tolist() == [[1, 0, 1], [0, 1, 1]]


def test_forbidden_columns_avoided():
    h = Gf2Matrix.from_rows([[1, 1, 0], [0, 1, 1]])
    _, pivots, r = row_reduce_with_pivot_preference(h, forbidden_pivots=[0])
    assert r == 2
    assert 0 not in pivots


def test_forbidden_column_used_as_last_resort():
    h = Gf2Matrix.from_rows([[1, 0, 0]])
    _, pivots, r = row_reduce_with_pivot_preference(h, forbidden_pivots=[0])
    assert (pivots, r) == ([0], 1)


def test_forbidden_out_of_range():
    with pytest.raises(DimensionError):
        row_reduce_with_pivot_preference(Gf2Matrix.identity(3), forbidden_pivots=[5])


def test_rank_and_row_basis():
    h = Gf2Matrix.from_rows([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]])
    assert rank(h) == 2
    basis = row_basis(h)
    assert basis.rows == 2
    # same null space: every basis row is orthogonal to the null vector 1110
    assert syndrome(basis, [1, 1, 1, 0]).tolist() == [0, 0]


def test_derive_generator_hamming(hamming_h):
    g, info = derive_generator(hamming_h)
    assert g.shape == (7, 4)
    assert len(info) == 4
    assert not (hamming_h.bits.astype(int) @ g.bits.astype(int) % 2).any()


def test_derive_generator_keeps_forbidden_columns_as_info(hamming_h):
    _, info = derive_generator(hamming_h, forbidden_pivots=[3])
    assert 3 in info


def test_derive_generator_rejects_rank_deficiency():
    h = Gf2Matrix.from_rows([[1, 1, 0], [1, 1, 0]])
    with pytest.raises(RankDeficiencyError) as err:
        derive_generator(h)
    assert (err.value.rank, err.value.rows) == (1, 2)


def test_matrix_is_read_only():
    m = Gf2Matrix.identity(2)
    with pytest.raises(ValueError):
        m.bits[0, 0] = 0


def test_equality_and_hash():
    a = Gf2Matrix.from_rows([[1, 0], [0, 1]])
    assert a == Gf2Matrix.identity(2)
    assert hash(a) == hash(Gf2Matrix.identity(2))
    assert a.transpose() == a


full_rank_cases = st.integers(min_value=2, max_value=6).flatmap(
    lambda m: hnp.arrays(np.uint8, (m, m + 4), elements=st.integers(0, 1)))


@given(full_rank_cases, st.data())
def test_generator_spans_null_space(bits, data):
    h = row_basis(Gf2Matrix(bits))
    if h.rows == 0:
        return
    g, info = derive_generator(h)
    assert g.cols == h.cols - h.rows
    info_word = np.array(data.draw(st.lists(st.integers(0, 1), min_size=g.cols, max_size=g.cols)))
    codeword = (g.bits.astype(int) @ info_word) % 2
    assert not syndrome(h, codeword).any()
    # systematic on the information positions
    assert codeword[info].tolist() == info_word.tolist()
