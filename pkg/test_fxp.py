import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from core.gf2 import Gf2Matrix
from decoders.float_mp import EdgeWeights, decode, nms_uniform
from decoders.fxp import (ACCUM_MAX, WORD_MAG_MAX, FxpAccum, FxpDatapath, FxpWord, cn_block, decode_fxp,
                          pu_select_scale, quantize, quantize_array, quantize_weights, scale_magnitude,
                          sm_to_2c, two_c_to_sm, vn_block)
from decoders.graph import DegreeError, TannerGraph

HAMMING_GRAPH = TannerGraph.from_parity_check(Gf2Matrix.from_rows([
    [1, 1, 0, 1, 1, 0, 0],
    [1, 0, 1, 1, 0, 1, 0],
    [0, 1, 1, 1, 0, 0, 1],
]))


def w(value: float) -> FxpWord:
    return quantize(value)


def test_quantize_examples():
    assert quantize(0.0) == FxpWord(0, 0)
    assert quantize(100.0).value == 15.75
    assert quantize(-100.0).value == -15.75
    assert quantize(0.374).value == 0.25
    assert quantize(0.375).value == 0.5
    assert quantize(-0.375).value == -0.5
    with pytest.raises(ValueError):
        quantize(float('nan'))


@given(st.floats(min_value=-40, max_value=40, allow_nan=False))
def test_quantize_is_idempotent_and_matches_array_path(x):
    q = quantize(x)
    assert quantize(q.value) == q
    assert abs(q.value - x) <= 0.125 or abs(x) > 15.75
    assert quantize_array(np.array([x]))[0] == q.quarters


def test_every_encoding_roundtrips():
    for bits in range(1 << 7):
        word = FxpWord.from_encoding(bits)
        assert word.encoding == bits
        assert two_c_to_sm(sm_to_2c(word)) == word


def test_positive_and_negative_zero_are_equal():
    assert FxpWord(0, 0) == FxpWord(1, 0)
    assert FxpWord(0, 0).encoding != FxpWord(1, 0).encoding


def test_accumulator_conversion_saturates():
    assert two_c_to_sm(FxpAccum(-ACCUM_MAX)).value == -15.75
    assert FxpAccum.saturate(500).raw == ACCUM_MAX
    assert FxpAccum(-4).encoding == 0xFC
    with pytest.raises(ValueError):
        FxpAccum(ACCUM_MAX + 1)


def test_cn_block_examples():
    out = cn_block([w(2.0), w(3.0), w(0.25)])
    assert (out.min1, out.min2, out.min1_index) == (1, 8, 2)

    tie = cn_block([w(1.0), w(1.0)])
    assert (tie.min1, tie.min2, tie.min1_index) == (4, 4, 0)

    signs = cn_block([w(-1.0), w(-2.0), w(3.0)])
    assert signs.parity == 0
    assert signs.sign_products == (1, 1, 0)

    with pytest.raises(DegreeError):
        cn_block([w(1.0)])


def all_magnitude_triples() -> np.ndarray:
    return np.indices((WORD_MAG_MAX + 1,) * 3).reshape(3, -1).T


def test_cn_block_against_sorting_for_every_degree_three_input():
    mags = all_magnitude_triples()
    assert mags.shape == (1 << 18, 3)
    ordered = np.sort(mags, axis=1)
    # argmin returns the first occurrence, so ties go to the lowest index
    first_min = np.argmin(mags, axis=1)

    words = [FxpWord(0, m) for m in range(WORD_MAG_MAX + 1)]
    got = np.array([
        (out.min1, out.min2, out.min1_index)
        for out in (cn_block([words[a], words[b], words[c]]) for a, b, c in mags.tolist())
    ])
    assert np.array_equal(got[:, 0], ordered[:, 0])
    assert np.array_equal(got[:, 1], ordered[:, 1])
    assert np.array_equal(got[:, 2], first_min)


def test_cn_block_tie_goes_to_lowest_index():
    assert cn_block([w(2.0), w(0.5), w(0.5)]).min1_index == 1
    assert cn_block([w(0.5), w(2.0), w(-0.5)]).min1_index == 0
    assert cn_block([w(0.0), w(0.0), w(0.0)]).min1_index == 0


def test_check_node_stage_for_every_degree_three_input():
    mags = all_magnitude_triples()
    graph = TannerGraph.from_parity_check(Gf2Matrix.from_rows([[1, 1, 1]]))
    path = FxpDatapath(graph, np.full(3, 16), mags)
    path.check_node_stage()

    ordered = np.sort(mags, axis=1)
    own_is_min = np.arange(3) == np.argmin(mags, axis=1)[:, None]
    expected = np.where(own_is_min, ordered[:, 1:2], ordered[:, 0:1])
    assert np.array_equal(path.r2, expected)


def test_cn_block_signs_against_parity():
    values = range(-WORD_MAG_MAX, WORD_MAG_MAX + 1, 9)
    for triple in itertools.product(values, repeat=3):
        out = cn_block([FxpWord.from_quarters(q) for q in triple])
        assert out.parity == sum(q < 0 for q in triple) % 2
        assert out.sign_products == tuple(out.parity ^ (q < 0) for q in triple)


def test_processing_unit_mux_and_scaling():
    cn = cn_block([w(3.0), w(-1.0), w(4.0)])
    own_min = pu_select_scale(w(-1.0), cn, 16)
    assert own_min.value == 3.0
    assert pu_select_scale(w(3.0), cn, 16).value == -1.0
    assert pu_select_scale(w(4.0), cn, 16).value == -1.0


def test_scaling_rounds_ties_away_from_zero():
    cn = cn_block([w(1.0), w(3.0), w(3.0)])
    # 3.0 * 0.625 = 1.875 lies halfway between 1.75 and 2.0
    assert pu_select_scale(w(1.0), cn, 10).value == 2.0
    assert scale_magnitude(12, 10) == 8
    assert scale_magnitude(WORD_MAG_MAX, 16) == WORD_MAG_MAX
    with pytest.raises(ValueError):
        pu_select_scale(w(1.0), cn, 0)


def test_vn_block_examples():
    intrinsic, out = vn_block(w(15.75), [w(15.75), w(15.75)])
    assert intrinsic.value == 31.75
    assert [o.value for o in out] == [15.75, 15.75]

    intrinsic, out = vn_block(w(0.0), [])
    assert intrinsic.value == 0.0
    assert out == []

    intrinsic, out = vn_block(w(1.0), [w(0.5), w(-0.25)])
    assert intrinsic.value == 1.25
    assert [o.value for o in out] == [0.75, 1.5]


def test_vn_adder_saturates_the_exact_sum():
    # order-independent: +15.75 +15.75 -15.75 -15.75 +15.75 never clips midway
    intrinsic, _ = vn_block(w(15.75), [w(15.75), w(-15.75), w(-15.75), w(15.75)])
    assert intrinsic.value == 15.75


def test_weight_quantization():
    w16 = quantize_weights(EdgeWeights([1.0, 0.625, 0.0, 2.0, 0.03]))
    assert w16.tolist() == [16, 10, 1, 16, 1]


def test_noiseless_codeword_terminates_early(hamming_context):
    g = hamming_context.graph
    llr = np.where(np.array([1, 1, 1, 0, 0, 0, 0]) == 1, -8.0, 8.0)
    result, report = decode_fxp(g, np.full(g.num_edges, 12), llr, 10)
    assert result.parity_satisfied
    assert result.iterations_used == 1
    assert report.cycles == 2 * result.iterations_used
    assert report.activity == 2 * g.num_edges


def test_without_early_termination_runs_twenty_cycles(half_rate_context, rng):
    g = half_rate_context.graph
    batch = half_rate_context.sample(rng, 3.0, 4)
    result, report = decode_fxp(g, np.full(g.num_edges, 12), batch.llr, 10, et_enabled=False)
    assert (report.cycles == 20).all()
    assert (result.iterations_used == 10).all()


def test_intrinsic_words_stay_in_range(half_rate_context, rng):
    g = half_rate_context.graph
    batch = half_rate_context.sample(rng, 1.0, 8)
    path = FxpDatapath(g, np.full(g.num_edges, 16), quantize_array(batch.llr))
    for _ in range(5):
        path.iterate(et_enabled=False)
        assert np.abs(path.r1).max() <= WORD_MAG_MAX
        assert np.abs(path.r2).max() <= WORD_MAG_MAX
        assert np.abs(path.intrinsic).max() <= ACCUM_MAX


def _float_and_fixed(graph, weights, llr, iterations):
    trace = []
    decode(graph, weights, llr, iterations, et_enabled=False, trace=trace)
    path = FxpDatapath(graph, quantize_weights(weights), quantize_array(llr))
    steps = []
    for _ in range(iterations):
        path.iterate(et_enabled=False)
        steps.append((path.r2[0] / 4.0, path.r1[0] / 4.0, path.intrinsic[0] / 4.0))
    return trace, steps


@given(st.lists(st.integers(-2, 2), min_size=7, max_size=7),
       st.lists(st.sampled_from([0.25, 0.5, 0.75, 1.0]), min_size=12, max_size=12))
def test_one_iteration_matches_float_decoder(llr_values, alpha):
    graph = HAMMING_GRAPH
    llr = np.array(llr_values, dtype=float)
    trace, steps = _float_and_fixed(graph, EdgeWeights(alpha), llr, 1)
    c2v, v2c, intrinsic = steps[0]
    assert np.array_equal(trace[0]['c2v'][0], c2v)
    assert np.array_equal(trace[0]['v2c'][0], v2c)
    assert np.array_equal(trace[0]['intrinsic'][0], intrinsic)


@given(st.lists(st.integers(-2, 2), min_size=7, max_size=7))
def test_two_iterations_match_float_decoder_at_unit_weight(llr_values):
    graph = HAMMING_GRAPH
    llr = np.array(llr_values, dtype=float)
    trace, steps = _float_and_fixed(graph, nms_uniform(1.0, graph.num_edges), llr, 2)
    for it in range(2):
        c2v, v2c, intrinsic = steps[it]
        assert np.array_equal(trace[it]['c2v'][0], c2v)
        assert np.array_equal(trace[it]['v2c'][0], v2c)
        assert np.array_equal(trace[it]['intrinsic'][0], intrinsic)
