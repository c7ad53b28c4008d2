import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from core.codec import LengthMismatchError
from core.gf2 import Gf2Matrix
from decoders.factory import DecoderFactory
from decoders.float_mp import (EdgeWeights, FloatDecoder, cn_update_anms, cn_update_spa, decode, nms_uniform,
                               vn_update)
from decoders.graph import DegreeError, TannerGraph

messages = st.lists(st.floats(min_value=-15, max_value=15, allow_nan=False), min_size=2, max_size=8)


def test_anms_example():
    assert cn_update_anms([2, -3, 4], [1, 1, 1]).tolist() == [-3, 2, -2]


def test_anms_scaled_example():
    assert cn_update_anms([2, -3, 4], [0.5, 0.5, 0.5]).tolist() == [-1.5, 1, -1]


def test_anms_per_edge_weights():
    assert cn_update_anms([2, -3, 4], [1, 0.5, 0.25]).tolist() == [-3, 1, -0.5]


def test_zero_input_zeroes_other_outputs():
    out = cn_update_anms([2, 0, -5, 1], [1, 1, 1, 1])
    assert out[1] == -1
    assert (out[[0, 2, 3]] == 0).all()


def test_check_node_degree_errors():
    with pytest.raises(DegreeError):
        cn_update_anms([1.0], [1.0])
    with pytest.raises(DegreeError):
        cn_update_spa([1.0])
    with pytest.raises(LengthMismatchError):
        cn_update_anms([1.0, 2.0], [1.0])


def test_spa_degree_two_passes_messages_across():
    assert cn_update_spa([2.0, 2.0]) == pytest.approx([2.0, 2.0])
    assert cn_update_spa([2.0, -3.0]) == pytest.approx([-3.0, 2.0])


def test_spa_degree_three():
    expected = 2 * math.atanh(math.tanh(1.0) ** 2)
    assert cn_update_spa([2.0, 2.0, 2.0]) == pytest.approx([expected] * 3)


@given(messages)
def test_min_sum_bounds_spa(msgs):
    # |SPA| never exceeds the min-sum magnitude and both agree on sign
    spa = cn_update_spa(msgs)
    ms = cn_update_anms(msgs, [1.0] * len(msgs))
    assert (np.abs(spa) <= np.abs(ms) + 1e-6).all()
    nonzero = (np.abs(spa) > 1e-12) & (ms != 0)
    assert (np.sign(spa[nonzero]) == np.sign(ms[nonzero])).all()


@given(messages, st.randoms(use_true_random=False))
def test_check_node_is_permutation_equivariant(msgs, random):
    order = list(range(len(msgs)))
    random.shuffle(order)
    w = [1.0] * len(msgs)
    out = cn_update_anms(msgs, w)
    shuffled = cn_update_anms([msgs[i] for i in order], w)
    assert shuffled.tolist() == [out[i] for i in order]


@given(messages)
def test_check_node_odd_symmetry(msgs):
    x = np.array(msgs)
    x[0] = -x[0]
    out = cn_update_anms(msgs, [1.0] * len(msgs))
    flipped = cn_update_anms(x, [1.0] * len(msgs))
    assert (flipped[1:] == -out[1:]).all()
    assert flipped[0] == out[0]


def test_vn_update():
    intrinsic, out = vn_update(1.0, [0.5, -0.25])
    assert intrinsic == 1.25
    assert out.tolist() == [0.75, 1.5]
    intrinsic, out = vn_update(0.0, [])
    assert intrinsic == 0.0
    assert out.size == 0


def test_nms_uniform_range():
    assert nms_uniform(1.0, 3).alpha.tolist() == [1.0, 1.0, 1.0]
    for alpha in (0.0, 1.5, -0.5):
        with pytest.raises(ValueError):
            nms_uniform(alpha, 3)


def test_edge_weights_dict_roundtrip():
    w = EdgeWeights([0.5, 0.75])
    assert EdgeWeights.from_dict(w.to_dict()).alpha.tolist() == [0.5, 0.75]
    assert not w.is_uniform
    assert nms_uniform(0.75, 4).is_uniform


def test_graph_rejects_degree_one_check():
    with pytest.raises(DegreeError):
        TannerGraph.from_parity_check(Gf2Matrix.from_rows([[1, 0, 0], [0, 1, 1]]))


def test_graph_edges_are_row_major(hamming_h):
    g = TannerGraph.from_parity_check(hamming_h)
    assert g.num_edges == hamming_h.weight()
    assert g.cn_edges(0).tolist() == [0, 1, 2, 3]
    assert g.edge_vn[:4].tolist() == [0, 1, 3, 4]
    assert g.vn_degrees().tolist() == [2, 2, 2, 3, 1, 1, 1]
    assert (g.edge_cn == np.sort(g.edge_cn)).all()


@pytest.mark.parametrize('rule', ['anms', 'nms', 'spa'])
def test_noiseless_codeword_decodes_in_one_iteration(hamming_context, rule):
    g = hamming_context.graph
    codeword = np.array([1, 1, 1, 0, 0, 0, 0])
    llr = np.where(codeword == 1, -8.0, 8.0)
    result = decode(g, nms_uniform(0.75, g.num_edges), llr, 10, cn_rule=rule)
    assert result.iterations_used == 1
    assert result.parity_satisfied
    assert result.hard_bits.tolist() == codeword.tolist()


def test_single_bit_error_corrected(hamming_context):
    g = hamming_context.graph
    llr = np.array([-2.0, 3, 3, 3, 3, 3, 3])
    result = decode(g, nms_uniform(1.0, g.num_edges), llr, 10)
    assert result.parity_satisfied
    assert not result.hard_bits.any()


def test_early_termination_off_runs_i_max(hamming_context):
    g = hamming_context.graph
    llr = np.full(7, 4.0)
    result = decode(g, nms_uniform(1.0, g.num_edges), llr, 1, et_enabled=False)
    assert result.iterations_used == 1
    result = decode(g, nms_uniform(1.0, g.num_edges), llr, 7, et_enabled=False)
    assert result.iterations_used == 7
    assert result.parity_satisfied


def test_batch_frames_terminate_independently(hamming_context):
    g = hamming_context.graph
    easy = np.full(7, 6.0)
    hard = np.array([-0.5, 0.5, -0.5, 0.5, -0.5, 0.5, 0.1])
    result = decode(g, nms_uniform(0.75, g.num_edges), np.stack([easy, hard]), 5)
    assert result.iterations_used[0] == 1
    assert result.parity_satisfied[0]
    alone = decode(g, nms_uniform(0.75, g.num_edges), hard, 5)
    assert result.frame(1).iterations_used == alone.iterations_used
    assert np.allclose(result.frame(1).soft_intrinsic, alone.soft_intrinsic)


def test_early_termination_is_sound(half_rate_context, rng):
    batch = half_rate_context.sample(rng, 3.0, 50)
    g = half_rate_context.graph
    result = decode(g, nms_uniform(0.75, g.num_edges), batch.llr, 10)
    ok = result.parity_satisfied
    assert g.parity_ok(result.hard_bits).tolist() == ok.tolist()
    assert (result.iterations_used[~ok] == 10).all()


def test_decoder_is_channel_symmetric(half_rate_context, rng):
    # mapping the received word onto the all-zero codeword only flips signs
    g = half_rate_context.graph
    w = nms_uniform(0.75, g.num_edges)
    batch = half_rate_context.sample(rng, 2.0, 8)
    flip = 1.0 - 2.0 * batch.codewords
    base = decode(g, w, batch.llr * flip, 10, et_enabled=False)
    shifted = decode(g, w, batch.llr, 10, et_enabled=False)
    assert np.allclose(base.soft_intrinsic * flip, shifted.soft_intrinsic)


def test_decode_validates_inputs(hamming_context):
    g = hamming_context.graph
    w = nms_uniform(1.0, g.num_edges)
    with pytest.raises(LengthMismatchError):
        decode(g, w, np.zeros(6), 5)
    with pytest.raises(LengthMismatchError):
        decode(g, EdgeWeights([1.0]), np.zeros(7), 5)
    with pytest.raises(ValueError):
        decode(g, EdgeWeights(np.linspace(0.5, 1, g.num_edges)), np.zeros(7), 5, cn_rule='nms')
    with pytest.raises(ValueError):
        decode(g, w, np.zeros(7), 0)


def test_factory_builds_decoders(hamming_context):
    g = hamming_context.graph
    nms = DecoderFactory.get_decoder('nms', g, config={'nms_alpha': 0.5})
    assert isinstance(nms, FloatDecoder)
    assert nms.weights.alpha[0] == 0.5
    spa = DecoderFactory.get_decoder('spa', g)
    result, report = spa.decode_batch(np.full((2, 7), 3.0), 5)
    assert report is None
    assert result.parity_satisfied.all()
    fxp = DecoderFactory.get_decoder('fxp-anms', g)
    _, report = fxp.decode_batch(np.full((1, 7), 3.0), 5)
    assert report.cycles.tolist() == [2]
    with pytest.raises(ValueError):
        DecoderFactory.get_decoder('bitflip', g)
