import numpy as np
import pytest

from core.codec import LengthMismatchError
from decoders.fxp import decode_fxp
from decoders.pipeline import pipeline_sim


@pytest.fixture
def w16(half_rate_context):
    return np.full(half_rate_context.graph.num_edges, 12)


@pytest.fixture
def noiseless_pair(half_rate_context, rng):
    batch = half_rate_context.sample(rng, np.inf, 2)
    return batch.llr[0], batch.llr[1]


def test_both_noiseless_terminate_together(half_rate_context, w16, noiseless_pair):
    report = pipeline_sim(half_rate_context.graph, w16, *noiseless_pair, i_max=10)
    assert report.result_a.iterations_used == report.result_b.iterations_used == 1
    assert report.total_cycles == 2
    assert report.stall_cycles == 0
    assert report.freeze_cycle_a == report.freeze_cycle_b == 2


def test_without_early_termination_cycles_are_fixed(half_rate_context, w16, noiseless_pair):
    report = pipeline_sim(half_rate_context.graph, w16, *noiseless_pair, i_max=10, et_enabled=False)
    assert report.total_cycles == 20
    assert report.freeze_cycle_a is None
    assert report.activity_a == report.activity_b == 20 * half_rate_context.graph.num_edges


def test_slots_match_independent_decodes(half_rate_context, w16, rng):
    g = half_rate_context.graph
    batch = half_rate_context.sample(rng, 2.5, 2)
    report = pipeline_sim(g, w16, batch.llr[0], batch.llr[1], i_max=10)
    for slot, llr in ((report.result_a, batch.llr[0]), (report.result_b, batch.llr[1])):
        alone, _ = decode_fxp(g, w16, llr, 10)
        assert slot.iterations_used == alone.iterations_used
        assert np.array_equal(slot.hard_bits, alone.hard_bits)
        assert np.array_equal(slot.soft_intrinsic, alone.soft_intrinsic)


def test_early_finisher_saves_activity_and_stalls_survivor(half_rate_context, w16, noiseless_pair, rng):
    g = half_rate_context.graph
    noisy = half_rate_context.sample(rng, -5.0, 1).llr[0]
    survivor, _ = decode_fxp(g, w16, noisy, 10)
    assert survivor.iterations_used > 1

    report = pipeline_sim(g, w16, noiseless_pair[0], noisy, i_max=10)
    assert report.activity_a < report.activity_b
    assert report.activity_a == 2 * g.num_edges
    assert report.stall_cycles == 1
    assert report.total_cycles == 2 * survivor.iterations_used + 1

    plain = pipeline_sim(g, w16, noiseless_pair[0], noisy, i_max=10, survivor_stall=False)
    assert plain.total_cycles == 2 * survivor.iterations_used
    assert plain.to_dict()['iterations_a'] == 1


def test_slots_take_single_frames(half_rate_context, w16, noiseless_pair):
    with pytest.raises(LengthMismatchError):
        pipeline_sim(half_rate_context.graph, w16, noiseless_pair[0][:-1], noiseless_pair[1], i_max=10)
    with pytest.raises(ValueError):
        pipeline_sim(half_rate_context.graph, w16, *noiseless_pair, i_max=0)
