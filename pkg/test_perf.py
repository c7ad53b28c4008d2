import pytest

from decoders.perf import (MEASURED, PerfModel, area_efficiency, energy_per_bit, measured_report, perf_metrics,
                           scale_to_reference, technology_scaling)

# published chip figures at I_max = 10 without early termination
TABLE = {
    '12': {'throughput_gbps': 9.29, 'latency_ns': 13.78, 'area_efficiency_gbps_mm2': 21.12,
           'energy_pj_per_bit': 61.88},
    '23': {'throughput_gbps': 15.94, 'latency_ns': 16.06, 'area_efficiency_gbps_mm2': 36.24,
           'energy_pj_per_bit': 39.88},
    '34': {'throughput_gbps': 21.92, 'latency_ns': 17.52, 'area_efficiency_gbps_mm2': 49.83,
           'energy_pj_per_bit': 31.88},
}


def test_throughput_and_latency_formulas():
    throughput, latency = perf_metrics(PerfModel(64, 1.452e9, 10))
    assert throughput == pytest.approx(9.2928e9)
    assert latency == pytest.approx(13.774e-9, rel=1e-4)


@pytest.mark.parametrize('label', sorted(TABLE))
def test_model_reproduces_published_table(label):
    report = measured_report(label, i_max=10)
    for key, expected in TABLE[label].items():
        assert report[key] == pytest.approx(expected, rel=1e-3), key


def test_early_termination_uses_its_own_operating_point():
    report = measured_report('12', et=True)
    assert report['f_max_mhz'] == MEASURED['12'].f_max_et_mhz
    assert report['power_mw'] == 296.0


def test_frequency_override():
    assert measured_report('23', f_max_mhz=1000.0)['throughput_gbps'] == pytest.approx(12.8)


def test_unknown_rate_has_no_measurement():
    with pytest.raises(ValueError):
        measured_report('56')


def test_model_validation_and_dict():
    with pytest.raises(ValueError):
        PerfModel(64, 0.0)
    m = PerfModel.from_dict({'k': 64, 'f_max_mhz': 1452, 'i_max': 5})
    assert m.f_max_hz == 1.452e9
    assert PerfModel.from_dict(m.to_dict()) == m


def test_efficiency_helpers():
    assert area_efficiency(9.2928e9, 0.44) == pytest.approx(21.12, rel=1e-3)
    assert energy_per_bit(0.575, 9.2928e9) == pytest.approx(61.88e-12, rel=1e-3)


def test_technology_scaling_to_reference_node():
    assert technology_scaling(22, 0.8) == (1.0, 1.0)
    # 28 nm, 1.0 V design projected onto 22 nm, 0.8 V
    scaled = scale_to_reference(494.68e9, 69.6e-9, 30.53, 26.99e-12, node_nm=28, vdd=1.0)
    assert scaled['throughput_bps'] / 1e9 == pytest.approx(629.60, rel=1e-3)
    assert scaled['latency_s'] * 1e9 == pytest.approx(54.69, rel=1e-3)
    assert scaled['area_efficiency'] == pytest.approx(62.95, rel=1e-3)
    assert scaled['energy_per_bit'] * 1e12 == pytest.approx(13.57, rel=1e-3)
