"""Analytic throughput/latency model and the silicon figures it is compared against."""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from typing_extensions import Self

logger = logging.getLogger(__name__)

REFERENCE_NODE_NM = 22.0
REFERENCE_VDD = 0.8


@dataclass(frozen=True)
class MeasuredPoint:
    """Measured operating point of the 22 nm chip for one rate."""

    k: int
    f_max_mhz: float
    f_max_et_mhz: float
    power_mw: float
    power_et_mw: float
    area_mm2: float = 0.44
    min_snr_db: float = 0.0


MEASURED = {
    '12': MeasuredPoint(64, 1452.0, 1356.0, 575.0, 296.0, min_snr_db=4.0),
    '23': MeasuredPoint(128, 1246.0, 809.0, 636.0, 218.0, min_snr_db=5.6),
    '34': MeasuredPoint(192, 1142.0, 776.0, 699.0, 236.0, min_snr_db=6.2),
}


@dataclass
class PerfModel:
    k: int
    f_max_hz: float
    i_max: int = 10

    def __post_init__(self):
        if self.k <= 0 or self.f_max_hz <= 0 or self.i_max <= 0:
            raise ValueError(f"Performance model fields must be positive: {self}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        f_hz = data.get('f_max_hz')
        if f_hz is None:
            f_hz = float(data['f_max_mhz']) * 1e6
        return cls(k=int(data['k']), f_max_hz=float(f_hz), i_max=int(data.get('i_max', 10)))

    def to_dict(self) -> Dict[str, Any]:
        return {'k': self.k, 'f_max_hz': self.f_max_hz, 'i_max': self.i_max}


def perf_metrics(m: PerfModel) -> Tuple[float, float]:
    """(information throughput in bit/s, latency in s).

    Two codewords are in flight and each iteration takes two cycles, so one
    codeword leaves every ``i_max`` cycles on average.
    """
    throughput = m.k * m.f_max_hz / m.i_max
    latency = 2.0 * m.i_max / m.f_max_hz
    return throughput, latency


def area_efficiency(throughput_bps: float, area_mm2: float) -> float:
    """Gb/s per mm^2."""
    return throughput_bps / 1e9 / area_mm2


def energy_per_bit(power_w: float, throughput_bps: float) -> float:
    """Joules per information bit."""
    return power_w / throughput_bps


def technology_scaling(node_nm: float, vdd: float) -> Tuple[float, float]:
    """(S, U) factors relative to the 22 nm, 0.8 V reference."""
    return node_nm / REFERENCE_NODE_NM, vdd / REFERENCE_VDD


def scale_to_reference(throughput_bps: float, latency_s: float, area_eff: float,
                       energy_j: float, node_nm: float, vdd: float) -> Dict[str, float]:
    """Project another design's figures onto the reference node and supply voltage."""
    s, u = technology_scaling(node_nm, vdd)
    return {
        'throughput_bps': throughput_bps * s,
        'latency_s': latency_s / s,
        'area_efficiency': area_eff * s ** 3,
        'energy_per_bit': energy_j / (s * u ** 2),
    }


def measured_report(rate_label: str, i_max: int = 10, et: bool = False,
                    f_max_mhz: Optional[float] = None) -> Dict[str, float]:
    """Model figures plus area and energy efficiency for one measured rate."""
    point = MEASURED.get(rate_label)
    if point is None:
        raise ValueError(f"No measured point for rate {rate_label}")
    f_mhz = f_max_mhz if f_max_mhz is not None else (point.f_max_et_mhz if et else point.f_max_mhz)
    model = PerfModel(point.k, f_mhz * 1e6, i_max)
    throughput, latency = perf_metrics(model)
    power_w = (point.power_et_mw if et else point.power_mw) / 1e3
    report = {
        'k': point.k,
        'f_max_mhz': f_mhz,
        'i_max': i_max,
        'throughput_gbps': throughput / 1e9,
        'latency_ns': latency * 1e9,
        'area_mm2': point.area_mm2,
        'area_efficiency_gbps_mm2': area_efficiency(throughput, point.area_mm2),
        'power_mw': power_w * 1e3,
        'energy_pj_per_bit': energy_per_bit(power_w, throughput) * 1e12,
        'min_snr_db': point.min_snr_db,
    }
    logger.debug(f"Perf report for rate {rate_label} (ET={et}): {report}")
    return report
