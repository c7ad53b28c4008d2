import argparse
import asyncio
import json
import logging
import logging.handlers
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add the project root directory to Python path
project_root = Path(__file__).parent
sys.path.append(str(project_root))

from artifacts.alist import AlistFile
from artifacts.base import ArtifactFormatError
from artifacts.shift_table import ShiftTableFile
from artifacts.weights import DigestMismatchError, WeightFile
from core.codec import ebn0_to_snr
from core.codegen import (AceLiftError, ConstructionConfig, InfeasibleDegreeError, UnsupportedRateError,
                          audit_code, construct_code, expand_qc, rate_config)
from core.formatters import build_metadata, emit_results
from core.gf2 import RankDeficiencyError
from decoders.perf import MEASURED, PerfModel, measured_report, perf_metrics
from sim.context import CodeContext
from sim.reference import NoRootError, na_reference
from sim.sweep import SweepConfig, SweepConfigError, run_sweep_async
from sim.train import TrainConfig, train_weights

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSTRUCTION = 2
EXIT_IO = 3

DEFAULT_CONFIG = project_root / 'config' / 'config.json'


class UsageError(ValueError):
    pass


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def setup_logging(config: Dict[str, Any]):
    """Configure logging based on config."""
    log_config = config.get('logging', {})
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    root_logger = logging.getLogger()
    root_logger.setLevel(log_config.get('level', 'INFO'))

    if log_config.get('file'):
        # Create logs directory if it doesn't exist
        log_path = Path(log_config['file'])
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.handlers.RotatingFileHandler(
            log_config['file'],
            maxBytes=log_config.get('max_size', 10485760),
            backupCount=log_config.get('backup_count', 5)
        )
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    if log_config.get('console', True):
        console = logging.StreamHandler(sys.stderr)
        console.setFormatter(formatter)
        root_logger.addHandler(console)


def load_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """Load configuration from config.json."""
    config_path = Path(path) if path else DEFAULT_CONFIG
    with open(config_path) as f:
        return json.load(f)


def parse_range(text: str) -> List[float]:
    """``A:B:STEP`` (or a single value) -> [A, B, STEP]."""
    parts = [float(p) for p in text.split(':')]
    if len(parts) == 1:
        return [parts[0], parts[0], 1.0]
    if len(parts) != 3:
        raise UsageError(f"Expected A:B:STEP, got {text!r}")
    return parts


def parse_fraction(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"Not a number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog='qcldpc', description="QC-LDPC code construction, decoding and simulation")
    parser.add_argument('--config', type=Path, default=None, help="configuration JSON")
    parser.add_argument('--log-level', default=None)
    sub = parser.add_subparsers(dest='command', required=True, parser_class=CliParser)

    p = sub.add_parser('construct', help="build and audit the code")
    p.add_argument('--seed', type=int)
    p.add_argument('--out', type=Path, required=True)
    p.add_argument('--alist', type=Path)
    p.add_argument('--strict-ace', action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser('audit', help="audit an existing shift table")
    p.add_argument('--code', type=Path, required=True)
    p.add_argument('--alist', type=Path)

    p = sub.add_parser('sweep', help="Monte Carlo BLER/BER sweep")
    p.add_argument('--code', type=Path, required=True)
    p.add_argument('--rate', required=True)
    p.add_argument('--decoder', default=None)
    p.add_argument('--weights', type=Path)
    p.add_argument('--et', action=argparse.BooleanOptionalAction, default=None)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument('--snr')
    grid.add_argument('--ebn0')
    p.add_argument('--max-frames', type=int)
    p.add_argument('--min-errors', type=int)
    p.add_argument('--imax', type=int)
    p.add_argument('--seed', type=int)
    p.add_argument('--workers', type=int)
    p.add_argument('--chunk-frames', type=int)
    p.add_argument('--format', choices=('csv', 'json'))
    p.add_argument('--out', type=Path, required=True)

    p = sub.add_parser('train', help="train per-edge weights")
    p.add_argument('--code', type=Path, required=True)
    p.add_argument('--rate', required=True)
    p.add_argument('--train-config', '--config-file', dest='train_config', type=Path)
    p.add_argument('--steps', type=int)
    p.add_argument('--seed', type=int)
    p.add_argument('--out', type=Path, required=True)
    p.add_argument('--log', type=Path)

    p = sub.add_parser('perf', help="throughput and latency model")
    p.add_argument('--rate', required=True)
    p.add_argument('--fmax-mhz', type=float)
    p.add_argument('--imax', type=int)
    p.add_argument('--et', action='store_true')

    p = sub.add_parser('na', help="normal-approximation reference SNR")
    p.add_argument('--nprime', type=int, required=True)
    p.add_argument('--rate', required=True)
    p.add_argument('--epsilon', type=float, required=True)
    return parser


def _override(section: Dict[str, Any], **values) -> Dict[str, Any]:
    merged = dict(section)
    merged.update({k: v for k, v in values.items() if v is not None})
    return merged


def _print_audit(audit: Dict[str, Any], digest: str):
    print(f"digest        {digest}")
    print(f"shape         {audit['shape'][0]} x {audit['shape'][1]}, {audit['ones']} ones")
    print(f"girth         {audit['girth']}")
    print(f"ACE spectrum  {audit['ace_spectrum']} ({audit['ace_violations']} cycles below target)")
    for label, r in audit['rank_by_rate'].items():
        print(f"rate {label}       rank {r}, punctured pivots {audit['punctured_pivots_by_rate'][label]}")


def cmd_construct(args, config: Dict[str, Any]) -> int:
    section = _override(config.get('construction', {}), seed=args.seed, strict_ace=args.strict_ace)
    cfg = ConstructionConfig.from_dict(section)
    logger.info(f"Constructing code with {cfg.to_dict()}")
    code = construct_code(cfg)
    ShiftTableFile({'path': args.out}).save(code.qc, code.audit, seed=cfg.seed)
    if args.alist:
        AlistFile({'path': args.alist}).save(expand_qc(code.qc))
    _print_audit(code.audit.to_dict(), code.qc.digest())
    return EXIT_OK


def cmd_audit(args, config: Dict[str, Any]) -> int:
    qc = ShiftTableFile({'path': args.code}).load()
    section = config.get('construction', {})
    audit = audit_code(qc, section.get('d_ace', 3), section.get('eta_ace', 13))
    h = expand_qc(qc)
    degrees = h.bits.sum(axis=0)
    _print_audit(audit.to_dict(), qc.digest())
    profile = {int(d): int((degrees == d).sum()) for d in sorted(set(degrees.tolist()))}
    print(f"VN degrees    {profile}")
    if args.alist:
        AlistFile({'path': args.alist}).save(h)
    return EXIT_OK


async def cmd_sweep(args, config: Dict[str, Any]) -> int:
    rate_cfg = rate_config(args.rate)
    if args.snr:
        start, stop, step = parse_range(args.snr)
    else:
        start, stop, step = parse_range(args.ebn0)
        r = rate_cfg.k / rate_cfg.n_prime
        start, stop = ebn0_to_snr(start, r), ebn0_to_snr(stop, r)
    section = _override(
        config.get('sweep', {}),
        rate=rate_cfg.label, snr_start_db=start, snr_stop_db=stop, snr_step_db=step,
        decoder_kind=args.decoder, weight_file=str(args.weights) if args.weights else None,
        et_enabled=args.et, max_frames=args.max_frames, min_block_errors=args.min_errors,
        i_max=args.imax, seed=args.seed, code_file=str(args.code), workers=args.workers,
        chunk_frames=args.chunk_frames,
    )
    section.setdefault('nms_alpha', config.get('decoder', {}).get('nms_alpha', 0.75))
    cfg = SweepConfig.from_dict(section)
    records = await run_sweep_async(cfg)
    qc_digest = ShiftTableFile({'path': args.code}).load().digest()
    emit_results(records, args.out, args.format, build_metadata(qc_digest, cfg.to_dict()))
    return EXIT_OK


def cmd_train(args, config: Dict[str, Any]) -> int:
    section = dict(config.get('train', {}))
    if args.train_config:
        section.update(load_config(args.train_config))
    cfg = TrainConfig.from_dict(_override(section, steps=args.steps, seed=args.seed))
    qc = ShiftTableFile({'path': args.code}).load()
    context = CodeContext.from_qc(qc, args.rate)
    weights, log = train_weights(cfg, context)
    WeightFile({'path': args.out}).save(weights, code_digest=context.digest, rate=context.rate_label)
    if args.log:
        log.write(args.log)
    print(f"validation loss {log.initial_validation_loss:.5f} -> {log.best_validation_loss:.5f}")
    return EXIT_OK


def cmd_perf(args, config: Dict[str, Any]) -> int:
    rate_cfg = rate_config(args.rate)
    args.imax = args.imax or config.get('perf', {}).get('i_max', 10)
    if rate_cfg.label in MEASURED:
        report = measured_report(rate_cfg.label, args.imax, args.et, args.fmax_mhz)
    else:
        if args.fmax_mhz is None:
            raise UsageError("--fmax-mhz is required for this rate")
        throughput, latency = perf_metrics(PerfModel(rate_cfg.k, args.fmax_mhz * 1e6, args.imax))
        report = {'throughput_gbps': throughput / 1e9, 'latency_ns': latency * 1e9}
    for key, value in report.items():
        print(f"{key:26s}{value:.4g}" if isinstance(value, float) else f"{key:26s}{value}")
    return EXIT_OK


def cmd_na(args, config: Dict[str, Any]) -> int:
    snr = na_reference(args.nprime, parse_fraction(args.rate), args.epsilon)
    print(f"{snr:.4f}")
    return EXIT_OK


async def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    try:
        args = build_parser().parse_args(argv)
        config = load_config(args.config)
        if args.log_level:
            config.setdefault('logging', {})['level'] = args.log_level.upper()
        setup_logging(config)

        if args.command == 'sweep':
            return await cmd_sweep(args, config)
        handlers = {
            'construct': cmd_construct,
            'audit': cmd_audit,
            'train': cmd_train,
            'perf': cmd_perf,
            'na': cmd_na,
        }
        return handlers[args.command](args, config)

    except (UsageError, SweepConfigError, UnsupportedRateError, NoRootError) as e:
        logger.error(f"Usage error: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleDegreeError, AceLiftError, RankDeficiencyError) as e:
        logger.error(f"Construction failed: {str(e)}")
        return EXIT_CONSTRUCTION
    except (OSError, ArtifactFormatError, DigestMismatchError) as e:
        logger.error(f"I/O error: {str(e)}")
        return EXIT_IO
    except ValueError as e:
        logger.error(f"Fatal error: {str(e)}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
