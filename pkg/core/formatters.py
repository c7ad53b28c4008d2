import csv
import json
import logging
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from dateutil import parser as date_parser

from core import __version__
from core.records import RESULT_FIELDS, SweepRecord

logger = logging.getLogger(__name__)


def build_metadata(code_digest: Optional[str], config: Dict[str, Any],
                   timestamp: Optional[datetime] = None) -> Dict[str, Any]:
    """Metadata block written ahead of the records."""
    timestamp = timestamp or datetime.now(timezone.utc)
    return {
        'code_digest': code_digest,
        'config': config,
        'tool_version': __version__,
        'timestamp': timestamp.isoformat(),
    }


def _cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


class BaseFormatter(ABC):
    extension = ''

    @abstractmethod
    def format(self, records: List[SweepRecord], metadata: Dict[str, Any]) -> str:
        pass

    @abstractmethod
    def parse(self, text: str) -> Tuple[Dict[str, Any], List[SweepRecord]]:
        pass


class CSVFormatter(BaseFormatter):
    """``#``-prefixed metadata lines, one header row, one row per SNR point."""

    extension = '.csv'

    def format(self, records: List[SweepRecord], metadata: Dict[str, Any]) -> str:
        output = StringIO()
        for key, value in metadata.items():
            text = json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value
            output.write(f"# {key}: {'' if text is None else text}\n")
        writer = csv.writer(output, quoting=csv.QUOTE_MINIMAL, lineterminator='\n')
        writer.writerow(RESULT_FIELDS)
        for record in records:
            writer.writerow([_cell(v) for v in record.to_dict().values()])
        return output.getvalue()

    def parse(self, text: str) -> Tuple[Dict[str, Any], List[SweepRecord]]:
        metadata: Dict[str, Any] = {}
        body = []
        for line in text.splitlines():
            if line.startswith('#'):
                key, _, value = line[1:].strip().partition(':')
                value = value.strip()
                if key == 'config' and value:
                    value = json.loads(value)
                metadata[key.strip()] = value or None
            elif line.strip():
                body.append(line)
        records = [SweepRecord.from_dict(row) for row in csv.DictReader(body)]
        return metadata, records


class JSONFormatter(BaseFormatter):
    extension = '.json'

    def format(self, records: List[SweepRecord], metadata: Dict[str, Any]) -> str:
        return json.dumps({'metadata': metadata, 'records': [r.to_dict() for r in records]},
                          indent=2, sort_keys=False) + '\n'

    def parse(self, text: str) -> Tuple[Dict[str, Any], List[SweepRecord]]:
        data = json.loads(text)
        return data.get('metadata', {}), [SweepRecord.from_dict(r) for r in data.get('records', [])]


class ResultFormatterFactory:
    @staticmethod
    def get_formatter(format_type: str) -> BaseFormatter:
        formatters = {
            'csv': CSVFormatter,
            'json': JSONFormatter,
        }

        formatter_class = formatters.get(format_type.lower())
        if not formatter_class:
            raise ValueError(f"Unsupported format type: {format_type}")

        return formatter_class()

    @staticmethod
    def for_path(path: Path) -> BaseFormatter:
        return ResultFormatterFactory.get_formatter('json' if Path(path).suffix.lower() == '.json' else 'csv')


def emit_results(records: List[SweepRecord], path, format_type: Optional[str] = None,
                 metadata: Optional[Dict[str, Any]] = None) -> Path:
    """Write records with their metadata block; the format follows the suffix unless given."""
    path = Path(path)
    formatter = ResultFormatterFactory.get_formatter(format_type) if format_type \
        else ResultFormatterFactory.for_path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(formatter.format(records, metadata or {}), encoding='utf-8')
    except OSError as e:
        logger.error(f"Error writing results to {path}: {str(e)}")
        raise
    logger.info(f"Wrote {len(records)} records to {path}")
    return path


def parse_results(path, format_type: Optional[str] = None) -> Tuple[Dict[str, Any], List[SweepRecord]]:
    """Read a result file back; the ``timestamp`` entry comes back as a datetime."""
    path = Path(path)
    formatter = ResultFormatterFactory.get_formatter(format_type) if format_type \
        else ResultFormatterFactory.for_path(path)
    metadata, records = formatter.parse(path.read_text(encoding='utf-8'))
    if metadata.get('timestamp'):
        metadata['timestamp'] = date_parser.isoparse(metadata['timestamp'])
    return metadata, records
