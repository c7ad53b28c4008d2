from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple


class ArtifactFormatError(ValueError):
    """A file does not follow the expected layout."""


class AbstractArtifact(ABC):
    """Abstract base class for all artifact files."""

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the artifact with configuration.

        Args:
            config (Dict[str, Any]): Must contain ``path``
        """
        self.config = config
        self.path = Path(config['path'])

    @abstractmethod
    def load(self, **kwargs) -> Any:
        """
        Read the artifact.

        Raises:
            ArtifactFormatError: when the file content is malformed
            OSError: when the file cannot be read
        """
        pass

    @abstractmethod
    def save(self, obj: Any, **kwargs) -> Path:
        pass

    def validate_config(self) -> bool:
        """
        Validate the artifact configuration for reading.

        Returns:
            bool: True if the path names an existing file
        """
        if 'path' not in self.config:
            return False
        try:
            return self.path.exists() and self.path.is_file()
        except Exception:
            return False

    def _read_lines(self) -> List[str]:
        if not self.validate_config():
            raise FileNotFoundError(f"Artifact file not found: {self.path}")
        return self.path.read_text(encoding='utf-8').splitlines()

    @staticmethod
    def split_header(lines: List[str]) -> Tuple[Dict[str, str], List[str]]:
        """Separate ``# key value`` header lines from the body."""
        header: Dict[str, str] = {}
        body = []
        for line in lines:
            if line.startswith('#'):
                key, _, value = line[1:].strip().partition(' ')
                if key:
                    header[key.rstrip(':')] = value.strip()
            else:
                body.append(line)
        return header, body

    @staticmethod
    def tokens(lines: List[str]) -> Iterator[int]:
        for line in lines:
            for token in line.split():
                try:
                    yield int(token)
                except ValueError:
                    raise ArtifactFormatError(f"Expected an integer, got {token!r}")

    def _write(self, text: str) -> Path:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(text, encoding='utf-8')
        return self.path
