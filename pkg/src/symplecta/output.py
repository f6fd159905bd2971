"""CSV and JSON writers for command output."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, TextIO, Tuple, Union

from .errors import ConfigError

logger = logging.getLogger(__name__)

Destination = Union[str, Path, TextIO]


def format_float(value: float) -> str:
    """17 significant digits, enough to read back the identical double."""
    return f"{float(value):.17g}"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[float]], metadata: Dict[str, Any] = None) -> str:
    lines: List[str] = [f"# {key}: {value}" for key, value in (metadata or {}).items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_float(value) for value in row))
    return "\n".join(lines) + "\n"


def _write_text(destination: Destination, text: str) -> None:
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as e:
        raise ConfigError(f"cannot write {destination}: {e}") from e
    logger.info("wrote %s", destination)


def write_csv(
    destination: Destination,
    header: Sequence[str],
    rows: Iterable[Sequence[float]],
    metadata: Dict[str, Any] = None,
) -> None:
    """Write ``#`` metadata lines, a header row and float rows with LF endings."""
    _write_text(destination, render_csv(header, rows, metadata))


def parse_csv(text: str) -> Tuple[Dict[str, str], List[str], List[List[float]]]:
    """Inverse of :func:`render_csv`: metadata, header and float rows."""
    metadata: Dict[str, str] = {}
    header: List[str] = []
    rows: List[List[float]] = []
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            metadata[key.strip()] = value.strip()
        elif not header:
            header = line.split(",")
        else:
            try:
                rows.append([float(cell) for cell in line.split(",")])
            except ValueError as e:
                raise ConfigError(f"malformed CSV row {line!r}: {e}") from e
    return metadata, header, rows


def read_csv(path: Union[str, Path]) -> Tuple[Dict[str, str], List[str], List[List[float]]]:
    with open(path, encoding="utf-8") as handle:
        return parse_csv(handle.read())


def dump_json(document: Any) -> str:
    return json.dumps(document, indent=2)


def write_json(destination: Destination, document: Any) -> None:
    _write_text(destination, dump_json(document) + "\n")
