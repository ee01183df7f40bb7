import json
import logging
import os
from typing import Any

from core.errors import MalformedInputError
from core.incidence import PointConfig

logger = logging.getLogger(__name__)


def parse_json_document(text: str, source: str = "<input>") -> Any:
    """
    Parses a JSON document, reporting failures by byte offset.

    Args:
        text (str): The document text.
        source (str): Name used in error messages.
    """
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[:e.pos].encode('utf-8'))
        raise MalformedInputError(f"{source}: {e.msg}", byte_offset=offset) from e


def load_json_document(path: str) -> Any:
    """
    Reads and parses a JSON file.

    Args:
        path (str): The file to read.
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        raise MalformedInputError(f"Cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise MalformedInputError(f"{path} is not UTF-8 text", byte_offset=e.start) from e
    return parse_json_document(text, path)


def load_point_config(path: str) -> PointConfig:
    """
    Loads a configuration document of the form {"points": [["p/q", "r/s"], ...]}.

    Args:
        path (str): The file to read.
    """
    data = load_json_document(path)
    if not isinstance(data, dict) or not isinstance(data.get('points'), list):
        raise MalformedInputError(f"{path}: expected an object with a 'points' list")
    for item in data['points']:
        if not isinstance(item, list):
            raise MalformedInputError(f"{path}: every point must be a list of two rational strings")
    return PointConfig.from_dict(data)


def dump_report(report: Any) -> str:
    """
    Serializes a report deterministically: sorted keys, two-space indent, trailing newline.

    Args:
        report: Any JSON-compatible value.
    """
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def export_report(report: Any, output_path: str):
    """
    Writes a report to a file, creating parent directories as needed.

    Args:
        report: Any JSON-compatible value.
        output_path (str): The path and filename to save the report to (e.g., "out/reps/F3-Ia.json").
    """
    parent = os.path.dirname(output_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(output_path, 'w', encoding='utf-8') as handle:
        handle.write(dump_report(report))
    logger.info("Report written to %s", output_path)
