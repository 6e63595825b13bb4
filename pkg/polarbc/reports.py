"""
CSV / JSON artifact emission.

모든 CSV 는 첫 줄에 설정 해시와 버전을 주석으로 남기고, 둘째 줄이 컬럼 헤더다.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__

logger = logging.getLogger(__name__)


def provenance(config_hash: str) -> str:
    return f"# config_sha256={config_hash} version={__version__}"


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(provenance(config_hash) + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
            count += 1
    logger.info(f"[Report] {path.name}: {count} rows")
    return path


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.floating):
        return float(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_json(path, payload: dict, config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"config_sha256": config_hash, "version": __version__, **payload}
    text = json.dumps(document, sort_keys=True, indent=2, default=_json_default)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(f"[Report] {path.name} written")
    return path


def read_csv_rows(path) -> list:
    """Rows after the provenance line, header included."""
    with Path(path).open(newline="", encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.reader(lines))
