"""Helper utilities for writing experiment outputs."""

import hashlib
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


def _jsonable(value: Any) -> Any:
    """Convert numpy types, paths and non-finite floats to plain JSON values."""
    if isinstance(value, BaseModel):
        return _jsonable(value.model_dump(mode='json'))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        # unbounded quantities are written as null
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def to_json(data: Any) -> str:
    return json.dumps(_jsonable(data), sort_keys=True, indent=2) + '\n'


def stable_hash(data: Any) -> str:
    """SHA-256 of the canonical JSON form of ``data``."""
    canonical = json.dumps(_jsonable(data), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    Write text so that ``path`` either keeps its old content or gets all of the new one.

    Args:
        path: Destination file
        text: Content to write

    Returns:
        Path: The destination path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix='.tmp', dir=path.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.info(f"Wrote {path}")
    return path


def save_json(data: Any, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, to_json(data))


def save_matrix_csv(matrix: np.ndarray, path: Union[str, Path], float_format: Optional[str] = '%.6e') -> Path:
    """
    Save an N x N matrix as a headerless CSV, row 0 first.

    Args:
        matrix: 2-D array
        path: Destination file
        float_format: printf format for floats; ignored for integer matrices

    Returns:
        Path: The destination path
    """
    frame = pd.DataFrame(np.asarray(matrix))
    text = frame.to_csv(header=False, index=False, float_format=float_format, lineterminator='\n')
    return atomic_write_text(path, text)


def save_table_csv(table: pd.DataFrame, path: Union[str, Path]) -> Path:
    text = table.to_csv(index=False, float_format='%.10g', lineterminator='\n')
    return atomic_write_text(path, text)


class RunManifest(BaseModel):
    """Everything needed to reproduce the files of one output directory."""

    model_config = ConfigDict(frozen=True)

    command: str
    config_path: str
    output_dir: str
    seed: Optional[int] = None
    tool_version: str
    parameter_hash: str


def write_manifest(manifest: RunManifest, output_dir: Union[str, Path, None] = None) -> Path:
    output_dir = Path(output_dir if output_dir is not None else manifest.output_dir)
    return save_json(manifest, output_dir / MANIFEST_NAME)


def check_config_availability(config_path: Union[str, Path, None]) -> bool:
    """
    Check that a configuration file exists and is readable.

    Args:
        config_path: Path given on the command line or by the environment

    Returns:
        bool: True if the file can be opened, False otherwise
    """
    if not config_path:
        logger.warning("No configuration file given. Pass --config or set XBAR_CONFIG in your .env file.")
        return False

    path = Path(config_path)
    if not path.is_file():
        logger.error(f"Configuration file not found: {path}")
        return False
    if not os.access(path, os.R_OK):
        logger.error(f"Configuration file is not readable: {path}")
        return False
    return True
