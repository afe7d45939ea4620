"""
Small shared helpers: seed derivation, atomic file writes, number formatting.
"""

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np

from foldkit.core.exceptions import DimensionError, InputError, StorageError

logger = logging.getLogger(__name__)


def derive_seed(*parts: Any) -> int:
    """
    Derive a 63-bit seed from arbitrary identifying parts.

    The same parts always give the same seed, independent of the order
    in which work items are scheduled.

    Args:
        parts: Values identifying the work item (global seed, cell, item id, ...)

    Returns:
        Non-negative integer seed

    Example:
        >>> derive_seed(7, "subject-12") == derive_seed(7, "subject-12")
        True
    """
    content_hash = hashlib.md5(json.dumps([str(p) for p in parts]).encode()).hexdigest()
    return int(content_hash[:16], 16) & ((1 << 63) - 1)


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """Independent generator streams split deterministically from one seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def format_number(value: float) -> str:
    """Decimal text with 17 significant digits (round-trips a float64)."""
    return f"{float(value):.17g}"


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    Write text to `path` through a temporary file and a rename.

    Readers never observe a half-written file.

    Raises:
        StorageError: If the directory is not writable or the rename fails
    """
    target = Path(path)
    tmp_name = None
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        logger.error(f"❌ Failed to write {target}: {e}")
        raise StorageError(f"cannot write {target}: {e}") from e

    logger.debug(f"Wrote {target}")
    return target


def frozen_array(value: Any, name: str = "array", ndim: Optional[int] = None) -> np.ndarray:
    """
    Copy `value` into a read-only finite float array.

    Raises:
        DimensionError: Wrong number of dimensions or an empty axis
        InputError: NaN or infinite entries
    """
    arr = np.array(value, dtype=float, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0 or 0 in arr.shape:
        raise DimensionError(f"{name} must not be empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or infinite entries")
    arr.flags.writeable = False
    return arr
