"""Decimal text round-tripping for float64 values.

Checkpoints and distribution descriptors store floats as %.17g strings: 17
significant digits are enough to reproduce any finite double exactly, so a
written artifact reloads bit-identically on any platform.
"""

from __future__ import annotations

import numpy as np


def fmt(x: float) -> str:
    return "%.17g" % float(x)


def fmt_vector(arr: np.ndarray) -> list[str]:
    return [fmt(v) for v in np.asarray(arr, dtype=np.float64).ravel()]


def fmt_matrix(arr: np.ndarray) -> list[list[str]]:
    return [[fmt(v) for v in row] for row in np.asarray(arr, dtype=np.float64)]


def parse_vector(items: list[str]) -> np.ndarray:
    return np.array([float(v) for v in items], dtype=np.float64)


def parse_matrix(rows: list[list[str]]) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in rows], dtype=np.float64)
