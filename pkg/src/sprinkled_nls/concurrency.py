"""Optional thread fan-out for independent runs.

SPRINKLED_NLS_THREADS caps the worker count; 0 or 1 (the default) means
sequential.  Results are always collected in input order and every random
draw comes from a per-item substream, so the thread count never changes any
output bit.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "SPRINKLED_NLS_THREADS"

__all__ = ["ENV_VAR", "thread_count", "parallel_map"]


def thread_count() -> int:
    raw = os.environ.get(ENV_VAR, "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError(f"{ENV_VAR} must be non-negative, got {n}")
    return n


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map preserving order; threads only when the env var asks for them."""
    seq: Sequence[T] = list(items)
    n = thread_count()
    if n <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=min(n, len(seq))) as ex:
        return list(ex.map(fn, seq))
