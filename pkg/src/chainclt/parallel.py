"""Deterministic block-parallel execution.

Replicate loops are cut into fixed-size blocks whose random streams depend only
on ``(seed, block index)``.  The worker count therefore changes wall time but
never results: blocks are evaluated independently and reassembled in order.
"""
from __future__ import annotations

import contextlib
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Sequence, TypeVar

T = TypeVar("T")

THREADS_ENV = "CHAINCLT_THREADS"
REPLICATE_BLOCK = 1024

_threads: int | None = None


def get_threads() -> int:
    if _threads is not None:
        return _threads
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def set_threads(n: int | None) -> None:
    """Override the worker count; ``None`` falls back to the environment."""
    global _threads
    _threads = None if n is None else max(1, int(n))


@contextlib.contextmanager
def threads(n: int) -> Iterator[None]:
    previous = _threads
    set_threads(n)
    try:
        yield
    finally:
        set_threads(previous)


def block_sizes(total: int, block: int = REPLICATE_BLOCK) -> list[int]:
    sizes = [block] * (total // block)
    if total % block:
        sizes.append(total % block)
    return sizes


def ordered_map(fn: Callable[..., T], *iterables: Sequence) -> list[T]:
    """``list(map(fn, ...))`` spread over the configured worker count."""
    workers = get_threads()
    if workers == 1:
        return list(map(fn, *iterables))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *iterables))
