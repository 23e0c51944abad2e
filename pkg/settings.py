#!/usr/bin/env python3
"""
settings.py - Environment configuration (.env next to the scripts, then os.environ)

There is one level of parallelism at a time: code already running on a pool
thread calls single_worker() so the FFTs and BMO sweeps underneath it stay
serial.
"""

import logging
import os
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Iterator, Optional

from dotenv import load_dotenv

load_dotenv(dotenv_path=Path(__file__).parent / ".env")

logger = logging.getLogger(__name__)

WORKERS_ENV = "MIXBOUND_WORKERS"
OUTPUT_DIR_ENV = "MIXBOUND_OUTPUT_DIR"

_worker_cap: ContextVar[Optional[int]] = ContextVar("mixbound_worker_cap", default=None)


def worker_count() -> int:
    """Worker cap for FFTs, the BMO sweep and ensembles (MIXBOUND_WORKERS)."""
    cap = _worker_cap.get()
    if cap is not None:
        return cap
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning("ignoring %s=%r: not an integer, using %d workers",
                           WORKERS_ENV, raw, os.cpu_count() or 1)
    return os.cpu_count() or 1


@contextmanager
def single_worker() -> Iterator[None]:
    """Cap worker_count() at 1 in the current thread/context."""
    token = _worker_cap.set(1)
    try:
        yield
    finally:
        _worker_cap.reset(token)


def default_output_dir() -> Optional[Path]:
    raw = os.environ.get(OUTPUT_DIR_ENV)
    return Path(raw) if raw else None
