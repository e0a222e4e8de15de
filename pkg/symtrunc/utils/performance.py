"""
Performance utilities for the symtrunc package.

This module contains utilities for timing and memory profiling of harness
jobs. Timings are reported separately from verification results so that
reports stay reproducible.
"""

import os
import time
import logging
from typing import Any, Callable, Dict, Tuple

import psutil

logger = logging.getLogger(__name__)


def profile_function(func: Callable, *args, **kwargs) -> Tuple[Any, Dict[str, float]]:
    """
    Profile a function's execution time and memory usage.

    Parameters
    ----------
    func : callable
        Function to profile.
    *args : tuple
        Positional arguments to pass to the function.
    **kwargs : dict
        Keyword arguments to pass to the function.

    Returns
    -------
    tuple
        Tuple containing (result, profile_stats).
    """
    process = psutil.Process(os.getpid())
    mem_before = process.memory_info().rss / 1024 / 1024
    start_time = time.perf_counter()

    result = func(*args, **kwargs)

    execution_time = time.perf_counter() - start_time
    mem_after = process.memory_info().rss / 1024 / 1024
    profile_stats = {
        "execution_time": execution_time,
        "memory_before": mem_before,
        "memory_after": mem_after,
        "memory_used": mem_after - mem_before,
    }
    return result, profile_stats
