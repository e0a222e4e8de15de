"""
Progress tracking utilities for the symtrunc package.

This module provides tools for tracking long-running batteries and audits,
with memory readings on the progress bar.
"""

import time
import logging
from typing import Iterable, Iterator, Optional, TypeVar

import numpy as np
import psutil
from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")

# Set by the CLI's --quiet flag.
PROGRESS_DISABLED = False


def set_progress_disabled(disabled: bool) -> None:
    """Globally enable or disable progress bars."""
    global PROGRESS_DISABLED
    PROGRESS_DISABLED = bool(disabled)


class ProgressTracker:
    """
    A class for tracking progress of long-running operations.

    Attributes
    ----------
    total : int
        Total number of steps to complete
    desc : str
        Description of the operation
    unit : str
        Unit of progress (e.g., 'pairs', 'functions')
    memory_monitoring : bool
        Whether to monitor memory usage
    start_time : float
        Time when tracking started
    current_step : int
        Current step number
    memory_usage : list
        Resident memory in MB at each step
    """

    def __init__(
        self,
        total: int,
        desc: str = "Processing",
        unit: str = "items",
        memory_monitoring: bool = True,
        disable: Optional[bool] = None,
    ):
        """
        Initialize the progress tracker.

        Parameters
        ----------
        total : int
            Total number of steps to complete
        desc : str, optional
            Description of the operation, by default "Processing"
        unit : str, optional
            Unit of progress, by default "items"
        memory_monitoring : bool, optional
            Whether to monitor memory usage, by default True
        disable : bool, optional
            Hide the progress bar; follows the global quiet switch by default
        """
        self.total = total
        self.desc = desc
        self.unit = unit
        self.memory_monitoring = memory_monitoring
        self.start_time = time.perf_counter()
        self.current_step = 0
        self.memory_usage = []
        self.pbar = tqdm(
            total=total,
            desc=desc,
            unit=unit,
            disable=PROGRESS_DISABLED if disable is None else disable,
            leave=False,
        )

    def update(self, n: int = 1, message: Optional[str] = None) -> None:
        """
        Update the progress tracker.

        Parameters
        ----------
        n : int, optional
            Number of steps completed, by default 1
        message : str, optional
            Additional message to display, by default None
        """
        self.current_step += n
        postfix = {}
        if self.memory_monitoring:
            self.memory_usage.append(psutil.Process().memory_info().rss / 1024 / 1024)
            postfix["memory"] = f"{self.memory_usage[-1]:.1f}MB"
        if message:
            postfix["message"] = message
        if postfix:
            self.pbar.set_postfix(postfix)
        self.pbar.update(n)

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start_time

    def close(self) -> None:
        """Close the progress tracker and log a summary."""
        self.pbar.close()
        total_time = self.elapsed
        if self.memory_monitoring and self.memory_usage:
            logger.debug(
                f"{self.desc}: memory max {max(self.memory_usage):.1f} MB, "
                f"mean {np.mean(self.memory_usage):.1f} MB"
            )
        logger.info(f"{self.desc}: {self.current_step} {self.unit} in {total_time:.2f} seconds")

    def __enter__(self) -> "ProgressTracker":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()


def track_progress(
    items: Iterable[T],
    desc: str = "Processing",
    unit: str = "items",
    total: Optional[int] = None,
    memory_monitoring: bool = False,
) -> Iterator[T]:
    """
    Iterate over ``items`` while updating a ProgressTracker.

    Parameters
    ----------
    items : iterable
        Items to iterate over
    desc : str, optional
        Description of the operation
    unit : str, optional
        Unit of progress
    total : int, optional
        Number of items; taken from ``len(items)`` when available
    memory_monitoring : bool, optional
        Sample resident memory at every step, by default False

    Yields
    ------
    object
        The items, unchanged
    """
    if total is None:
        total = len(items) if hasattr(items, "__len__") else 0
    with ProgressTracker(total, desc=desc, unit=unit, memory_monitoring=memory_monitoring) as tracker:
        for item in items:
            yield item
            tracker.update()
