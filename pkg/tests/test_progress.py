"""
Unit tests for the progress tracking utilities.
"""

import logging

from symtrunc.utils import progress
from symtrunc.utils.progress import ProgressTracker, set_progress_disabled, track_progress


class TestProgressTracker:
    """
    Test class for the ProgressTracker.
    """

    def test_update_records_memory(self):
        with ProgressTracker(3, desc="battery", unit="functions") as tracker:
            tracker.update()
            tracker.update(2, message="done")
        assert tracker.current_step == 3
        assert len(tracker.memory_usage) == 2
        assert all(value > 0 for value in tracker.memory_usage)

    def test_close_logs_summary(self, caplog):
        with caplog.at_level(logging.INFO, logger="symtrunc.utils.progress"):
            tracker = ProgressTracker(1, desc="audit", unit="pairs", memory_monitoring=False)
            tracker.update()
            tracker.close()
        assert "audit: 1 pairs" in caplog.text
        assert tracker.memory_usage == []

    def test_global_switch(self):
        set_progress_disabled(False)
        assert not progress.PROGRESS_DISABLED
        set_progress_disabled(True)
        assert ProgressTracker(1).pbar.disable


def test_track_progress_yields_items():
    assert list(track_progress(range(4), desc="pairs")) == [0, 1, 2, 3]
    assert list(track_progress(iter("ab"))) == ["a", "b"]


def test_track_progress_memory_monitoring(caplog):
    """
    Test that memory sampling is available through track_progress.
    """
    with caplog.at_level(logging.DEBUG, logger="symtrunc.utils.progress"):
        assert list(track_progress(range(3), desc="pairs", memory_monitoring=True)) == [0, 1, 2]
    assert "pairs: memory max" in caplog.text
