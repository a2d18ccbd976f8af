"""
Progress tracking for propagation sweeps, convergence studies and scenario batches
"""

import time
import logging
import threading
from typing import Dict, Any

logger = logging.getLogger(__name__)


def format_seconds(seconds: float) -> str:
    """Format seconds into human-readable time"""
    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        return f"{int(seconds // 60)}m {int(seconds % 60)}s"
    hours = int(seconds // 3600)
    minutes = int((seconds % 3600) // 60)
    return f"{hours}h {minutes}m"


class ProgressTracker:
    """Thread-safe progress log for a fixed number of work units

    Worker threads call ``update``; a line is logged at most every
    ``update_interval`` seconds.
    """

    def __init__(self, task_name: str, total_items: int, update_interval: float = 5.0):
        self.task_name = task_name
        self.total_items = total_items
        self.completed_items = 0
        self.failed_items = 0
        self.start_time = time.perf_counter()
        self.last_update_time = self.start_time
        self.update_interval = update_interval
        self._lock = threading.Lock()

    def update(self, items_completed: int = 1, success: bool = True, force: bool = False) -> None:
        with self._lock:
            self.completed_items += items_completed
            if not success:
                self.failed_items += items_completed
            now = time.perf_counter()
            if force or (now - self.last_update_time) >= self.update_interval:
                self._log_progress(now)
                self.last_update_time = now

    def _log_progress(self, now: float) -> None:
        elapsed = now - self.start_time
        percent = (self.completed_items / self.total_items * 100) if self.total_items > 0 else 0

        if self.completed_items > 0:
            remaining = self.total_items - self.completed_items
            eta_str = format_seconds(elapsed / self.completed_items * remaining)
        else:
            eta_str = "calculating..."

        logger.info(
            f"{self.task_name}: {self.completed_items}/{self.total_items} "
            f"({percent:.1f}%) - ETA: {eta_str}"
        )

    def finish(self) -> Dict[str, Any]:
        """Mark task as finished and return summary"""
        elapsed = time.perf_counter() - self.start_time
        summary = {
            "task_name": self.task_name,
            "total_items": self.total_items,
            "completed_items": self.completed_items,
            "failed_items": self.failed_items,
            "elapsed_seconds": elapsed,
        }
        logger.info(
            f"{self.task_name} completed: {self.completed_items - self.failed_items}/{self.total_items} "
            f"in {format_seconds(elapsed)}"
        )
        return summary
