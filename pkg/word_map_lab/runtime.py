import sys
import logging
import threading
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)

# Global set to track live executors for cleanup on cancellation/exit
active_executors = set()
_lock = threading.Lock()


class tracked_executor:
    """Context manager around a ThreadPoolExecutor that registers it for signal-time shutdown."""

    def __init__(self, workers: int):
        self.workers = max(1, int(workers))
        self.executor = None

    def __enter__(self) -> ThreadPoolExecutor:
        self.executor = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="wordlab")
        with _lock:
            active_executors.add(self.executor)
        return self.executor

    def __exit__(self, exc_type, exc, tb):
        try:
            self.executor.shutdown(wait=True, cancel_futures=exc_type is not None)
        finally:
            with _lock:
                active_executors.discard(self.executor)
        return False


def cleanup_resources():
    """Shut down executors that are still running on exit or cancellation."""
    with _lock:
        executors = list(active_executors)
        active_executors.clear()
    for executor in executors:
        try:
            executor.shutdown(wait=False, cancel_futures=True)
            logger.info("Cancelled pending enumeration partitions")
        except Exception as e:
            logger.error(f"Error shutting down executor: {e}")


def signal_handler(sig, frame):
    """Handle termination signals."""
    logger.info(f"Received signal {sig}, cleaning up...")
    cleanup_resources()
    sys.exit(130)
