import signal
import sys
import logging
from word_map_lab.cli import run
from word_map_lab.config import WORDLAB_LOG_LEVEL
from word_map_lab import signal_handler

# Configure Logging
logging.basicConfig(level=getattr(logging, WORDLAB_LOG_LEVEL.upper(), logging.INFO),
                    format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stderr)
logger = logging.getLogger(__name__)

# Register signal handlers
signal.signal(signal.SIGINT, signal_handler)
signal.signal(signal.SIGTERM, signal_handler)

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
