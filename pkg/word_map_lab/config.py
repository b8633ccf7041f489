import os
import logging
from dotenv import load_dotenv
from .errors import ConfigurationError

# Load environment variables
load_dotenv(os.path.join(os.path.dirname(__file__), '..', '.env'))

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 9
MAX_GROUP_ORDER = 10 ** 6

WORDLAB_WORKERS = int(os.getenv("WORDLAB_WORKERS", str(os.cpu_count() or 1)))
WORDLAB_CHUNK = int(os.getenv("WORDLAB_CHUNK", "262144"))
WORDLAB_TABLE_LIMIT = int(os.getenv("WORDLAB_TABLE_LIMIT", "4096"))
WORDLAB_LOG_LEVEL = os.getenv("WORDLAB_LOG_LEVEL", "INFO")

# Cayley tables are checked exhaustively for associativity up to this order,
# polycyclic presentations up to PC_ASSOCIATIVITY_EXHAUSTIVE.
CAYLEY_ASSOCIATIVITY_EXHAUSTIVE = 64
CAYLEY_ASSOCIATIVITY_SAMPLES = 10 ** 5
PC_ASSOCIATIVITY_EXHAUSTIVE = 512
PC_ASSOCIATIVITY_SAMPLES = 10 ** 4

CHARACTER_TABLE_MAX_ORDER = 2000
CHARACTER_TABLE_MAX_CLASSES = 200
ORTHOGONALITY_TOLERANCE = 1e-9
COEFFICIENT_TOLERANCE = 1e-6


def current_budget() -> int:
    """
    Returns the evaluation budget, honouring a WORDLAB_BUDGET override in the process environment.
    """
    raw = os.getenv("WORDLAB_BUDGET")
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"WORDLAB_BUDGET must be a positive integer, got {raw!r}")
    if value <= 0:
        raise ConfigurationError(f"WORDLAB_BUDGET must be a positive integer, got {raw!r}")
    return value


def default_workers() -> int:
    return max(1, WORDLAB_WORKERS)
