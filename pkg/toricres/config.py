"""Single source of truth for all constants, limits, and enums."""

from enum import Enum


class Mode(Enum):
    """How coefficients are treated: exact rationals or indeterminates."""
    NUMERIC = "numeric"
    SYMBOLIC = "symbolic"


class ExitCode(Enum):
    """Process exit codes of the command-line interface."""
    OK = 0
    INTERNAL = 1
    DEGENERATE = 2
    UNSUPPORTED = 3
    BAD_INPUT = 4


class Severity(Enum):
    """Severity of a verification flag."""
    CRITICAL = "CRITICAL"
    WARNING = "WARNING"


class Strategy(Enum):
    """How a symbolic global residue is solved."""
    AUTO = "auto"
    CRAMER = "cramer"
    INTERPOLATE = "interpolate"


# --- Geometry limits ---

MAX_AMBIENT_DIM = 3

# --- Linear algebra limits ---

MAX_EXPANSION_SIZE = 12  # memoized minor expansion up to this size, Bareiss above
SYMBOLIC_SOLVE_LIMIT = 12  # largest Φ row count solved by symbolic Cramer

# --- Random draws ---

DEFAULT_SEED = 0
Q_DRAW_RANGE: tuple[int, int] = (1, 2**16)
EVALUATION_RANGE: tuple[int, int] = (1, 2**20)  # random evaluation points (signed)
SAMPLE_RANGE: tuple[int, int] = (1, 2**6)  # exact checks of interpolated numerators (signed)
MAX_GENERICITY_RETRIES = 5
MAX_EVALUATION_RETRIES = 3
EXTRA_SAMPLES = 3
MAX_SAMPLE_RETRIES = 20

# --- Modular interpolation ---

PRIME_CEILING = 2**61  # moduli are the primes just below
MAX_MODULI = 12

# --- Residue pipeline ---

COMPLETION_SEARCH_LIMIT = 8  # largest k0 tried before the constructive fallback
DEFAULT_MAX_MINORS = 16

# --- Naming ---

COX_VARIABLE_PREFIX = "x"
TORUS_VARIABLE_PREFIX = "t"
GENERIC_COEFFICIENT_PREFIX = "u"
JACOBIAN_LABEL = "J"

# --- Input grammar ---

QUERY_COMMANDS: frozenset[str] = frozenset({
    "resultant",
    "facet-resultants",
    "toric-residue",
    "global-residue",
    "residue",
    "polytope-info",
    "jacobian",
    "phi-matrix",
})

RESERVED_WORDS: frozenset[str] = frozenset({
    "vars", "params", "polytope", "query", "of", "over", "hull", "k", "m",
})

# --- Logging ---

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
