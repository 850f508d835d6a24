import os

CACHE_DIR_VAR = "PERIODZETA_CACHE_DIR"
WORKERS_VAR = "PERIODZETA_WORKERS"
LOG_LEVEL_VAR = "PERIODZETA_LOG_LEVEL"


def cache_dir() -> str:
    return os.environ.get(CACHE_DIR_VAR, "cache")


def default_workers() -> int:
    return int(os.environ.get(WORKERS_VAR, "0"))


def log_level() -> str:
    return os.environ.get(LOG_LEVEL_VAR, "WARNING")


SCHEMA_VERSION = 1

DEFAULT_PREC_BITS = 192
# Extra working precision on top of the requested one
GUARD_BITS = 32
DEFAULT_MAX_DEN = 10**9
RECONSTRUCTION_TOLERANCE = "1e-25"
# Residuals must stay below 2^-(prec - RESIDUAL_SLACK_BITS)
RESIDUAL_SLACK_BITS = 32
# Imaginary part allowed on values expected in Q·(2πi)^k, relative to 2^-prec
IMAGINARY_SLACK_BITS = 32

# Cutoff for the direct double sum: M ≈ N·ceil(CUTOFF_FACTOR·prec) so that the
# asymptotic tail expansion converges well below the working precision
CUTOFF_FACTOR = 0.45
MIN_CUTOFF = 64
MAX_TAIL_TERMS = 2000

# Classical dim S_k(Γ₁(N)), keyed by (N, k); N ≤ 10 at k = 2 is handled as genus 0
KNOWN_CUSP_FORM_DIMENSIONS = {
    (1, 10): 0,
    (1, 12): 1,
    (1, 16): 1,
    (11, 2): 1,
}
