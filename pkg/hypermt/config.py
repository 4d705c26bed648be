import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv


def load_env(path: Optional[str] = None) -> bool:
    """Load environment overrides from a .env file"""
    if path is not None:
        if not os.path.exists(path):
            raise FileNotFoundError(f"Environment file not found at {path}")
        return load_dotenv(path, override=True)
    default_path = os.path.join(os.getcwd(), ".env")
    if os.path.exists(default_path):
        return load_dotenv(default_path)
    return False


def _float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


def build_numerics_config() -> Dict[str, Any]:
    return {
        "tol_quad": _float("HYPERMT_TOL_QUAD", 1e-12),
        "tol_quad_extended": _float("HYPERMT_TOL_QUAD_EXTENDED", 1e-20),
        "tol_root": _float("HYPERMT_TOL_ROOT", 1e-12),
        "quad_limit": _int("HYPERMT_QUAD_LIMIT", 200),
        "extended_dps": _int("HYPERMT_EXTENDED_DPS", 30),
        "log_space_threshold": _float("HYPERMT_LOG_SPACE_THRESHOLD", 30.0),
        "fd_step": _float("HYPERMT_FD_STEP", 1e-6),
    }


def build_sweep_config() -> Dict[str, Any]:
    return {
        "lemma_grid": {
            "t_min": _float("HYPERMT_LEMMA_T_MIN", 1e-6),
            "t_max": _float("HYPERMT_LEMMA_T_MAX", 20.0),
            "points": _int("HYPERMT_LEMMA_POINTS", 10000),
            "spacing": os.getenv("HYPERMT_LEMMA_SPACING", "log"),
        },
        "extended_from_t": _float("HYPERMT_EXTENDED_FROM_T", 10.0),
        "comparison_count": _int("HYPERMT_COMPARISON_COUNT", 100),
        "seed": _int("HYPERMT_SEED", 7),
        "max_workers": _int("HYPERMT_MAX_WORKERS", min(8, os.cpu_count() or 1)),
        "comparison_tolerance": _float("HYPERMT_COMPARISON_TOL", 1e-8),
    }


NUMERICS_CONFIG = build_numerics_config()

SWEEP_CONFIG = build_sweep_config()

# Random profile corpus used by the property sweeps
PROPERTY_PATTERNS = {
    "knots": {"min": 2, "max": 50},
    "support": {"min": 1e-3, "max": 1e3, "spacing": "log"},
    "max_value": {"min": 0.0, "max": 10.0},
}

SEQUENCE_PATTERNS = {
    "psi_k": {
        "k_values": [2, 5, 20, 100],
        "limit_k_values": [100, 1000, 10000, 100000, 1000000],
    },
    "moser": {
        "k_values": [5, 10, 20, 40],
        "k_range": (5, 40),
        "divergence_threshold": 1e12,
        # alpha > alpha_n: ratio must grow by growth_factor over growth_span in k
        "growth_span": 20.0,
        "growth_factor": 10.0,
    },
    # Bounds for the bounded-over-k checks on k in [5, 40]
    "caps": {
        "c_k_offset": 5.0,
        "k_times_ln_norm": 10.0,
        "bounded_spread": 20.0,
    },
}

OUTPUT_CONFIG = {
    "directory": os.getenv("HYPERMT_OUTPUT_DIR", "reports"),
    "format": os.getenv("HYPERMT_OUTPUT_FORMAT", "json"),
    "float_format": "%.17g",
}


def reload() -> None:
    """Re-read every env-backed dict after load_env()"""
    NUMERICS_CONFIG.update(build_numerics_config())
    SWEEP_CONFIG.update(build_sweep_config())
    OUTPUT_CONFIG["directory"] = os.getenv("HYPERMT_OUTPUT_DIR", "reports")
    OUTPUT_CONFIG["format"] = os.getenv("HYPERMT_OUTPUT_FORMAT", "json")
