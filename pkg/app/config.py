from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _to_bool(value: str | None, default: bool = False) -> bool:
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "y", "on"}


@dataclass(frozen=True)
class Settings:
    # Runtime configuration (environment variables, optionally from .env).
    log_level: str = os.getenv("LOG_LEVEL", "INFO")

    # Eigensolver.
    eig_tol: float = float(os.getenv("RDSPREAD_EIG_TOL", "1e-10"))
    eig_max_sweeps: int = int(os.getenv("RDSPREAD_EIG_MAX_SWEEPS", "100"))
    eig_method: str = os.getenv("RDSPREAD_EIG_METHOD", "jacobi")
    group_tol: float = float(os.getenv("RDSPREAD_GROUP_TOL", "1e-8"))

    # Bound checks; --tol overrides the three tolerances below for one run.
    bound_tol: float = float(os.getenv("RDSPREAD_BOUND_TOL", "1e-8"))
    equality_tol: float = float(os.getenv("RDSPREAD_EQUALITY_TOL", "1e-8"))
    oracle_tol: float = float(os.getenv("RDSPREAD_ORACLE_TOL", "1e-8"))
    regular_tol: float = float(os.getenv("RDSPREAD_REGULAR_TOL", "1e-9"))
    clique_limit: int = int(os.getenv("RDSPREAD_CLIQUE_LIMIT", "64"))

    # Graph generation.
    connect_attempts: int = int(os.getenv("RDSPREAD_CONNECT_ATTEMPTS", "1000"))

    # Output and sweeps.
    output_digits: int = int(os.getenv("RDSPREAD_OUTPUT_DIGITS", "12"))
    sweep_workers: int = int(os.getenv("RDSPREAD_SWEEP_WORKERS", "1"))
    include_diagnostics: bool = _to_bool(os.getenv("RDSPREAD_DIAGNOSTICS"), default=True)


settings = Settings()
