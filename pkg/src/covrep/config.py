"""Runtime settings: comparison tolerance, size cap and default power depth.

Values come from the environment (``COVREP_TOL``, ``COVREP_MAX_DIM``) so that
command-line flags can override them per call without touching module state.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_TOL = 1e-10
DEFAULT_MAX_DIM = 4096
DEFAULT_K_MAX = 8


class SizeCapError(RuntimeError):
    """A tensor-power computation would exceed the configured dimension cap."""


@dataclass(frozen=True)
class Settings:
    tol: float = DEFAULT_TOL
    max_dim: int = DEFAULT_MAX_DIM
    k_max: int = DEFAULT_K_MAX


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = float(raw)
    if not value >= 0:
        raise ValueError(f"{name} must be a nonnegative number, got {raw!r}")
    return value


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = int(raw)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {raw!r}")
    return value


def get_settings() -> Settings:
    """Read settings from the environment; re-read on every call."""
    return Settings(
        tol=_env_float("COVREP_TOL", DEFAULT_TOL),
        max_dim=_env_int("COVREP_MAX_DIM", DEFAULT_MAX_DIM),
    )


def resolve_tol(tol: float | None) -> float:
    return get_settings().tol if tol is None else float(tol)


def check_size(count: int, what: str = "tensor power") -> None:
    cap = get_settings().max_dim
    if count > cap:
        raise SizeCapError(f"{what} needs dimension {count}, above the cap {cap} (COVREP_MAX_DIM)")
