"""Numeric defaults and the JSON input models shared by every command.

Defaults come from the environment when set (``SIDEINFO_*`` variables),
otherwise from the constants below. A ``--config`` JSON file is validated into
:class:`Settings`; CLI flags are applied on top by the caller.

Channel and graph inputs are accepted either as a path to a JSON file or as an
inline JSON string (``{"P":10.0,"N":[1.0,2.0,4.0]}``).
"""

import json
import os
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator


def _env_int(name: str, default: int) -> int:
    """Read a positive int from the environment, falling back on bad/missing values."""
    try:
        return max(1, int(os.environ[name]))
    except (KeyError, TypeError, ValueError):
        return default


def _env_float(name: str, default: float) -> float:
    """Read a positive float from the environment, falling back on bad/missing values."""
    try:
        value = float(os.environ[name])
    except (KeyError, TypeError, ValueError):
        return default
    return value if value > 0 else default


PARAM_GRID = _env_int("SIDEINFO_PARAM_GRID", 512)          # Grid points per power-split dimension.
REFINE_STEPS = _env_int("SIDEINFO_REFINE_STEPS", 20)       # Cell halvings around the best grid point.
MEMBER_TOL = _env_float("SIDEINFO_MEMBER_TOL", 1e-9)       # Constraint slack accepted by membership.
BOUNDARY_TOL = _env_float("SIDEINFO_BOUNDARY_TOL", 1e-6)   # Rate resolution of boundary bisection.
SLICE_GRID = _env_int("SIDEINFO_SLICE_GRID", 200)
CONTAIN_SAMPLES = _env_int("SIDEINFO_CONTAIN_SAMPLES", 1000)
WORKERS = _env_int("SIDEINFO_WORKERS", min(8, os.cpu_count() or 1))
MAX_CANDIDATE_BITS = _env_int("SIDEINFO_MAX_CANDIDATE_BITS", 20)  # Exhaustive ML search guard.
MAX_CODEBOOK_BITS = _env_int("SIDEINFO_MAX_CODEBOOK_BITS", 16)    # Materialized codebook size guard.
DEFAULT_SEED = 7


class Settings(BaseModel):
    """Grid, tolerance and resource knobs; every field is overridable by a CLI flag."""
    param_grid: int = Field(PARAM_GRID, ge=2)
    refine_steps: int = Field(REFINE_STEPS, ge=0)
    member_tol: float = Field(MEMBER_TOL, ge=0)
    boundary_tol: float = Field(BOUNDARY_TOL, gt=0)
    slice_grid: int = Field(SLICE_GRID, ge=2)
    contain_samples: int = Field(CONTAIN_SAMPLES, ge=1)
    workers: int = Field(WORKERS, ge=1)
    max_candidate_bits: int = Field(MAX_CANDIDATE_BITS, ge=1)
    max_codebook_bits: int = Field(MAX_CODEBOOK_BITS, ge=1)
    seed: int = DEFAULT_SEED

    def with_overrides(self, **overrides) -> "Settings":
        """Copy with the non-None overrides applied (flags win over file values)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return self.model_validate({**self.model_dump(), **changes})


class ChannelModel(BaseModel):
    """Channel JSON: transmit power and per-receiver noise variances."""
    P: float = Field(ge=0)
    N: List[float] = Field(min_length=2)

    @field_validator("N")
    @classmethod
    def _positive_noise(cls, v: "list[float]") -> "list[float]":
        if any(n <= 0 for n in v):
            raise ValueError("noise variances must be positive")
        return v


class GraphModel(BaseModel):
    """Graph JSON: ``arcs`` are ``[knower, owner of the known message]`` pairs."""
    Q: int = Field(ge=2)
    arcs: List[List[int]] = []

    @field_validator("arcs")
    @classmethod
    def _pairs(cls, v: "list[list[int]]") -> "list[list[int]]":
        for arc in v:
            if len(arc) != 2:
                raise ValueError(f"arc {arc} is not a [knower, owner] pair")
        return v


def _read_json_arg(value: str) -> str:
    """Return the JSON text of an inline-or-file argument."""
    stripped = value.strip()
    if stripped.startswith("{") or stripped.startswith("["):
        return stripped
    with open(value, "r", encoding="utf-8") as f:
        return f.read()


def load_channel(value: str) -> ChannelModel:
    return ChannelModel.model_validate_json(_read_json_arg(value))


def load_graph(value: str) -> GraphModel:
    return GraphModel.model_validate_json(_read_json_arg(value))


def load_settings(path: Optional[str]) -> Settings:
    """Settings from a JSON file, or the environment/defaults when no file is given."""
    if not path:
        return Settings()
    with open(path, "r", encoding="utf-8") as f:
        return Settings.model_validate(json.load(f))
