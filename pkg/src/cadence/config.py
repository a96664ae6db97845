# src/cadence/config.py
from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, computed_field

load_dotenv()

# Column widths of one FWindow slot besides the payload
VSYNC_BYTES = 8
DURATION_BYTES = 8
BITVECTOR_BYTES = 1


def find_project_root(start: Path | str = ".") -> Path:
    """Walk up to locate a project root (pyproject.toml or .git)."""
    p = Path(start).resolve()
    for parent in [p, *p.parents]:
        for marker in ("pyproject.toml", ".git"):
            if (parent / marker).exists():
                return parent
    return p


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


class CadenceConfig(BaseModel):
    """Centralized configuration for the planner, runtime and bench CLI."""

    # Planner settings
    dimension_cap_ms: int = Field(default=2**32, description="Abort locality tracing past this FWindow dimension")
    dimension_floor_ms: int = Field(default=0, description="Minimum sink dimension seeded before tracing (0 = off)")
    memory_budget_bytes: Optional[int] = Field(default=None, description="Reject plans whose footprint exceeds this")
    payload_bytes: int = Field(default=4, description="Width of one scalar payload cell")

    # Runtime settings
    segment_gap_ms: int = Field(default=1000, description="Gaps up to this length stay inside one availability segment")
    check_invariants: bool = Field(default=False, description="Validate every FWindow after every kernel")

    # Bench settings
    trials: int = Field(default=10, description="Repetitions per benchmark")
    window_ms: int = Field(default=60_000, description="Window size for normalize, fills and the end-to-end pipeline")
    seed: int = Field(default=42, description="Default generator seed")
    log_level: str = Field(default="INFO", description="Log level for the CLI")

    # Project settings
    project_root: Path = Field(default_factory=lambda: find_project_root())
    output_dir: Optional[Path] = Field(default=None, description="Where bench and gen write files")

    model_config = {"arbitrary_types_allowed": True}

    def model_post_init(self, __context: Any) -> None:
        """Load configuration from environment after initialization."""
        self.dimension_cap_ms = int(os.getenv("CADENCE_DIMENSION_CAP", str(self.dimension_cap_ms)))
        self.dimension_floor_ms = int(os.getenv("CADENCE_DIMENSION_FLOOR", str(self.dimension_floor_ms)))
        budget = os.getenv("CADENCE_MEMORY_BUDGET")
        if budget:
            self.memory_budget_bytes = int(budget)

        self.segment_gap_ms = int(os.getenv("CADENCE_SEGMENT_GAP_MS", str(self.segment_gap_ms)))
        self.check_invariants = _env_bool("CADENCE_CHECK_INVARIANTS", self.check_invariants)

        self.trials = int(os.getenv("CADENCE_TRIALS", str(self.trials)))
        self.window_ms = int(os.getenv("CADENCE_WINDOW_MS", str(self.window_ms)))
        self.seed = int(os.getenv("CADENCE_SEED", str(self.seed)))
        self.log_level = os.getenv("CADENCE_LOG_LEVEL", self.log_level).upper()

        out_dir = os.getenv("CADENCE_OUT_DIR")
        if out_dir:
            self.output_dir = Path(out_dir)

    @computed_field
    @property
    def slot_bytes(self) -> int:
        """Bytes of one scalar FWindow slot across all four columns."""
        return self.payload_bytes + VSYNC_BYTES + DURATION_BYTES + BITVECTOR_BYTES

    @computed_field
    @property
    def resolved_output_dir(self) -> Path:
        return self.output_dir or self.project_root / "out"

    def validate_setup(self) -> list[str]:
        """Validate configuration and return list of issues."""
        issues = []

        if self.dimension_cap_ms <= 0:
            issues.append(f"Invalid dimension cap: {self.dimension_cap_ms}")
        if self.dimension_floor_ms < 0:
            issues.append(f"Invalid dimension floor: {self.dimension_floor_ms}")
        if self.memory_budget_bytes is not None and self.memory_budget_bytes <= 0:
            issues.append(f"Invalid memory budget: {self.memory_budget_bytes}")
        if self.payload_bytes != 4:
            issues.append(f"Unsupported payload width: {self.payload_bytes} bytes (payload columns are float32)")
        if self.segment_gap_ms < 0:
            issues.append(f"Invalid segment gap tolerance: {self.segment_gap_ms}")
        if self.trials <= 0:
            issues.append(f"Invalid trial count: {self.trials}")
        if self.window_ms <= 0:
            issues.append(f"Invalid window size: {self.window_ms}")

        return issues


# Global configuration instance
_config: Optional[CadenceConfig] = None


def get_config() -> CadenceConfig:
    """Get global configuration instance."""
    global _config
    if _config is None:
        _config = CadenceConfig()
    return _config


def set_config(config: CadenceConfig) -> None:
    """Set global configuration instance."""
    global _config
    _config = config


def reset_config() -> None:
    """Reset global configuration for testing."""
    global _config
    _config = None
