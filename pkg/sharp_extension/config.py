"""Configuration management for Sharp Extension."""

from typing import List, Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Application
    app_name: str = "Sharp Extension"
    app_version: str = "0.1.0"
    debug: bool = Field(default=False, validation_alias="SHARP_DEBUG")

    # Output
    output_dir: str = Field(default="./runs", validation_alias="SHARP_OUTPUT_DIR")
    show_progress: bool = Field(default=False, validation_alias="SHARP_SHOW_PROGRESS")

    # Parallel evaluation
    threads: int = Field(default=1, ge=1, validation_alias="SHARP_THREADS")
    block_elements: int = Field(default=1 << 20, ge=1024, validation_alias="SHARP_BLOCK_ELEMENTS")

    # Arcs
    default_arc_samples: int = Field(default=1025, ge=65, validation_alias="SHARP_ARC_SAMPLES")
    resolution_threshold: float = Field(default=0.5, gt=0.0, validation_alias="SHARP_RESOLUTION_THRESHOLD")

    # Plane quadrature for the L6 norm
    l6_radii: List[float] = Field(default=[16.0, 24.0, 32.0], validation_alias="SHARP_L6_RADII")
    l6_panel_width: float = Field(default=1.0, gt=0.0, validation_alias="SHARP_L6_PANEL_WIDTH")
    l6_panel_nodes: int = Field(default=8, ge=2, validation_alias="SHARP_L6_PANEL_NODES")
    l6_angle_nodes: int = Field(default=256, ge=8, validation_alias="SHARP_L6_ANGLE_NODES")

    # Triple autoconvolution density
    newton_max_iter: int = Field(default=50, ge=1, validation_alias="SHARP_NEWTON_MAX_ITER")
    theta_nodes: int = Field(default=64, ge=8, validation_alias="SHARP_THETA_NODES")

    # Extremizer search
    damping_floor: float = Field(default=1.0 / 64.0, gt=0.0, validation_alias="SHARP_DAMPING_FLOOR")
    stall_window: int = Field(default=5, ge=1, validation_alias="SHARP_STALL_WINDOW")
    envelope_factor: float = Field(default=1.5, gt=1.0, validation_alias="SHARP_ENVELOPE_FACTOR")

    # Logging
    log_level: str = Field(default="INFO", validation_alias="SHARP_LOG_LEVEL")
    log_file: Optional[str] = Field(default=None, validation_alias="SHARP_LOG_FILE")
    log_format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        validation_alias="SHARP_LOG_FORMAT"
    )

    @property
    def is_parallel(self) -> bool:
        """Check if plane evaluations may use more than one worker."""
        return self.threads > 1


# Global settings instance
settings = Settings()
