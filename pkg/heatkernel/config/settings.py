"""
Configuration settings for the heat-kernel pricing engine
"""
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings with environment variable support (prefix HEATKERNEL_)"""

    model_config = SettingsConfigDict(
        env_prefix="HEATKERNEL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Output
    output_dir: str = Field("./output", description="Default directory for CSV/SVG/JSON output")

    # Parallelism
    workers: int = Field(1, ge=1)
    block_size: int = Field(4096, ge=1, description="Paths per random-stream block")

    # Time guards (relative to the horizon U)
    time_guard: float = Field(1e-6, gt=0)
    euler_guard: float = Field(1e-4, gt=0)

    # Numerical integration
    quad_epsabs: float = Field(1e-10, gt=0)
    quad_epsrel: float = Field(1e-8, gt=0)
    fourier_cutoff: float = Field(1e-14, gt=0)
    gauss_nodes: int = Field(64, ge=8)

    # Stable-1/2 bridge table
    stable_table_points: int = Field(2048, ge=64)
    stable_tail_mass: float = Field(1e-6, gt=0)

    # Monte-Carlo acceptance band, in standard errors
    mc_sigmas: float = Field(3.0, gt=0)

    # Chart settings
    chart_width: int = Field(960)
    chart_height: int = Field(540)
    chart_dpi: int = Field(100)

    # Logging
    log_level: str = Field("INFO")
    log_format: str = Field("%(asctime)s - %(name)s - %(levelname)s - %(message)s")


# Initialize settings
settings = Settings()


def get_output_dir(override: str = None) -> Path:
    """Get the output directory, creating it if needed"""
    path = Path(override or settings.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path
