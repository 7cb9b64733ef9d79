"""
Configuration settings for the moment measure solver
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="MOMENT_",
        env_file=".env",
        env_file_encoding="utf-8",
    )

    # Damped Newton
    tolerance: float = 1e-10
    max_newton_iterations: int = 100
    max_damping_bisections: int = 60

    # Linear solve of M_nu d = -grad E_nu
    linear_tolerance: float = 1e-12
    linear_max_iterations: int = 0  # 0 means 20 * N

    # Experiments
    default_n_list: List[int] = [8, 16, 32, 64, 128]
    long_running_n: int = 256
    output_dir: str = "./results"

    # Application
    log_level: str = "INFO"


# Global settings instance
settings = Settings()
