"""Process settings and environment configuration"""

from functools import lru_cache
from typing import Literal, Optional

import numpy as np
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings read from ENK_* environment variables or .env"""

    model_config = SettingsConfigDict(env_prefix="ENK_", env_file=".env", case_sensitive=False, extra="ignore")

    # Runtime
    threads: int = Field(default=0, ge=0, description="Worker cap; 0 = single-threaded deterministic")
    dtype: Literal["float64", "float32"] = Field(default="float64")
    epoch_cap: int = Field(default=500, ge=1)

    # Output
    output_dir: str = Field(default="./runs")

    # Logging
    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None)

    @property
    def numpy_dtype(self) -> np.dtype:
        return np.dtype(self.dtype)


@lru_cache()
def get_settings() -> Settings:
    return Settings()
