"""Configuration package: process settings, logging and run files"""

from .logs import configure_logging
from .run_config import RunConfig, load_run_config, parse_overrides, resolve_run_config, write_manifest
from .settings import Settings, get_settings

__all__ = [
    "RunConfig",
    "Settings",
    "configure_logging",
    "get_settings",
    "load_run_config",
    "parse_overrides",
    "resolve_run_config",
    "write_manifest",
]
