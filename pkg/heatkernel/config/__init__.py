"""
Configuration: process settings and run-configuration files
"""
from .settings import settings, Settings, get_output_dir

__all__ = ["settings", "Settings", "get_output_dir"]
