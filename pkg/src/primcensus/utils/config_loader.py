"""
Centralized YAML Configuration Loader
=====================================

All tunables for primcensus live in a single YAML file (config/Config.yml)
and are accessed through the ConfigLoader class.

Usage:
    from primcensus.utils.config_loader import ConfigLoader

    census_config = ConfigLoader.get_census_config()
    full_config = ConfigLoader.load_config()
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .. import env_config

logger = logging.getLogger(__name__)


class ConfigLoader:
    """
    Centralized configuration loader with caching.

    Loads configuration from config/Config.yml (or the file named by
    PRIMCENSUS_CONFIG) and provides one accessor per config section.
    The config is cached after first load; use clear_cache() to force reload.
    """

    _config_cache: Optional[Dict[str, Any]] = None
    _config_path: Optional[Path] = None

    @classmethod
    def _get_config_path(cls) -> Path:
        """Get the path to the config file."""
        if cls._config_path is None:
            if env_config.PRIMCENSUS_CONFIG:
                cls._config_path = Path(env_config.PRIMCENSUS_CONFIG)
            else:
                # src/primcensus/utils/ -> src/primcensus/config/Config.yml
                cls._config_path = Path(__file__).resolve().parent.parent / 'config' / 'Config.yml'
        return cls._config_path

    @classmethod
    def load_config(cls) -> Dict[str, Any]:
        """
        Load the unified YAML configuration with caching.

        Raises:
            FileNotFoundError: If config file doesn't exist.
            ValueError: If config file is invalid YAML.
        """
        if cls._config_cache is None:
            config_path = cls._get_config_path()

            if not config_path.exists():
                raise FileNotFoundError(
                    f"Configuration file not found: {config_path}\n"
                    "Expected location: src/primcensus/config/Config.yml"
                )

            try:
                with open(config_path, 'r', encoding='utf-8') as f:
                    cls._config_cache = yaml.safe_load(f) or {}
                logger.debug(f"Loaded configuration from: {config_path}")
            except yaml.YAMLError as e:
                raise ValueError(f"Invalid YAML in config file: {e}") from e

        return cls._config_cache

    @classmethod
    def get_numerics_config(cls) -> Dict[str, Any]:
        """
        Returns:
            Dict with keys: psi_tolerance, complete_sum_tolerance, numeric_psi_ceiling,
                           default_epsilon, li_epsabs, li_limit
        """
        return cls.load_config().get('numerics_config', {})

    @classmethod
    def get_density_config(cls) -> Dict[str, Any]:
        """Dict with key truncation_P."""
        return cls.load_config().get('density_config', {})

    @classmethod
    def get_census_config(cls) -> Dict[str, Any]:
        """
        Returns:
            Dict with keys: segment_size, workers, trial_division_limit, q_advisory_power
        """
        return cls.load_config().get('census_config', {})

    @classmethod
    def get_probe_config(cls) -> Dict[str, Any]:
        return cls.load_config().get('probe_config', {})

    @classmethod
    def get_output_config(cls) -> Dict[str, Any]:
        return cls.load_config().get('output_config', {})

    @classmethod
    def get_verify_config(cls) -> Dict[str, Any]:
        """Per-suite limits for the verify command."""
        return cls.load_config().get('verify_config', {})

    @classmethod
    def get_logging_config(cls) -> Dict[str, Any]:
        return cls.load_config().get('logging_config', {})

    @classmethod
    def clear_cache(cls) -> None:
        """
        Clear the cached configuration.

        Call this if you need to reload the config file after changes.
        """
        cls._config_cache = None
        logger.debug("Configuration cache cleared")

    @classmethod
    def set_config_path(cls, path: Path) -> None:
        """
        Override the default config path (useful for testing with alternative files).
        """
        cls._config_path = Path(path)
        cls.clear_cache()
        logger.info(f"Config path set to: {path}")


def config_value(section: str, key: str, default: Any) -> Any:
    """
    Read one setting, falling back to ``default`` if the file or key is missing.

    Engines call this lazily so they stay importable without a config file.
    """
    try:
        value = ConfigLoader.load_config().get(section, {}).get(key)
    except Exception as e:
        logger.warning(f"Failed to load {section}.{key}: {e}. Using default {default}")
        return default
    return default if value is None else value
