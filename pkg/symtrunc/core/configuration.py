"""
Configuration class for the symtrunc package.

This module contains the Configuration class, which provides a centralized way to manage
domains, test batteries, exponents, spaces, tolerances and performance settings of a
verification run.
"""

import os
import json
import logging
from copy import deepcopy
from typing import Any, Dict, List, Optional

import yaml

from symtrunc.core.validation import ConfigValidator

logger = logging.getLogger(__name__)


class Configuration:
    """
    A class for managing configuration parameters for the symtrunc package.

    It supports loading configuration from files (YAML/JSON), dictionary overrides and
    environment variable integration. The built-in configuration is named ``default``.

    Attributes
    ----------
    config : dict
        Dictionary containing all configuration parameters.
    """

    ENV_PREFIX = "SYMTRUNC_"

    # Default configuration parameters
    DEFAULT_CONFIG = {
        # Model domains and refinement levels
        "domains": {
            "shapes": ["interval", "square", "disk"],
            "resolutions": [64, 128],
            "beta_cusp": {"beta": 2.0},
            "s_john": {"s": 1.5},
        },
        # Test function battery
        "battery": {
            "kind": "general",
            "n_random": 5,
        },
        # Exponents
        "exponents": {
            "p": 2.0,
            "har": {"n": 2, "s": 1.5, "t": 1.2},
            "hardy_cases": [[2, 1.5, 1.2], [2, 2.0, 1.5], [2, 1.0, 2.0]],
        },
        # Rearrangement-invariant spaces, by label
        "spaces": {
            "theorem_a": ["L1", "L2", "Linf"],
            "theorem_b_source": "L1",
            "theorem_b_target": "L(2,inf)",
            "corollary": "L1",
        },
        # Maz'ya criterion grid
        "hardy": {
            "a_min": 1e-8,
            "ratio": 0.8,
            "divergence_factor": 10.0,
        },
        # Symmetrization and modulus of continuity
        "symmetrize": {
            "n_magnitudes": None,
            "candidates": ["median", "mean", "zero"],
            "refine": False,
        },
        # Majorization audit
        "majorize": {
            "n_pairs": 200,
            "spaces": ["L1", "L2", "L(2,1)", "Linf"],
        },
        # Pass criteria
        "tolerances": {
            "refinement_drift": 0.10,
            "har_drift": 0.15,
            "theorem_b_drift": 0.15,
            "corollary_drift": 0.15,
            "exponent_rel": 0.05,
            "radial_ratio": 0.05,
            "identity": 1e-8,
        },
        # Harness selection
        "verify": {
            "checks": [
                "poincare",
                "theorem_a",
                "gn",
                "theorem_b",
                "har",
                "hardy",
                "polya",
                "corollary",
                "majorize",
                "sharp_forms",
            ],
            "seed": 0,
            "t_points": 200,
        },
        # Performance settings
        "performance": {
            "n_workers": 1,
            "profile": True,
            "monitor_memory": False,
        },
        # Output paths
        "paths": {
            "output_dir": "results",
        },
    }

    def __init__(
        self,
        config_file: Optional[str] = None,
        config_dict: Optional[Dict[str, Any]] = None,
        use_env_vars: bool = True,
    ):
        """
        Initialize a Configuration object.

        Parameters
        ----------
        config_file : str, optional
            Path to a configuration file (YAML or JSON), or ``default``, by default None.
        config_dict : dict, optional
            Dictionary containing configuration parameters, by default None.
        use_env_vars : bool, optional
            Whether to use SYMTRUNC_ environment variables, by default True.
        """
        self.config = deepcopy(self.DEFAULT_CONFIG)

        if config_file is not None:
            self.load_from_file(config_file)

        if config_dict is not None:
            self.update(config_dict)

        if use_env_vars:
            self.load_from_env_vars()

    def load_from_file(self, config_file: str) -> "Configuration":
        """
        Load configuration from a file.

        Parameters
        ----------
        config_file : str
            Path to a configuration file (YAML or JSON). ``default`` keeps the
            built-in configuration.

        Returns
        -------
        Configuration
            The Configuration object with updated parameters.

        Raises
        ------
        ValueError
            If the file format is not supported or the file cannot be read.
        """
        if config_file == "default":
            return self
        if not os.path.exists(config_file):
            raise ValueError(f"Configuration file not found: {config_file}")

        file_ext = os.path.splitext(config_file)[1].lower()
        try:
            if file_ext == ".json":
                with open(config_file, "r") as f:
                    config_dict = json.load(f)
            elif file_ext in [".yaml", ".yml"]:
                with open(config_file, "r") as f:
                    config_dict = yaml.safe_load(f) or {}
            else:
                raise ValueError(f"Unsupported configuration file format: {file_ext}")
        except Exception as e:
            raise ValueError(f"Error loading configuration from file: {e}")

        logger.info(f"Loaded configuration from {config_file}")
        return self.update(config_dict)

    def save_to_file(self, config_file: str) -> None:
        """
        Save configuration to a file.

        Parameters
        ----------
        config_file : str
            Path to save the configuration file (YAML or JSON).

        Raises
        ------
        ValueError
            If the file format is not supported or the file cannot be written.
        """
        file_ext = os.path.splitext(config_file)[1].lower()
        try:
            os.makedirs(os.path.dirname(os.path.abspath(config_file)), exist_ok=True)
            if file_ext == ".json":
                with open(config_file, "w") as f:
                    json.dump(self.config, f, indent=2, sort_keys=True)
            elif file_ext in [".yaml", ".yml"]:
                with open(config_file, "w") as f:
                    yaml.safe_dump(self.config, f, default_flow_style=False)
            else:
                raise ValueError(f"Unsupported configuration file format: {file_ext}")
        except Exception as e:
            raise ValueError(f"Error saving configuration to file: {e}")

    @staticmethod
    def _parse_env_value(value: str) -> Any:
        try:
            return int(value)
        except ValueError:
            pass
        try:
            return float(value)
        except ValueError:
            pass
        if value.lower() in ["true", "yes"]:
            return True
        if value.lower() in ["false", "no"]:
            return False
        if value.startswith("[") or value.startswith("{"):
            try:
                return json.loads(value)
            except json.JSONDecodeError:
                pass
        return value

    def load_from_env_vars(self) -> "Configuration":
        """
        Load configuration from environment variables.

        Environment variables should be in the format:
        SYMTRUNC_SECTION_PARAMETER=value

        For example:
        SYMTRUNC_MAJORIZE_N_PAIRS=500
        SYMTRUNC_DOMAINS_RESOLUTIONS=[16,32]

        Returns
        -------
        Configuration
            The Configuration object with updated parameters.
        """
        for env_var, value in os.environ.items():
            if not env_var.startswith(self.ENV_PREFIX):
                continue
            parts = env_var[len(self.ENV_PREFIX):].lower().split("_")
            if len(parts) < 2:
                continue
            section, param = parts[0], "_".join(parts[1:])
            self.config.setdefault(section, {})[param] = self._parse_env_value(value)
            logger.debug(f"Configuration override from {env_var}")
        return self

    def update(self, config_dict: Dict[str, Any]) -> "Configuration":
        """
        Update configuration with values from a dictionary.

        Parameters
        ----------
        config_dict : dict
            Dictionary containing configuration parameters.

        Returns
        -------
        Configuration
            The Configuration object with updated parameters.
        """
        for section, params in config_dict.items():
            if isinstance(params, dict):
                if not isinstance(self.config.get(section), dict):
                    self.config[section] = {}
                for param, value in params.items():
                    self.config[section][param] = value
            else:
                self.config[section] = params
        return self

    def get(self, section: str, parameter: Optional[str] = None, default: Any = None) -> Any:
        """
        Get a configuration parameter.

        Parameters
        ----------
        section : str
            Configuration section.
        parameter : str, optional
            Configuration parameter within the section, by default None.
            If None, returns the entire section.
        default : Any, optional
            Default value to return if the parameter is not found, by default None.

        Returns
        -------
        Any
            The configuration parameter value, or the default value if not found.
        """
        if section not in self.config:
            return default
        if parameter is None:
            return self.config[section]
        return self.config[section].get(parameter, default)

    def set(self, section: str, parameter: str, value: Any) -> "Configuration":
        """Set a configuration parameter, creating the section if needed."""
        self.config.setdefault(section, {})[parameter] = value
        return self

    def validate(self) -> Dict[str, List[str]]:
        """
        Validate the configuration.

        Returns
        -------
        dict
            Mapping of issue category to messages; empty when valid.
        """
        return ConfigValidator().validate(self.config)

    def get_paths(self) -> Dict[str, str]:
        return self.get("paths", default={})

    def get_performance_params(self) -> Dict[str, Any]:
        return self.get("performance", default={})

    def __repr__(self) -> str:
        return f"Configuration(sections={list(self.config.keys())})"

    def __str__(self) -> str:
        return json.dumps(self.config, indent=2)
