"""Python access to the axial perturbation laboratory."""

import json

from . import _core
from ._core import (
    Background,
    ConfigError,
    NotAsymptoticallyFlat,
    angular_eigenvalue,
    config_hash,
    lower_constant,
    normalize_kerr,
    parse_config,
    raise_constant,
    redshift_constant,
    run_study,
)


def identity_suite():
    return json.loads(_core.identity_suite_json())


def verify_report(config_text=""):
    return json.loads(_core.verify_report_json(config_text))


__all__ = [
    "Background",
    "ConfigError",
    "NotAsymptoticallyFlat",
    "angular_eigenvalue",
    "config_hash",
    "identity_suite",
    "lower_constant",
    "normalize_kerr",
    "parse_config",
    "raise_constant",
    "redshift_constant",
    "run_study",
    "verify_report",
]
