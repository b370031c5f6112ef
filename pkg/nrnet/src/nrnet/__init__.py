"""Multi-stage windowed-transformer denoiser for simulated-uplink imagery."""

from .config import (
    ConfigError,
    DataError,
    SizeError,
    TrainConfig,
    VariantConfig,
    VARIANTS,
)
from .net import NRNet, parameter_count

__all__ = [
    "ConfigError",
    "DataError",
    "SizeError",
    "TrainConfig",
    "VariantConfig",
    "VARIANTS",
    "NRNet",
    "parameter_count",
]
