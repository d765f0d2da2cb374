"""Nonlocal multiclass traffic flow simulator."""

try:
    from ._nltr import (
        convolve,
        kernel_values,
        normalization_constant,
        preset_config,
        preset_names,
        run_config,
        run_preset,
    )
except ImportError:  # running against an in-tree build of the extension
    from _nltr import (
        convolve,
        kernel_values,
        normalization_constant,
        preset_config,
        preset_names,
        run_config,
        run_preset,
    )

__all__ = [
    "convolve",
    "kernel_values",
    "normalization_constant",
    "preset_config",
    "preset_names",
    "run_config",
    "run_preset",
]
