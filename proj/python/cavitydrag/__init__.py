"""Relaxation of a body with a cavity in a free molecular gas."""

from ._core import (
    CavityDragError,
    __version__,
    autonomous,
    drag_f0,
    drag_f0_prime,
    equilibrium,
    fixed_point,
    friction_mc_autonomous,
    preset_config,
    preset_names,
    simulate,
)


def _strings(overrides):
    return {k: str(v) for k, v in (overrides or {}).items()}


def run(preset="", **overrides):
    """Run a scenario; keyword arguments are config keys."""
    return simulate(preset, _strings(overrides))


__all__ = [
    "CavityDragError",
    "__version__",
    "autonomous",
    "drag_f0",
    "drag_f0_prime",
    "equilibrium",
    "fixed_point",
    "friction_mc_autonomous",
    "preset_config",
    "preset_names",
    "run",
    "simulate",
]
