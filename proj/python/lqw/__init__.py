"""Lackadaisical quantum-walk search on a periodic grid with HN4 long-range edges."""

from ._lqw import (
    ENGINE_VERSION,
    PRNG,
    NoPeakError,
    ResourceError,
    Walk,
    cli,
    compose,
    decompose,
    detect_first_peak,
    first_peak,
    fit,
    grid_neighbor,
    is_exceptional,
    long_range_neighbor,
    random_targets,
    run,
    scaling,
    sweep,
)

__version__ = ENGINE_VERSION

__all__ = [
    "ENGINE_VERSION",
    "PRNG",
    "NoPeakError",
    "ResourceError",
    "Walk",
    "cli",
    "compose",
    "decompose",
    "detect_first_peak",
    "first_peak",
    "fit",
    "grid_neighbor",
    "is_exceptional",
    "long_range_neighbor",
    "random_targets",
    "run",
    "scaling",
    "sweep",
]
