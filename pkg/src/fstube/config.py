"""Numerical tolerances shared by every module.

All thresholds live here so that tests and the CLI can override them in one
place.  Values are the defaults the library is validated against.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # fs-core
    unit_norm: float = 1e-12
    horizontal: float = 1e-12
    point_equality: float = 1e-9
    # submanifold
    on_variety: float = 1e-8
    sample_residual: float = 1e-10
    smooth_gradient: float = 1e-8
    complex_frame: float = 1e-8
    fd_step: float = 1e-4
    max_resample: int = 50
    # jacobi-riccati
    riccati_switch: float = 1e3
    multiplicity: float = 1e-6
    # tube-volume
    distance_residual: float = 1e-8
    distance_starts: int = 8
    distance_max_iter: int = 80
    mc_failure_rate: float = 1e-3

    def with_overrides(self, **kwargs) -> "Tolerances":
        unknown = set(kwargs) - set(self.__dataclass_fields__)
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **kwargs)


DEFAULT = Tolerances()
