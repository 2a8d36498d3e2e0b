"""Default tolerances.

``TWISTED_ORLICZ_TOL`` overrides the root/quadrature tolerance for the
whole process; every CLI report echoes the active values.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass

from .errors import ParamError


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ParamError(f"{name}={raw!r} is not a number") from None
    if not 0 < value < 1:
        raise ParamError(f"{name} must lie in (0, 1), got {value}")
    return value


@dataclass(frozen=True)
class Tolerances:
    root: float = 1e-10
    quad: float = 1e-10
    limit_rtol: float = 0.01
    limit_points: tuple[float, ...] = (1e2, 1e3, 1e4)
    zero_points: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    grid_slack: float = 1e-12
    margin_factor: float = 3.0

    def as_dict(self) -> dict:
        return asdict(self)


def default_tolerances() -> Tolerances:
    tol = _env_float("TWISTED_ORLICZ_TOL", 1e-10)
    return Tolerances(root=tol, quad=tol)


try:
    TOL = default_tolerances()
except ParamError:
    # a malformed override is reported when the CLI reads it; library users get the defaults
    TOL = Tolerances()
