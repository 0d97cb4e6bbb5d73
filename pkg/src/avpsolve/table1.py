"""The dy/dx = y - 2x/y experiment solved forward from y(0) = 1 and backward from y(1) = sqrt(3).

``PUBLISHED_*`` hold the published six-decimal values, ordered as printed
(forward block from x=0, backward block from x=1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import OdeSystem, Trajectory
from .errors import InvalidArgumentError
from .steppers import MethodSpec, integrate_leg

STEP = 0.1
SQRT3 = 1.7320508075688772

PUBLISHED_FORWARD = (
    (0.0, 1.000000, 0.000000),
    (0.1, 1.095446, 0.000000),
    (0.2, 1.183217, 0.000001),
    (0.3, 1.264912, 0.000001),
    (0.4, 1.341642, 0.000002),
    (0.5, 1.414216, 0.000002),
    (0.6, 1.483242, 0.000003),
    (0.7, 1.549196, 0.000003),
    (0.8, 1.612455, 0.000004),
    (0.9, 1.673325, 0.000005),
    (1.0, 1.732056, 0.000006),
)
PUBLISHED_BACKWARD = (
    (1.0, 1.732051, 0.000000),
    (0.9, 1.673320, 0.000000),
    (0.8, 1.612451, 0.000000),
    (0.7, 1.549193, 0.000000),
    (0.6, 1.483239, 0.000000),
    (0.5, 1.414213, 0.000001),
    (0.4, 1.341640, 0.000001),
    (0.3, 1.264910, 0.000001),
    (0.2, 1.183215, 0.000001),
    (0.1, 1.095444, 0.000001),
    (0.0, 0.999999, 0.000001),
)

VALUE_TOL = 2e-6
ERROR_TOL = 1e-5


def rhs(x, y):
    return y - 2 * x / y


def exact(x: float) -> float:
    return math.sqrt(1 + 2 * x)


def system() -> OdeSystem:
    return OdeSystem.from_rhs(1, rhs)


def forward_leg(h: float = STEP) -> Trajectory:
    return integrate_leg(system(), 0.0, 1.0, 1.0, MethodSpec.from_name("rk4"), h)


def backward_leg(h: float = STEP) -> Trajectory:
    return integrate_leg(system(), 1.0, SQRT3, 0.0, MethodSpec.from_name("rk4"), h)


@dataclass(frozen=True)
class Row:
    x: float
    y: float
    error: float
    published_y: float

    @property
    def ok(self) -> bool:
        return abs(self.y - self.published_y) <= VALUE_TOL and self.error <= ERROR_TOL


def compare(traj: Trajectory, published) -> list[Row]:
    rows = []
    for x, y, (px, py, _) in zip(traj.xs, traj.ys[:, 0], published):
        if abs(x - px) > 1e-12:
            raise InvalidArgumentError(f"grid point {x} does not line up with published row x={px}")
        rows.append(Row(float(x), float(y), abs(float(y) - exact(float(x))), py))
    return rows


def reproduce() -> tuple[list[Row], list[Row]]:
    return compare(forward_leg(), PUBLISHED_FORWARD), compare(backward_leg(), PUBLISHED_BACKWARD)
