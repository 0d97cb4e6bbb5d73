"""Reduction of scalar high-order equations to first-order systems, and fixed delays."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .core import Interval, OdeSystem, Trajectory, Vector, as_state
from .errors import InvalidArgumentError
from .steppers import MethodSpec, integrate_leg

Coefficient = Union[float, Callable[[float, Vector], float]]


@dataclass(frozen=True)
class HighOrderPolyOde:
    """``leading * y^(n) + sum_i p_i(x, state) * y^(i) = forcing(x)``.

    The state vector is ``(y, y', ..., y^(n-1))``.  ``coefficients[i]`` is
    ``p_i`` and may be a constant or a callable ``(x, state) -> float``.
    """

    order: int
    coefficients: tuple[Coefficient, ...]
    forcing: Callable[[float], float] | float = 0.0
    leading: float = 1.0

    def __post_init__(self) -> None:
        if int(self.order) != self.order or self.order < 1:
            raise InvalidArgumentError(f"order must be a positive integer, got {self.order}")
        coefs = tuple(self.coefficients)
        if len(coefs) != self.order:
            raise InvalidArgumentError(f"order {self.order} needs {self.order} coefficients, got {len(coefs)}")
        if self.leading == 0 or not math.isfinite(self.leading):
            raise InvalidArgumentError("leading coefficient must be finite and nonzero")
        object.__setattr__(self, "coefficients", coefs)


@dataclass(frozen=True)
class DelaySpec:
    T: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.T):
            raise InvalidArgumentError("delay must be finite")


def _call(c: Coefficient, x: float, state: Vector) -> float:
    return c(x, state) if callable(c) else c


def _split(a: float) -> tuple[float, float]:
    t = 134217729.0 * a  # 2**27 + 1
    hi = t - (t - a)
    return hi, a - hi


def _two_product(a: float, b: float) -> tuple[float, float]:
    """``a * b == hi + lo`` exactly (barring overflow)."""
    p = a * b
    if not math.isfinite(p):
        return p, 0.0
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def reduce_to_first_order(high: HighOrderPolyOde) -> OdeSystem:
    """Companion-form system ``x_i' = x_{i+1}``, ``x_n' = (f - sum p_i x_{i+1}) / leading``.

    The last component is evaluated with error-free products and ``fsum`` so it
    sits within one ulp of the exact quotient, whatever the cancellation.
    """
    if high.leading == 0:
        raise InvalidArgumentError("leading coefficient must be nonzero")
    n = high.order
    coefs = high.coefficients
    forcing = high.forcing
    leading = float(high.leading)

    def rhs(x: float, state: Vector) -> Vector:
        out = np.empty(n)
        out[:-1] = state[1:]
        parts = [float(forcing(x) if callable(forcing) else forcing)]
        for i in range(n):
            hi, lo = _two_product(float(_call(coefs[i], x, state)), float(state[i]))
            parts += (-hi, -lo)
        q = math.fsum(parts) / leading
        # one residual correction brings q within an ulp of the exact quotient
        qh, ql = _two_product(q, leading)
        out[-1] = q + math.fsum(parts + [-qh, -ql]) / leading
        return out

    return OdeSystem.from_rhs(n, rhs)


def solve_high_order_fvp(
    high: HighOrderPolyOde,
    final_values: ArrayLike,
    interval: Interval,
    method: MethodSpec,
    h: float,
) -> Trajectory:
    """Seed ``(y, y', ...)`` at ``interval.hi`` and integrate the reduced system backward."""
    state = as_state(final_values)
    if state.shape[0] != high.order:
        raise InvalidArgumentError(f"need {high.order} final values, got {state.shape[0]}")
    system = reduce_to_first_order(high)
    return integrate_leg(system, interval.hi, state, interval.lo, method, h)


def shift_delay(system: OdeSystem, delay: DelaySpec | float) -> OdeSystem:
    """System evaluating the original right-hand side at ``(x + T, y)``.

    Shifts accumulate on the underlying right-hand side, so shifting by T1 then
    T2 is the same system as shifting once by T1 + T2.
    """
    T = delay.T if isinstance(delay, DelaySpec) else DelaySpec(float(delay)).T
    return system.with_offset(system.x_offset + T)


def example1_system() -> OdeSystem:
    """The three-state system printed for the worked conversion example."""

    def rhs(x: float, s: Vector) -> Vector:
        x1, x2, x3 = s
        return np.array([x2, x3, (-3 * x3 - 2 * x2 - 1) / 4])

    return OdeSystem.from_rhs(3, rhs)


def example1_equation() -> HighOrderPolyOde:
    """Third-order equation ``4 y''' + 3 y'' + 2 y' = -1`` whose reduction is :func:`example1_system`."""
    return HighOrderPolyOde(order=3, coefficients=(0.0, 2.0, 3.0), forcing=-1.0, leading=4.0)
