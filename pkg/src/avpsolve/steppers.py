"""One-step methods for final value problems and their forward mirrors.

Backward schemes march from ``x_next`` to ``x_next - h`` as
``y_n = y_{n+1} - h * phi(x_{n+1}, y_{n+1}, h)``.  Every forward scheme is the
same formula with the signed step ``-h``, so both directions share one kernel
that takes a signed step ``s`` (``s = h`` backward, ``s = -h`` forward).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .core import (
    Direction,
    Interval,
    OdeSystem,
    Trajectory,
    Vector,
    as_state,
    grid_points,
    make_uniform_grid,
)
from .errors import (
    InvalidArgumentError,
    InvalidStepError,
    NumericOverflowError,
    UnsupportedMethodError,
)

Coefficient = Union[Fraction, int, float]


def _coef(value) -> Coefficient:
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, bool):
        raise InvalidArgumentError("tableau entries must be numbers")
    if isinstance(value, Rational):
        return Fraction(value)
    return float(value)


@dataclass(frozen=True)
class RkTableau:
    """Explicit Runge-Kutta tableau in decrement form.

    ``weights`` are c_1..c_r, ``offsets`` are alpha_2..alpha_r and
    ``coefficients[i-2]`` holds beta_{i,1}..beta_{i,i-1} for stage i.
    Stage i is evaluated at ``x - alpha_i * h`` with state
    ``y - h * sum_j beta_ij K_j``.

    Rational entries (``Fraction``, ``int`` or strings like ``"1/6"``) are
    combined over a common denominator, so the classical tableau reproduces
    the hand-written fourth-order step bit for bit.
    """

    weights: tuple[Coefficient, ...]
    offsets: tuple[Coefficient, ...] = ()
    coefficients: tuple[tuple[Coefficient, ...], ...] = ()
    name: str = "custom"

    def __post_init__(self) -> None:
        weights = tuple(_coef(c) for c in self.weights)
        offsets = tuple(_coef(a) for a in self.offsets)
        rows = tuple(tuple(_coef(b) for b in row) for row in self.coefficients)
        r = len(weights)
        if r < 1:
            raise InvalidArgumentError("a tableau needs at least one stage")
        if len(offsets) != r - 1 or len(rows) != r - 1:
            raise InvalidArgumentError(f"{r}-stage tableau needs {r - 1} offsets and {r - 1} coefficient rows")
        for i, row in enumerate(rows, start=2):
            if len(row) != i - 1:
                raise InvalidArgumentError(f"stage {i} needs {i - 1} coefficients, got {len(row)}")
        if not math.isclose(float(sum(weights)), 1.0, rel_tol=0, abs_tol=1e-12):
            raise InvalidArgumentError(f"weights must sum to 1, got {float(sum(weights))}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "coefficients", rows)

    @property
    def stages(self) -> int:
        return len(self.weights)


CLASSICAL_RK4 = RkTableau(
    weights=("1/6", "1/3", "1/3", "1/6"),
    offsets=("1/2", "1/2", 1),
    coefficients=(("1/2",), (0, "1/2"), (0, 0, 1)),
    name="classical-rk4",
)
EULER_TABLEAU = RkTableau(weights=(1,), name="euler")
HEUN_TABLEAU = RkTableau(weights=("1/2", "1/2"), offsets=(1,), coefficients=((1,),), name="heun")
MIDPOINT_TABLEAU = RkTableau(weights=(0, 1), offsets=("1/2",), coefficients=(("1/2",),), name="midpoint")


class MethodKind(enum.Enum):
    EXPLICIT_EULER = "explicit-euler"
    EULER_PC = "euler-pc"
    TRAPEZOID_PC = "trapezoid-pc"
    CLASSICAL_RK4 = "rk4"
    GENERAL_RK = "general-rk"

    @property
    def is_predictor_corrector(self) -> bool:
        return self in (MethodKind.EULER_PC, MethodKind.TRAPEZOID_PC)


@dataclass(frozen=True)
class MethodSpec:
    kind: MethodKind
    corrector_tol: float = 1e-12
    corrector_max_iters: int = 50
    tableau: RkTableau | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, MethodKind):
            object.__setattr__(self, "kind", MethodKind(self.kind))
        if (self.kind is MethodKind.GENERAL_RK) != (self.tableau is not None):
            raise InvalidArgumentError("a tableau is required for general-rk and only for it")
        if not self.corrector_tol > 0:
            raise InvalidArgumentError("corrector_tol must be positive")
        if self.corrector_max_iters < 1:
            raise InvalidArgumentError("corrector_max_iters must be at least 1")

    @classmethod
    def from_name(cls, name: str, **kwargs) -> "MethodSpec":
        return cls(MethodKind(name), **kwargs)

    @property
    def name(self) -> str:
        if self.kind is MethodKind.GENERAL_RK:
            return f"general-rk:{self.tableau.name}"
        return self.kind.value


@dataclass(frozen=True)
class StepRecord:
    """Outcome of one predictor-corrector step.

    ``deltas`` are the max-norm changes between successive corrector iterates;
    ``converged`` is False when the iteration cap was hit first.
    """

    y_out: Vector
    corrector_iterations_used: int
    converged: bool = True
    deltas: tuple[float, ...] = field(default=())


def _check_h(h: float) -> float:
    h = float(h)
    if not h > 0 or not math.isfinite(h):
        raise InvalidStepError(f"step must be positive and finite, got {h}")
    return h


def _finite(v: Vector, what: str) -> Vector:
    if not np.all(np.isfinite(v)):
        raise NumericOverflowError(f"non-finite {what}")
    return v


def _field(system: OdeSystem, x: float, s: float):
    x_to = x - s
    return system.field(min(x, x_to), max(x, x_to))


def _scaled_sum(s: float, coefs: Sequence[Coefficient], ks: Sequence[Vector], n: int) -> Vector:
    """``s * sum(c_j * K_j)``, over a common denominator when all c_j are rational."""
    if all(isinstance(c, Fraction) for c in coefs):
        den = math.lcm(*(c.denominator for c in coefs)) if coefs else 1
        acc = None
        for c, k in zip(coefs, ks):
            num = c.numerator * (den // c.denominator)
            if num == 0:
                continue
            term = k if num == 1 else float(num) * k
            acc = term if acc is None else acc + term
        if acc is None:
            return np.zeros(n)
        return s / den * acc
    acc = np.zeros(n)
    for c, k in zip(coefs, ks):
        acc = acc + float(c) * k
    return s * acc


def _offset_x(x: float, alpha: Coefficient, s: float) -> float:
    if isinstance(alpha, Fraction):
        return x - s * alpha.numerator / alpha.denominator
    return x - alpha * s


# ---- signed-step kernels -------------------------------------------------


def _euler(x: float, y: Vector, s: float, system: OdeSystem) -> Vector:
    f = _field(system, x, s)
    return _finite(y - s * _finite(f(x, y), "slope"), "state")


def _rk4(x: float, y: Vector, s: float, system: OdeSystem) -> Vector:
    f = _field(system, x, s)
    k1 = _finite(f(x, y), "stage K1")
    k2 = _finite(f(x - s / 2, y - s / 2 * k1), "stage K2")
    k3 = _finite(f(x - s / 2, y - s / 2 * k2), "stage K3")
    k4 = _finite(f(x - s, y - s * k3), "stage K4")
    return _finite(y - s / 6 * (k1 + 2 * k2 + 2 * k3 + k4), "state")


def _rk_stages(x: float, y: Vector, s: float, system: OdeSystem, tableau: RkTableau) -> list[Vector]:
    f = _field(system, x, s)
    n = y.shape[0]
    ks = [_finite(f(x, y), "stage K1")]
    for i, (alpha, row) in enumerate(zip(tableau.offsets, tableau.coefficients), start=2):
        ks.append(_finite(f(_offset_x(x, alpha, s), y - _scaled_sum(s, row, ks, n)), f"stage K{i}"))
    return ks


def _general_rk(x: float, y: Vector, s: float, system: OdeSystem, tableau: RkTableau) -> Vector:
    ks = _rk_stages(x, y, s, system, tableau)
    return _finite(y - _scaled_sum(s, tableau.weights, ks, y.shape[0]), "state")


def _corrector_loop(y_pred: Vector, update: Callable[[Vector], Vector], tol: float, max_iters: int) -> StepRecord:
    current = _finite(y_pred, "predictor")
    deltas = []
    for it in range(1, max_iters + 1):
        nxt = _finite(update(current), f"corrector iterate {it}")
        delta = float(np.max(np.abs(nxt - current)))
        deltas.append(delta)
        current = nxt
        if delta < tol:
            return StepRecord(current, it, True, tuple(deltas))
    return StepRecord(current, max_iters, False, tuple(deltas))


def _euler_pc(x, y, s, system, tol, max_iters) -> StepRecord:
    f = _field(system, x, s)
    x_to = x - s
    pred = y - s * _finite(f(x, y), "slope")
    return _corrector_loop(pred, lambda cur: y - s * f(x_to, cur), tol, max_iters)


def _trapezoid_pc(x, y, s, system, tol, max_iters) -> StepRecord:
    f = _field(system, x, s)
    x_to = x - s
    fy = _finite(f(x, y), "slope")
    pred = y - s * fy
    return _corrector_loop(pred, lambda cur: y - s / 2 * (f(x_to, cur) + fy), tol, max_iters)


# ---- backward schemes ------------------------------------------------------


def step_explicit_euler_backward(x_next: float, y_next: ArrayLike, h: float, system: OdeSystem) -> Vector:
    return _euler(float(x_next), as_state(y_next, system.dimension), _check_h(h), system)


def step_euler_pc_backward(
    x_next: float, y_next: ArrayLike, h: float, system: OdeSystem, tol: float = 1e-12, max_iters: int = 50
) -> StepRecord:
    """Explicit Euler predictor, implicit Euler corrector iterated to ``tol``."""
    return _euler_pc(float(x_next), as_state(y_next, system.dimension), _check_h(h), system, tol, max_iters)


def step_trapezoid_pc_backward(
    x_next: float, y_next: ArrayLike, h: float, system: OdeSystem, tol: float = 1e-12, max_iters: int = 50
) -> StepRecord:
    """Explicit Euler predictor, trapezoid corrector iterated to ``tol``."""
    return _trapezoid_pc(float(x_next), as_state(y_next, system.dimension), _check_h(h), system, tol, max_iters)


def step_rk4_backward(x_next: float, y_next: ArrayLike, h: float, system: OdeSystem) -> Vector:
    """Classical fourth-order step from ``x_next`` to ``x_next - h``.

    Vector states use each component's own stage slope in the stage arguments.
    """
    return _rk4(float(x_next), as_state(y_next, system.dimension), _check_h(h), system)


def step_general_rk_backward(
    x_next: float, y_next: ArrayLike, h: float, system: OdeSystem, tableau: RkTableau
) -> Vector:
    return _general_rk(float(x_next), as_state(y_next, system.dimension), _check_h(h), system, tableau)


# ---- forward mirrors ------------------------------------------------------


def step_explicit_euler_forward(x_prev: float, y_prev: ArrayLike, h: float, system: OdeSystem) -> Vector:
    return _euler(float(x_prev), as_state(y_prev, system.dimension), -_check_h(h), system)


def step_euler_pc_forward(x_prev, y_prev, h, system, tol=1e-12, max_iters=50) -> StepRecord:
    return _euler_pc(float(x_prev), as_state(y_prev, system.dimension), -_check_h(h), system, tol, max_iters)


def step_trapezoid_pc_forward(x_prev, y_prev, h, system, tol=1e-12, max_iters=50) -> StepRecord:
    return _trapezoid_pc(float(x_prev), as_state(y_prev, system.dimension), -_check_h(h), system, tol, max_iters)


def step_rk4_forward(x_prev: float, y_prev: ArrayLike, h: float, system: OdeSystem) -> Vector:
    return _rk4(float(x_prev), as_state(y_prev, system.dimension), -_check_h(h), system)


def step_general_rk_forward(x_prev, y_prev, h, system, tableau: RkTableau) -> Vector:
    return _general_rk(float(x_prev), as_state(y_prev, system.dimension), -_check_h(h), system, tableau)


# ---- decrement function and leg driver -------------------------------------


def decrement_function(method: MethodSpec, x: float, y: ArrayLike, h: float, system: OdeSystem) -> Vector:
    """phi(x, y, h) with ``step_backward(x, y, h) == y - h * phi`` up to rounding."""
    y = as_state(y, system.dimension)
    h = _check_h(h)
    kind = method.kind
    if kind.is_predictor_corrector:
        raise UnsupportedMethodError(f"{method.name} is implicit in y_n and has no explicit decrement function")
    if kind is MethodKind.EXPLICIT_EULER:
        return _finite(_field(system, x, h)(x, y), "slope")
    tableau = CLASSICAL_RK4 if kind is MethodKind.CLASSICAL_RK4 else method.tableau
    ks = _rk_stages(float(x), y, h, system, tableau)
    return _scaled_sum(1.0, tableau.weights, ks, y.shape[0])


def take_step(method: MethodSpec, x: float, y: Vector, s: float, system: OdeSystem) -> tuple[Vector, StepRecord | None]:
    """Advance one signed step ``s`` (positive = backward). Returns the state and PC record."""
    kind = method.kind
    if kind is MethodKind.EXPLICIT_EULER:
        return _euler(x, y, s, system), None
    if kind is MethodKind.CLASSICAL_RK4:
        return _rk4(x, y, s, system), None
    if kind is MethodKind.GENERAL_RK:
        return _general_rk(x, y, s, system, method.tableau), None
    runner = _euler_pc if kind is MethodKind.EULER_PC else _trapezoid_pc
    rec = runner(x, y, s, system, method.corrector_tol, method.corrector_max_iters)
    return rec.y_out, rec


def integrate_leg(
    system: OdeSystem,
    from_x: float,
    from_y: ArrayLike,
    to_x: float,
    method: MethodSpec,
    h: float,
) -> Trajectory:
    """March ``method`` from ``(from_x, from_y)`` to ``to_x`` on a snapped uniform grid.

    The leg is backward when ``to_x < from_x``; stored xs then decrease.
    """
    from_x, to_x = float(from_x), float(to_x)
    if from_x == to_x:
        raise InvalidArgumentError("a leg needs distinct endpoints")
    y = as_state(from_y, system.dimension).copy()
    backward = to_x < from_x
    h_act, count = make_uniform_grid(Interval(min(from_x, to_x), max(from_x, to_x)), h)
    s = h_act if backward else -h_act
    xs = grid_points(from_x, to_x, count)
    ys = np.empty((count + 1, system.dimension))
    ys[0] = y
    unconverged = []
    for k in range(count):
        try:
            # non-finite values are caught and reported by the kernels themselves
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                y, rec = take_step(method, float(xs[k]), y, s, system)
        except NumericOverflowError as exc:
            raise exc.annotate(index=k + 1) from exc
        if rec is not None and not rec.converged:
            unconverged.append(k + 1)
        ys[k + 1] = y
    return Trajectory(
        xs, ys, method.name, h_act,
        Direction.BACKWARD if backward else Direction.FORWARD,
        tuple(unconverged),
    )
