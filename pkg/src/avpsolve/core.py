"""Problem and solution data model.

Everything here is immutable after construction.  A right-hand side is any
callable ``rhs(x, y)`` taking a float and a float64 vector of length ``n`` and
returning something convertible to a float64 vector of length ``n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import GridMisalignmentError, InvalidArgumentError, InvalidStepError

Rhs = Callable[[float, NDArray[np.float64]], ArrayLike]
Vector = NDArray[np.float64]

# relative slack used when matching grid points against segment break points
ALIGN_RTOL = 1e-9


def as_state(y: ArrayLike, dimension: int | None = None) -> Vector:
    arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if arr.ndim != 1:
        raise InvalidArgumentError(f"state must be a vector, got shape {arr.shape}")
    if dimension is not None and arr.shape[0] != dimension:
        raise InvalidArgumentError(f"state has length {arr.shape[0]}, expected {dimension}")
    return arr


def _align_tol(*xs: float) -> float:
    return ALIGN_RTOL * max([1.0] + [abs(x) for x in xs])


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidArgumentError(f"interval endpoints must be finite: [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise InvalidArgumentError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def shifted(self, delta: float) -> "Interval":
        return Interval(self.lo + delta, self.hi + delta)


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class ProblemClass(enum.Enum):
    INITIAL = "initial"
    FINAL = "final"
    INNER_INTERVAL = "inner-interval"


@dataclass(frozen=True)
class Segment:
    """One piece of a piecewise right-hand side; ``interval=None`` means unbounded."""

    interval: Interval | None
    rhs: Rhs


@dataclass(frozen=True)
class OdeSystem:
    """Right-hand side ``f(x, y)`` of an ``n``-dimensional first-order system.

    ``segments`` are stored in the coordinates of the original right-hand side.
    ``x_offset`` shifts the independent variable: the system evaluates
    ``rhs(x + x_offset, y)``, which is how fixed delays are represented.
    """

    dimension: int
    segments: tuple[Segment, ...]
    x_offset: float = 0.0

    def __post_init__(self) -> None:
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InvalidArgumentError(f"dimension must be a positive integer, got {self.dimension}")
        segs = tuple(self.segments)
        if not segs:
            raise InvalidArgumentError("an OdeSystem needs at least one segment")
        if len(segs) > 1:
            for seg in segs:
                if seg.interval is None:
                    raise InvalidArgumentError("piecewise segments must all carry an interval")
            for left, right in zip(segs, segs[1:]):
                if left.interval.hi != right.interval.lo:
                    raise InvalidArgumentError(
                        f"segments must be contiguous: {left.interval.hi} != {right.interval.lo}"
                    )
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "x_offset", float(self.x_offset))

    @classmethod
    def from_rhs(cls, dimension: int, rhs: Rhs, interval: Interval | None = None) -> "OdeSystem":
        return cls(dimension, (Segment(interval, rhs),))

    @classmethod
    def piecewise(cls, dimension: int, pieces: Sequence[tuple[Interval | tuple[float, float], Rhs]]) -> "OdeSystem":
        segs = []
        for iv, rhs in pieces:
            if not isinstance(iv, Interval):
                iv = Interval(*iv)
            segs.append(Segment(iv, rhs))
        return cls(dimension, tuple(segs))

    @property
    def is_piecewise(self) -> bool:
        return len(self.segments) > 1

    @property
    def break_points(self) -> list[float]:
        """Interior junctions, in the system's (shifted) coordinates."""
        return [seg.interval.hi - self.x_offset for seg in self.segments[:-1]]

    def domain(self) -> Interval | None:
        first, last = self.segments[0].interval, self.segments[-1].interval
        if first is None:
            return None
        return Interval(first.lo - self.x_offset, last.hi - self.x_offset)

    def covers(self, interval: Interval) -> bool:
        dom = self.domain()
        if dom is None:
            return True
        tol = _align_tol(interval.lo, interval.hi)
        return dom.lo <= interval.lo + tol and interval.hi - tol <= dom.hi

    def with_offset(self, offset: float) -> "OdeSystem":
        return replace(self, x_offset=offset)

    def _wrap(self, rhs: Rhs) -> Callable[[float, Vector], Vector]:
        n = self.dimension
        offset = self.x_offset

        if offset == 0.0:
            def evaluate(x: float, y: Vector) -> Vector:
                return np.asarray(rhs(x, y), dtype=np.float64).reshape(n)
        else:
            def evaluate(x: float, y: Vector) -> Vector:
                return np.asarray(rhs(x + offset, y), dtype=np.float64).reshape(n)

        return evaluate

    def field(self, lo: float, hi: float) -> Callable[[float, Vector], Vector]:
        """Return the right-hand side active on the step ``[lo, hi]``.

        For piecewise systems the step must sit inside one segment; the
        segment's own rhs is used even at its endpoints (one-sided evaluation).
        """
        if len(self.segments) == 1:
            return self._wrap(self.segments[0].rhs)
        u_lo, u_hi = lo + self.x_offset, hi + self.x_offset
        tol = _align_tol(u_lo, u_hi)
        for seg in self.segments:
            if seg.interval.lo - tol <= u_lo and u_hi <= seg.interval.hi + tol:
                return self._wrap(seg.rhs)
        for seg in self.segments[:-1]:
            brk = seg.interval.hi
            if u_lo < brk < u_hi:
                raise GridMisalignmentError(
                    f"step [{lo}, {hi}] straddles the segment break point {brk - self.x_offset}",
                    break_point=brk - self.x_offset,
                )
        raise InvalidArgumentError(f"step [{lo}, {hi}] lies outside the system's segments")

    def __call__(self, x: float, y: ArrayLike) -> Vector:
        """Evaluate at a single point; at a junction the left segment wins."""
        y = as_state(y, self.dimension)
        return self.field(x, x)(x, y)


@dataclass(frozen=True)
class BoundaryCondition:
    x_b: float
    y_b: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_b", float(self.x_b))
        y = as_state(self.y_b).copy()
        if not np.all(np.isfinite(y)):
            raise InvalidArgumentError("boundary value must be finite")
        y.flags.writeable = False
        object.__setattr__(self, "y_b", y)


@dataclass(frozen=True)
class AvpProblem:
    """First-order system on ``[a, c]`` with ``y(b)`` known for some ``b`` in ``[a, c]``."""

    system: OdeSystem
    interval: Interval
    condition: BoundaryCondition

    def __post_init__(self) -> None:
        if not self.interval.contains(self.condition.x_b):
            raise InvalidArgumentError(
                f"condition point {self.condition.x_b} outside [{self.interval.lo}, {self.interval.hi}]"
            )
        if self.condition.y_b.shape[0] != self.system.dimension:
            raise InvalidArgumentError(
                f"condition has {self.condition.y_b.shape[0]} components, system has {self.system.dimension}"
            )
        if not self.system.covers(self.interval):
            raise InvalidArgumentError("system segments do not cover the problem interval")


def classify_problem(problem: AvpProblem) -> ProblemClass:
    xb = problem.condition.x_b
    if xb == problem.interval.lo:
        return ProblemClass.INITIAL
    if xb == problem.interval.hi:
        return ProblemClass.FINAL
    return ProblemClass.INNER_INTERVAL


def make_uniform_grid(interval: Interval, h_requested: float) -> tuple[float, int]:
    """Snap ``h_requested`` so that a whole number of steps spans ``interval``."""
    length = interval.length
    if not (h_requested > 0) or not math.isfinite(h_requested):
        raise InvalidStepError(f"step must be positive, got {h_requested}")
    if h_requested > length:
        raise InvalidStepError(f"step {h_requested} exceeds interval length {length}")
    count = max(1, round(length / h_requested))
    return length / count, count


def grid_points(from_x: float, to_x: float, count: int) -> Vector:
    """``count + 1`` equispaced points from ``from_x`` to ``to_x``, both hit exactly."""
    k = np.arange(count + 1, dtype=np.float64)
    xs = from_x + (to_x - from_x) * k / count
    xs[0] = from_x
    xs[-1] = to_x
    return xs


@dataclass(frozen=True)
class Trajectory:
    """Discrete solution: ``xs[i]`` paired with the state row ``ys[i]``.

    ``step`` is ``None`` for merged multi-leg trajectories whose legs were
    snapped to different step sizes.  ``unconverged`` lists sample indices
    whose predictor-corrector iteration stopped on the iteration cap.
    """

    xs: Vector
    ys: NDArray[np.float64]
    method_name: str
    step: float | None
    direction: Direction
    unconverged: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        xs = np.array(self.xs, dtype=np.float64)
        ys = np.array(self.ys, dtype=np.float64)
        if ys.ndim == 1:
            ys = ys.reshape(-1, 1)
        if xs.ndim != 1 or xs.shape[0] < 1 or ys.shape[0] != xs.shape[0]:
            raise InvalidArgumentError(f"trajectory shape mismatch: xs {xs.shape}, ys {ys.shape}")
        diffs = np.diff(xs)
        if self.direction is Direction.FORWARD and np.any(diffs <= 0):
            raise InvalidArgumentError("forward trajectory xs must be strictly increasing")
        if self.direction is Direction.BACKWARD and np.any(diffs >= 0):
            raise InvalidArgumentError("backward trajectory xs must be strictly decreasing")
        if self.step is not None and diffs.size:
            # ulps measured at the magnitude of the largest coordinate on the leg
            slack = 4 * np.spacing(max(float(np.max(np.abs(xs))), self.step))
            if np.any(np.abs(np.abs(diffs) - self.step) > slack):
                raise InvalidArgumentError("trajectory spacing deviates from its step")
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "unconverged", tuple(self.unconverged))

    def __len__(self) -> int:
        return self.xs.shape[0]

    @property
    def dimension(self) -> int:
        return self.ys.shape[1]

    def component(self, i: int) -> Vector:
        return self.ys[:, i]

    def reversed(self) -> "Trajectory":
        other = Direction.FORWARD if self.direction is Direction.BACKWARD else Direction.BACKWARD
        m = len(self)
        return Trajectory(
            self.xs[::-1], self.ys[::-1], self.method_name, self.step, other,
            tuple(sorted(m - 1 - i for i in self.unconverged)),
        )
