"""Arbitrary value problems: split at the condition point, solve each side, merge."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    AvpProblem,
    Direction,
    Interval,
    ProblemClass,
    Trajectory,
    classify_problem,
    make_uniform_grid,
    ALIGN_RTOL,
)
from .errors import GridMisalignmentError, InvalidArgumentError, NumericOverflowError
from .steppers import MethodSpec, integrate_leg


@dataclass(frozen=True)
class AvpSolution:
    """Solution over ``[a, c]`` in increasing-x order.

    ``legs`` keeps the raw leg trajectories in their own direction (backward
    leg first); ``leg_boundary_index`` points at the shared condition sample.
    """

    trajectory: Trajectory
    leg_boundary_index: int
    problem_class: ProblemClass
    legs: tuple[Trajectory, ...]


def _check_alignment(problem: AvpProblem, h: float) -> None:
    """Every break point must sit on the grid of the leg that contains it."""
    xb = problem.condition.x_b
    a, c = problem.interval.lo, problem.interval.hi
    for brk in problem.system.break_points:
        if not a < brk < c or brk == xb:
            continue
        lo, hi = (a, xb) if brk < xb else (xb, c)
        h_act, count = make_uniform_grid(Interval(lo, hi), h)
        pos = (brk - lo) / h_act
        if abs(pos - round(pos)) * h_act > ALIGN_RTOL * max(1.0, abs(brk), hi - lo):
            raise GridMisalignmentError(
                f"segment break point {brk} is not a grid point of the leg [{lo}, {hi}] (h={h_act:g})",
                break_point=brk,
            )


def _leg(problem: AvpProblem, to_x: float, method: MethodSpec, h: float, tag: str) -> Trajectory:
    cond = problem.condition
    try:
        return integrate_leg(problem.system, cond.x_b, cond.y_b, to_x, method, h)
    except NumericOverflowError as exc:
        raise exc.annotate(leg=tag) from exc


def solve_avp(problem: AvpProblem, method: MethodSpec, h: float) -> AvpSolution:
    """Solve with the value known at ``x_b``.

    Final: one backward leg.  Initial: one forward leg.  Inner interval: a
    backward leg on ``[a, b]`` and a forward leg on ``[b, c]``, both seeded
    with ``y_b``, each on its own snapped grid.
    """
    if not h > 0:
        raise InvalidArgumentError(f"h must be positive, got {h}")
    _check_alignment(problem, h)
    cls = classify_problem(problem)
    a, c = problem.interval.lo, problem.interval.hi

    if cls is ProblemClass.FINAL:
        back = _leg(problem, a, method, h, "backward")
        return AvpSolution(back.reversed(), len(back) - 1, cls, (back,))
    if cls is ProblemClass.INITIAL:
        fwd = _leg(problem, c, method, h, "forward")
        return AvpSolution(fwd, 0, cls, (fwd,))

    back = _leg(problem, a, method, h, "backward")
    fwd = _leg(problem, c, method, h, "forward")
    rev = back.reversed()
    xs = np.concatenate([rev.xs, fwd.xs[1:]])
    ys = np.concatenate([rev.ys, fwd.ys[1:]])
    step = back.step if back.step == fwd.step else None
    m = len(back)
    unconverged = tuple(rev.unconverged) + tuple(m - 1 + i for i in fwd.unconverged)
    merged = Trajectory(xs, ys, method.name, step, Direction.FORWARD, unconverged)
    return AvpSolution(merged, m - 1, cls, (back, fwd))


def solve_piecewise_avp(problem: AvpProblem, method: MethodSpec, h: float) -> AvpSolution:
    """Inner-interval solve of a two-piece system whose junction is the condition point.

    Each leg only ever sees its own piece; the junction value seeds both.
    """
    segs = problem.system.segments
    xb = problem.condition.x_b
    if len(segs) != 2:
        raise InvalidArgumentError(f"expected a two-segment system, got {len(segs)} segment(s)")
    if classify_problem(problem) is not ProblemClass.INNER_INTERVAL:
        raise InvalidArgumentError("piecewise solve needs the condition strictly inside the interval")
    brk = problem.system.break_points[0]
    if abs(brk - xb) > ALIGN_RTOL * max(1.0, abs(xb)):
        raise GridMisalignmentError(f"segment break {brk} does not coincide with the condition point {xb}", brk)
    return solve_avp(problem, method, h)
