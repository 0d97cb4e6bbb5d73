import math

import numpy as np
import pytest

from avpsolve.avp import solve_avp, solve_piecewise_avp
from avpsolve.core import AvpProblem, BoundaryCondition, Interval, OdeSystem, ProblemClass
from avpsolve.errors import GridMisalignmentError, InvalidArgumentError, NumericOverflowError
from avpsolve.steppers import MethodSpec

RK4 = MethodSpec.from_name("rk4")


def tent(break_at=0.5):
    return OdeSystem.piecewise(1, [((0, break_at), lambda x, y: [1.0]), ((break_at, 1), lambda x, y: [-1.0])])


def test_final_problem_orders_output_increasing(table1_system, table1_exact):
    p = AvpProblem(table1_system, Interval(0, 1), BoundaryCondition(1.0, [math.sqrt(3)]))
    sol = solve_avp(p, RK4, 0.1)
    assert sol.problem_class is ProblemClass.FINAL
    assert sol.trajectory.xs[0] == 0.0 and sol.leg_boundary_index == 10
    assert abs(sol.trajectory.ys[0, 0] - 1.0) < 2e-6


def test_initial_problem(table1_system):
    p = AvpProblem(table1_system, Interval(0, 1), BoundaryCondition(0.0, [1.0]))
    sol = solve_avp(p, RK4, 0.1)
    assert sol.problem_class is ProblemClass.INITIAL and sol.leg_boundary_index == 0
    assert abs(sol.trajectory.ys[-1, 0] - math.sqrt(3)) < 7e-6


def test_inner_interval_merge(table1_system):
    p = AvpProblem(table1_system, Interval(0, 1), BoundaryCondition(0.5, [math.sqrt(2)]))
    sol = solve_avp(p, RK4, 0.1)
    traj = sol.trajectory
    assert len(traj) == 11 and len(sol.legs) == 2
    assert traj.xs[sol.leg_boundary_index] == 0.5
    assert traj.ys[sol.leg_boundary_index, 0] == math.sqrt(2)
    assert abs(traj.ys[0, 0] - 1) < 1e-5 and abs(traj.ys[-1, 0] - math.sqrt(3)) < 1e-5


def test_unequal_legs_give_no_common_step(table1_system):
    p = AvpProblem(table1_system, Interval(0, 1), BoundaryCondition(0.25, [math.sqrt(1.5)]))
    sol = solve_avp(p, RK4, 0.1)
    # 0.25 / 0.1 = 2.5 -> 2 steps, 0.75 / 0.1 = 7.5 -> 8 steps (round half to even)
    assert sol.legs[0].step == 0.125 and sol.legs[1].step == 0.09375
    assert sol.trajectory.step is None


def test_piecewise_tent():
    p = AvpProblem(tent(), Interval(0, 1), BoundaryCondition(0.5, [0.0]))
    sol = solve_piecewise_avp(p, RK4, 0.1)
    ys = sol.trajectory.ys[:, 0]
    assert ys[0] == pytest.approx(-0.5, abs=1e-14) and ys[-1] == pytest.approx(-0.5, abs=1e-14)
    assert np.allclose(ys, -np.abs(sol.trajectory.xs - 0.5), atol=1e-14)


def test_piecewise_needs_break_at_condition():
    p = AvpProblem(tent(0.4), Interval(0, 1), BoundaryCondition(0.5, [0.0]))
    with pytest.raises(GridMisalignmentError):
        solve_piecewise_avp(p, RK4, 0.1)


def test_off_grid_break_named():
    p = AvpProblem(tent(0.45), Interval(0, 1), BoundaryCondition(1.0, [0.0]))
    with pytest.raises(GridMisalignmentError) as info:
        solve_avp(p, RK4, 0.1)
    assert info.value.break_point == 0.45 and "0.45" in str(info.value)


def test_on_grid_break_final_problem():
    p = AvpProblem(tent(0.5), Interval(0, 1), BoundaryCondition(1.0, [-0.5]))
    ys = solve_avp(p, RK4, 0.1).trajectory.ys[:, 0]
    assert ys[0] == pytest.approx(-0.5, abs=1e-14)


def test_leg_tag_on_overflow():
    sys_ = OdeSystem.from_rhs(1, lambda x, y: y * y)
    p = AvpProblem(sys_, Interval(0, 1), BoundaryCondition(0.5, [1e200]))
    with np.errstate(over="ignore"), pytest.raises(NumericOverflowError) as info:
        solve_avp(p, MethodSpec.from_name("explicit-euler"), 0.1)
    assert info.value.leg == "backward"


def test_bad_h():
    p = AvpProblem(tent(), Interval(0, 1), BoundaryCondition(1.0, [0.0]))
    with pytest.raises(InvalidArgumentError):
        solve_avp(p, RK4, -0.1)
