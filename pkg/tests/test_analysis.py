import math

import numpy as np
import pytest

from avpsolve.analysis import (
    RK4_CONVERGENCE_ROOT,
    amplification_factor,
    bisect_stability_boundary,
    convergence_condition,
    decrement_lipschitz_bound,
    estimate_lipschitz,
    global_error_bound,
    observed_order,
    stability_condition,
    tableau_amplification,
)
from avpsolve.core import Interval, OdeSystem
from avpsolve.errors import DegenerateOrderError, InvalidArgumentError
from avpsolve.steppers import CLASSICAL_RK4, HEUN_TABLEAU, MethodKind, MethodSpec

from conftest import linear


@pytest.mark.parametrize(
    "system, box, expected",
    [
        (linear(2.0), [(-1.0, 1.0)], 2.0),
        (OdeSystem.from_rhs(1, lambda x, y: 3 * y + math.sin(x)), [(-2.0, 2.0)], 3.0),
        (OdeSystem.from_rhs(1, lambda x, y: x * x), [(-1.0, 1.0)], 0.0),
    ],
)
def test_estimate_lipschitz_hand_values(system, box, expected):
    est = estimate_lipschitz(system, Interval(0.0, 1.0), box)
    assert est.L == pytest.approx(expected, abs=1e-7)


def test_estimate_lipschitz_vector_row_sum():
    # Jacobian [[0, 1], [-2, 0.5]]: max row sum 2.5
    sys_ = OdeSystem.from_rhs(2, lambda x, v: [v[1], -2 * v[0] + 0.5 * v[1]])
    est = estimate_lipschitz(sys_, Interval(0, 1), [(-1, 1), (-1, 1)], samples_per_axis=5)
    assert est.L == pytest.approx(2.5, abs=1e-7)


def test_estimate_lipschitz_validates_box():
    with pytest.raises(InvalidArgumentError):
        estimate_lipschitz(linear(1.0), Interval(0, 1), [(1.0, 1.0)])


def test_stability_hand_values():
    # RK4: R(1) = 1 - 1 + 1/2 - 1/6 + 1/24 = 0.375 and R(3) = 1.375
    assert amplification_factor("rk4", 1.0) == pytest.approx(0.375, abs=1e-15)
    assert amplification_factor("rk4", 3.0) == pytest.approx(1.375, abs=1e-15)
    assert stability_condition("rk4", 1.0, 1.0).verdict == "STABLE"
    assert stability_condition("rk4", 1.0, 3.0).verdict == "UNSTABLE"
    assert stability_condition("explicit-euler", 0.5, 1.0).satisfied
    assert not stability_condition("explicit-euler", 2.5, 1.0).satisfied
    assert stability_condition("trapezoid-pc", 100.0, 1.0).satisfied


def test_stability_requires_positive_lambda():
    with pytest.raises(InvalidArgumentError, match="lambda > 0"):
        stability_condition("rk4", 0.1, 0.0)


def test_tableau_amplification_matches_closed_forms():
    for z in (0.1, 0.7, 2.0, 3.3):
        assert tableau_amplification(CLASSICAL_RK4, z) == pytest.approx(amplification_factor("rk4", z), rel=1e-14)
        assert tableau_amplification(HEUN_TABLEAU, z) == pytest.approx(1 - z + z * z / 2, rel=1e-14)


def test_rk4_convergence_root():
    z = RK4_CONVERGENCE_ROOT
    assert z**3 + 4 * z**2 + 12 * z + 24 == pytest.approx(0.0, abs=1e-12)
    assert z == pytest.approx(-2.7853, abs=1e-4)


def test_convergence_conditions():
    assert convergence_condition("euler-pc", 0.1, 5.0).satisfied
    assert not convergence_condition("euler-pc", 0.5, 5.0).satisfied
    assert convergence_condition("trapezoid-pc", 0.3, 5.0).satisfied
    assert not convergence_condition("trapezoid-pc", 0.5, 5.0).satisfied
    rep = convergence_condition("rk4", 0.1, 3.0)
    assert rep.satisfied and rep.rhs == RK4_CONVERGENCE_ROOT
    assert rep.details["decrement_lipschitz"] == pytest.approx(
        3 * (1 + 0.15 + 0.09 / 6 + 0.027 / 24), rel=1e-14
    )
    gen = convergence_condition(MethodSpec(MethodKind.GENERAL_RK, tableau=HEUN_TABLEAU), 0.1, 2.0)
    assert gen.satisfied and gen.lhs == pytest.approx(2 * (1 + 0.1), rel=1e-14)


def test_decrement_lipschitz_bound_rk4_closed_form():
    h, L = 0.2, 4.0
    hl = h * L
    assert decrement_lipschitz_bound(CLASSICAL_RK4, h, L) == pytest.approx(
        L * (1 + hl / 2 + hl**2 / 6 + hl**3 / 24), rel=1e-14
    )


def test_bisect_rk4_boundary():
    z = bisect_stability_boundary("rk4", 2.0, 3.0)
    assert abs(amplification_factor("rk4", z)) == pytest.approx(1.0, abs=1e-10)
    assert z == pytest.approx(2.7853, abs=1e-4)
    with pytest.raises(InvalidArgumentError):
        bisect_stability_boundary("rk4", 0.1, 0.5)


def test_global_error_bound_hand_value():
    # (1 * 0.1^4 / 1)(e - 1) with e0 = 0
    assert global_error_bound(0.0, 1.0, 1.0, 0.1, 4, 1.0) == pytest.approx(1.718281828e-4, rel=1e-9)
    with pytest.raises(InvalidArgumentError):
        global_error_bound(0.0, 0.0, 1.0, 0.1, 4, 1.0)


def test_observed_order_degenerate():
    # Euler is exact on y' = 1
    sys_ = OdeSystem.from_rhs(1, lambda x, y: [1.0])
    with pytest.raises(DegenerateOrderError):
        observed_order(sys_, lambda x: [x], (1.0, [1.0], 0.0), MethodSpec.from_name("explicit-euler"), 0.25)


def test_observed_order_linear_rk4():
    p = observed_order(linear(-1.0), lambda x: [math.exp(-(x - 1))], (1.0, [1.0], 0.0), MethodSpec.from_name("rk4"), 0.1)
    assert 3.8 < p < 4.2
