"""Convergence and stability predicates, Lipschitz estimation, error bounds,
and an empirical order-of-accuracy harness."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .core import Interval, OdeSystem, as_state
from .errors import DegenerateOrderError, InvalidArgumentError, NumericOverflowError
from .steppers import CLASSICAL_RK4, MethodKind, MethodSpec, RkTableau, integrate_leg

MethodLike = Union[MethodKind, MethodSpec, str]


def _rk4_phi_lipschitz_root() -> float:
    # real root of 1 + z/2 + z^2/6 + z^3/24, i.e. of z^3 + 4 z^2 + 12 z + 24
    roots = np.roots([1.0, 4.0, 12.0, 24.0])
    return float(min(roots, key=lambda r: abs(r.imag)).real)


# hL must exceed this for the fourth-order decrement-function Lipschitz factor to stay positive
RK4_CONVERGENCE_ROOT = _rk4_phi_lipschitz_root()


@dataclass(frozen=True)
class LipschitzEstimate:
    L: float
    sample_count: int
    x_range: Interval
    y_box: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class AnalysisReport:
    """An evaluated inequality ``lhs <relation> rhs``."""

    what: str
    satisfied: bool
    lhs: float
    rhs: float
    relation: str
    inequality_text: str
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.what == "stability":
            return "STABLE" if self.satisfied else "UNSTABLE"
        return "CONVERGENT" if self.satisfied else "NOT CONVERGENT"

    def as_dict(self) -> dict:
        return {
            "what": self.what,
            "satisfied": self.satisfied,
            "verdict": self.verdict,
            "lhs": self.lhs,
            "relation": self.relation,
            "rhs": self.rhs,
            "inequality": self.inequality_text,
            "details": dict(self.details),
        }


def _resolve(method: MethodLike, tableau: RkTableau | None) -> tuple[MethodKind, RkTableau | None]:
    if isinstance(method, MethodSpec):
        return method.kind, method.tableau
    kind = method if isinstance(method, MethodKind) else MethodKind(method)
    if kind is MethodKind.GENERAL_RK and tableau is None:
        raise InvalidArgumentError("general-rk analysis needs a tableau")
    return kind, tableau


def estimate_lipschitz(
    system: OdeSystem,
    x_range: Interval,
    y_box: Sequence[tuple[float, float]],
    samples_per_axis: int = 11,
) -> LipschitzEstimate:
    """Estimate the Lipschitz constant of ``f`` in ``y`` (max-norm) over a box.

    Two estimators run on a uniform lattice: difference quotients between all
    lattice pairs sharing an x, and central-difference Jacobians whose max
    absolute row sum bounds the local slope.  The larger one is returned.
    """
    n = system.dimension
    box = tuple((float(lo), float(hi)) for lo, hi in y_box)
    if len(box) != n:
        raise InvalidArgumentError(f"y_box has {len(box)} ranges, system dimension is {n}")
    if any(not lo < hi for lo, hi in box):
        raise InvalidArgumentError("every y range must be nondegenerate")
    if samples_per_axis < 2:
        raise InvalidArgumentError("samples_per_axis must be at least 2")

    xs = np.linspace(x_range.lo, x_range.hi, samples_per_axis)
    axes = [np.linspace(lo, hi, samples_per_axis) for lo, hi in box]
    lattice = np.array(list(itertools.product(*axes)))  # (m, n)

    def f(x: float, y: np.ndarray) -> np.ndarray:
        val = system(x, y)
        if not np.all(np.isfinite(val)):
            raise NumericOverflowError(f"non-finite rhs at x={x}, y={y.tolist()}")
        return val

    best_pair = 0.0
    best_jac = 0.0
    eye = np.eye(n)
    for x in xs:
        x = float(x)
        F = np.array([f(x, y) for y in lattice])
        dF = np.max(np.abs(F[:, None, :] - F[None, :, :]), axis=2)
        dY = np.max(np.abs(lattice[:, None, :] - lattice[None, :, :]), axis=2)
        mask = dY > 0
        if np.any(mask):
            best_pair = max(best_pair, float(np.max(dF[mask] / dY[mask])))
        for y in lattice:
            jac = np.empty((n, n))
            for j in range(n):
                eps = max(1e-6, 1e-6 * abs(y[j]))
                jac[:, j] = (f(x, y + eps * eye[j]) - f(x, y - eps * eye[j])) / (2 * eps)
            best_jac = max(best_jac, float(np.max(np.sum(np.abs(jac), axis=1))))
    return LipschitzEstimate(max(best_pair, best_jac), len(xs) * len(lattice), x_range, box)


def amplification_factor(method: MethodLike, z: float, tableau: RkTableau | None = None) -> float:
    """Per-step multiplier of a backward scheme on ``dy/dx = lam * y`` with ``z = h * lam``."""
    kind, tableau = _resolve(method, tableau)
    if kind in (MethodKind.EXPLICIT_EULER, MethodKind.EULER_PC):
        return 1.0 - z
    if kind is MethodKind.TRAPEZOID_PC:
        return (1.0 - z / 2) / (1.0 + z / 2)
    if kind is MethodKind.CLASSICAL_RK4:
        return 1.0 - z + z**2 / 2 - z**3 / 6 + z**4 / 24
    return tableau_amplification(tableau, z)


def tableau_amplification(tableau: RkTableau, z: float) -> float:
    """Push the scalar test model through an explicit tableau for one backward step."""
    ks = [1.0]  # stage slopes divided by lam * y
    for row in tableau.coefficients:
        ks.append(1.0 - z * sum(float(b) * k for b, k in zip(row, ks)))
    return 1.0 - z * sum(float(c) * k for c, k in zip(tableau.weights, ks))


def decrement_lipschitz_bound(tableau: RkTableau, h: float, L: float) -> float:
    """Lipschitz constant of the decrement function implied by ``L`` for ``f``.

    Each stage inherits ``L * (1 + h * sum |beta_ij| * l_j / L)``; for the
    classical tableau this is ``L (1 + hL/2 + (hL)^2/6 + (hL)^3/24)``.
    """
    stage = [L]
    for row in tableau.coefficients:
        stage.append(L + L * h * sum(abs(float(b)) * lj for b, lj in zip(row, stage)))
    return sum(abs(float(c)) * lj for c, lj in zip(tableau.weights, stage))


def convergence_condition(method: MethodLike, h: float, L: float, tableau: RkTableau | None = None) -> AnalysisReport:
    if h < 0 or L < 0:
        raise InvalidArgumentError(f"h and L must be nonnegative, got h={h}, L={L}")
    kind, tableau = _resolve(method, tableau)
    hl = h * L
    if kind is MethodKind.EULER_PC:
        return AnalysisReport("convergence", hl < 1, hl, 1.0, "<", f"h*L = {hl:g} < 1")
    if kind is MethodKind.TRAPEZOID_PC:
        return AnalysisReport("convergence", hl / 2 < 1, hl / 2, 1.0, "<", f"h*L/2 = {hl / 2:g} < 1")
    if kind is MethodKind.CLASSICAL_RK4:
        lt = decrement_lipschitz_bound(CLASSICAL_RK4, h, L)
        return AnalysisReport(
            "convergence", hl > RK4_CONVERGENCE_ROOT, hl, RK4_CONVERGENCE_ROOT, ">",
            f"h*L = {hl:g} > {RK4_CONVERGENCE_ROOT:.4f}",
            {"decrement_lipschitz": lt},
        )
    if kind is MethodKind.EXPLICIT_EULER:
        lt = L
    else:
        lt = decrement_lipschitz_bound(tableau, h, L)
    return AnalysisReport(
        "convergence", math.isfinite(lt), lt, math.inf, "<",
        f"decrement-function Lipschitz constant {lt:g} < inf",
        {"decrement_lipschitz": lt},
    )


def stability_condition(method: MethodLike, h: float, lam: float, tableau: RkTableau | None = None) -> AnalysisReport:
    """Test ``|R(h * lam)| < 1`` on the backward test model ``dy/dx = lam * y``, ``lam > 0``."""
    if not lam > 0:
        raise InvalidArgumentError(
            f"backward stability uses the test model dy/dx = lambda*y with lambda > 0, got lambda={lam}"
        )
    if not h > 0:
        raise InvalidArgumentError(f"h must be positive, got {h}")
    kind, tableau = _resolve(method, tableau)
    z = h * lam
    r = amplification_factor(kind, z, tableau)
    return AnalysisReport(
        "stability", abs(r) < 1, abs(r), 1.0, "<", f"|R(h*lambda={z:g})| = {abs(r):g} < 1",
        {"z": z, "amplification": r},
    )


def bisect_stability_boundary(
    method: MethodLike, lo: float, hi: float, tableau: RkTableau | None = None, tol: float = 1e-12
) -> float:
    """Locate ``z > 0`` where ``|R(z)|`` crosses 1 inside ``[lo, hi]`` by bisection."""
    kind, tableau = _resolve(method, tableau)

    def g(z: float) -> float:
        return abs(amplification_factor(kind, z, tableau)) - 1.0

    g_lo, g_hi = g(lo), g(hi)
    if g_lo * g_hi > 0:
        raise InvalidArgumentError(f"no sign change of |R(z)| - 1 on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0:
            return mid
        if (g_mid < 0) == (g_lo < 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def global_error_bound(e0: float, L: float, C: float, h: float, p: int, T: float) -> float:
    """``|e0| e^{TL} + (C h^p / L)(e^{TL} - 1)``."""
    if e0 < 0 or L <= 0 or C <= 0 or h <= 0 or T <= 0 or p < 1 or int(p) != p:
        raise InvalidArgumentError("need e0 >= 0, L, C, h, T > 0 and integer p >= 1")
    growth = math.exp(T * L)
    return abs(e0) * growth + C * h**p / L * (growth - 1.0)


def observed_order(
    system: OdeSystem,
    exact_solution: Callable[[float], ArrayLike],
    leg: tuple[float, ArrayLike, float],
    method: MethodSpec,
    h: float,
) -> float:
    """Empirical order from a step-halving pair on one leg (max-norm over shared grid points)."""
    from_x, from_y, to_x = leg
    coarse = integrate_leg(system, from_x, from_y, to_x, method, h)
    fine = integrate_leg(system, from_x, from_y, to_x, method, coarse.step / 2)
    exact = np.array([as_state(exact_solution(float(x)), system.dimension) for x in coarse.xs])
    err_coarse = float(np.max(np.abs(coarse.ys - exact)))
    err_fine = float(np.max(np.abs(fine.ys[::2] - exact)))
    if err_coarse == 0.0 or err_fine == 0.0:
        raise DegenerateOrderError("zero error at one resolution; the order is undefined")
    return math.log2(err_coarse / err_fine)
