"""First lifting level: closed forms for the energy landscape and capacities.

With x = erfinv(1 - 2*delta), the solved dual at this level is

    xi(delta)  = (2/sqrt(2 pi)) exp(-x^2) + sqrt(alpha)
    xi1(delta) = -(1 - 2 delta)^2 - xi(delta)^2

and the three capacity notions reduce to scalar equations in delta:

    AGS  tangency of the two stationary points of xi1 (inflection),
    NLT  stationarity plus the barrier equality xi1(delta) = xi1(0),
    GLM  well depth equality  xi1(delta) = xi1(1/2).

Endpoints are handled by their analytic limits (xi1(0) = -1 - alpha,
nu_hat(1/2) = 0); erfinv is never evaluated at +-1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, EvaluationError
from .solvers import SolverConfig, SolveReport, find_root, maximize_scalar
from .specfun import SQRT_2PI, erfinv_fn

__all__ = ["BasinKind", "Level1Solution", "CurvePoint", "nu_hat_l1", "f1_opt",
           "f1_general", "psi_l1_general", "xi_l1", "xi1_l1", "dxi1_l1",
           "d2xi1_l1", "capacity_ags_l1", "capacity_nlt_l1", "capacity_glm_l1",
           "curve_l1"]

TWO_OVER_S2PI = 2.0 / SQRT_2PI


class BasinKind(Enum):
    AGS = "ags"
    NLT = "nlt"
    GLM = "glm"


@dataclass(frozen=True)
class Level1Solution:
    alpha_c: float
    delta_hat: float
    nu_hat: float
    gamma_sq_hat: float
    diagnostics: SolveReport


@dataclass(frozen=True)
class CurvePoint:
    delta: float
    xi: float
    xi1: float
    xi_tot: float


def _x_of(delta: float) -> float:
    return erfinv_fn(1.0 - 2.0 * delta)


def nu_hat_l1(delta: float) -> float:
    """Optimal constraint multiplier -sqrt(2) erfinv(1 - 2 delta)."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")
    return -math.sqrt(2.0) * _x_of(delta)


def f1_general(nu: float, delta: float) -> float:
    """Per-coordinate dual term 2 E[max(nu - h, 0)] - 2 nu delta, any nu."""
    # E[max(nu - h, 0)] = phi(nu) + nu Phi(nu), Phi via erfc for accuracy
    phi = math.exp(-0.5 * nu * nu) / SQRT_2PI
    cdf = 0.5 * math.erfc(-nu / math.sqrt(2.0))
    return 2.0 * (phi + nu * cdf) - 2.0 * nu * delta


def f1_opt(delta: float) -> float:
    """f1 at the optimal nu: (2/sqrt(2 pi)) exp(-nu_hat^2 / 2)."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")
    nu = nu_hat_l1(delta)
    return TWO_OVER_S2PI * math.exp(-0.5 * nu * nu)


def psi_l1_general(nu: float, gamma_sq: float, delta: float, alpha: float) -> float:
    """Level-1 dual value at explicit (nu, gamma_sq), before optimizing them."""
    if gamma_sq <= 0:
        raise DomainError("gamma_sq must be positive")
    return f1_general(nu, delta) + gamma_sq + alpha / (4.0 * gamma_sq)


def xi_l1(delta: float, alpha: float) -> float:
    """Solved dual value xi(delta) = f1_opt(delta) + sqrt(alpha)."""
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    if delta == 0.0:
        return math.sqrt(alpha)
    return f1_opt(delta) + math.sqrt(alpha)


def xi1_l1(delta: float, alpha: float) -> float:
    """Scaled constrained ground-state energy -(1-2d)^2 - xi(d)^2."""
    if delta == 0.0:
        return -1.0 - alpha
    return -((1.0 - 2.0 * delta) ** 2) - xi_l1(delta, alpha) ** 2


def dxi1_l1(delta: float, alpha: float) -> float:
    """Closed-form d xi1 / d delta on (0, 1/2)."""
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must be in (0, 1/2), got {delta}")
    x = _x_of(delta)
    return 4.0 * (1.0 - 2.0 * delta) - 4.0 * math.sqrt(2.0) * x * (
        TWO_OVER_S2PI * math.exp(-x * x) + math.sqrt(alpha))


def d2xi1_l1(delta: float, alpha: float) -> float:
    """Closed-form second delta-derivative of xi1 on (0, 1/2)."""
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must be in (0, 1/2), got {delta}")
    x = _x_of(delta)
    return -16.0 * x * x + 4.0 * SQRT_2PI * math.sqrt(alpha) * math.exp(x * x)


def _sqrt_alpha_tangency(delta: float) -> float:
    # inflection condition resolved for sqrt(alpha)
    x = _x_of(delta)
    return 4.0 / SQRT_2PI * x * x * math.exp(-x * x)


def _ags_critical(delta: float) -> float:
    x = _x_of(delta)
    e = math.exp(-x * x)
    return 4.0 * (1.0 - 2.0 * delta) - 4.0 * math.sqrt(2.0) * x * (
        TWO_OVER_S2PI * e + _sqrt_alpha_tangency(delta))


def _alpha_bracket(delta: float) -> float:
    # the maximized expression of the alternative capacity route
    x = _x_of(delta)
    return (1.0 - 2.0 * delta) / (math.sqrt(2.0) * x) - TWO_OVER_S2PI * math.exp(-x * x)


def _multistart_max(f, lo: float, hi: float, cfg: SolverConfig,
                    n_starts: int = 8) -> SolveReport:
    # golden-section on each of n_starts equal subintervals; guards against
    # non-unimodal tails near the endpoints where erfinv diverges
    edges = np.linspace(lo, hi, n_starts + 1)
    best = None
    for a, b in zip(edges[:-1], edges[1:]):
        rep = maximize_scalar(f, float(a), float(b), cfg)
        if best is None or rep.extra["max"] > best.extra["max"]:
            best = rep
    return best


def capacity_ags_l1() -> Level1Solution:
    """Capacity from the tangency (merged stationary points) condition."""
    cfg = SolverConfig(abs_tol=1e-13, rel_tol=1e-14, max_iter=200)
    rep = find_root(_ags_critical, 1e-4, 0.2, cfg)
    if not rep.converged:
        return Level1Solution(math.nan, math.nan, math.nan, math.nan, rep)
    delta = float(rep.value)
    alpha = _sqrt_alpha_tangency(delta) ** 2
    alt = _multistart_max(_alpha_bracket, 1e-9, 0.5 - 1e-9,
                          SolverConfig(rel_tol=1e-12, max_iter=500))
    alpha_alt = alt.extra["max"] ** 2
    if abs(alpha_alt - alpha) > 1e-7:
        raise EvaluationError(
            f"tangency and max routes disagree: {alpha} vs {alpha_alt}")
    return Level1Solution(alpha_c=alpha, delta_hat=delta,
                          nu_hat=nu_hat_l1(delta),
                          gamma_sq_hat=math.sqrt(alpha) / 2.0,
                          diagnostics=rep)


def _nlt_critical(delta: float) -> float:
    x = _x_of(delta)
    return (2.0 * delta * (1.0 - delta)
            - (1.0 - 2.0 * delta) / (math.sqrt(math.pi) * x) * math.exp(-x * x)
            + math.exp(-2.0 * x * x) / math.pi)


def capacity_nlt_l1() -> Level1Solution:
    """Capacity with the barrier equality xi1(delta_hat) = xi1(0)."""
    cfg = SolverConfig(abs_tol=1e-15, rel_tol=1e-14, max_iter=200)
    rep = find_root(_nlt_critical, 1e-3, 0.2, cfg)
    if not rep.converged:
        return Level1Solution(math.nan, math.nan, math.nan, math.nan, rep)
    delta = float(rep.value)
    alpha = _alpha_bracket(delta) ** 2
    # compact form in x = erfinv(1 - 2 delta): same alpha, zero residual
    x = _x_of(delta)
    erfx = math.erf(x)
    alpha_compact = erfx * erfx / (2.0 * x * x) - 1.0 + erfx * erfx
    resid = (1.0 - erfx * erfx
             - 2.0 * erfx * math.exp(-x * x) / (math.sqrt(math.pi) * x)
             + 2.0 * math.exp(-2.0 * x * x) / math.pi)
    if abs(alpha_compact - alpha) > 1e-8 or abs(resid) > 1e-8:
        raise EvaluationError(
            f"compact NLT form disagrees: {alpha} vs {alpha_compact}, resid {resid}")
    return Level1Solution(alpha_c=alpha, delta_hat=delta,
                          nu_hat=nu_hat_l1(delta),
                          gamma_sq_hat=math.sqrt(alpha) / 2.0,
                          diagnostics=rep)


def _glm_critical(delta: float) -> float:
    x = _x_of(delta)
    return ((1.0 - 2.0 * delta)
            * (math.sqrt(1.0 + 1.0 / (2.0 * x * x)) - 1.0 / (math.sqrt(2.0) * x))
            - TWO_OVER_S2PI * (1.0 - math.exp(-x * x)))


def capacity_glm_l1() -> Level1Solution:
    """Threshold where the pattern-adjacent minimum ties the delta=1/2 state."""
    # the root sits near 5.7e-6: locate a sign change on a log-spaced scan
    grid = np.logspace(-9, math.log10(0.4), 160)
    vals = [_glm_critical(float(d)) for d in grid]
    bracket = None
    for (d0, v0), (d1, v1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if v0 == 0.0 or (v0 > 0) != (v1 > 0):
            bracket = (float(d0), float(d1))
            break
    if bracket is None:
        raise EvaluationError("no sign change for the GLM critical equation")
    cfg = SolverConfig(abs_tol=1e-18, rel_tol=1e-14, max_iter=300)
    rep = find_root(_glm_critical, bracket[0], bracket[1], cfg)
    delta = float(rep.value)
    x = _x_of(delta)
    sqrt_a_depth = ((1.0 - 2.0 * delta)
                    * math.sqrt(1.0 + 1.0 / (2.0 * x * x)) - TWO_OVER_S2PI)
    sqrt_a_slope = _alpha_bracket(delta)
    if abs(sqrt_a_depth - sqrt_a_slope) > 1e-8:
        raise EvaluationError(
            f"GLM sqrt-alpha lines disagree: {sqrt_a_depth} vs {sqrt_a_slope}")
    alpha = sqrt_a_depth ** 2
    return Level1Solution(alpha_c=alpha, delta_hat=delta,
                          nu_hat=nu_hat_l1(delta),
                          gamma_sq_hat=math.sqrt(alpha) / 2.0,
                          diagnostics=rep)


def capacity_l1(basin: BasinKind) -> Level1Solution:
    if basin is BasinKind.AGS:
        return capacity_ags_l1()
    if basin is BasinKind.NLT:
        return capacity_nlt_l1()
    return capacity_glm_l1()


def curve_l1(alpha: float, deltas) -> list[CurvePoint]:
    """Landscape samples (delta, xi, xi1, xi_tot) at fixed alpha."""
    points = []
    for d in deltas:
        d = float(d)
        if not 0.0 <= d <= 0.5:
            raise DomainError(f"delta must be in [0, 1/2], got {d}")
        xi = xi_l1(d, alpha)
        xi1 = xi1_l1(d, alpha)
        points.append(CurvePoint(delta=d, xi=xi, xi1=xi1,
                                 xi_tot=xi1 + 1.0 + alpha))
    return points
