"""Second lifting level: the lifted dual, its stationarity system, and the
three capacities.

The functional in the order parameters (p2, q2, c2, gamma_sq, nu) at pattern
ratio alpha and overlap deficit delta is

    psi = -(1/2)(1 - p2 q2) c2 - 2 nu delta + (1/c2) E_h[log f_zt(h)]
          + gamma_sq + alpha (-(1/(2 c2)) log(D/(2 gamma_sq)) + p2/(2 D)),

    D = 2 gamma_sq - c2 (1 - p2),

where f_zt = f_zu + f_zd collects the two closed-form branches of the inner
Gaussian integral (erf expressions in a_hat = c2 sqrt(1-q2) and
b_hat = (sqrt(q2) h - nu)/sqrt(1-q2)).  Stationarity in p2 and gamma_sq has
closed forms (gamma_from_pq, c2_from_pq), which reduce the five-equation
system to three residuals.  The reduced system is solved in the
(c2, q2, nu) chart: near the stationary point q2 - p2 is ~5e-4, so the raw
(p2, q2) chart degenerates against the level-1 collapse surface q2 = p2,
while c2 parameterizes the distance from it directly.

The outer h-expectation is evaluated on two Gauss-Legendre panels split at
the branch crossover h* = nu/sqrt(q2), weighted by the normal density.  A
fixed Hermite rule cannot do this job: the integrand has a boundary layer
of width ~1/c2 (~0.06 at the AGS point), and the whole level-2 correction
to the dual value is ~5e-5, below the ~1e-3 error such rules make at
realistic orders.  Panel node clustering at the split resolves the layer
to ~1e-11 with 80 nodes per side.  The QuadratureRule argument of the
public operations sets the per-side panel order, and is used directly (via
expect) only where the integrand is layer-free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import log_ndtr

from .errors import DomainError, EvaluationError, InfeasibleRegionError
from .level1 import CurvePoint, dxi1_l1, nu_hat_l1, xi1_l1, xi_l1
from .solvers import SolveReport, SolverConfig, find_root, maximize_scalar
from .specfun import SQRT_2PI, QuadratureRule, make_rule

__all__ = ["LiftingParams", "InnerFactors", "Level2Solution", "inner_factors",
           "psi_rd_l2", "grad_psi_l2", "closed_form_q2", "gamma_from_pq",
           "c2_from_pq", "solve_stationary_l2", "xi1_l2", "capacity_ags_l2",
           "capacity_nlt_l2", "capacity_glm_l2", "curve_l2"]

LOG_S2PI = 0.5 * math.log(2.0 * math.pi)
# iterates beyond this are treated as the level-1 collapse (p2, q2 -> 1)
COLLAPSE_EDGE = 1.0 - 1e-6
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class LiftingParams:
    """Level-2 order parameters; p1 = q1 = c1 -> 1 and the level-3 entries
    are 0 by the lifting boundary conditions."""
    p2: float
    q2: float
    c2: float
    gamma_sq: float
    nu: float

    def __post_init__(self):
        if not (0.0 <= self.p2 < 1.0 and 0.0 <= self.q2 < 1.0):
            raise DomainError(f"p2, q2 must lie in [0, 1): {self.p2}, {self.q2}")
        if self.c2 < 0.0 or self.gamma_sq <= 0.0:
            raise DomainError("c2 must be >= 0 and gamma_sq > 0")

    @property
    def denom(self) -> float:
        """Sphere-term denominator 2 gamma_sq - c2 (1 - p2)."""
        return 2.0 * self.gamma_sq - self.c2 * (1.0 - self.p2)


@dataclass(frozen=True)
class InnerFactors:
    b_hat: float
    a_hat: float
    f_zu: float
    f_zd: float
    f_zt: float


@dataclass(frozen=True)
class Level2Solution:
    alpha_c: float
    delta_hat: float
    params: LiftingParams
    residuals: np.ndarray
    diagnostics: SolveReport
    psi: float
    collapsed: bool = False
    extra: dict = field(default_factory=dict)


@lru_cache(maxsize=32)
def _gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(n)


def _panel_grid(q2: float, nu: float, n_side: int) -> tuple[np.ndarray, np.ndarray]:
    # split the normal-weighted line at the crossover of the two exponential
    # branches; Legendre nodes cluster at the split and resolve the layer
    if q2 > 0.0:
        hstar = float(np.clip(nu / math.sqrt(q2), -8.5, 8.5))
    else:
        hstar = 0.0
    lo = min(-9.0, hstar - 9.0)
    hi = max(9.0, hstar + 9.0)
    x, w = _gl_nodes(n_side)
    nodes = []
    weights = []
    for a, b in ((lo, hstar), (hstar, hi)):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        t = mid + half * x
        nodes.append(t)
        weights.append(half * w * np.exp(-0.5 * t * t) / SQRT_2PI)
    return np.concatenate(nodes), np.concatenate(weights)


def _log_branches(h: np.ndarray, q2: float, c2: float, nu: float):
    """(log f_zu, log f_zd, log f_zt, a_hat, b_hat) at nodes h."""
    if not 0.0 <= q2 < 1.0:
        raise DomainError(f"q2 must be in [0, 1), got {q2}")
    if c2 <= 0.0:
        raise DomainError(f"c2 must be positive, got {c2}")
    sq = math.sqrt(q2)
    s1q = math.sqrt(1.0 - q2)
    b_hat = (sq * h - nu) / s1q
    a_hat = c2 * s1q
    # log of e^{pref} * (1/2) e^{a^2/2} (1 + erf((a +- b)/sqrt 2)); the erf
    # factor is Phi(a +- b) via log_ndtr, keeping relative accuracy at -1
    log_fzu = c2 * sq * h + 0.5 * a_hat * a_hat + log_ndtr(a_hat + b_hat)
    log_fzd = (-c2 * sq * h + 2.0 * c2 * nu + 0.5 * a_hat * a_hat
               + log_ndtr(a_hat - b_hat))
    return log_fzu, log_fzd, np.logaddexp(log_fzu, log_fzd), a_hat, b_hat


def inner_factors(h3: float, pq: LiftingParams) -> InnerFactors:
    """Closed-form inner-integral branches at a single outer node h3."""
    h = np.array([float(h3)])
    lu, ld, lt, a_hat, b_hat = _log_branches(h, pq.q2, pq.c2, pq.nu)
    if max(abs(float(lu[0])), abs(float(ld[0]))) > 700.0:
        raise EvaluationError("inner factor exceeds exp(700); parameters too extreme")
    return InnerFactors(b_hat=float(b_hat[0]), a_hat=float(a_hat),
                        f_zu=float(np.exp(lu[0])), f_zd=float(np.exp(ld[0])),
                        f_zt=float(np.exp(lt[0])))


def _sphere_term(pq: LiftingParams, alpha: float) -> float:
    d = pq.denom
    if d <= 0.0:
        raise EvaluationError(f"sphere log argument not positive: D = {d}")
    return alpha * (-0.5 / pq.c2 * math.log(d / (2.0 * pq.gamma_sq))
                    + pq.p2 / (2.0 * d))


def psi_rd_l2(pq: LiftingParams, alpha: float, delta: float,
              rule: QuadratureRule) -> float:
    """The lifted dual functional at explicit parameters."""
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    if pq.c2 <= 0.0:
        raise DomainError("psi_rd_l2 needs c2 > 0 (the c2 -> 0 limit is level 1)")
    h, w = _panel_grid(pq.q2, pq.nu, rule.order)
    _, _, lt, _, _ = _log_branches(h, pq.q2, pq.c2, pq.nu)
    per = float(np.dot(w, lt)) / pq.c2
    return (-0.5 * (1.0 - pq.p2 * pq.q2) * pq.c2 - 2.0 * pq.nu * delta
            + per + pq.gamma_sq + _sphere_term(pq, alpha))


def grad_psi_l2(pq: LiftingParams, alpha: float, delta: float,
                rule: QuadratureRule) -> np.ndarray:
    """Analytic partials (d/dp2, d/dq2, d/dc2, d/dgamma_sq, d/dnu)."""
    p2, q2, c2, g, nu = pq.p2, pq.q2, pq.c2, pq.gamma_sq, pq.nu
    if c2 <= 0.0:
        raise DomainError("grad_psi_l2 needs c2 > 0")
    if q2 <= 0.0:
        raise DomainError("grad_psi_l2 needs q2 > 0 (h3 scale vanishes at 0)")
    d = pq.denom
    if d <= 0.0:
        raise EvaluationError(f"sphere log argument not positive: D = {d}")
    h, w = _panel_grid(q2, nu, rule.order)
    lu, ld, lt, a_hat, b_hat = _log_branches(h, q2, c2, nu)
    sq = math.sqrt(q2)
    s1q = math.sqrt(1.0 - q2)
    ratio_u = np.exp(lu - lt)                      # f_zu / f_zt
    ratio_d = np.exp(ld - lt)
    # e^{prefactor} phi(a +- b) / f_zt: the erf-derivative pieces
    log_pref_u = c2 * sq * h + 0.5 * a_hat * a_hat
    log_pref_d = -c2 * sq * h + 2.0 * c2 * nu + 0.5 * a_hat * a_hat
    haz_u = np.exp(log_pref_u - 0.5 * (a_hat + b_hat) ** 2 - LOG_S2PI - lt)
    haz_d = np.exp(log_pref_d - 0.5 * (a_hat - b_hat) ** 2 - LOG_S2PI - lt)

    d_p2 = c2 * (0.5 * q2 - alpha * p2 / (2.0 * d * d))
    d_gamma = 1.0 + alpha * (-(1.0 - p2) / (2.0 * g * d) - p2 / (d * d))

    da_q = -c2 / (2.0 * s1q)
    db_q = (h - sq * nu) / (2.0 * sq * (1.0 - q2) ** 1.5)
    pref_u_q = c2 * h / (2.0 * sq) + a_hat * da_q
    pref_d_q = -c2 * h / (2.0 * sq) + a_hat * da_q
    d_q2 = 0.5 * p2 * c2 + float(np.dot(w, pref_u_q * ratio_u
                                        + haz_u * (da_q + db_q)
                                        + pref_d_q * ratio_d
                                        + haz_d * (da_q - db_q))) / c2

    da_c = s1q
    pref_u_c = sq * h + a_hat * da_c
    pref_d_c = -sq * h + 2.0 * nu + a_hat * da_c
    e_log = float(np.dot(w, lt))
    sphere_c = (0.5 / (c2 * c2) * math.log(d / (2.0 * g))
                + (1.0 - p2) / (2.0 * c2 * d)
                + p2 * (1.0 - p2) / (2.0 * d * d))
    d_c2 = (-0.5 * (1.0 - p2 * q2) - e_log / (c2 * c2)
            + float(np.dot(w, pref_u_c * ratio_u + haz_u * da_c
                           + pref_d_c * ratio_d + haz_d * da_c)) / c2
            + alpha * sphere_c)

    db_n = -1.0 / s1q
    d_nu = -2.0 * delta + float(np.dot(w, haz_u * db_n + 2.0 * c2 * ratio_d
                                       - haz_d * db_n)) / c2
    return np.array([d_p2, d_q2, d_c2, d_gamma, d_nu])


def closed_form_q2(pq: LiftingParams, alpha: float) -> float:
    """q2 from the p2-stationarity: alpha p2 / D^2."""
    d = pq.denom
    if d <= 0.0:
        raise EvaluationError(f"denominator not positive: D = {d}")
    return alpha * pq.p2 / (d * d)


def gamma_from_pq(p2: float, q2: float, alpha: float) -> float:
    """gamma_sq from the p2- and gamma-stationarity closed forms."""
    if not (0.0 < p2 < 1.0 and 0.0 < q2 < 1.0):
        raise DomainError("p2, q2 must be in (0, 1)")
    return 0.5 * (1.0 - p2) / (1.0 - q2) * math.sqrt(q2 * alpha / p2)


def c2_from_pq(p2: float, q2: float, alpha: float) -> float:
    """c2 from the same closed forms (positive iff q2 > p2)."""
    if not (0.0 < p2 < 1.0 and 0.0 < q2 < 1.0):
        raise DomainError("p2, q2 must be in (0, 1)")
    return (math.sqrt(q2 * alpha / p2) / (1.0 - q2)
            - math.sqrt(p2 * alpha / q2) / (1.0 - p2))


def _p2_from_c2q2(c2: float, q2: float, alpha: float) -> float:
    # c2_from_pq is monotone decreasing in p2 on (0, q2): bisect
    lo, hi = 1e-15, q2 - 1e-15
    if c2_from_pq(hi, q2, alpha) - c2 >= 0.0:
        raise InfeasibleRegionError("no p2 < q2 matches this c2")
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if c2_from_pq(mid, q2, alpha) - c2 > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _collapsed_solution(alpha: float, delta: float, report: SolveReport | None = None
                        ) -> Level2Solution:
    # level-1 limit (p2, q2 -> 1, c2 -> 0): the lifting collapses and the
    # dual value is the level-1 one
    nu = nu_hat_l1(delta) if 0.0 < delta < 1.0 else 0.0
    params = LiftingParams(p2=1.0 - 1e-12, q2=1.0 - 1e-12, c2=0.0,
                           gamma_sq=math.sqrt(alpha) / 2.0, nu=nu)
    psi = xi_l1(delta, alpha)
    rep = report or SolveReport(value=np.zeros(3), residual=0.0, iterations=0,
                                converged=True, message="collapsed to level 1")
    return Level2Solution(alpha_c=alpha, delta_hat=delta, params=params,
                          residuals=np.zeros(5), diagnostics=rep, psi=psi,
                          collapsed=True)


class _ReducedSystem:
    """Residuals (d/dq2, d/dc2, d/dnu) on the closed-form manifold, in the
    (c2, q2, nu) chart."""

    def __init__(self, alpha: float, delta: float, rule: QuadratureRule):
        self.alpha = alpha
        self.delta = delta
        self.rule = rule

    def params(self, x: np.ndarray) -> LiftingParams:
        c2, q2, nu = float(x[0]), float(x[1]), float(x[2])
        if not (1e-12 < q2 < 1.0 - 1e-13) or c2 <= 0.0:
            raise InfeasibleRegionError("iterate outside the admissible box")
        p2 = _p2_from_c2q2(c2, q2, self.alpha)
        return LiftingParams(p2=p2, q2=q2, c2=c2,
                             gamma_sq=gamma_from_pq(p2, q2, self.alpha), nu=nu)

    def residual(self, x: np.ndarray) -> np.ndarray:
        full = grad_psi_l2(self.params(x), self.alpha, self.delta, self.rule)
        return full[[1, 2, 4]]


def _newton3(system: _ReducedSystem, x0, tol: float, max_iter: int = 50):
    x = np.array(x0, dtype=float)
    try:
        fx = system.residual(x)
    except (DomainError, EvaluationError, InfeasibleRegionError):
        return None
    for it in range(max_iter):
        norm = float(np.max(np.abs(fx)))
        if norm <= tol:
            return x, norm, it
        if it > 12 and norm > 1e4 * tol:
            return None
        jac = np.zeros((3, 3))
        try:
            for j in range(3):
                step = 1e-6 * max(abs(x[j]), 1e-3)
                xp = x.copy(); xp[j] += step
                xm = x.copy(); xm[j] -= step
                jac[:, j] = (system.residual(xp) - system.residual(xm)) / (2 * step)
            delta_x = np.linalg.solve(jac, -fx)
        except (np.linalg.LinAlgError, DomainError, EvaluationError,
                InfeasibleRegionError):
            return None
        scale = 1.0
        while scale > 1e-12:
            try:
                x_new = x + scale * delta_x
                f_new = system.residual(x_new)
                if float(np.max(np.abs(f_new))) < norm:
                    x, fx = x_new, f_new
                    break
            except (DomainError, EvaluationError, InfeasibleRegionError):
                pass
            scale *= 0.5
        else:
            return None
    norm = float(np.max(np.abs(fx)))
    return (x, norm, max_iter) if norm <= tol else None


def _initial_points(alpha: float, delta: float) -> list[tuple[float, float, float]]:
    nu1 = nu_hat_l1(delta) if 0.0 < delta < 0.5 else 0.0
    inits = []
    if abs(delta - 0.5) < 1e-9:
        # the zero-overlap state sits far from the collapse surface
        for p0, q0 in ((0.56, 0.73), (0.4, 0.6), (0.7, 0.85), (0.3, 0.55)):
            c0 = c2_from_pq(p0, q0, alpha)
            if c0 > 0:
                inits.append((c0, q0, 0.0))
    for u in (3.5e-3, 1e-2, 1e-3, 3e-2, 1e-4):
        for ratio in (0.86, 0.7, 0.95):
            p0, q0 = 1.0 - u, 1.0 - ratio * u
            c0 = c2_from_pq(p0, q0, alpha)
            if c0 > 0:
                inits.append((c0, q0, nu1))
    return inits


def solve_stationary_l2(alpha: float, delta: float,
                        init: LiftingParams | None = None,
                        rule: QuadratureRule | None = None,
                        tol: float = RESIDUAL_TOL,
                        scan_all: bool = False) -> Level2Solution:
    """Stationary point of the lifted dual at (alpha, delta).

    Warm starts from ``init`` when given, then falls back to a deterministic
    multi-start ladder.  When several stationary points converge (the
    delta = 1/2 system has both a degenerate and an interior solution) the
    lower dual value wins; ``scan_all`` forces the full ladder even when the
    warm start converges.  If no interior point exists the lifting has
    collapsed and the level-1 limit is returned (Tables report this as
    p2, q2 -> 1, c2 -> 0).
    """
    rule = rule or make_rule(80)
    system = _ReducedSystem(alpha, delta, rule)
    starts: list[tuple[float, float, float]] = []
    if init is not None and init.c2 > 0:
        starts.append((init.c2, init.q2, init.nu))
    starts.extend(_initial_points(alpha, delta))
    solutions = []
    for k, x0 in enumerate(starts):
        got = _newton3(system, x0, tol)
        if got is None:
            continue
        x, norm, iters = got
        pq = system.params(x)
        if pq.p2 >= COLLAPSE_EDGE or pq.q2 >= COLLAPSE_EDGE:
            continue  # degenerate: handled by the collapse fallback below
        psi = psi_rd_l2(pq, alpha, delta, rule)
        solutions.append((psi, pq, norm, iters))
        # a converged warm start is authoritative during sweeps
        if not scan_all and (k == 0 and init is not None or abs(delta - 0.5) > 1e-9):
            break
    if not solutions:
        return _collapsed_solution(alpha, delta)
    psi, pq, norm, iters = min(solutions, key=lambda s: s[0])
    residuals = grad_psi_l2(pq, alpha, delta, rule)
    report = SolveReport(value=np.array([pq.c2, pq.q2, pq.nu]), residual=norm,
                         iterations=iters, converged=True)
    return Level2Solution(alpha_c=alpha, delta_hat=delta, params=pq,
                          residuals=residuals, diagnostics=report, psi=psi)


def xi1_l2(delta: float, alpha: float, rule: QuadratureRule,
           init: LiftingParams | None = None) -> float:
    """Constrained energy -(1-2 delta)^2 - psi^2 from the solved dual."""
    if delta == 0.0:
        return -1.0 - alpha
    sol = solve_stationary_l2(alpha, delta, init=init, rule=rule)
    return -((1.0 - 2.0 * delta) ** 2) - sol.psi ** 2


class _SweepSolver:
    # continuation cache: the previous solution seeds the next solve
    def __init__(self, alpha: float, rule: QuadratureRule):
        self.alpha = alpha
        self.rule = rule
        self.warm: LiftingParams | None = None

    def solve(self, delta: float, alpha: float | None = None) -> Level2Solution:
        sol = solve_stationary_l2(alpha if alpha is not None else self.alpha,
                                  delta, init=self.warm, rule=self.rule)
        if not sol.collapsed:
            self.warm = sol.params
        return sol

    def tangency(self, delta: float, alpha: float | None = None) -> float:
        # d xi1 / d delta via the envelope identity d psi / d delta = -2 nu
        sol = self.solve(delta, alpha)
        return 4.0 * (1.0 - 2.0 * delta) + 4.0 * sol.params.nu * sol.psi


def capacity_ags_l2(rule: QuadratureRule | None = None) -> Level2Solution:
    """Largest alpha at which the two stationary points of xi1 still meet."""
    rule = rule or make_rule(80)
    sweep = _SweepSolver(alpha=0.138, rule=rule)

    def max_tangency(alpha: float) -> tuple[float, float]:
        rep = maximize_scalar(lambda d: sweep.tangency(d, alpha), 0.005, 0.08,
                              SolverConfig(rel_tol=1e-7, max_iter=100))
        return rep.extra["max"], float(rep.value)

    lo, hi = 0.1379, 0.1390
    delta_hat = None
    for _ in range(14):
        mid = 0.5 * (lo + hi)
        t_max, d_max = max_tangency(mid)
        if t_max > 0.0:
            lo, delta_hat = mid, d_max
        else:
            hi = mid
    alpha_c = 0.5 * (lo + hi)
    if delta_hat is None:
        raise EvaluationError("no tangency point found in the AGS bracket")
    sol = sweep.solve(delta_hat, alpha_c)
    return replace(sol, alpha_c=alpha_c, delta_hat=delta_hat)


def capacity_nlt_l2(rule: QuadratureRule | None = None) -> Level2Solution:
    """Largest alpha with a stationary rim at the pattern energy level."""
    rule = rule or make_rule(80)
    sweep = _SweepSolver(alpha=0.1298, rule=rule)
    state = {"rim": None}

    def rim_delta(alpha: float) -> float:
        # larger root of the tangency defect: the rim of the well
        t = lambda d: sweep.tangency(d, alpha)
        prev = state["rim"]
        if prev is None:
            rep = maximize_scalar(t, 0.005, 0.08,
                                  SolverConfig(rel_tol=1e-6, max_iter=100))
            lo_d = float(rep.value)
        else:
            lo_d = prev - 0.004
            while t(lo_d) <= 0.0 and lo_d > 0.006:
                lo_d -= 0.004
        hi_d = max(0.09, lo_d + 0.02)
        rep = find_root(t, lo_d, hi_d, SolverConfig(abs_tol=5e-8, rel_tol=1e-9))
        state["rim"] = float(rep.value)
        return state["rim"]

    def barrier_gap(alpha: float) -> tuple[float, float]:
        d2 = rim_delta(alpha)
        sol = sweep.solve(d2, alpha)
        xi1 = -((1.0 - 2.0 * d2) ** 2) - sol.psi ** 2
        return xi1 + 1.0 + alpha, d2

    lo, hi = 0.1280, 0.1320
    delta_hat = None
    for _ in range(15):
        mid = 0.5 * (lo + hi)
        gap, d2 = barrier_gap(mid)
        if gap > 0.0:
            lo, delta_hat = mid, d2
        else:
            hi = mid
    alpha_c = 0.5 * (lo + hi)
    if delta_hat is None:
        raise EvaluationError("no barrier equality found in the NLT bracket")
    sol = sweep.solve(delta_hat, alpha_c)
    return replace(sol, alpha_c=alpha_c, delta_hat=delta_hat)


def _pattern_min_delta(alpha: float) -> float:
    # smaller root of d xi1/d delta: the well bottom (level-1 landscape; the
    # level-2 solve collapses there, Table 3)
    grid = np.logspace(-8.0, math.log10(0.4), 120)
    vals = [dxi1_l1(float(d), alpha) for d in grid]
    for (d0, v0), (d1, v1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if v0 < 0.0 <= v1:
            rep = find_root(lambda d: dxi1_l1(d, alpha), float(d0), float(d1),
                            SolverConfig(abs_tol=1e-13))
            return float(rep.value)
    raise EvaluationError("pattern-adjacent minimum not found")


def capacity_glm_l2(rule: QuadratureRule | None = None) -> Level2Solution:
    """alpha at which the pattern well ties the zero-overlap ground state.

    The returned solution carries the delta = 1/2 branch parameters (the
    nontrivial stationary point, nu = 0 by symmetry) while delta_hat is the
    pattern-adjacent minimizer; the min branch itself collapses to the
    level-1 structure and is reported in ``extra``.
    """
    rule = rule or make_rule(80)
    sweep = _SweepSolver(alpha=0.056, rule=rule)

    def gap(alpha: float) -> tuple[float, float, Level2Solution]:
        d_min = _pattern_min_delta(alpha)
        sol = sweep.solve(0.5, alpha)
        if sol.collapsed:
            raise EvaluationError("delta = 1/2 stationary point not found")
        return xi1_l1(d_min, alpha) + sol.psi ** 2, d_min, sol

    lo, hi = 0.050, 0.062
    for _ in range(16):
        mid = 0.5 * (lo + hi)
        g, _, _ = gap(mid)
        if g < 0.0:
            lo = mid
        else:
            hi = mid
    alpha_c = 0.5 * (lo + hi)
    g, d_min, half = gap(alpha_c)
    min_branch = solve_stationary_l2(alpha_c, d_min, rule=rule)
    return Level2Solution(alpha_c=alpha_c, delta_hat=d_min, params=half.params,
                          residuals=half.residuals, diagnostics=half.diagnostics,
                          psi=half.psi,
                          extra={"half_branch_delta": 0.5,
                                 "min_branch_collapsed": min_branch.collapsed,
                                 "min_branch_params": min_branch.params,
                                 "barrier_gap": g})


def curve_l2(alpha: float, deltas, rule: QuadratureRule | None = None
             ) -> list[CurvePoint | None]:
    """Landscape samples from warm-started continuation in delta.

    Points where the solve fails are recorded as None; the sweep continues.
    """
    rule = rule or make_rule(80)
    sweep = _SweepSolver(alpha=alpha, rule=rule)
    points: list[CurvePoint | None] = []
    for d in deltas:
        d = float(d)
        if not 0.0 <= d <= 0.5:
            raise DomainError(f"delta must be in [0, 1/2], got {d}")
        if d == 0.0:
            points.append(CurvePoint(delta=0.0, xi=math.sqrt(alpha),
                                     xi1=-1.0 - alpha, xi_tot=0.0))
            continue
        try:
            sol = sweep.solve(d)
        except (DomainError, EvaluationError, InfeasibleRegionError):
            points.append(None)
            continue
        xi1 = -((1.0 - 2.0 * d) ** 2) - sol.psi ** 2
        points.append(CurvePoint(delta=d, xi=sol.psi, xi1=xi1,
                                 xi_tot=xi1 + 1.0 + alpha))
    return points
