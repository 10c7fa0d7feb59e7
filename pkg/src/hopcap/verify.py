"""Self-verification suite: cross-checks between independent routes.

Each check compares two computations that should agree (analytic gradients
vs central differences, closed-form parameter relations vs solved values,
the level-2 functional vs its level-1 limit, special-function round trips,
quadrature self-convergence) and reports the observed magnitude against a
fixed threshold.  The gradient function is injectable so a deliberately
broken derivative is caught and named.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import level1, level2
from .specfun import QuadratureRule, erf_fn, erfinv_fn, expect, make_rule

__all__ = ["CheckResult", "VerificationReport", "run_verification"]

GRAD_NAMES = ("p2-derivative", "q2-derivative", "c2-derivative",
              "gamma_sq-derivative", "nu-derivative")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    magnitude: float
    threshold: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.magnitude:.3e} (<= {self.threshold:.1e})"


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def _random_admissible(rng: np.random.Generator) -> level2.LiftingParams:
    p2 = rng.uniform(0.2, 0.93)
    q2 = rng.uniform(p2 + 0.02, 0.97)
    c2 = rng.uniform(0.3, 10.0)
    floor = c2 * (1.0 - p2) / 2.0
    gamma = rng.uniform(floor + 0.05, floor + 1.0)
    nu = rng.uniform(-3.0, 1.0)
    return level2.LiftingParams(p2=p2, q2=q2, c2=c2, gamma_sq=gamma, nu=nu)


def _gradient_checks(rule: QuadratureRule, seed: int, n_points: int,
                     grad_fn: Callable | None) -> list[CheckResult]:
    grad_fn = grad_fn or level2.grad_psi_l2
    rng = np.random.default_rng(seed)
    worst = np.zeros(5)
    for _ in range(n_points):
        pq = _random_admissible(rng)
        alpha = rng.uniform(0.05, 0.2)
        delta = rng.uniform(0.01, 0.49)
        g = np.asarray(grad_fn(pq, alpha, delta, rule), dtype=float)
        fields = ("p2", "q2", "c2", "gamma_sq", "nu")
        for j, name in enumerate(fields):
            step = 1e-6
            hi = level2.psi_rd_l2(_bump(pq, name, +step), alpha, delta, rule)
            lo = level2.psi_rd_l2(_bump(pq, name, -step), alpha, delta, rule)
            fd = (hi - lo) / (2.0 * step)
            rel = abs(g[j] - fd) / max(abs(fd), abs(g[j]), 1e-10)
            worst[j] = max(worst[j], rel)
    return [CheckResult(name=GRAD_NAMES[j], passed=worst[j] <= 1e-6,
                        magnitude=float(worst[j]), threshold=1e-6)
            for j in range(5)]


def _bump(pq: level2.LiftingParams, field: str, step: float) -> level2.LiftingParams:
    kw = {"p2": pq.p2, "q2": pq.q2, "c2": pq.c2,
          "gamma_sq": pq.gamma_sq, "nu": pq.nu}
    kw[field] += step
    return level2.LiftingParams(**kw)


def _closed_form_checks(rule: QuadratureRule) -> list[CheckResult]:
    sol = level2.solve_stationary_l2(0.138186, 0.0167, rule=rule)
    pq = sol.params
    alpha = 0.138186
    r1 = abs(level2.closed_form_q2(pq, alpha) - pq.q2)
    r4 = abs(level2.gamma_from_pq(pq.p2, pq.q2, alpha) - pq.gamma_sq)
    r7 = abs(level2.c2_from_pq(pq.p2, pq.q2, alpha) - pq.c2) / max(1.0, pq.c2)
    return [
        CheckResult("closed-form q2 relation", r1 <= 1e-6, r1, 1e-6),
        CheckResult("closed-form gamma relation", r4 <= 1e-6, r4, 1e-6),
        CheckResult("closed-form c2 relation", r7 <= 1e-6, r7, 1e-6),
    ]


def _embedding_check(rule: QuadratureRule) -> CheckResult:
    worst = 0.0
    for delta in np.linspace(0.05, 0.45, 5):
        for alpha in np.linspace(0.05, 0.2, 5):
            nu = level1.nu_hat_l1(float(delta))
            gamma = math.sqrt(float(alpha)) / 2.0
            pq = level2.LiftingParams(p2=0.0, q2=0.0, c2=1e-5,
                                      gamma_sq=gamma, nu=nu)
            lifted = level2.psi_rd_l2(pq, float(alpha), float(delta), rule)
            flat = level1.psi_l1_general(nu, gamma, float(delta), float(alpha))
            worst = max(worst, abs(lifted - flat))
    return CheckResult("level-1 embedding (c2 -> 0)", worst <= 1e-5, worst, 1e-5)


def _special_function_checks() -> list[CheckResult]:
    ys = np.linspace(-1.0 + 1e-12, 1.0 - 1e-12, 1000)
    worst_rt = max(abs(erf_fn(erfinv_fn(float(y))) - float(y)) for y in ys)
    grid = [erfinv_fn(float(y)) for y in ys]
    monotone = all(a < b for a, b in zip(grid, grid[1:]))
    return [
        CheckResult("erf/erfinv round trip", worst_rt <= 1e-13, worst_rt, 1e-13),
        CheckResult("erfinv monotonicity", monotone, 0.0 if monotone else 1.0, 0.5),
    ]


def _quadrature_checks(order: int) -> list[CheckResult]:
    out = []
    rule = make_rule(order)
    w_err = abs(float(rule.weights.sum()) - 1.0)
    out.append(CheckResult("quadrature normalization", w_err <= 1e-12, w_err, 1e-12))
    m2 = abs(expect(lambda h: h * h, rule) - 1.0)
    out.append(CheckResult("quadrature second moment", m2 <= 1e-10, m2, 1e-10))
    # panel self-convergence on the stiffest published operating point
    pq = level2.LiftingParams(p2=0.99645, q2=0.99694, c2=16.6192,
                              gamma_sq=0.2153, nu=-2.1252)
    coarse = level2.psi_rd_l2(pq, 0.138186, 0.0167, rule)
    fine = level2.psi_rd_l2(pq, 0.138186, 0.0167, make_rule(min(2 * order, 512)))
    d = abs(coarse - fine)
    out.append(CheckResult("quadrature doubling", d <= 1e-9, d, 1e-9))
    return out


def run_verification(quad_order: int = 80, seed: int = 0,
                     n_grad_points: int = 20,
                     grad_fn: Callable | None = None) -> VerificationReport:
    rule = make_rule(quad_order)
    checks: list[CheckResult] = []
    checks.extend(_special_function_checks())
    checks.extend(_quadrature_checks(quad_order))
    checks.extend(_gradient_checks(rule, seed, n_grad_points, grad_fn))
    checks.extend(_closed_form_checks(rule))
    checks.append(_embedding_check(rule))
    return VerificationReport(checks=tuple(checks))
