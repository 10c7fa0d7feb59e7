"""Scalar and small-system nonlinear solving utilities.

find_root is a Brent-style bracketing method (bisection accelerated by
inverse quadratic interpolation), maximize_scalar a golden-section search,
and solve_damped a damped Newton iteration with a finite-difference
Jacobian and backtracking, sized for the handful-of-unknowns stationarity
systems that arise here. All routines are deterministic: the same inputs
produce bitwise-identical reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, EvaluationError, InfeasibleRegionError

__all__ = ["SolverConfig", "SolveReport", "find_root", "maximize_scalar",
           "solve_damped", "fd_check"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-12
    max_iter: int = 200
    damping: float = 1.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must be in (0, 1]")


@dataclass
class SolveReport:
    value: float | np.ndarray
    residual: float
    iterations: int
    converged: bool
    message: str = ""
    extra: dict = field(default_factory=dict)


def find_root(f: Callable[[float], float], lo: float, hi: float,
              cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign."""
    if not lo < hi:
        raise BracketError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return SolveReport(value=a, residual=0.0, iterations=0, converged=True)
    if fb == 0.0:
        return SolveReport(value=b, residual=0.0, iterations=0, converged=True)
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={fa:.3e}, {fb:.3e}")
    c, fc = a, fa
    d = e = b - a
    eps = np.finfo(float).eps
    for it in range(1, cfg.max_iter + 1):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * eps * abs(b) + 0.5 * cfg.rel_tol * max(abs(b), 1.0)
        m = 0.5 * (c - b)
        if abs(fb) <= cfg.abs_tol or abs(m) <= tol:
            return SolveReport(value=b, residual=abs(fb), iterations=it,
                               converged=True)
        if abs(e) < tol or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, m)
        fb = f(b)
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
    return SolveReport(value=b, residual=abs(fb), iterations=cfg.max_iter,
                       converged=False, message="max_iter exhausted")


def maximize_scalar(f: Callable[[float], float], lo: float, hi: float,
                    cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Golden-section maximum of a unimodal f on [lo, hi]."""
    if not lo < hi:
        raise BracketError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > cfg.rel_tol and it < cfg.max_iter:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        it += 1
    x = x1 if f1 >= f2 else x2
    fx = max(f1, f2)
    return SolveReport(value=x, residual=b - a, iterations=it,
                       converged=b - a <= cfg.rel_tol,
                       extra={"max": fx})


def _fd_jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                 fx: np.ndarray, scale: np.ndarray) -> np.ndarray:
    n = x.size
    jac = np.empty((fx.size, n))
    for j in range(n):
        h = 1e-7 * scale[j]
        xp = x.copy(); xp[j] += h
        xm = x.copy(); xm[j] -= h
        jac[:, j] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * h)
    return jac


def solve_damped(residual: Callable[[np.ndarray], np.ndarray],
                 init: Sequence[float] | np.ndarray,
                 cfg: SolverConfig = SolverConfig(abs_tol=1e-8, damping=0.5),
                 step_scale: Sequence[float] | None = None) -> SolveReport:
    """Drive residual(x) to zero by damped Newton with an FD Jacobian.

    Steps that raise EvaluationError/InfeasibleRegionError or increase the
    residual norm are backtracked (halved up to 25 times).  Divergence (the
    residual growing 10x over a 20-iteration window) aborts with a
    non-convergence report carrying the last iterate.
    """
    x = np.array(init, dtype=float)
    scale = (np.array(step_scale, dtype=float) if step_scale is not None
             else np.maximum(np.abs(x), 1e-3))
    fx = np.asarray(residual(x), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise InfeasibleRegionError("residual not finite at the initial point")
    norm = float(np.max(np.abs(fx)))
    history = [norm]

    def try_step(step: np.ndarray) -> bool:
        nonlocal x, fx, norm
        s = step.copy()
        for _ in range(25):
            try:
                f_new = np.asarray(residual(x + s), dtype=float)
            except (EvaluationError, InfeasibleRegionError):
                s *= 0.5
                continue
            n_new = float(np.max(np.abs(f_new)))
            if np.all(np.isfinite(f_new)) and (n_new < norm or n_new <= cfg.abs_tol):
                x, fx, norm = x + s, f_new, n_new
                return True
            s *= 0.5
        return False

    for it in range(1, cfg.max_iter + 1):
        if norm <= cfg.abs_tol:
            return SolveReport(value=x, residual=norm, iterations=it - 1,
                               converged=True)
        try:
            jac = _fd_jacobian(residual, x, fx, scale)
            step = cfg.damping * np.linalg.solve(jac, -fx)
        except (np.linalg.LinAlgError, EvaluationError, InfeasibleRegionError):
            step = None
        accepted = step is not None and try_step(step)
        if not accepted:
            # derivative-free fallback: damped residual step in scaled units
            accepted = try_step(-cfg.damping * fx * scale / max(norm, 1e-30))
        if not accepted:
            return SolveReport(value=x, residual=norm, iterations=it,
                               converged=False, message="stalled")
        history.append(norm)
        if len(history) > 20 and norm > 10.0 * history[-21]:
            return SolveReport(value=x, residual=norm, iterations=it,
                               converged=False, message="diverging")
    converged = norm <= cfg.abs_tol
    return SolveReport(value=x, residual=norm, iterations=cfg.max_iter,
                       converged=converged,
                       message="" if converged else "max_iter exhausted")


def fd_check(f: Callable[[np.ndarray], float],
             grad: Callable[[np.ndarray], np.ndarray],
             point: Sequence[float] | np.ndarray, step: float) -> float:
    """Max relative error of grad vs central differences of f at point."""
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.array(point, dtype=float)
    g = np.asarray(grad(x), dtype=float)
    worst = 0.0
    for j in range(x.size):
        xp = x.copy(); xp[j] += step
        xm = x.copy(); xm[j] -= step
        fd = (f(xp) - f(xm)) / (2.0 * step)
        denom = max(abs(fd), abs(g[j]), 1e-10)
        worst = max(worst, abs(fd - g[j]) / denom)
    return worst
