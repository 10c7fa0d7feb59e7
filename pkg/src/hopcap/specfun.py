"""Special functions and standard-normal quadrature.

Everything downstream reduces Gaussian expectations E[f(h)], h ~ N(0, 1),
to weighted sums over a fixed rule: E[f(h)] ~ sum_i w_i f(h_i).

Two Hermite-type constructions are used. Odd orders and order 2 are plain
Gauss-Hermite rules rewritten in the standard-normal measure. Even orders
>= 4 pair two Gauss rules for the half-normal weight on (0, inf), mirrored
about 0: each half integrates functions analytic on its half-line with
Gauss accuracy, so integrands with a kink at the origin (the max(.,0)
terms of the dual, at the symmetric point) are handled exactly rather
than at the slow algebraic rate of a plain Hermite rule.

The inverse error function uses a rational seed polished with Newton steps;
for |y| > 0.99 the seed and polish switch to the complementary function so
relative accuracy survives into the tail (capacity searches need arguments
as close to 1 as 1 - 1e-5).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_hermite

from .errors import DomainError, EvaluationError

__all__ = ["QuadratureRule", "erf_fn", "erfinv_fn", "make_rule", "expect"]

MAX_RULE_ORDER = 512

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights realizing E[f(h)] for a standard normal h."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.order < 2:
            raise DomainError("quadrature order must be >= 2")
        if self.nodes.shape != (self.order,) or self.weights.shape != (self.order,):
            raise DomainError("nodes/weights must both have shape (order,)")


def erf_fn(x: float) -> float:
    """Error function on finite real inputs."""
    if not math.isfinite(x):
        raise DomainError(f"erf_fn requires finite x, got {x!r}")
    return math.erf(x)


def erfinv_fn(y: float) -> float:
    """Inverse error function: the x with erf(x) = y, for y in (-1, 1)."""
    if not (-1.0 < y < 1.0):
        raise DomainError(f"erfinv_fn requires |y| < 1, got {y!r}")
    if y == 0.0:
        return 0.0
    a = abs(y)
    if a <= 0.99:
        # Winitzki rational seed (~2e-3 relative), then Newton on erf
        aw = 0.147
        ln1 = math.log1p(-y * y)
        u = 2.0 / (math.pi * aw) + ln1 / 2.0
        x = math.copysign(math.sqrt(math.sqrt(u * u - ln1 / aw) - u), y)
        for _ in range(4):
            x -= (math.erf(x) - y) * SQRT_PI / 2.0 * math.exp(x * x)
        return x
    # tail branch: solve erfc(x) = c with c = 1 - |y| in (0, 0.01];
    # seed from erfc(x) ~ exp(-x^2)/(x sqrt(pi)), then Newton on erfc
    c = 1.0 - a
    t = math.sqrt(-math.log(c))
    for _ in range(3):
        t = math.sqrt(-math.log(c) - math.log(t * SQRT_PI))
    x = t
    for _ in range(4):
        x += (math.erfc(x) - c) * SQRT_PI / 2.0 * math.exp(min(x * x, 700.0))
    return math.copysign(x, y)


def _halfnormal_gauss(n_half: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss rule for the weight sqrt(2/pi) exp(-x^2/2) on (0, inf), built by
    # the discretized Stieltjes procedure (orthonormal three-term recurrence
    # on a fine Gauss-Legendre grid), then Golub-Welsch.
    upper = math.sqrt(2.0 * (2 * n_half + 1)) + 5.0
    npts = max(4000, 12 * n_half)
    xs, ws = leggauss(npts)
    t = 0.5 * (xs + 1.0) * upper
    wt = 0.5 * upper * ws * math.sqrt(2.0 / math.pi) * np.exp(-0.5 * t * t)
    beta0 = wt.sum()
    alpha = np.zeros(n_half)
    offdiag = np.zeros(max(n_half - 1, 0))
    p_prev = np.zeros_like(t)
    p = np.ones_like(t) / math.sqrt(beta0)
    for k in range(n_half):
        alpha[k] = float(np.sum(wt * t * p * p))
        if k + 1 < n_half:
            q = (t - alpha[k]) * p - (offdiag[k - 1] if k > 0 else 0.0) * p_prev
            offdiag[k] = math.sqrt(float(np.sum(wt * q * q)))
            p_prev, p = p, q / offdiag[k]
    jacobi = np.diag(alpha) + np.diag(offdiag, 1) + np.diag(offdiag, -1)
    nodes, vecs = np.linalg.eigh(jacobi)
    weights = beta0 * vecs[0, :] ** 2
    return nodes, weights


@lru_cache(maxsize=64)
def _rule_arrays(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order >= 4 and order % 2 == 0:
        xs, ws = _halfnormal_gauss(order // 2)
        nodes = np.concatenate([-xs[::-1], xs])
        weights = np.concatenate([ws[::-1], ws]) / 2.0
    else:
        x, w = roots_hermite(order)
        nodes = SQRT2 * x
        weights = w / SQRT_PI
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def make_rule(order: int) -> QuadratureRule:
    """Hermite-type rule in the standard-normal measure (see module doc)."""
    if order < 2:
        raise DomainError("order must be >= 2")
    if order > MAX_RULE_ORDER:
        raise DomainError(f"order {order} > {MAX_RULE_ORDER}: weights underflow")
    nodes, weights = _rule_arrays(int(order))
    return QuadratureRule(order=int(order), nodes=nodes, weights=weights)


def expect(f: Callable[[float], float] | Callable[[np.ndarray], np.ndarray],
           rule: QuadratureRule) -> float:
    """E[f(h)] under the rule; f may be scalar or numpy-vectorized."""
    try:
        vals = np.asarray(f(rule.nodes), dtype=float)
    except (TypeError, ValueError):
        vals = np.array([float(f(t)) for t in rule.nodes])
    if vals.shape != rule.nodes.shape:
        vals = np.broadcast_to(vals, rule.nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("integrand not finite at a quadrature node")
    return float(np.dot(rule.weights, vals))
