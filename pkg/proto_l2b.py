import sys; sys.path.insert(0, "src")
import math
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import log_ndtr
from functools import lru_cache
from hopcap.level1 import nu_hat_l1

S2PI = math.sqrt(2 * math.pi)
LOG_S2PI = 0.5 * math.log(2 * math.pi)


@lru_cache(maxsize=16)
def _gl(n):
    return leggauss(n)


def panel_nodes(q2, nu, n_side):
    """Gauss-Legendre x normal-density panels split at the branch crossover."""
    hstar = nu / math.sqrt(q2)
    lo = min(-9.0, hstar - 9.0)
    hi = max(9.0, hstar + 9.0)
    x, w = _gl(n_side)
    nodes = []
    weights = []
    for a, b in ((lo, hstar), (hstar, hi)):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        t = mid + half * x
        nodes.append(t)
        weights.append(half * w * np.exp(-0.5 * t * t) / S2PI)
    return np.concatenate(nodes), np.concatenate(weights)


def log_phi(t):
    return -0.5 * t * t - LOG_S2PI


def inner_logs(h, q2, c2, nu):
    sq = math.sqrt(q2)
    s1q = math.sqrt(1.0 - q2)
    b = (sq * h - nu) / s1q
    a = c2 * s1q
    lu = c2 * sq * h + 0.5 * a * a + log_ndtr(a + b)
    ld = -c2 * sq * h + 2 * c2 * nu + 0.5 * a * a + log_ndtr(a - b)
    return lu, ld, np.logaddexp(lu, ld), a, b


def psi(p2, q2, c2, g, nu, alpha, delta, n_side=80):
    D = 2 * g - c2 * (1 - p2)
    if D <= 0 or g <= 0 or c2 <= 0:
        raise ArithmeticError("guard")
    h, w = panel_nodes(q2, nu, n_side)
    lu, ld, lt, a, b = inner_logs(h, q2, c2, nu)
    per = float(np.dot(w, lt)) / c2
    sph = -0.5 / c2 * math.log(D / (2 * g)) + p2 / (2 * D)
    return -0.5 * (1 - p2 * q2) * c2 - 2 * nu * delta + per + g + alpha * sph


def grad(p2, q2, c2, g, nu, alpha, delta, n_side=80):
    h, w = panel_nodes(q2, nu, n_side)
    sq = math.sqrt(q2)
    s1q = math.sqrt(1.0 - q2)
    D = 2 * g - c2 * (1 - p2)
    lu, ld, lt, a, b = inner_logs(h, q2, c2, nu)
    ru = np.exp(lu - lt)
    rd = np.exp(ld - lt)
    pu = c2 * sq * h + 0.5 * a * a
    pd = -c2 * sq * h + 2 * c2 * nu + 0.5 * a * a
    gu = np.exp(pu + log_phi(a + b) - lt)
    gd = np.exp(pd + log_phi(a - b) - lt)
    dp = c2 * (0.5 * q2 - alpha * p2 / (2 * D * D))
    dg = 1.0 + alpha * (-(1 - p2) / (2 * g * D) - p2 / (D * D))
    da_q = -c2 / (2 * s1q)
    db_q = (h - sq * nu) / (2 * sq * (1 - q2) ** 1.5)
    au_q = c2 * h / (2 * sq) + a * da_q
    ad_q = -c2 * h / (2 * sq) + a * da_q
    dq = 0.5 * p2 * c2 + float(np.dot(w, au_q * ru + gu * (da_q + db_q)
                                      + ad_q * rd + gd * (da_q - db_q))) / c2
    da_c = s1q
    au_c = sq * h + a * da_c
    ad_c = -sq * h + 2 * nu + a * da_c
    Elog = float(np.dot(w, lt))
    sph_c = (0.5 / (c2 * c2) * math.log(D / (2 * g))
             + (1 - p2) / (2 * c2 * D) + p2 * (1 - p2) / (2 * D * D))
    dc = (-0.5 * (1 - p2 * q2) - Elog / (c2 * c2)
          + float(np.dot(w, au_c * ru + gu * da_c + ad_c * rd + gd * da_c)) / c2
          + alpha * sph_c)
    db_n = -1.0 / s1q
    dn = -2 * delta + float(np.dot(w, gu * db_n + 2 * c2 * rd - gd * db_n)) / c2
    return np.array([dp, dq, dc, dg, dn])


def gamma_from_pq(p2, q2, alpha):
    return 0.5 * (1 - p2) / (1 - q2) * math.sqrt(q2 * alpha / p2)


def c2_from_pq(p2, q2, alpha):
    return (math.sqrt(q2 * alpha / p2) / (1 - q2)
            - math.sqrt(p2 * alpha / q2) / (1 - p2))


def p2_from_c2q2(c2, q2, alpha):
    lo, hi = 1e-15, q2 - 1e-15
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if c2_from_pq(mid, q2, alpha) - c2 > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def make_res(alpha, delta, n_side=80):
    def residual3(x):
        c2, q2, nu = x
        if not (1e-12 < q2 < 1 - 1e-13 and c2 > 0):
            raise ArithmeticError("box")
        p2 = p2_from_c2q2(c2, q2, alpha)
        g = gamma_from_pq(p2, q2, alpha)
        full = grad(p2, q2, c2, g, nu, alpha, delta, n_side)
        return full[np.array([1, 2, 4])], p2, g
    return residual3


def newton3(res, x0, tol=1e-10, itmax=80):
    x = np.array(x0, float)
    fx = res(x)[0]
    for it in range(itmax):
        n = np.max(np.abs(fx))
        if n <= tol:
            fx, p2, g = res(x)
            return x, p2, g, n, it, True
        J = np.zeros((3, 3))
        for j in range(3):
            e = 1e-6 * max(abs(x[j]), 1e-3)
            xp = x.copy(); xp[j] += e
            xm = x.copy(); xm[j] -= e
            J[:, j] = (res(xp)[0] - res(xm)[0]) / (2 * e)
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            break
        s = 1.0
        while s > 1e-12:
            try:
                xn = x + s * step
                fn = res(xn)[0]
                if np.max(np.abs(fn)) < n:
                    x, fx = xn, fn
                    break
            except ArithmeticError:
                pass
            s *= 0.5
        else:
            break
    fx, p2, g = res(x)
    n = np.max(np.abs(fx))
    return x, p2, g, n, itmax, n <= tol


if __name__ == "__main__":
    import time
    # quadrature self-convergence at Table-1 params
    for n_side in (40, 64, 80, 160):
        h, w = panel_nodes(0.99694, -2.1252, n_side)
        lu, ld, lt, a, b = inner_logs(h, 0.99694, 16.6192, -2.1252)
        print(f"panels n={n_side}: E log fzt = {np.dot(w, lt):.14f}")

    for (alpha, delta, label, tgt) in [
        (0.138186, 0.0167, "Table1", (0.99645, 0.99694, 16.6192, 0.2153, -2.1252)),
        (0.12979, 0.0347, "Table2", (0.98806, 0.99067, 8.54157, 0.2309, -1.8111)),
        (0.056141, 0.5, "Table4", (0.5625, 0.7314, 0.5308, 0.2200, 0.0)),
    ]:
        res = make_res(alpha, delta)
        t0 = time.time()
        x0 = (tgt[2], tgt[1], tgt[4])
        x, p2, g, rn, its, ok = newton3(res, x0)
        print(f"{label} from-table: ok={ok} res={rn:.1e} "
              f"p2={p2:.6f} q2={x[1]:.6f} c2={x[0]:.5f} g={g:.6f} nu={x[2]:.6f} "
              f"({(time.time()-t0)*1e3:.0f}ms)")
        u0, r0 = 3.5e-3, 0.86
        p0, q0 = 1 - u0, 1 - r0 * u0
        x0b = (c2_from_pq(p0, q0, alpha), q0, nu_hat_l1(delta) if delta < 0.5 else 0.0)
        x, p2, g, rn, its, ok = newton3(res, x0b)
        print(f"{label} from-L1   : ok={ok} res={rn:.1e} "
              f"p2={p2:.6f} q2={x[1]:.6f} c2={x[0]:.5f} g={g:.6f} nu={x[2]:.6f}")
