import sys; sys.path.insert(0, "src")
import math
import numpy as np
from scipy.special import log_ndtr
from hopcap.specfun import make_rule, erfinv_fn
from hopcap.level1 import nu_hat_l1

S2PI = math.sqrt(2 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def log_phi(t):
    return -0.5 * t * t - LOG_SQRT_2PI


def inner_logs(h, q2, c2, nu):
    sq = math.sqrt(q2)
    s1q = math.sqrt(1.0 - q2)
    b = (sq * h - nu) / s1q
    a = c2 * s1q
    lu = c2 * sq * h + 0.5 * a * a + log_ndtr(a + b)
    ld = -c2 * sq * h + 2 * c2 * nu + 0.5 * a * a + log_ndtr(a - b)
    lt = np.logaddexp(lu, ld)
    return lu, ld, lt, a, b


def psi(p2, q2, c2, g, nu, alpha, delta, rule):
    D = 2 * g - c2 * (1 - p2)
    if D <= 0 or g <= 0 or c2 <= 0:
        raise ArithmeticError("guard")
    lu, ld, lt, a, b = inner_logs(rule.nodes, q2, c2, nu)
    per = float(np.dot(rule.weights, lt)) / c2
    sph = -0.5 / c2 * math.log(D / (2 * g)) + p2 / (2 * D)
    return -0.5 * (1 - p2 * q2) * c2 - 2 * nu * delta + per + g + alpha * sph


def grad(p2, q2, c2, g, nu, alpha, delta, rule):
    h = rule.nodes
    w = rule.weights
    sq = math.sqrt(q2)
    s1q = math.sqrt(1.0 - q2)
    D = 2 * g - c2 * (1 - p2)
    lu, ld, lt, a, b = inner_logs(h, q2, c2, nu)
    ru = np.exp(lu - lt)          # f_zu / f_zt
    rd = np.exp(ld - lt)
    # phi-hazard style pieces: e^{P_u} phi(a+b) / f_zt  etc.
    pu = c2 * sq * h + 0.5 * a * a
    pd = -c2 * sq * h + 2 * c2 * nu + 0.5 * a * a
    gu = np.exp(pu + log_phi(a + b) - lt)
    gd = np.exp(pd + log_phi(a - b) - lt)

    # p2
    dp = c2 * (0.5 * q2 - alpha * p2 / (2 * D * D))
    # gamma
    dg = 1.0 + alpha * (-(1 - p2) / (2 * g * D) - p2 / (D * D))
    # q2: da/dq2, db/dq2
    da_q = -c2 / (2 * s1q)
    db_q = (h - sq * nu) / (2 * sq * (1 - q2) ** 1.5)
    au_q = c2 * h / (2 * sq) + a * da_q
    ad_q = -c2 * h / (2 * sq) + a * da_q
    ratio_q = au_q * ru + gu * (da_q + db_q) + ad_q * rd + gd * (da_q - db_q)
    dq = 0.5 * p2 * c2 + float(np.dot(w, ratio_q)) / c2
    # c2
    da_c = s1q
    au_c = sq * h + a * da_c
    ad_c = -sq * h + 2 * nu + a * da_c
    ratio_c = au_c * ru + gu * da_c + ad_c * rd + gd * da_c
    Elog = float(np.dot(w, lt))
    sph_c = (0.5 / (c2 * c2) * math.log(D / (2 * g))
             + (1 - p2) / (2 * c2 * D) + p2 * (1 - p2) / (2 * D * D))
    dc = (-0.5 * (1 - p2 * q2) - Elog / (c2 * c2)
          + float(np.dot(w, ratio_c)) / c2 + alpha * sph_c)
    # nu
    db_n = -1.0 / s1q
    ratio_n = gu * db_n + 2 * c2 * rd + gd * (-db_n)
    dn = -2 * delta + float(np.dot(w, ratio_n)) / c2
    return np.array([dp, dq, dc, dg, dn])


def gamma_from_pq(p2, q2, alpha):
    return 0.5 * (1 - p2) / (1 - q2) * math.sqrt(q2 * alpha / p2)


def c2_from_pq(p2, q2, alpha):
    return (math.sqrt(q2 * alpha / p2) / (1 - q2)
            - math.sqrt(p2 * alpha / q2) / (1 - p2))


# --- FD check of the gradient at a representative interior point
rule = make_rule(80)
pt = (0.9, 0.95, 3.0, 0.3, -1.5)
alpha, delta = 0.13, 0.03
g_an = grad(*pt, alpha, delta, rule)
g_fd = np.zeros(5)
for j in range(5):
    e = 1e-6
    pp = list(pt); pp[j] += e
    pm = list(pt); pm[j] -= e
    g_fd[j] = (psi(*pp, alpha, delta, rule) - psi(*pm, alpha, delta, rule)) / (2 * e)
print("grad analytic:", g_an)
print("grad fd      :", g_fd)
print("rel err      :", np.abs(g_an - g_fd) / np.maximum(np.abs(g_fd), 1e-10))


# --- reduced residual in (p2, q2, nu)
def residual3(x, alpha, delta, rule):
    p2, q2, nu = x
    if not (1e-12 < p2 < 1 - 1e-12 and 1e-12 < q2 < 1 - 1e-12 and q2 > p2):
        raise ArithmeticError("box")
    g = gamma_from_pq(p2, q2, alpha)
    c2 = c2_from_pq(p2, q2, alpha)
    if c2 <= 0:
        raise ArithmeticError("c2<=0")
    full = grad(p2, q2, c2, g, nu, alpha, delta, rule)
    return full[np.array([1, 2, 4])]  # q2-, c2-, nu- residuals


def solve3(alpha, delta, x0, rule, damping=1.0, tol=1e-9, itmax=200):
    x = np.array(x0, float)
    fx = residual3(x, alpha, delta, rule)
    for it in range(itmax):
        n = np.max(np.abs(fx))
        if n <= tol:
            return x, n, it, True
        J = np.zeros((3, 3))
        for j in range(3):
            e = 1e-8 * max(abs(x[j]), 1e-4) * (50 if j < 2 else 1)
            xp = x.copy(); xp[j] += e
            xm = x.copy(); xm[j] -= e
            J[:, j] = (residual3(xp, alpha, delta, rule) - residual3(xm, alpha, delta, rule)) / (2 * e)
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            return x, n, it, False
        s = damping
        for _ in range(30):
            try:
                xn = x + s * step
                fn = residual3(xn, alpha, delta, rule)
                if np.max(np.abs(fn)) < n:
                    x, fx = xn, fn
                    break
            except ArithmeticError:
                pass
            s *= 0.5
        else:
            return x, n, it, False
    return x, np.max(np.abs(fx)), itmax, False


# --- Table 1 check: alpha=0.138186, delta=0.0167
alpha, delta = 0.138186, 0.0167
nu0 = nu_hat_l1(delta)
print("\nlevel-1 nu at 0.0167:", nu0)
for u0, r0 in [(3.5e-3, 0.86), (1e-2, 0.8), (2e-3, 0.9)]:
    x0 = (1 - u0, 1 - r0 * u0, nu0)
    try:
        x, res, its, ok = solve3(alpha, delta, x0, rule)
        p2, q2, nu = x
        print(f"start u={u0}, ratio={r0}: ok={ok} its={its} res={res:.2e} -> p2={p2:.6f} q2={q2:.6f} c2={c2_from_pq(p2,q2,alpha):.5f} g={gamma_from_pq(p2,q2,alpha):.5f} nu={nu:.5f}")
        print("   psi =", psi(p2, q2, c2_from_pq(p2, q2, alpha), gamma_from_pq(p2, q2, alpha), nu, alpha, delta, rule),
              " target -(1-2d)/nu =", -(1 - 2 * delta) / nu)
    except Exception as ex:
        print(f"start u={u0}: FAILED {ex}")
