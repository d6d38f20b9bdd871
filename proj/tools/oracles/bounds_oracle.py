"""Independent high-precision recomputation of the certificate pipeline.

Prints a JSON object whose values are frozen into tests/support/goldens.hpp.
Run: python3 tools/oracles/bounds_oracle.py
"""
import json

from mpmath import mp, mpf, nsum, fsum, binomial, zeta, inf, pi, coth, ceil, exp, log, quad, findroot

mp.dps = 40


def sobolev_sq(a, gamma):
    a, gamma = mpf(a), mpf(gamma)
    # direct head up to K > a/(2 pi), then the tail k^{-4g} (1 + b/k^2)^{-2g}
    # expanded binomially into Hurwitz zeta values; plain nsum extrapolation is
    # off by 1e-11 to 1e-3 on this series
    K = int(ceil(a / (2 * pi))) + 1
    b = (a / (2 * pi)) ** 2
    head = a ** (-4 * gamma) + 2 * fsum((a**2 + (2 * pi * k) ** 2) ** (-2 * gamma) for k in range(1, K))
    tail = nsum(lambda j: binomial(-2 * gamma, j) * b**j * zeta(4 * gamma + 2 * j, K), [0, inf])
    return head + 2 * (2 * pi) ** (-4 * gamma) * tail


def config(r, m=1, L=2 * pi, alpha=mpf(1) / 2):
    r = mpf(r)
    gmax = mpf(1) / 2 - 1 / (2 * (r - 1))
    gamma = (mpf(1) / 4 + gmax) / 2
    eps = (gmax - gamma) / 2
    a = m * L / 2
    return dict(r=r, L=L, alpha=alpha, a=a, gamma=gamma, eps=eps,
                q=(1 - 2 * gamma) * (r - 1) - 1,
                qp=(1 - 2 * (gamma + eps)) * (r - 1) - 1,
                m_a_sq=m**2 - a**2 / L**2)


def margins(lam, kappa, cfg, Csq, n=None):
    base = (1 - cfg["alpha"]) * cfg["m_a_sq"]
    g, q, L, r = cfg["gamma"], cfg["q"], cfg["L"], cfg["r"]
    kr = kappa * r
    e = (q + 1) / (q * (1 - 2 * g))
    low = base - q / (1 + q) * ((1 + q) * kr) ** (-1 / q) * (3 * lam * Csq * L ** (4 * g - 1)) ** e
    if n is None:
        return low
    qp, ge = cfg["qp"], g + cfg["eps"]
    ep = (qp + 1) / (qp * (1 - 2 * ge))
    inner = 3 * lam * Csq * L ** (4 * g - 1) * (2 * pi * n / L) ** (-4 * cfg["eps"])
    return base - qp / (1 + qp) * ((1 + qp) * kr) ** (-1 / qp) * inner**ep


def certificate(lam, kappa, r):
    lam, kappa = mpf(lam), mpf(kappa)
    cfg = config(r)
    Csq = sobolev_sq(cfg["a"], cfg["gamma"])
    low = margins(lam, kappa, cfg, Csq)
    out = dict(Csq=Csq, low=low)
    if low >= 0:
        out.update(c=0, n=None, R=0, w_sup=0)
    else:
        c = -low
        n = mpf(1)
        # linear search from below is slow for large n; bisect on the monotone margin
        hi = mpf(1)
        while margins(lam, kappa, cfg, Csq, hi) < 0:
            hi *= 2
        lo = hi / 2 if hi > 1 else mpf(0)
        while hi - lo > 1:
            mid = ceil((lo + hi) / 2)
            if margins(lam, kappa, cfg, Csq, mid) >= 0:
                hi = mid
            else:
                lo = mid
        n = hi
        g = cfg["gamma"]
        A = (3 * lam * Csq * cfg["L"] ** (4 * g - 1)) ** (1 / (1 - 2 * g))
        p = 2 / (1 - 2 * g)
        top = 2 * cfg["r"] - 2
        f = lambda R: -A * R**p + kappa * cfg["r"] * R**top - 35 * c
        Rmin = (A * p / (kappa * cfg["r"] * top)) ** (1 / (top - p))
        lo, hi = Rmin, 2 * Rmin
        while f(hi) <= 0:
            lo, hi = hi, 2 * hi
        for _ in range(300):
            mid = (lo + hi) / 2
            if f(mid) >= 0:
                hi = mid
            else:
                lo = mid
        out.update(c=c, n=n, R=hi, w_sup=c * hi, high=margins(lam, kappa, cfg, Csq, n))
    out["log_C_final"] = log(cfg["alpha"]) - 2 * out["w_sup"]
    return out


def witten(lam, kappa, r, eps):
    lam, kappa, r, eps = map(mpf, (lam, kappa, r, eps))
    X = lambda K: 1 - (lam / eps) * K + kappa * K**r
    Kstar = findroot(lambda K: -(lam / eps) + kappa * r * K ** (r - 1), mpf("0.5"))
    return X(Kstar)


def chi(t):
    t = mpf(t)
    if t <= 1:
        return mpf(1)
    if t >= 2:
        return mpf(0)
    return 1 - 30 * quad(lambda x: (1 - x) ** 2 * (2 - x) ** 2, [1, t])


def s(x):
    return None if x is None else float(x)


if __name__ == "__main__":
    res = {
        "sobolev_sq_a1_g03": s(sobolev_sq(1, mpf("0.3"))),
        "sobolev_sq_a2pi_g05_closed": s(pi * coth(pi) / (4 * pi**2)),
        "witten_01_1_10_05": s(witten("0.1", 1, 10, "0.5")),
        "chi_1_5": s(chi("1.5")),
        "chi_1_25": s(chi("1.25")),
    }
    for lam, kappa, r in [(0.1, 1, 6), (100, 1, 6), (0.1, 1, 10), (1000, 1, 10)]:
        c = certificate(lam, kappa, r)
        res[f"cert_{lam:g}_{kappa:g}_{r:g}"] = {k: s(v) for k, v in c.items()}
    print(json.dumps(res, indent=2))
