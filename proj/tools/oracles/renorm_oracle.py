"""Oracle for the mean self-intersection m_eps(t) of the standard bump.

m_eps(t) = (1/2pi) int_0^inf |phihat(eps k)|^2 k [t/a - (1 - e^{-a t})/a^2] dk,
a = k^2/2, obtained by doing the time integral of (t-r) e^{-r k^2/2} exactly.
"""
import numpy as np
from scipy import integrate, special

C = 2.143565775792236601


def bump(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    m = r < 1
    out[m] = C * np.exp(-1.0 / (1.0 - r[m] ** 2))
    return out


# Hankel transform on [0,1] with dense Gauss-Legendre
xg, wg = np.polynomial.legendre.leggauss(4000)
rho = 0.5 * (xg + 1)
wrho = 0.5 * wg
brho = bump(rho)


def phihat(k):
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty_like(k)
    for i in range(0, k.size, 2000):
        kk = k[i:i + 2000]
        out[i:i + 2000] = 2 * np.pi * (special.j0(np.outer(kk, rho)) * (brho * rho)) @ wrho
    return out


KAP = np.linspace(0, 400, 80001)
PH2 = phihat(KAP) ** 2


def m_eps(eps, t):
    # integrate in kappa = eps k on a fine grid
    kap, ph2 = KAP, PH2
    k = kap / eps
    a = k * k / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(a * t > 1e-6, t / a - (1 - np.exp(-a * t)) / a ** 2, t * t / 2 - a * t ** 3 / 6)
    f = ph2 * k * g / eps  # dk = dkappa/eps
    return integrate.simpson(f, x=kap) / (2 * np.pi)


if __name__ == "__main__":
    print("phihat(0) =", phihat(0.0)[0])
    kap, ph2 = KAP, PH2
    print("R1(0) fourier =", integrate.simpson(ph2 * kap, x=kap) / (2 * np.pi))
    print("tail |phihat|^2 at 100,200,400:", phihat(np.array([100.0, 200, 400])) ** 2)
    ts = np.array([0.02, 0.05, 0.1, 0.2, 0.3, 0.5])
    for eps in [0.1, 0.05, 0.025, 0.0125, 0.00625]:
        ce = np.log(1 / eps) / np.pi
        vals = np.array([m_eps(eps, t) - ce * t for t in ts])
        A = np.stack([ts, ts * np.log(ts)], axis=1)
        sol, *_ = np.linalg.lstsq(A, vals, rcond=None)
        print(eps, "m-Ct:", vals, "mu1,mu2:", sol, "resid", np.max(np.abs(A @ sol - vals)))
