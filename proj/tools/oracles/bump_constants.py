"""High-precision oracle values for the standard bump mollifier.

Prints the frozen constants used by the C++ tests. Run with mpmath installed.
"""
import mpmath as mp

mp.mp.dps = 40


def bump(r):
    return mp.e ** (-1 / (1 - r * r)) if r < 1 else mp.mpf(0)


mass = 2 * mp.pi * mp.quad(lambda r: r * bump(r), [0, 0.5, 0.9, 0.99, 1])
c = 1 / mass
l2 = 2 * mp.pi * mp.quad(lambda r: r * (c * bump(r)) ** 2, [0, 0.5, 0.9, 0.99, 1])
second = mp.pi * mp.quad(lambda r: r ** 3 * c * bump(r), [0, 0.5, 0.9, 0.99, 1])
print("bump_normalization =", mp.nstr(c, 20))
print("bump_l2_norm_sq    =", mp.nstr(l2, 20))
print("bump_var_per_coord =", mp.nstr(second, 20))
print("log(10)/pi         =", mp.nstr(mp.log(10) / mp.pi, 20))
print("ln2/pi             =", mp.nstr(mp.log(2) / mp.pi, 20))
print("1/(2pi)            =", mp.nstr(1 / (2 * mp.pi), 20))
