#!/usr/bin/env python3
"""High-precision reference values for the analytic test suite.

Evaluates every closed form with mpmath at 50 significant digits, straight
from the hyperbolic/trigonometric definitions, and prints the numbers that are
frozen into test_analytics.cpp and test_ensemble.cpp. Rerun after changing
any expected value.
"""
from mpmath import mp, mpf, cosh, cos, sinh, sin, sqrt, exp

mp.dps = 50


def f(x):
    x = mpf(x)
    return mpf(1) if x == 0 else x / (cosh(sqrt(x)) - cos(sqrt(x)))


def g(x):
    x = mpf(x)
    y = sqrt(x)
    return (sinh(y) - sin(y)) / (cosh(y) - cos(y)) / x


def quantum_full(x, fano, q):
    # Gaussian moments of T substituted into the Fano-factor correlation.
    F, q, fx = mpf(fano) - 1, mpf(q), f(x)
    tt = q**2 * (1 + fx)
    t2t = 2 * q**3 * (1 + 2 * fx)
    t2t2 = 4 * q**4 * (1 + 4 * fx + fx**2)
    t1, t2 = q, 2 * q**2
    num = tt + F * 2 * t2t + F**2 * t2t2
    den = t1**2 + 2 * F * t1 * t2 + F**2 * t2**2
    return num / den - 1


def c_two(x, fano, q, l_over_ell):
    return mpf(3) / 2 * mpf(l_over_ell) ** 2 * g(x) * q + 4 * (mpf(fano) - 1) * f(x) * q


def kernel_sq(x):
    s = (1 - 1j) * sqrt(mpf(x)) / 2
    from mpmath import sinh as csinh, fabs
    return abs(s / csinh(s)) ** 2


def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 20)}")


for x in ["1", "16", "0.5", "4", "100"]:
    show(f"f({x})", f(x))
show("f(1e4)", f("1e4"))
for x in ["0.01", "16", "1", "1e-6"]:
    show(f"g({x})", g(x))
show("cn(16)", f(16) ** 2 + 4 * f(16))
show("full(0, 2, 0.01)", quantum_full(0, 2, "0.01"))
show("full(0, 0, 0.01)", quantum_full(0, 0, "0.01"))
show("full(4, 2, 0.01)", quantum_full(4, 2, "0.01"))
for fano in [0, 1, 2]:
    show(f"c_two(16, F={fano}, q=1, L/l=3)", c_two(16, fano, 1, 3))
show("meso(16, q=0.01, L/l=3)", mpf("1e-4") * (1 + f(16)) + mpf(27) / 2 * g(16) * mpf("1e-6"))
show("T2T2/q4 at x=16", 4 * (1 + 4 * f(16) + f(16) ** 2))
show("|h(16)|^2", kernel_sq(16))
show("|h(1)|^2", kernel_sq(1))
