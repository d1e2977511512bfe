"""High-precision reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/specfun_oracles.py
"""
import mpmath as mp

mp.mp.dps = 50


def show(label, z):
    z = mp.mpc(z)
    print(f"{label}: {mp.nstr(z.real, 20)} {mp.nstr(z.imag, 20)}")


def qnorm(nu, mu, x):
    # e^{-i pi mu} Q_nu^mu(x) / Gamma(mu + nu + 1) on x > 1 (type 3 functions)
    return mp.exp(-1j * mp.pi * mu) * mp.legenq(nu, mu, x, type=3) / mp.gamma(mu + nu + 1)


def brute_2f1(a, b, c, x, terms=10000):
    s, t = mp.mpf(0), mp.mpf(1)
    for k in range(terms):
        s += t
        t *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
    return s


show("log_gamma(3.7+2.1i)", mp.loggamma(mp.mpc(3.7, 2.1)))
show("log_gamma(-4.3+0.2i)", mp.loggamma(mp.mpc(-4.3, 0.2)))
show("log_gamma(0.1-25i)", mp.loggamma(mp.mpc(0.1, -25)))
a, b, c = mp.mpc(0.5, 2), mp.mpf(1.25), mp.mpc(2.5, 2)
show("2F1 brute(0.5+2i,1.25;2.5+2i;0.9)", brute_2f1(a, b, c, mp.mpf(0.9)))
show("2F1 mpmath(0.5+2i,1.25;2.5+2i;0.9)", mp.hyp2f1(a, b, c, 0.9))
show("2F1(1.5-1i,0.25+3i;1.75;0.97)", mp.hyp2f1(mp.mpc(1.5, -1), mp.mpc(0.25, 3), 1.75, 0.97))
show("P(-1/2+3i, -1/2, cosh 2)", mp.legenp(mp.mpc(-0.5, 3), -0.5, mp.cosh(2), type=3))
show("P(0.3+1.1i, -2, 1.7)", mp.legenp(mp.mpc(0.3, 1.1), -2, 1.7, type=3))
show("P(-0.5+12i, -1.5, cosh 4)", mp.legenp(mp.mpc(-0.5, 12), -1.5, mp.cosh(4), type=3))
show("Qn(0.3+1.7i, 1, 1.5)", qnorm(mp.mpc(0.3, 1.7), 1, 1.5))
show("Qn(-2.2+0.5i, 2.5, 5)", qnorm(mp.mpc(-2.2, 0.5), 2.5, 5))
show("Qn(-0.5+20i, 0.5, cosh 1)", qnorm(mp.mpc(-0.5, 20), 0.5, mp.cosh(1)))
show("Qn(1.25-3i, 3, 2.9)", qnorm(mp.mpc(1.25, -3), 3, 2.9))
show("Qn(-4.5-0.3i, 0, 3.5)", qnorm(mp.mpc(-4.5, -0.3), 0, 3.5))

# Bump preset V = exp(-1/(1 - r^2)) on r < 1 in H^3: 4 pi int V sinh^2 r dr.
bump = lambda r: mp.exp(-1 / (1 - r * r)) if r < 1 else mp.mpf(0)
print("bump_int_n2:", mp.nstr(4 * mp.pi * mp.quad(lambda r: bump(r) * mp.sinh(r) ** 2, [0, 1]), 20))
print("bump_int2_n2:", mp.nstr(4 * mp.pi * mp.quad(lambda r: bump(r) ** 2 * mp.sinh(r) ** 2, [0, 1]), 20))
print("bump_int_n1:", mp.nstr(2 * mp.pi * mp.quad(lambda r: bump(r) * mp.sinh(r), [0, 1]), 20))
