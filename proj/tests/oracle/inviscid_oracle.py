"""Independent high-precision values for the inviscid cell problem (mpmath, 30 digits).

Canonical frame: gamma = 1, max v = 0, m = mu.  S_H(y) = sqrt((H - v(y))^2 - 1).
  mu_star          = int_0^1 S_1
  unique regime    : int_0^1 S_H = m, H > 1
  turning point    : int_a^x S_1 - int_x^{a+1} S_1 = m
Run:  python3 tests/oracle/inviscid_oracle.py
The printed numbers are frozen into tests/test_inviscid.cpp.
"""
from mpmath import mp, mpf, cos, sin, pi, sqrt, quad, findroot

mp.dps = 30

flows = {
    "single-well": lambda y: cos(2 * pi * y) - 1,
    "two-max-distinct": lambda y: -sin(2 * pi * y) ** 2 * (1 + cos(2 * pi * y) / 2),
}
breaks = {"single-well": [0, 1], "two-max-distinct": [0, mpf(1) / 2, 1]}


def S(v, H):
    return lambda y: sqrt((H - v(y)) ** 2 - 1)


def integral(f, a, b, pts):
    nodes = [a] + [p for p in pts if a < p < b] + [b]
    return quad(f, nodes)


for name, v in flows.items():
    pts = []
    for k in range(-1, 3):
        pts += [p + k for p in breaks[name]]
    pts = sorted(set(pts))
    mu_star = integral(S(v, 1), 0, 1, pts)
    print(f"{name}: mu_star = {mp.nstr(mu_star, 20)}")
    m = 2 * mu_star
    H0 = findroot(lambda H: integral(S(v, H), 0, 1, pts) - m, mpf("1.5"))
    print(f"{name}: H0(mu = 2 mu_star) = {mp.nstr(H0, 20)}")
    for a in breaks[name][:-1]:
        g = lambda x: integral(S(v, 1), a, x, pts) - integral(S(v, 1), x, a + 1, pts) - mpf("0.1")
        x = findroot(g, a + mpf("0.5"))
        print(f"{name}: x_mu(anchor {a}, mu = 0.1) = {mp.nstr(x, 20)}")

print("1 + 2/pi =", mp.nstr(1 + 2 / pi, 20))
