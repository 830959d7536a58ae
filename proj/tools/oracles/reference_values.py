#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Everything here is computed from closed forms (root formulas, discrete cosine
eigenvalues, 2x2 eigensolves) without touching the C++ implementation. The
printed constants are frozen into tests/ as expected values.
"""
import numpy as np

F = "{:.17g}"


def p(c, u):
    c1, c2, c3 = c
    return c1 * u + c2 * u**2 + c3 * u**3


def dp(c, u):
    c1, c2, c3 = c
    return c1 + 2 * c2 * u + 3 * c3 * u**2


def show(name, val):
    if np.iscomplexobj(val) and np.ndim(val) == 0:
        print(f"{name} = {F.format(val.real)} {'+' if val.imag >= 0 else '-'} {F.format(abs(val.imag))}i")
    elif np.ndim(val) == 0:
        print(f"{name} = {F.format(float(val))}")
    else:
        print(f"{name} = [{', '.join(F.format(float(x)) for x in np.asarray(val).ravel())}]")


def line_intersections(c, alpha, beta):
    """Nonnegative roots of p(u) = (alpha/beta) u: 0 and the quadratic pair."""
    c1, c2, c3 = c
    # c3 u^2 + c2 u + (c1 - alpha/beta) = 0
    disc = c2**2 - 4 * c3 * (c1 - alpha / beta)
    r = np.sqrt(disc)
    return 0.0, (-c2 - r) / (2 * c3), (-c2 + r) / (2 * c3)


def turning_points(c):
    """Roots of p'(u) = 0 (local max u_H < local min u_T for an S-shaped cubic)."""
    c1, c2, c3 = c
    disc = c2**2 - 3 * c1 * c3
    r = np.sqrt(disc)
    return (-c2 - r) / (3 * c3), (-c2 + r) / (3 * c3)


def hysteresis_block(c, alpha, beta, u):
    return np.array([[-dp(c, u), 1.0], [alpha, -beta]])


def branch_root(c, v, lo, hi):
    """Root of p(u) = v inside [lo, hi] by bisection (independent of the C++ solver)."""
    f = lambda u: p(c, u) - v
    a, b = lo, hi
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


print("== hysteresis default: alpha=1 beta=1 p = 2.5u - 3u^2 + u^3 ==")
C_H = (2.5, -3.0, 1.0)
s0, s1, s2 = line_intersections(C_H, 1.0, 1.0)
show("intersections", [s0, s1, s2])
uH, uT = turning_points(C_H)
show("u_H", uH)
show("u_T", uT)
vH, vT = p(C_H, uH), p(C_H, uT)
show("v_H", vH)
show("v_T", vT)
v2 = s2  # alpha/beta = 1
show("admissible_lo", vT)
show("admissible_hi", min(vH, v2))
show("admissible_mid", 0.5 * (vT + min(vH, v2)))
show("dp_at_S1", dp(C_H, s1))
show("dp_at_S2", dp(C_H, s2))
show("det_cond_S1", dp(C_H, s1) * 1.0 - 1.0)   # p'(u1)*beta - alpha < 0
show("det_cond_S2", dp(C_H, s2) * 1.0 - 1.0)   # > 0
show("A_star_S2", -dp(C_H, s2))

print()
print("== bistable default: alpha=1 beta=1 p = 1.5u - 1.5u^2 + u^3 ==")
C_B = (1.5, -1.5, 1.0)
b0, b1, b2 = line_intersections(C_B, 1.0, 1.0)
show("intersections", [b0, b1, b2])
show("dp_discriminant", (2 * C_B[1]) ** 2 - 4 * 3 * C_B[2] * C_B[0])  # < 0: monotone
show("dp_at_half", dp(C_B, 0.5))
show("det_cond_at_half", dp(C_B, 0.5) - 1.0)   # < 0: sufficient condition must fail
show("front_bifurcation_D", (1.0 / dp(C_B, 0.5) - 1.0) / np.pi**2)  # fronts exist below this

print()
print("== stable-pattern configuration: alpha=0.5 beta=1, same cubic as hysteresis default ==")
AL, BE = 0.5, 1.0
t0, t1, t2 = line_intersections(C_H, AL, BE)
show("intersections", [t0, t1, t2])
show("admissible_lo", vT)
show("admissible_hi", min(vH, (AL / BE) * t2))
vj = 0.5
hH_vj = branch_root(C_H, vj, 0.0, uH)
hT_vj = branch_root(C_H, vj, uT, 4.0)
show("h_H_at_vjump", hH_vj)
show("h_T_at_vjump", hT_vj)
show("K_infimum", min(dp(C_H, hH_vj), dp(C_H, hT_vj)))
show("det_margin", min(dp(C_H, hH_vj), dp(C_H, hT_vj)) * BE - AL)

print()
print("== grid: mu_j^h = -(2/h^2)(1 - cos(j pi h)) ==")
n = 8
h = 1.0 / n
show("mu_n8", [-(2.0 / h**2) * (1 - np.cos(j * np.pi * h)) for j in range(n)])
n = 64
h = 1.0 / n
mu1 = -(2.0 / h**2) * (1 - np.cos(np.pi * h))
mu3 = -(2.0 / h**2) * (1 - np.cos(3 * np.pi * h))
show("mu1_n64", mu1)
show("mu3_n64", mu3)
show("mu1_n64_vs_pi2_rel", abs(mu1 + np.pi**2) / np.pi**2)
show("exp_mu3_n64_t0p1", np.exp(mu3 * 0.1))

print()
print("== operator hand assembly: m=k=1, n=2, J=[[1.5,-0.5],[2,-3]], d_v=0.7 ==")
a, b, cc, d, dv = 1.5, -0.5, 2.0, -3.0, 0.7
M = np.array([
    [a, 0, b, 0],
    [0, a, 0, b],
    [cc, 0, d - 4 * dv, 4 * dv],
    [0, cc, 4 * dv, d - 4 * dv],
])
show("assembled_4x4_rowmajor", M.ravel())
mu_n2 = [0.0, -8.0]  # -(2/h^2)(1-cos(j pi h)), h=1/2
eigs = []
for mu in mu_n2:
    blk = np.array([[a, b], [cc, d + dv * mu]])
    eigs.extend(np.linalg.eigvals(blk))
eigs = sorted(eigs, key=lambda z: (-z.real, z.imag))
print("mode_eigs_sorted =", ", ".join(f"({F.format(z.real)}, {F.format(z.imag)})" for z in eigs))

print()
print("== mode decoupling: S2 of hysteresis default, d=1e-2, n=8, four rightmost ==")
J = hysteresis_block(C_H, 1.0, 1.0, s2)
nn = 8
hh = 1.0 / nn
allz = []
for j in range(nn):
    mu = -(2.0 / hh**2) * (1 - np.cos(j * np.pi * hh))
    blk = J + mu * np.diag([0.0, 1e-2])
    allz.extend(np.linalg.eigvals(blk))
allz = sorted(allz, key=lambda z: (-z.real, z.imag))[:4]
print("rightmost4 =", ", ".join(f"({F.format(z.real)}, {F.format(z.imag)})" for z in allz))

print()
print("== ddi default: kappa=1 mu=1 m1=3 m2=4 ==")
KA, MU, M1, M2 = 1.0, 1.0, 3.0, 4.0
vr = M1 / (2 * np.sqrt(KA)) - 1.0
show("v_r", vr)


def u_pm(v, sign):
    disc = M1**2 - 4 * KA * (1 + v) ** 2
    return (M1 + sign * np.sqrt(disc)) / (2 * KA * (1 + v))


for v in (0.0, 0.1, 0.25, 0.3, 0.4, 0.5):
    show(f"u_minus_v{v}", u_pm(v, -1))
    show(f"u_plus_v{v}", u_pm(v, +1))
    show(f"product_v{v}", u_pm(v, -1) * u_pm(v, +1))


def ddi_jac(u, v):
    den = (1 + KA * u**2)
    return np.array([
        [-(1 + v) + 2 * M1 * u / den**2, -u],
        [-v + 2 * M2 * u / den**2, -(MU + u)],
    ])


show("jac_at_origin_rowmajor", ddi_jac(0.0, 0.0).ravel())
for v in (0.25, 0.26):
    u = u_pm(v, +1)
    Jp = ddi_jac(u, v)
    show(f"uplus_Astar_v{v}", Jp[0, 0])
    show(f"uplus_det_v{v}", Jp[0, 0] * Jp[1, 1] - Jp[0, 1] * Jp[1, 0])
u = u_pm(0.3, -1)
Jm = ddi_jac(u, 0.3)
show("uminus_Astar_v0.3", Jm[0, 0])
