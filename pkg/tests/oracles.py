"""Independent reference computations used by the test suite.

Everything here is deliberately computed by a different route from the
package code: level-set finite differences, brute-force quadrature,
arbitrary-precision integrals, or generic ODE solvers.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.integrate import quad, solve_ivp


def level_set(spec):
    """Implicit function whose zero set is the canonical hypersurface."""
    if spec.kind.value == "hyperplane":
        return lambda x: x[-1] - spec.offset
    j = spec.ambient_dim if spec.kind.value == "sphere" else spec.sphere_factor_dim + 1
    r = spec.radius
    return lambda x: 0.5 * (np.dot(x[:j], x[:j]) - r * r)


def fd_shape_operator(F, x, h=1e-4):
    """Mean curvature div(grad F/|grad F|) and |A|^2 by central differences.

    The outward normal is grad F / |grad F|; the shape operator is the
    tangential projection of its Jacobian.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    eye = np.eye(d)

    def unit_grad(y):
        g = np.array([(F(y + h * e) - F(y - h * e)) / (2 * h) for e in eye])
        return g / np.linalg.norm(g)

    n = unit_grad(x)
    jac = np.column_stack([(unit_grad(x + h * e) - unit_grad(x - h * e)) / (2 * h) for e in eye])
    P = eye - np.outer(n, n)
    S = P @ jac @ P
    return float(np.trace(jac)), float(np.sum(S * S)), n


def ellipse_perimeter_brute(a, b, points=1_000_000):
    """Perimeter of an ellipse by the periodic trapezoid rule on 10^6 points."""
    t = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    return float(np.mean(np.hypot(a * np.sin(t), b * np.cos(t))) * 2 * np.pi)


def ellipse_weighted_integrals(a, b, points=1_000_000):
    """Brute-force weighted quantities on the ellipse (a cos t, b sin t).

    Returns a dict with the Gaussian-weighted length and the weighted
    integral of the squared arclength derivative of curvature.
    """
    t = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    dt = 2 * np.pi / points
    s2, c2 = np.sin(t) ** 2, np.cos(t) ** 2
    q = a * a * s2 + b * b * c2
    speed = np.sqrt(q)
    kappa = a * b / q ** 1.5
    dq = 2 * (a * a - b * b) * np.sin(t) * np.cos(t)
    dkappa_ds = -1.5 * a * b * q ** -2.5 * dq / speed
    w = np.exp(-(a * a * c2 + b * b * s2) / 4)
    return {
        "mu": float(np.sum(w * speed) * dt),
        "grad_A": float(np.sum(dkappa_ds ** 2 * w * speed) * dt),
    }


def mp_period(lam, E, dps=30):
    """Period of the curvature ODE at energy E by tanh-sinh quadrature.

    Uses T = 2 * int_{h-}^{h+} dH / sqrt(E - f(H)) with the endpoint
    singularities handled by mpmath's double-exponential rule.
    """
    with mpmath.workdps(dps):
        lam = mpmath.mpf(lam)
        E = mpmath.mpf(E)
        f = lambda t: t * t - mpmath.log(t) - 2 * lam * t
        H0 = (lam + mpmath.sqrt(lam * lam + 2)) / 2
        g = lambda t: E - f(t)
        lo = _mp_bisect(g, mpmath.mpf("1e-60"), H0)
        hi = _mp_bisect(g, H0, H0 + mpmath.sqrt(abs(E)) + 2 * abs(lam) + 10)
        # abs() guards rounding-level sign flips at nodes within 1e-30 of a root
        val = mpmath.quad(lambda t: 1 / mpmath.sqrt(abs(g(t))), [lo, H0, hi])
        return float(2 * val)


def _mp_bisect(g, a, b):
    ga = g(a)
    for _ in range(400):
        m = (a + b) / 2
        gm = g(m)
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
    # return the bracket end lying inside the well, where g > 0
    return a if ga > 0 else b


def golden_minimum(fun, a, b, tol=1e-14):
    """Golden-section minimisation on [a, b]."""
    gr = (math.sqrt(5) - 1) / 2
    c, d = b - gr * (b - a), a + gr * (b - a)
    while abs(b - a) > tol * (1 + abs(a)):
        if fun(c) < fun(d):
            b = d
        else:
            a = c
        c, d = b - gr * (b - a), a + gr * (b - a)
    return 0.5 * (a + b)


def circle_radius_ode(r0, t):
    """Radius of a circle under rescaled curve flow, dr/dt = -(1/r - r/2).

    Integrated with a generic high-order solver instead of the closed form.
    """
    sol = solve_ivp(lambda _, r: -(1.0 / r - r / 2), (0.0, t), [r0], method="DOP853", rtol=1e-12, atol=1e-14)
    return float(sol.y[0, -1])


def circle_extinction_ode(r0):
    """Extinction time found by integrating the squared radius until it hits zero.

    The radius itself has an infinite speed at extinction, so the event is
    located on u = r**2, which obeys du/dt = 2 r dr/dt = u - 2.
    """
    hit = lambda _, u: u[0]
    hit.terminal = True
    hit.direction = -1
    sol = solve_ivp(lambda _, u: u - 2.0, (0.0, 50.0), [r0 * r0], method="DOP853", rtol=1e-12, atol=1e-14, events=hit)
    return float(sol.t_events[0][0])


def spectral_ibp_sides(a, b, u_fun, v_fun, points=2 ** 20):
    """Both sides of the weighted integration-by-parts identity on an ellipse.

    Fields are functions of the coordinates (x, y).  Arclength derivatives
    are computed spectrally (FFT in the ellipse parameter), so the result is
    independent of the finite-difference stencils under test.
    """
    t = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    x, y = a * np.cos(t), b * np.sin(t)
    xt, yt = -a * np.sin(t), b * np.cos(t)
    speed = np.hypot(xt, yt)
    k = np.fft.fftfreq(points, d=1.0 / points)

    def d_dt(f):
        return np.real(np.fft.ifft(1j * k * np.fft.fft(f)))

    def d_ds(f):
        return d_dt(f) / speed

    u, v = u_fun(x, y), v_fun(x, y)
    w = np.exp(-(x * x + y * y) / 4)
    tang = (x * xt + y * yt) / speed
    vs = d_ds(v)
    lv = d_ds(vs) - 0.5 * tang * vs
    dt = 2 * np.pi / points
    lhs = float(np.sum(u * lv * w * speed) * dt)
    rhs = float(-np.sum(d_ds(u) * vs * w * speed) * dt)
    return lhs, rhs


def spheroid_integrals(equatorial, polar):
    """Area and int H^2 of a spheroid from its meridian profile.

    The surface of revolution ``(r sin u, c cos u)`` has meridian curvature
    ``|r' z'' - z' r''| / s^3`` and parallel curvature ``|z'| / (r s)`` with
    ``s`` the meridian speed; both are integrated with adaptive quadrature
    against ``2 pi r s du``.
    """
    r, c = equatorial, polar

    def pieces(u):
        rho, rp, rpp = r * np.sin(u), r * np.cos(u), -r * np.sin(u)
        zp, zpp = -c * np.sin(u), -c * np.cos(u)
        s = np.hypot(rp, zp)
        k1 = abs(rp * zpp - zp * rpp) / s**3
        k2 = abs(zp) / (rho * s)
        return 2 * np.pi * rho * s, k1 + k2

    area = quad(lambda u: pieces(u)[0], 0, np.pi, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    willmore = quad(lambda u: pieces(u)[0] * pieces(u)[1] ** 2, 0, np.pi, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    return {"area": area, "int_H2": willmore}
