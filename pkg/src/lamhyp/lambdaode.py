"""Curvature ODE of convex lambda-curves in the normal-angle variable.

Along a strictly convex lambda-curve parametrized by the angle ``theta`` of
its outward normal ``n = (cos theta, sin theta)``, the curvature solves

    H_tt = 1/(2H) - H + lam,

with first integral ``E = H_t^2 + f(H)``, ``f(t) = t^2 - log t - 2 lam t``.
The curve itself is recovered algebraically from ``<x, n> = 2(H - lam)``
and ``<x, t> = -2 H_t`` with ``t = (sin theta, -cos theta)``.
A closed curve needs the curvature period ``T(E)`` to satisfy
``q T = 2 pi p``; the curve then turns ``p`` times and carries ``q``
curvature maxima.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .curvegeom import PlaneCurve
from .errors import BelowMinimumEnergyError, CurvatureCollapseError, NotHalfPeriodError, PreconditionError
from .report import WeightedReport

COLLAPSE_H = 1e-8
PERIOD_NODES = 200
E_CAP_OFFSET = 8.0
CURVE_DENSITY = 0.3
EDGE_RATIO_TARGET = 3.9
SUBSTEP_FACTOR = 0.005

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


class NonMonotonePeriodWarning(UserWarning):
    pass


def potential(t, lam: float):
    """``f(t) = t^2 - log t - 2 lam t``."""
    return t * t - np.log(t) - 2 * lam * t


def energy(H, H_theta, lam: float):
    return H_theta * H_theta + potential(H, lam)


@dataclass(frozen=True)
class PotentialInfo:
    lam: float
    H0: float
    E_min: float

    @property
    def curvature_of_circle(self) -> float:
        return self.H0


def potential_info(lam: float) -> PotentialInfo:
    """Minimizer ``H0 = (lam + sqrt(lam^2 + 2))/2`` of ``f`` and ``E_min = f(H0)``."""
    h0 = 0.5 * (lam + math.sqrt(lam * lam + 2.0))
    return PotentialInfo(lam, h0, float(potential(h0, lam)))


def small_amplitude_period(lam: float) -> float:
    """Limit of ``T(E)`` as ``E -> E_min``: ``2 pi / sqrt(1 + 1/(2 H0^2))``."""
    h0 = potential_info(lam).H0
    return 2 * math.pi / math.sqrt(1.0 + 0.5 / (h0 * h0))


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Samples of a solution ``H(theta)`` on a uniform grid."""

    lam: float
    energy: float
    theta: np.ndarray
    H: np.ndarray
    H_theta: np.ndarray
    period: float | None = None

    @property
    def step(self) -> float:
        return float(self.theta[1] - self.theta[0])

    @property
    def H_thetatheta(self) -> np.ndarray:
        return 0.5 / self.H - self.H + self.lam

    def energy_residual(self) -> np.ndarray:
        return energy(self.H, self.H_theta, self.lam) - self.energy

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("theta,H,H_theta\n")
            for t, h, ht in zip(self.theta, self.H, self.H_theta):
                fh.write(f"{float(t)!r},{float(h)!r},{float(ht)!r}\n")


def _rk4_stage_check(y):
    if y <= COLLAPSE_H:
        raise CurvatureCollapseError(f"H collapsed below {COLLAPSE_H}")


def integrate_profile(lam: float, H_init: float, Htheta_init: float, theta_span: float,
                      step: float, record_every: int = 1) -> CurvatureProfile:
    """Classical RK4 for ``(H, H_t)`` from ``theta = 0`` to ``theta_span``.

    ``step`` is shrunk so that a whole number of steps covers the span; every
    ``record_every``-th state is stored.  Inside a step the solver takes
    RK4 sub-steps no longer than ``SUBSTEP_FACTOR * H``: near a deep
    curvature minimum the solution varies on the scale ``H_min``, and a fixed
    step would lose energy conservation there.

    Raises
    ------
    PreconditionError
        ``H_init <= 0`` or ``step > 1e-3 * max(1, theta_span)``.
    CurvatureCollapseError
        If ``H`` drops to ``1e-8`` or below.
    """
    if not H_init > 0:
        raise PreconditionError("H_init must be positive")
    if not 0 < step <= 1e-3 * max(1.0, theta_span):
        raise PreconditionError(f"step {step} exceeds 1e-3 * max(1, span)")
    k = int(record_every)
    n_rec = max(1, math.ceil(theta_span / (step * k) - 1e-9))
    n_steps = n_rec * k
    h_grid = theta_span / n_steps
    H = np.empty(n_rec + 1)
    P = np.empty(n_rec + 1)
    y, p = float(H_init), float(Htheta_init)
    H[0], P[0] = y, p
    eta = SUBSTEP_FACTOR
    for j in range(1, n_rec + 1):
        for _ in range(k):
            left = h_grid
            while left > 0:
                h = left if left <= eta * y else left / math.ceil(left / (eta * y))
                half = 0.5 * h
                a1 = 0.5 / y - y + lam
                y2 = y + half * p
                _rk4_stage_check(y2)
                p2 = p + half * a1
                a2 = 0.5 / y2 - y2 + lam
                y3 = y + half * p2
                _rk4_stage_check(y3)
                p3 = p + half * a2
                a3 = 0.5 / y3 - y3 + lam
                y4 = y + h * p3
                _rk4_stage_check(y4)
                p4 = p + h * a3
                a4 = 0.5 / y4 - y4 + lam
                y += h / 6.0 * (p + 2 * p2 + 2 * p3 + p4)
                p += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
                _rk4_stage_check(y)
                left -= h
                if left < 1e-15 * h_grid:
                    left = 0.0
        H[j], P[j] = y, p
    theta = np.arange(n_rec + 1) * (h_grid * k)
    E = float(energy(H_init, Htheta_init, lam))
    return CurvatureProfile(lam, E, theta, H, P)


def _hermite_root(t0, t1, y0, y1, d0, d1) -> float:
    """Root of the cubic Hermite interpolant of ``y`` on ``[t0, t1]``."""
    dt = t1 - t0

    def cubic(s):
        s2, s3 = s * s, s * s * s
        return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * dt * d0
                + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * dt * d1)

    return t0 + dt * brentq(cubic, 0.0, 1.0, xtol=1e-15)


def curvature_maxima(profile: CurvatureProfile) -> np.ndarray:
    """Angles where ``H_t`` crosses zero downward (strict maxima of ``H``)."""
    p = profile.H_theta
    dd = profile.H_thetatheta
    th = profile.theta
    idx = np.nonzero((p[:-1] > 0) & (p[1:] <= 0))[0]
    return np.array([_hermite_root(th[j], th[j + 1], p[j], p[j + 1], dd[j], dd[j + 1]) for j in idx])


def oscillation_period(profile: CurvatureProfile) -> float:
    """Period of ``H`` measured from successive maxima of the sampled solution."""
    peaks = curvature_maxima(profile)
    if len(peaks) < 2:
        raise PreconditionError("profile spans fewer than two curvature maxima")
    return float((peaks[-1] - peaks[0]) / (len(peaks) - 1))


# ---------------------------------------------------------------------------
# turning points and period function
# ---------------------------------------------------------------------------


def _require_energy(lam: float, E: float) -> PotentialInfo:
    info = potential_info(lam)
    if not E > info.E_min:
        raise BelowMinimumEnergyError(f"E={E!r} is not above E_min={info.E_min!r}")
    return info


def turning_points(lam: float, E: float) -> tuple[float, float]:
    """The two roots ``H_min < H0 < H_max`` of ``f(H) = E``."""
    info = _require_energy(lam, E)
    h0 = info.H0
    g = lambda t: float(potential(t, lam)) - E  # noqa: E731
    lo = h0
    while g(lo) <= 0:
        lo *= 0.5
    hi = h0
    while g(hi) <= 0:
        hi *= 2.0
    if g(h0) >= 0:
        # E within rounding of E_min: the well is narrower than float spacing
        return h0, h0
    h_min = brentq(g, lo, h0, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    h_max = brentq(g, h0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return h_min, h_max


def _potential_drop(ref, d, lam):
    """``f(ref) - f(ref - d)`` without cancellation for small ``d``.

    Taking the offset ``d`` itself (rather than a rounded ``ref - d``) keeps
    full relative accuracy at quadrature nodes next to a turning point.  The
    logarithm is ``log(1 - d/ref)``, which stays accurate on the inner branch
    even when ``-d`` exceeds a tiny ``ref`` by many orders of magnitude.
    """
    return d * (2 * ref - d - 2 * lam) + np.log1p(-d / ref)


def _gauss_legendre(nodes: int):
    if nodes not in _GL_CACHE:
        _GL_CACHE[nodes] = np.polynomial.legendre.leggauss(nodes)
    return _GL_CACHE[nodes]


def period(lam: float, E: float, nodes: int = PERIOD_NODES) -> float:
    """Curvature period ``T(E) = 2 int_{H_min}^{H_max} dH / sqrt(E - f(H))``.

    The inverse square-root endpoint singularities are removed by
    ``H = mid + half_width * sin(phi)``; the resulting smooth integrand on
    ``[-pi/2, pi/2]`` is integrated by Gauss-Legendre quadrature.
    """
    _require_energy(lam, E)
    h_min, h_max = turning_points(lam, E)
    if h_max <= h_min:
        return small_amplitude_period(lam)
    mid = 0.5 * (h_min + h_max)
    w = 0.5 * (h_max - h_min)
    x, wt = _gauss_legendre(nodes)
    right = x >= 0
    # angular distance to the nearer end, pi/2 - |phi|, exact since 1 - |x| is
    a = 0.5 * np.pi * (1.0 - np.abs(x))
    # distance to the nearer turning point: w (1 - sin|phi|) = 2 w sin^2(a/2)
    gap = 2 * w * np.sin(0.5 * a) ** 2
    drop = np.where(right, _potential_drop(h_max, gap, lam), _potential_drop(h_min, -gap, lam))
    integrand = w * np.sin(a) / np.sqrt(drop)
    return float(2 * 0.5 * np.pi * np.dot(wt, integrand))


def period_scan(lam: float, e_max: float = E_CAP_OFFSET, samples: int = 200, nodes: int = PERIOD_NODES):
    """``T`` on ``E = E_min + e_max * k / samples``, ``k = 1..samples``."""
    info = potential_info(lam)
    offsets = e_max * np.arange(1, samples + 1) / samples
    energies = info.E_min + offsets
    periods = np.array([period(lam, e, nodes) for e in energies])
    return energies, periods


# ---------------------------------------------------------------------------
# curve reconstruction
# ---------------------------------------------------------------------------


def frame(theta):
    """Outward normal ``(cos, sin)`` and tangent ``(sin, -cos)`` at normal angle ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([c, s], axis=-1), np.stack([s, -c], axis=-1)


def profile_positions(profile: CurvatureProfile) -> np.ndarray:
    """``x = 2 (H - lam) n - 2 H_t t`` at every sample."""
    n, t = frame(profile.theta)
    return 2 * (profile.H - profile.lam)[:, None] * n - 2 * profile.H_theta[:, None] * t


def reconstruct_curve(profile: CurvatureProfile, closed: bool = True) -> PlaneCurve:
    """Polygon through the curve points of a profile.

    With ``closed=True`` the final sample is dropped as the duplicate of the
    first (the profile is expected to cover a whole number of turns).
    """
    pts = profile_positions(profile)
    if closed:
        pts = pts[:-1]
    return PlaneCurve(pts)


def reconstruction_residual(profile: CurvatureProfile) -> tuple[np.ndarray, np.ndarray]:
    """Definitional residuals ``<x, n>/2 - (H - lam)`` and ``<x, t>/2 + H_t``.

    Together they express the lambda-equation ``H - <x, n>/2 = lam`` in the
    exact frame; both vanish to rounding for :func:`profile_positions`.
    """
    x = profile_positions(profile)
    n, t = frame(profile.theta)
    normal = 0.5 * np.einsum("ij,ij->i", x, n) - (profile.H - profile.lam)
    tangential = 0.5 * np.einsum("ij,ij->i", x, t) + profile.H_theta
    return normal, tangential


def reconstruct_by_quadrature(profile: CurvatureProfile) -> np.ndarray:
    """Positions from integrating ``dx/dtheta = -t / H`` (trapezoid, cumulative).

    Starts from the algebraic position at the first sample.  Serves as an
    independent check of :func:`profile_positions`.
    """
    _, t = frame(profile.theta)
    v = -t / profile.H[:, None]
    h = np.diff(profile.theta)[:, None]
    inc = 0.5 * h * (v[1:] + v[:-1])
    start = profile_positions(profile)[:1]
    return np.vstack([start, start + np.cumsum(inc, axis=0)])


def gaussian_curvature_invariant(profile: CurvatureProfile) -> np.ndarray:
    """``H exp(-|x|^2/4)`` per sample.

    Constant along every lambda-curve; the constant is ``exp(-E - lam^2)``.
    """
    x = profile_positions(profile)
    return profile.H * np.exp(-0.25 * np.einsum("ij,ij->i", x, x))


# ---------------------------------------------------------------------------
# closed curves
# ---------------------------------------------------------------------------


@dataclass
class ClosedCurveSearch:
    lam: float
    p: int
    q: int
    target_period: float
    found: bool
    energy: float | None = None
    period: float | None = None
    curve: PlaneCurve | None = None
    profile: CurvatureProfile | None = None
    closure_gap: float | None = None
    diameter: float | None = None
    monotone: bool = True
    period_range: tuple[float, float] = (math.nan, math.nan)
    notes: list[str] = field(default_factory=list)

    @property
    def closure_ok(self) -> bool:
        return bool(self.found and self.closure_gap < 1e-6 * self.diameter)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "p": self.p,
            "q": self.q,
            "target_period": self.target_period,
            "found": self.found,
            "energy": self.energy,
            "period": self.period,
            "closure_gap": self.closure_gap,
            "diameter": self.diameter,
            "closure_ok": self.closure_ok if self.found else None,
            "monotone_period": self.monotone,
            "period_min": self.period_range[0],
            "period_max": self.period_range[1],
        }


def _fine_profile(lam: float, E: float, span: float, samples: int, fine_step: float = 1e-3) -> CurvatureProfile:
    """Profile starting at the curvature maximum with ``samples`` intervals over ``span``."""
    _, h_max = turning_points(lam, E)
    k = max(1, math.ceil(span / samples / fine_step))
    prof = integrate_profile(lam, h_max, 0.0, span, span / (samples * k), record_every=k)
    # keep the exact energy level rather than the one re-evaluated at H_max
    return CurvatureProfile(lam, E, prof.theta, prof.H, prof.H_theta)


def _half_profile(lam: float, E: float, half: float, fine_step: float) -> CurvatureProfile:
    _, h_max = turning_points(lam, E)
    n = max(2, math.ceil(half / fine_step))
    return integrate_profile(lam, h_max, 0.0, half, half / n)


def shoot_half_period(lam: float, E_guess: float, half: float, fine_step: float = 5e-4,
                      width: float = 1e-4) -> tuple[float, CurvatureProfile]:
    """Energy whose integrated solution from ``H_max`` has ``H_t = 0`` at ``theta = half``.

    Refines an energy from the period quadrature so that the discrete
    solution, not just the exact one, has the requested half period.
    """
    info = potential_info(lam)

    def miss(e):
        return _half_profile(lam, e, half, fine_step).H_theta[-1]

    lo = max(E_guess - width, info.E_min + 0.5 * (E_guess - info.E_min))
    hi = E_guess + width
    g_lo, g_hi = miss(lo), miss(hi)
    tries = 0
    while g_lo * g_hi > 0:
        tries += 1
        if tries > 20:
            raise PreconditionError("could not bracket the half-period shooting problem")
        width *= 4
        lo = max(E_guess - width, info.E_min + 0.5 * (lo - info.E_min))
        hi = E_guess + width
        g_lo, g_hi = miss(lo), miss(hi)
    E = brentq(miss, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    return E, _half_profile(lam, E, half, fine_step)


class PeriodicCurvature:
    """Even periodic extension of a half-period profile.

    The solution on ``[0, half]`` runs from a curvature maximum to the next
    minimum; reflection about both ends gives the whole periodic solution.
    A quintic Hermite interpolant through ``(H, H_t, H_tt)`` fills in
    between integration nodes.

    ``density`` selects a sampling measure ``m(theta) = int H^(density-1) dtheta``,
    tabulated on the nodes with 8-point Gauss-Legendre per interval.  Points
    equally spaced in ``m`` have a density per unit length proportional to
    ``H^density``: ``0`` gives arclength, ``1`` gives the normal angle.
    """

    def __init__(self, half_profile: CurvatureProfile, density: float = 0.0):
        from scipy.interpolate import BPoly

        th = half_profile.theta
        self.lam = half_profile.lam
        self.half = float(th[-1])
        self._power = density - 1.0
        y = np.stack([half_profile.H, half_profile.H_theta, half_profile.H_thetatheta], axis=1)
        self._poly = BPoly.from_derivatives(th, y)
        self._dpoly = self._poly.derivative()
        x, w = _gauss_legendre(8)
        left, width = th[:-1, None], np.diff(th)[:, None]
        pts = left + 0.5 * width * (x + 1)
        pieces = 0.5 * width[:, 0] * ((w * self._poly(pts) ** self._power).sum(axis=1))
        self._nodes = th
        self._s_nodes = np.concatenate([[0.0], np.cumsum(pieces)])
        self.half_measure = float(self._s_nodes[-1])

    def _fold(self, theta):
        theta = np.asarray(theta, dtype=float)
        turns = np.floor(theta / (2 * self.half))
        phase = theta - turns * 2 * self.half
        back = phase > self.half
        return turns, np.where(back, 2 * self.half - phase, phase), back

    def evaluate(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """``H`` and ``H_t`` at arbitrary angles."""
        _, phase, back = self._fold(theta)
        d = self._dpoly(phase)
        return self._poly(phase), np.where(back, -d, d)

    def _half_measure(self, phase):
        j = np.clip(np.searchsorted(self._nodes, phase, side="right") - 1, 0, len(self._nodes) - 2)
        left = self._nodes[j]
        x, w = _gauss_legendre(8)
        width = (phase - left)[..., None]
        pts = left[..., None] + 0.5 * width * (x + 1)
        return self._s_nodes[j] + 0.5 * width[..., 0] * (w * self._poly(pts) ** self._power).sum(axis=-1)

    def measure(self, theta) -> np.ndarray:
        """``int_0^theta H^(density-1) dtheta``."""
        turns, phase, back = self._fold(theta)
        part = self._half_measure(phase)
        return turns * 2 * self.half_measure + np.where(back, 2 * self.half_measure - part, part)

    def theta_at_measure(self, s) -> np.ndarray:
        """Invert :meth:`measure` by table lookup and Newton steps."""
        s = np.asarray(s, dtype=float)
        period_len = 2 * self.half_measure
        turns = np.floor(s / period_len)
        r = s - turns * period_len
        table_s = np.concatenate([self._s_nodes, period_len - self._s_nodes[-2::-1]])
        table_t = np.concatenate([self._nodes, 2 * self.half - self._nodes[-2::-1]])
        theta = turns * 2 * self.half + np.interp(r, table_s, table_t)
        for _ in range(6):
            H, _ = self.evaluate(theta)
            step = (self.measure(theta) - s) / H**self._power
            theta = theta - step
            if np.max(np.abs(step)) < 1e-15 * max(1.0, float(np.max(np.abs(theta)))):
                break
        return theta


def tile_half_profile(half_profile: CurvatureProfile, theta) -> tuple[np.ndarray, np.ndarray]:
    """``H`` and ``H_t`` of the periodic extension of a half-period profile."""
    return PeriodicCurvature(half_profile).evaluate(theta)


def find_closed_curve(lam: float, p: int, q: int, vertex_count: int = 4096,
                      e_max: float = E_CAP_OFFSET, samples: int = 200,
                      nodes: int = PERIOD_NODES, density: float = CURVE_DENSITY) -> ClosedCurveSearch:
    """Search ``E in (E_min, E_min + e_max]`` for ``q T(E) = 2 pi p``.

    The period function is sampled (plus its small-amplitude limit at
    ``E_min``); the smallest-energy bracket with a sign change is refined by
    Brent's method.  A non-monotone sampled period function triggers a
    :class:`NonMonotonePeriodWarning`.

    Once bracketed, the energy is polished by shooting so that the
    integrated solution itself has half period ``pi p / q``; the curve is
    then assembled from one half period by reflection, which makes it close
    to rounding accuracy.  Vertex density per unit length is proportional
    to ``H^density`` (see :class:`PeriodicCurvature`); the default balances
    discretization error at the curvature peaks against rounding noise in
    the fourth differences used by the Simons-type checks.  The exponent is
    lowered when needed so that the max/min edge-length ratio stays at
    ``EDGE_RATIO_TARGET`` (below the quasi-uniform bound of 4).

    Returns
    -------
    ClosedCurveSearch
        ``found`` is False when ``2 pi p / q`` lies outside the sampled
        period range.
    """
    if not (isinstance(p, (int, np.integer)) and isinstance(q, (int, np.integer))):
        raise PreconditionError("p and q must be integers")
    if p < 1 or q < 2:
        raise PreconditionError(f"need p >= 1 and q >= 2, got p={p}, q={q}")
    if math.gcd(int(p), int(q)) != 1:
        raise PreconditionError(f"p={p} and q={q} are not coprime")
    target = 2 * math.pi * p / q
    info = potential_info(lam)
    energies, periods = period_scan(lam, e_max, samples, nodes)
    energies = np.concatenate([[info.E_min], energies])
    periods = np.concatenate([[small_amplitude_period(lam)], periods])
    dT = np.diff(periods)
    monotone = bool(np.all(dT > 0) or np.all(dT < 0))
    result = ClosedCurveSearch(lam, int(p), int(q), target, False, monotone=monotone,
                               period_range=(float(periods.min()), float(periods.max())))
    if not monotone:
        warnings.warn(f"period function is not monotone for lambda={lam}; using scan + local refine",
                      NonMonotonePeriodWarning, stacklevel=2)
        result.notes.append("non-monotone period function")
    g = periods - target
    hits = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]
    if len(hits) == 0:
        return result
    j = int(hits[0])
    lo, hi = energies[j], energies[j + 1]
    if g[j] == 0 and j > 0:
        E = lo
    elif g[j + 1] == 0:
        E = hi
    else:
        lo = max(lo, info.E_min + 1e-12 * max(1.0, abs(info.E_min)))
        fn = lambda e: period(lam, e, nodes) - target  # noqa: E731
        if fn(lo) * fn(hi) > 0:
            # the sign change sits between E_min and the first usable energy
            return result
        E = brentq(fn, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    E, half = shoot_half_period(lam, E, math.pi * p / q)
    # edge lengths scale like H^-density: cap the exponent so that the
    # max/min edge ratio stays within the quasi-uniform bound
    spread = float(half.H[0] / half.H[-1])
    if spread > 1.0:
        density = min(density, math.log(EDGE_RATIO_TARGET) / math.log(spread))
    sol = PeriodicCurvature(half, density)
    span = 2 * math.pi * p
    theta = sol.theta_at_measure(2 * q * sol.half_measure * np.arange(vertex_count + 1) / vertex_count)
    theta[0], theta[-1] = 0.0, span
    H, Ht = sol.evaluate(theta)
    prof = CurvatureProfile(lam, float(E), theta, H, Ht, 2 * math.pi * p / q)
    pts = profile_positions(prof)
    curve = PlaneCurve(pts[:-1])
    result.found = True
    result.energy = float(E)
    result.period = period(lam, E, nodes)
    result.profile = prof
    result.curve = curve
    result.closure_gap = float(np.linalg.norm(pts[-1] - pts[0]))
    result.diameter = curve.diameter
    return result


# ---------------------------------------------------------------------------
# half-period integral identity
# ---------------------------------------------------------------------------


HALF_PERIOD_RESOLUTION = 16


def half_period_profile(lam: float, E: float, samples: int = 2000) -> CurvatureProfile:
    """Profile from a curvature maximum to the following minimum.

    Near a deep minimum ``H`` varies on the angular scale ``H_min``, so the
    sample count is raised to at least ``16 (T/2) / H_min``.  The end point
    starts at half the quadrature period and is polished by Newton steps on
    the integrated ``H_theta``, so that ``H_theta`` vanishes at the end of
    the computed solution even where ``H_thetatheta`` is large.
    """
    T = period(lam, E)
    h_min, _ = turning_points(lam, E)
    n = max(samples, math.ceil(HALF_PERIOD_RESOLUTION * 0.5 * T / h_min))
    half = 0.5 * T
    for _ in range(4):
        prof = _fine_profile(lam, E, half, n)
        miss = float(prof.H_theta[-1])
        if abs(miss) <= 1e-11:
            break
        half -= miss / float(prof.H_thetatheta[-1])
    return CurvatureProfile(lam, E, prof.theta, prof.H, prof.H_theta, T)


def check_half_period_identity(profile: CurvatureProfile, tolerance: float = 1e-5) -> WeightedReport:
    """Integral identity on a half period ``[0, T/2]`` starting at a maximum of ``H``.

    ``2 int sin(2t) H_t / H = 2 sin(T) [1/2 - H^2 + lam H](T/2) - 6 lam int sin(2t) H_t``.
    Both integrals use composite Simpson quadrature.  For ``lam >= 0`` the
    details also carry the sign diagnostics ``lhs <= 0`` and ``rhs >= 0``.

    Raises
    ------
    NotHalfPeriodError
        If ``H_t`` does not vanish (to ``1e-8``) at both ends or the start is
        not a maximum.
    """
    th = profile.theta - profile.theta[0]
    H, Ht, lam = profile.H, profile.H_theta, profile.lam
    if abs(Ht[0]) > 1e-8 or abs(Ht[-1]) > 1e-8:
        raise NotHalfPeriodError(f"H_theta at ends = {Ht[0]:.2e}, {Ht[-1]:.2e}")
    constant = bool(np.ptp(H) <= 1e-12 * max(1.0, float(np.max(H))))
    if not constant and not profile.H_thetatheta[0] < 0:
        raise NotHalfPeriodError("profile does not start at a curvature maximum")
    if not constant and np.any(Ht[1:-1] > 1e-8):
        raise NotHalfPeriodError("H is not decreasing over the profile")
    T = 2 * th[-1]
    s2 = np.sin(2 * th)
    lhs = 2 * simpson(s2 * Ht / H, x=th)
    h_end = H[-1]
    drift = simpson(s2 * Ht, x=th)
    rhs = 2 * math.sin(T) * (0.5 - h_end * h_end + lam * h_end) - 6 * lam * drift
    # sin(2t) >= 0 on the whole half period exactly when T <= pi; with H
    # decreasing this forces lhs <= 0
    details = {"lambda": lam, "energy": profile.energy, "period": T,
               "sin_nonnegative": bool(T <= math.pi),
               "lhs_nonpositive": bool(lhs <= 0)}
    if lam >= 0:
        details["rhs_nonnegative"] = bool(rhs >= 0)
    return WeightedReport("half_period_identity", float(lhs), float(rhs), abs(lhs - rhs), tolerance,
                          "2 int sin2t H_t/H = 2 sinT [1/2 - H^2 + lam H] - 6 lam int sin2t H_t", details)
