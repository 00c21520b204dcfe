"""Quadrature of curvature integrals over closed genus-0 parametrized surfaces.

Charts map ``(u, v) in [0, pi] x [0, 2 pi)`` to 3-space with degenerate
poles at ``u = 0, pi``.  Integration uses Gauss-Legendre nodes in
``z = cos u`` (no node sits on a pole) times the uniform rule in ``v``.

Conventions: ``n = x_u x x_v / |x_u x x_v|`` (outward for the charts
below), second fundamental form ``II_ij = <x_ij, n>``, mean curvature
``H = -tr(I^-1 II)`` as the sum of principal curvatures (``H = 2/r`` on a
sphere) and ``|A|^2 = H^2 - 2K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateImmersionError, PoleHandlingError, PreconditionError
from .report import WeightedReport

DEFAULT_SHIFT = (0.3, -0.1, 0.2)
FD_STEP = 1e-3

Chart = Callable[[np.ndarray, np.ndarray], np.ndarray]
# (u, v) -> (x, x_u, x_v, x_uu, x_uv, x_vv), each shaped (..., 3)
ChartJet = Callable[[np.ndarray, np.ndarray], tuple]


def _ellipsoid_jet(a: float, b: float, c: float, shift=(0.0, 0.0, 0.0)) -> ChartJet:
    s = np.asarray(shift, dtype=float)

    def jet(u, v):
        su, cu, sv, cv = np.sin(u), np.cos(u), np.sin(v), np.cos(v)
        z = np.zeros_like(u)
        x = np.stack([a * su * cv, b * su * sv, c * cu], axis=-1) + s
        xu = np.stack([a * cu * cv, b * cu * sv, -c * su], axis=-1)
        xv = np.stack([-a * su * sv, b * su * cv, z], axis=-1)
        xuu = np.stack([-a * su * cv, -b * su * sv, -c * cu], axis=-1)
        xuv = np.stack([-a * cu * sv, b * cu * cv, z], axis=-1)
        xvv = np.stack([-a * su * cv, -b * su * sv, z], axis=-1)
        return x, xu, xv, xuu, xuv, xvv

    return jet


def _difference_jet(chart: Chart, h: float = FD_STEP) -> ChartJet:
    """Fourth-order central differences of a position-only chart."""
    c1 = np.array([1.0, -8.0, 8.0, -1.0]) / (12 * h)
    o1 = np.array([-2, -1, 1, 2]) * h
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * h * h)
    o2 = np.array([-2, -1, 0, 1, 2]) * h

    def jet(u, v):
        x = chart(u, v)
        xu = sum(w * chart(u + d, v) for w, d in zip(c1, o1))
        xv = sum(w * chart(u, v + d) for w, d in zip(c1, o1))
        xuu = sum(w * chart(u + d, v) for w, d in zip(c2, o2))
        xvv = sum(w * chart(u, v + d) for w, d in zip(c2, o2))
        xuv = sum(wi * wj * chart(u + di, v + dj) for wi, di in zip(c1, o1) for wj, dj in zip(c1, o1))
        return x, xu, xv, xuu, xuv, xvv

    return jet


@dataclass(frozen=True)
class ParamSurface:
    """A closed sphere-like chart and its quadrature grid.

    Parameters
    ----------
    name : str
    jet : callable
        ``(u, v) -> (x, x_u, x_v, x_uu, x_uv, x_vv)``.
    n_u, n_v : int
        Gauss-Legendre nodes in ``cos u`` and uniform nodes in ``v``.
    derivative_mode : {"analytic", "central-difference"}
    params : dict
        Chart parameters, for reports.
    """

    name: str
    jet: ChartJet
    n_u: int = 64
    n_v: int = 128
    derivative_mode: str = "analytic"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_u < 2 or self.n_v < 3:
            raise PreconditionError("grid needs n_u >= 2 and n_v >= 3")

    @classmethod
    def from_chart(cls, name: str, chart: Chart, n_u: int = 64, n_v: int = 128, **params) -> ParamSurface:
        """Wrap a position-only chart; derivatives by central differences."""
        return cls(name, _difference_jet(chart), n_u, n_v, "central-difference", params)

    def with_grid(self, n_u: int, n_v: int) -> ParamSurface:
        return ParamSurface(self.name, self.jet, n_u, n_v, self.derivative_mode, dict(self.params))

    def shifted(self, shift) -> ParamSurface:
        """The same surface translated by ``shift``."""
        s = np.asarray(shift, dtype=float)
        base = self.jet

        def jet(u, v):
            x, *rest = base(u, v)
            return (x + s, *rest)

        params = dict(self.params)
        params["shift"] = [float(t) for t in s]
        return ParamSurface(self.name + "+shift", jet, self.n_u, self.n_v, self.derivative_mode, params)

    def nodes(self):
        """``(u, v, weight)`` on the tensor grid; the weight includes ``1/sin u``."""
        z, wz = np.polynomial.legendre.leggauss(self.n_u)
        u = np.arccos(z)
        v = 2 * np.pi * np.arange(self.n_v) / self.n_v
        uu, vv = np.meshgrid(u, v, indexing="ij")
        w = (wz / np.sin(u))[:, None] * np.full(self.n_v, 2 * np.pi / self.n_v)[None, :]
        return uu, vv, w


def sphere(r: float = 1.0, **grid) -> ParamSurface:
    return ParamSurface("sphere", _ellipsoid_jet(r, r, r), params={"r": r}, **grid)


def ellipsoid(a: float, b: float, c: float, **grid) -> ParamSurface:
    return ParamSurface("ellipsoid", _ellipsoid_jet(a, b, c), params={"a": a, "b": b, "c": c}, **grid)


def shifted_sphere(r: float, dx: float, dy: float, dz: float, **grid) -> ParamSurface:
    return ParamSurface("shifted-sphere", _ellipsoid_jet(r, r, r, (dx, dy, dz)),
                        params={"r": r, "dx": dx, "dy": dy, "dz": dz}, **grid)


CHARTS: dict[str, tuple[Callable[..., ParamSurface], tuple[str, ...]]] = {
    "sphere": (sphere, ("r",)),
    "ellipsoid": (ellipsoid, ("a", "b", "c")),
    "shifted-sphere": (shifted_sphere, ("r", "dx", "dy", "dz")),
}


def make_chart(name: str, params: dict, n_u: int = 64, n_v: int = 128) -> ParamSurface:
    """Build a registered chart from its name and parameter dict."""
    if name not in CHARTS:
        raise PreconditionError(f"unknown chart {name!r}; choose from {sorted(CHARTS)}")
    ctor, keys = CHARTS[name]
    missing = [k for k in keys if k not in params]
    if missing:
        raise PreconditionError(f"chart {name!r} needs parameters {missing}")
    return ctor(*(float(params[k]) for k in keys), n_u=n_u, n_v=n_v)


@dataclass(frozen=True)
class SurfaceIntegrals:
    area: float
    volume: float
    int_H2: float
    int_A2: float
    int_Hxn: float
    int_xn: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _pointwise(S: ParamSurface):
    u, v, w = S.nodes()
    x, xu, xv, xuu, xuv, xvv = S.jet(u, v)
    E = np.einsum("...i,...i", xu, xu)
    F = np.einsum("...i,...i", xu, xv)
    G = np.einsum("...i,...i", xv, xv)
    detI = E * G - F * F
    if np.any(detI <= 1e-10) or not np.all(np.isfinite(detI)):
        raise DegenerateImmersionError(f"first fundamental form degenerate (min det {float(np.min(detI)):.3e})")
    cr = np.cross(xu, xv)
    jac = np.sqrt(detI)
    n = cr / jac[..., None]
    L = np.einsum("...i,...i", xuu, n)
    M = np.einsum("...i,...i", xuv, n)
    N = np.einsum("...i,...i", xvv, n)
    H = -(G * L - 2 * F * M + E * N) / detI
    K = (L * N - M * M) / detI
    dA = jac * w
    return x, n, H, K, dA


def surface_integrals(S: ParamSurface) -> SurfaceIntegrals:
    """Area, enclosed volume and the curvature integrals of a closed chart.

    The volume is ``int z n_z dA`` (divergence theorem for the field
    ``(0, 0, z)``), computed independently of ``int <x, n> dA``.

    Raises
    ------
    DegenerateImmersionError
        If the first fundamental form is singular at an interior node.
    PoleHandlingError
        If a weighted integrand is not finite.
    """
    x, n, H, K, dA = _pointwise(S)
    xn = np.einsum("...i,...i", x, n)
    A2 = H * H - 2 * K
    fields = {
        "area": np.ones_like(H),
        "volume": x[..., 2] * n[..., 2],
        "int_H2": H * H,
        "int_A2": A2,
        "int_Hxn": H * xn,
        "int_xn": xn,
    }
    out = {}
    for key, g in fields.items():
        vals = g * dA
        if not np.all(np.isfinite(vals)):
            raise PoleHandlingError(f"integrand for {key} not finite after the area weight")
        out[key] = float(vals.sum())
    return SurfaceIntegrals(**out)


def _rel_report(check: str, anchor: str, lhs: float, rhs: float, rel_tol: float, details: dict) -> WeightedReport:
    return WeightedReport(check, lhs, rhs, abs(lhs - rhs), rel_tol * max(abs(rhs), 1e-300), anchor, details)


def _chart_details(S: ParamSurface) -> dict:
    return {"chart": S.name, "params": dict(S.params), "grid": [S.n_u, S.n_v]}


def check_gauss_bonnet(S: ParamSurface, rel_tol: float = 1e-6) -> WeightedReport:
    """``int H^2 = int |A|^2 + 8 pi`` for a genus-0 surface."""
    I = surface_integrals(S)
    return _rel_report("gauss_bonnet", "int H^2 = int |A|^2 + 8 pi (1 - g), g = 0",
                       I.int_H2, I.int_A2 + 8 * math.pi, rel_tol, _chart_details(S))


def check_minkowski(S: ParamSurface, rel_tol: float = 1e-6, shift=DEFAULT_SHIFT) -> tuple[WeightedReport, WeightedReport]:
    """``int H <x, n> = 2 Area`` and ``int <x, n> = 3 Volume``, also on the shifted chart.

    Each report's gap is the larger of the original and shifted runs; the
    shifted values are kept in ``details``.
    """
    a = surface_integrals(S)
    b = surface_integrals(S.shifted(shift))
    out = []
    for check, anchor, key, rhs_of in (
        ("minkowski_mean_curvature", "int H <x,n> = 2 Area", "int_Hxn", lambda I: 2 * I.area),
        ("minkowski_support", "int <x,n> = 3 Volume", "int_xn", lambda I: 3 * I.volume),
    ):
        lhs0, rhs0 = getattr(a, key), rhs_of(a)
        lhs1, rhs1 = getattr(b, key), rhs_of(b)
        gap = max(abs(lhs0 - rhs0), abs(lhs1 - rhs1))
        tol = rel_tol * min(abs(rhs0), abs(rhs1))
        details = _chart_details(S)
        details.update({"shift": list(shift), "shifted_lhs": lhs1, "shifted_rhs": rhs1,
                        "shifted_gap": abs(lhs1 - rhs1), "unshifted_gap": abs(lhs0 - rhs0)})
        out.append(WeightedReport(check, lhs0, rhs0, gap, tol, anchor, details))
    return out[0], out[1]


def willmore_check(S: ParamSurface, tolerance: float = 1e-6) -> WeightedReport:
    """``int H^2 >= 16 pi`` with equality exactly for round spheres.

    ``abs_gap`` is the violation ``max(0, 16 pi - int H^2)``; the signed gap
    and the equality flag (``|gap| < tolerance``) are in ``details``.
    """
    I = surface_integrals(S)
    gap = I.int_H2 - 16 * math.pi
    details = _chart_details(S)
    details.update({"signed_gap": gap, "equality": bool(abs(gap) < tolerance)})
    return WeightedReport("willmore_lower_bound", I.int_H2, 16 * math.pi, max(0.0, -gap), tolerance,
                          "int H^2 >= 16 pi, equality iff round sphere", details)
