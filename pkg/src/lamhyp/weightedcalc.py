"""Gaussian-weighted calculus on discrete closed curves.

The drift Laplacian ``Lscr u = u'' - <x, t> u' / 2`` is self-adjoint for the
weight ``exp(-|x|^2/4) ds``; the stability operator is
``L u = Lscr u + (|A|^2 + 1/2) u``.  On a curve the second fundamental form
is the scalar ``a = -H``, so ``|A|^2 = H^2``, ``<A^2, A> = -H^3`` and
``|grad A|^2 = (H')^2``.

Every identity check that assumes the lambda-equation first verifies that
the input is a numeric lambda-curve (residual sup-norm below ``1e-3``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvegeom import CurveFields, PlaneCurve, d_ds, derive_fields, integrate, lambda_residual_curve
from .errors import NotALambdaCurveError
from .report import WeightedReport

LAMBDA_CURVE_TOL = 1e-3


@dataclass(frozen=True)
class ScalarField:
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError(f"field {self.name!r} must be a finite 1-d array")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


def _values(field, curve: PlaneCurve) -> np.ndarray:
    v = field.values if isinstance(field, ScalarField) else np.asarray(field, dtype=float)
    if v.shape != (len(curve),):
        raise ValueError(f"field has shape {v.shape}, curve has {len(curve)} vertices")
    return v


def _fields(curve: PlaneCurve, fields: CurveFields | None) -> CurveFields:
    return derive_fields(curve) if fields is None else fields


def gaussian_weight(fields: CurveFields) -> np.ndarray:
    r2 = np.einsum("ij,ij->i", fields.positions, fields.positions)
    return np.exp(-0.25 * r2)


def edge_weight(fields: CurveFields) -> np.ndarray:
    """Gaussian weight at the midpoint of each edge ``(i, i + 1)``."""
    x = fields.positions
    mid = 0.5 * (x + np.roll(x, -1, axis=0))
    return np.exp(-0.25 * np.einsum("ij,ij->i", mid, mid))


def _edge_flux(u: np.ndarray, fl: CurveFields) -> np.ndarray:
    # w * du/ds on each edge
    return edge_weight(fl) * (np.roll(u, -1) - u) / fl.edge


def drift_laplacian(field, curve: PlaneCurve, fields: CurveFields | None = None) -> ScalarField:
    """``Lscr u = Delta u - <x, grad u>/2`` along the curve.

    Discretized in weighted divergence form ``w^-1 (w u_s)_s`` with
    ``w = exp(-|x|^2/4)``: fluxes live on edges and are differenced over dual
    cells.  Second order on smoothly graded meshes, and summation by parts
    holds exactly, so the weighted integration-by-parts identity is inherited
    by the discrete operator up to rounding.
    """
    fl = _fields(curve, fields)
    u = _values(field, curve)
    flux = _edge_flux(u, fl)
    out = (flux - np.roll(flux, 1)) / (gaussian_weight(fl) * fl.cell)
    name = field.name if isinstance(field, ScalarField) else ""
    return ScalarField(out, f"Lscr({name})")


def stability_operator(field, curve: PlaneCurve, fields: CurveFields | None = None) -> ScalarField:
    """``L u = Lscr u + (H^2 + 1/2) u``."""
    fl = _fields(curve, fields)
    u = _values(field, curve)
    out = drift_laplacian(u, curve, fl).values + (fl.curvature**2 + 0.5) * u
    name = field.name if isinstance(field, ScalarField) else ""
    return ScalarField(out, f"L({name})")


def require_lambda_curve(curve: PlaneCurve, lam: float, fields: CurveFields | None = None) -> CurveFields:
    fl = _fields(curve, fields)
    res = lambda_residual_curve(curve, lam, fl)
    if res.sup_norm >= LAMBDA_CURVE_TOL:
        raise NotALambdaCurveError(
            f"lambda-residual sup-norm {res.sup_norm:.3e} >= {LAMBDA_CURVE_TOL} for lambda={lam}"
        )
    return fl


def simons_sides(curve: PlaneCurve, lam: float, fields: CurveFields | None = None):
    """Both sides of the Simons-type identity for ``|A|^2`` as per-vertex arrays.

    Left: ``Lscr(H^2)``.  Right:
    ``2 (1/2 - H^2) H^2 + 2 lam H^3 + 2 (H')^2``, the curve reduction of
    ``2(1/2 - |A|^2)|A|^2 - 2 lam <A^2, A> + 2 |grad A|^2``.
    """
    fl = _fields(curve, fields)
    h = fl.curvature
    h2 = h * h
    lhs = drift_laplacian(h2, curve, fl).values
    hp = d_ds(h, fl)
    rhs = 2 * (0.5 - h2) * h2 + 2 * lam * h2 * h + 2 * hp * hp
    return lhs, rhs


def _sup_report(check: str, anchor: str, lhs: np.ndarray, rhs: np.ndarray, tolerance: float, **details) -> WeightedReport:
    diff = np.abs(lhs - rhs)
    i = int(np.argmax(diff))
    return WeightedReport(check, float(lhs[i]), float(rhs[i]), float(diff[i]), tolerance, anchor, details)


def check_simons_curve(curve: PlaneCurve, lam: float, tolerance: float = 1e-3) -> WeightedReport:
    """Sup-norm gap of the Simons-type identity on a numeric lambda-curve."""
    fl = require_lambda_curve(curve, lam)
    lhs, rhs = simons_sides(curve, lam, fl)
    return _sup_report("simons_identity", "simons-type identity for |A|^2", lhs, rhs, tolerance,
                       vertices=len(curve), **{"lambda": lam})


def check_eigenfunction(curve: PlaneCurve, lam: float, direction=(1.0, 0.0), tolerance: float = 5e-4) -> WeightedReport:
    """Sup-norm of ``L<v, n> - <v, n>/2`` for a constant vector ``v``."""
    fl = require_lambda_curve(curve, lam)
    f = fl.normal @ np.asarray(direction, dtype=float)
    lf = stability_operator(f, curve, fl).values
    return _sup_report("normal_eigenfunction", "L<v,n> = <v,n>/2", lf, 0.5 * f, tolerance,
                       vertices=len(curve), **{"lambda": lam})


def check_position_identity(curve: PlaneCurve, lam: float, tolerance: float = 5e-4) -> WeightedReport:
    """Sup-norm of ``Lscr|x|^2 - (2 - |x|^2 - 2 lam <x, n>)`` (curve case, n = 1)."""
    fl = require_lambda_curve(curve, lam)
    r2 = np.einsum("ij,ij->i", fl.positions, fl.positions)
    lhs = drift_laplacian(r2, curve, fl).values
    rhs = 2.0 - r2 - 2 * lam * fl.support
    return _sup_report("position_identity", "Lscr|x|^2 = 2n - |x|^2 - 2 lam <x,n>", lhs, rhs, tolerance,
                       vertices=len(curve), **{"lambda": lam})


def check_integration_by_parts(u, v, curve: PlaneCurve, tolerance: float = 1e-6) -> WeightedReport:
    """Compare ``int u Lscr(v) w ds`` with ``-int u' v' w ds``, ``w = exp(-|x|^2/4)``.

    The left side uses the vertex trapezoid rule; the right side evaluates
    the gradients on edges and integrates with the midpoint rule.
    """
    fl = derive_fields(curve)
    uu = _values(u, curve)
    vv = _values(v, curve)
    w = gaussian_weight(fl)
    lhs = integrate(uu * drift_laplacian(vv, curve, fl).values * w, fl)
    du = (np.roll(uu, -1) - uu) / fl.edge
    dv = (np.roll(vv, -1) - vv) / fl.edge
    rhs = -float(np.sum(du * dv * edge_weight(fl) * fl.edge))
    return WeightedReport("weighted_integration_by_parts", lhs, rhs, abs(lhs - rhs), tolerance,
                          "int u Lscr(v) w = -int <grad u, grad v> w", {"vertices": len(curve)})


def check_weighted_LA2(curve: PlaneCurve, lam: float, tolerance: float = 1e-5) -> WeightedReport:
    """``int Lscr(|A|^2) exp(-|x|^2/4) ds``, which vanishes on closed lambda-curves.

    The pass threshold is ``tolerance * max(1, length)``.
    """
    fl = require_lambda_curve(curve, lam)
    h2 = fl.curvature**2
    val = integrate(drift_laplacian(h2, curve, fl).values * gaussian_weight(fl), fl)
    length = curve.length
    return WeightedReport("weighted_LA2_vanishes", val, 0.0, abs(val), tolerance * max(1.0, length),
                          "int Lscr|A|^2 w = 0", {"vertices": len(curve), "length": length, "lambda": lam})


def weighted_area(curve: PlaneCurve, fields: CurveFields | None = None) -> float:
    """Gaussian weighted length ``int exp(-|x|^2/4) ds``."""
    fl = _fields(curve, fields)
    return integrate(gaussian_weight(fl), fl)


def f_functional(curve: PlaneCurve, fields: CurveFields | None = None) -> float:
    """``(4 pi)^(-1/2)`` times the weighted length; equals 1 on a line through 0."""
    return weighted_area(curve, fields) / math.sqrt(4 * math.pi)


def grad_A_weighted(curve: PlaneCurve, fields: CurveFields | None = None) -> float:
    """``int (H')^2 exp(-|x|^2/4) ds`` with edge differences (midpoint rule)."""
    fl = _fields(curve, fields)
    dh = (np.roll(fl.curvature, -1) - fl.curvature) / fl.edge
    return float(np.sum(dh * dh * edge_weight(fl) * fl.edge))


def refinement_order(errors, factor: float = 2.0) -> list[float]:
    """Observed convergence orders between successive refinement levels."""
    e = np.asarray(errors, dtype=float)
    return list(np.log(e[:-1] / e[1:]) / math.log(factor))
