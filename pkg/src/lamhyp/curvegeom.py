"""Discrete geometry of closed plane curves.

Curves are closed polygons stored as an ``(m, 2)`` vertex array, traversed
counterclockwise.  Differential quantities are computed by periodic
central differences in the vertex index, which is second-order accurate on
any smoothly parametrized curve (uniform in arclength or not).

Sign conventions: ``n`` is the outward unit normal and the curvature is
``H = -<d^2 x/ds^2, n>``, so convex curves have ``H > 0``.  The scalar second
fundamental form of the curve is ``a = <d^2 x/ds^2, n> = -H``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateCurveError, NonIntegerTurningError, TooFewVerticesError

MIN_VERTICES = 16


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def edge_lengths(vertices: np.ndarray) -> np.ndarray:
    """Length of edge ``i -> i+1`` (closing edge last)."""
    return np.linalg.norm(np.roll(vertices, -1, axis=0) - vertices, axis=1)


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Closed polygon in the plane, oriented counterclockwise.

    Vertices given clockwise (negative signed area) are reversed, keeping
    vertex 0 in place.  The last vertex connects back to the first; do not
    repeat the first vertex at the end.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f"vertices must have shape (m, 2), got {v.shape}")
        if v.shape[0] < MIN_VERTICES:
            raise TooFewVerticesError(f"need at least {MIN_VERTICES} vertices, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise DegenerateCurveError("non-finite vertex coordinates")
        ell = edge_lengths(v)
        if ell.min() <= 1e-10 * ell.sum():
            raise DegenerateCurveError("consecutive vertices coincide")
        if signed_area(v) < 0:
            v = np.roll(v[::-1], 1, axis=0)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    closed = True

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def length(self) -> float:
        return float(edge_lengths(self.vertices).sum())

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def diameter(self) -> float:
        v = self.vertices
        # farthest pair lies on the convex hull; the hull is small for our curves
        from scipy.spatial import ConvexHull

        hull = v[ConvexHull(v).vertices]
        d = np.linalg.norm(hull[:, None, :] - hull[None, :, :], axis=-1)
        return float(d.max())

    def edge_ratio(self) -> float:
        ell = edge_lengths(self.vertices)
        return float(ell.max() / ell.min())

    def transformed(self, rotation: float = 0.0, scale: float = 1.0, shift=(0.0, 0.0)) -> PlaneCurve:
        c, s = math.cos(rotation), math.sin(rotation)
        rot = np.array([[c, -s], [s, c]])
        return PlaneCurve(scale * self.vertices @ rot.T + np.asarray(shift, dtype=float))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y"])
            for x, y in self.vertices:
                w.writerow([repr(float(x)), repr(float(y))])

    @classmethod
    def from_csv(cls, path) -> PlaneCurve:
        with open(Path(path), newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls(np.array([[float(r["x"]), float(r["y"])] for r in rows]))


# ---------------------------------------------------------------------------
# sample curves
# ---------------------------------------------------------------------------


def circle(radius: float, count: int, center=(0.0, 0.0), phase: float = 0.0, turns: int = 1) -> PlaneCurve:
    """Regular polygon inscribed in a circle (``turns > 1`` gives a multiple cover)."""
    t = phase + 2 * np.pi * turns * np.arange(count) / count
    pts = radius * np.column_stack([np.cos(t), np.sin(t)]) + np.asarray(center, dtype=float)
    return PlaneCurve(pts)


def ellipse(a: float, b: float, count: int) -> PlaneCurve:
    """Ellipse with semi-axes ``a`` (x) and ``b`` (y), uniform in the angle parameter."""
    t = 2 * np.pi * np.arange(count) / count
    return PlaneCurve(np.column_stack([a * np.cos(t), b * np.sin(t)]))


def figure_eight(count: int, size: float = 1.0) -> PlaneCurve:
    """Lemniscate of Gerono; crosses itself at the origin."""
    t = 2 * np.pi * np.arange(count) / count + 0.1
    return PlaneCurve(size * np.column_stack([np.sin(t), np.sin(t) * np.cos(t)]))


def limacon(count: int, a: float = 1.0, b: float = 2.0) -> PlaneCurve:
    """Polar curve ``r = a + b cos(phi)``; has an inner loop when ``b > a``."""
    phi = 2 * np.pi * np.arange(count) / count
    r = a + b * np.cos(phi)
    return PlaneCurve(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))


# ---------------------------------------------------------------------------
# derived fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurveFields:
    """Per-vertex differential quantities of a :class:`PlaneCurve`.

    ``speed`` and ``speed_prime`` are ``ds/dsigma`` and ``d^2s/dsigma^2`` for
    the vertex-index parameter ``sigma``; they turn index differences into
    arclength derivatives (see :func:`d_ds`).  ``edge`` holds the length of
    the edge from vertex ``i`` to ``i + 1`` and ``cell`` the dual-cell length
    ``(edge[i-1] + edge[i]) / 2`` used as the trapezoid weight.
    """

    positions: np.ndarray
    arclength: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray
    rescaled_H: np.ndarray
    speed: np.ndarray
    speed_prime: np.ndarray
    edge: np.ndarray
    cell: np.ndarray

    @property
    def support(self) -> np.ndarray:
        """``<x, n>`` per vertex."""
        return np.einsum("ij,ij->i", self.positions, self.normal)

    @property
    def tangential_position(self) -> np.ndarray:
        """``<x, t>`` per vertex."""
        return np.einsum("ij,ij->i", self.positions, self.tangent)


def _check_collinear(x: np.ndarray) -> None:
    # a straight run covering more than a tenth of the curve breaks the stencils
    a = x - np.roll(x, 1, axis=0)
    b = np.roll(x, -1, axis=0) - x
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    flat = np.abs(cross) <= 1e-14 * np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
    if not flat.any():
        return
    m = len(x)
    if flat.all():
        raise DegenerateCurveError("all vertices collinear")
    # longest cyclic run of flat vertices
    start = int(np.argmin(flat))
    rolled = np.roll(flat, -start)
    run = best = 0
    for f in rolled:
        run = run + 1 if f else 0
        best = max(best, run)
    if best + 2 > 0.1 * m:
        raise DegenerateCurveError(f"collinear run of {best + 2} vertices")


def derive_fields(curve: PlaneCurve, method: str = "parametric") -> CurveFields:
    """Tangent, outward normal, curvature and rescaled mean curvature.

    Parameters
    ----------
    curve : PlaneCurve
    method : {"parametric", "circumcircle"}
        ``"parametric"`` uses ``H = (x' x x'') / |x'|^3`` with central
        differences in the vertex index; its error is ``O(h^2)`` with a smooth
        error profile, which keeps nested differentiation second order.
        ``"circumcircle"`` uses the curvature of the circle through three
        consecutive vertices, exact on inscribed regular polygons.

    Returns
    -------
    CurveFields
    """
    x = curve.vertices
    _check_collinear(x)
    xp = 0.5 * (np.roll(x, -1, axis=0) - np.roll(x, 1, axis=0))
    xpp = np.roll(x, -1, axis=0) - 2 * x + np.roll(x, 1, axis=0)
    speed = np.hypot(xp[:, 0], xp[:, 1])
    if speed.min() <= 0:
        raise DegenerateCurveError("zero chord at a vertex")
    tangent = xp / speed[:, None]
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    if method == "parametric":
        curv = (xp[:, 0] * xpp[:, 1] - xp[:, 1] * xpp[:, 0]) / speed**3
    elif method == "circumcircle":
        a = x - np.roll(x, 1, axis=0)
        b = np.roll(x, -1, axis=0) - x
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        curv = 2 * cross / (
            np.hypot(a[:, 0], a[:, 1]) * np.hypot(b[:, 0], b[:, 1]) * (2 * speed)
        )
    else:
        raise ValueError(f"unknown curvature method {method!r}")
    speed_prime = np.einsum("ij,ij->i", xp, xpp) / speed
    ell = edge_lengths(x)
    arclength = np.concatenate([[0.0], np.cumsum(ell[:-1])])
    support = np.einsum("ij,ij->i", x, normal)
    return CurveFields(
        positions=x,
        arclength=arclength,
        tangent=tangent,
        normal=normal,
        curvature=curv,
        rescaled_H=curv - 0.5 * support,
        speed=speed,
        speed_prime=speed_prime,
        edge=ell,
        cell=0.5 * (ell + np.roll(ell, 1)),
    )


def d_ds(values: np.ndarray, fields: CurveFields) -> np.ndarray:
    """Arclength derivative of a per-vertex field (periodic, second order)."""
    u = np.asarray(values, dtype=float)
    du = 0.5 * (np.roll(u, -1) - np.roll(u, 1))
    return du / fields.speed


def d2_ds2(values: np.ndarray, fields: CurveFields) -> np.ndarray:
    """Second arclength derivative of a per-vertex field."""
    u = np.asarray(values, dtype=float)
    du = 0.5 * (np.roll(u, -1) - np.roll(u, 1))
    ddu = np.roll(u, -1) - 2 * u + np.roll(u, 1)
    s1 = fields.speed
    return (ddu - fields.speed_prime / s1 * du) / s1**2


def integrate(values: np.ndarray, fields: CurveFields) -> float:
    """Trapezoid rule over the closed polygon, ``sum_i u_i cell_i``."""
    return float(np.sum(np.asarray(values, dtype=float) * fields.cell))


@dataclass(frozen=True)
class CurveResidual:
    residual: np.ndarray
    sup_norm: float


def lambda_residual_curve(curve: PlaneCurve, lam: float, fields: CurveFields | None = None) -> CurveResidual:
    """Per-vertex ``H - <x, n>/2 - lam`` and its sup-norm."""
    fields = derive_fields(curve) if fields is None else fields
    res = fields.rescaled_H - lam
    return CurveResidual(res, float(np.max(np.abs(res))))


# ---------------------------------------------------------------------------
# resampling
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _spline(vertices: np.ndarray):
    ell = edge_lengths(vertices)
    knots = np.concatenate([[0.0], np.cumsum(ell)])
    closed = np.vstack([vertices, vertices[:1]])
    return knots, CubicSpline(knots, closed, bc_type="periodic")


def _segment_lengths(spl, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    p = mid[:, None] + half[:, None] * _GL_X[None, :]
    d = spl(p, 1)
    speed = np.hypot(d[..., 0], d[..., 1])
    return half * (speed @ _GL_W)


def resample(curve: PlaneCurve, target_count: int) -> PlaneCurve:
    """Arclength-uniform resampling through a periodic cubic spline.

    The spline interpolates the vertices in chord-length parametrization;
    new vertices are equally spaced in the spline's own arclength, starting
    at vertex 0.
    """
    if target_count < MIN_VERTICES:
        raise TooFewVerticesError(f"target_count must be >= {MIN_VERTICES}")
    v = curve.vertices
    knots, spl = _spline(v)
    seg = _segment_lengths(spl, knots[:-1], knots[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if not total > 0:
        raise DegenerateCurveError("zero-length curve")
    targets = total * np.arange(target_count) / target_count
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(seg) - 1)
    lo = knots[idx]
    # linear guess inside the knot interval, then Newton on arclength
    p = lo + (targets - cum[idx]) / seg[idx] * (knots[idx + 1] - knots[idx])
    for _ in range(8):
        s = cum[idx] + _segment_lengths(spl, lo, p)
        d = spl(p, 1)
        step = (s - targets) / np.hypot(d[:, 0], d[:, 1])
        p = p - step
        if np.max(np.abs(step)) < 1e-15 * total:
            break
    return PlaneCurve(spl(p))


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _candidate_pairs(p: np.ndarray, q: np.ndarray):
    """Edge pairs whose x-extents overlap (sort-and-sweep)."""
    xmin = np.minimum(p[:, 0], q[:, 0])
    xmax = np.maximum(p[:, 0], q[:, 0])
    order = np.argsort(xmin, kind="stable")
    xmin_s, xmax_s = xmin[order], xmax[order]
    hi = np.searchsorted(xmin_s, xmax_s, side="right")
    counts = hi - np.arange(len(order)) - 1
    counts = np.maximum(counts, 0)
    first = np.repeat(np.arange(len(order)), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    second = first + 1 + offsets
    return order[first], order[second]


def is_embedded(curve: PlaneCurve) -> bool:
    """True iff no two non-adjacent edges of the closed polygon intersect."""
    p = curve.vertices
    q = np.roll(p, -1, axis=0)
    m = len(p)
    i, j = _candidate_pairs(p, q)
    gap = np.abs(i - j)
    keep = (gap != 1) & (gap != m - 1) & (gap != 0)
    i, j = i[keep], j[keep]
    ymin_i = np.minimum(p[i, 1], q[i, 1])
    ymax_i = np.maximum(p[i, 1], q[i, 1])
    ymin_j = np.minimum(p[j, 1], q[j, 1])
    ymax_j = np.maximum(p[j, 1], q[j, 1])
    keep = (ymin_i <= ymax_j) & (ymin_j <= ymax_i)
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return True
    a, b, c, d = p[i], q[i], p[j], q[j]
    o1 = _orient(a[:, 0], a[:, 1], b[:, 0], b[:, 1], c[:, 0], c[:, 1])
    o2 = _orient(a[:, 0], a[:, 1], b[:, 0], b[:, 1], d[:, 0], d[:, 1])
    o3 = _orient(c[:, 0], c[:, 1], d[:, 0], d[:, 1], a[:, 0], a[:, 1])
    o4 = _orient(c[:, 0], c[:, 1], d[:, 0], d[:, 1], b[:, 0], b[:, 1])
    proper = (np.sign(o1) * np.sign(o2) < 0) & (np.sign(o3) * np.sign(o4) < 0)
    # touching / collinear overlap counts as an intersection
    touching = ((o1 == 0) | (o2 == 0) | (o3 == 0) | (o4 == 0)) & (
        (np.sign(o1) * np.sign(o2) <= 0) & (np.sign(o3) * np.sign(o4) <= 0)
    )
    return not bool(np.any(proper | touching))


def turning_number(curve: PlaneCurve) -> int:
    """Rotation index of the tangent: total exterior angle over ``2 pi``."""
    x = curve.vertices
    e = np.roll(x, -1, axis=0) - x
    e_prev = np.roll(e, 1, axis=0)
    cross = e_prev[:, 0] * e[:, 1] - e_prev[:, 1] * e[:, 0]
    dot = np.einsum("ij,ij->i", e_prev, e)
    ang = np.arctan2(cross, dot)
    if np.max(np.abs(ang)) > 0.5 * np.pi:
        raise NonIntegerTurningError("exterior angle above pi/2: curve under-resolved")
    total = float(np.sum(ang)) / (2 * np.pi)
    k = round(total)
    if abs(total - k) > 1e-3:
        raise NonIntegerTurningError(f"turning {total:.6f} is not close to an integer")
    return int(k)
