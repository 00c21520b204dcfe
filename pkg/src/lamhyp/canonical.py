"""Exact lambda-hypersurfaces and the closed-form gap thresholds.

A hypersurface is a lambda-hypersurface when ``H - <x, n>/2 = lam`` holds
pointwise, with ``H = div n`` (so ``H = n/r`` on the round n-sphere of radius
``r``) and ``n`` the outward unit normal.  The three canonical families are
spheres, generalized cylinders ``S^k x R^(n-k)`` and affine hyperplanes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidDimensionError, NotApplicableError, OffSurfaceError

ON_SURFACE_TOL = 1e-12
EQUALITY_TOL = 1e-12


class Kind(enum.Enum):
    SPHERE = "sphere"
    CYLINDER = "cylinder"
    HYPERPLANE = "hyperplane"


def canonical_radius(kind: Kind | str, n: int, k: int | None = None, lam: float = 0.0) -> float:
    """Radius of the round factor of a canonical lambda-hypersurface.

    Parameters
    ----------
    kind : Kind or str
        ``"sphere"`` or ``"cylinder"``.
    n : int
        Dimension of the hypersurface (ambient dimension minus one).
    k : int, optional
        Dimension of the sphere factor; required for cylinders,
        ``1 <= k <= n - 1``.
    lam : float
        The constant ``lam``.

    Returns
    -------
    float
        ``sqrt(lam**2 + 2m) - lam`` with ``m = n`` (sphere) or ``m = k``
        (cylinder).  It is the positive root of ``r**2 + 2 lam r - 2m = 0``.
    """
    kind = Kind(kind)
    if kind is Kind.HYPERPLANE:
        raise NotApplicableError("hyperplanes have no radius")
    if n < 1:
        raise InvalidDimensionError(f"hypersurface dimension must be >= 1, got {n}")
    if not math.isfinite(lam):
        raise DomainError("lambda must be finite")
    if kind is Kind.SPHERE:
        m = n
    else:
        if k is None or not 1 <= k <= n - 1:
            raise InvalidDimensionError(f"cylinder needs 1 <= k <= n-1, got k={k}, n={n}")
        m = k
    # sqrt(lam^2+2m) - lam loses digits for large lam; use the conjugate form there
    root = math.sqrt(lam * lam + 2 * m)
    if lam > 0:
        return 2 * m / (root + lam)
    return root - lam


@dataclass(frozen=True)
class CanonicalSpec:
    """A sphere, cylinder or hyperplane solving the lambda-equation.

    The hypersurface lives in ``R^(ambient_dim)``; ``n = ambient_dim - 1``.
    Cylinders are ``S^k(r) x R^(n-k)`` with the round factor in the first
    ``k + 1`` coordinates.  The hyperplane is ``{x : x_last = offset}`` with
    unit normal ``e_last``, placed at ``offset = -2 lam`` so that the
    lambda-equation holds with ``H = 0``.
    """

    kind: Kind
    ambient_dim: int
    lam: float
    sphere_factor_dim: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.ambient_dim < 2:
            raise InvalidDimensionError("ambient dimension must be >= 2")
        if self.kind is Kind.CYLINDER:
            k = self.sphere_factor_dim
            if k is None or not 1 <= k <= self.n - 1:
                raise InvalidDimensionError(
                    f"cylinder needs 1 <= k <= n-1, got k={k}, n={self.n}"
                )
        elif self.sphere_factor_dim is not None:
            raise InvalidDimensionError("sphere_factor_dim applies to cylinders only")
        if not math.isfinite(self.lam):
            raise DomainError("lambda must be finite")

    @classmethod
    def sphere(cls, n: int, lam: float) -> CanonicalSpec:
        return cls(Kind.SPHERE, n + 1, lam)

    @classmethod
    def cylinder(cls, n: int, k: int, lam: float) -> CanonicalSpec:
        return cls(Kind.CYLINDER, n + 1, lam, k)

    @classmethod
    def hyperplane(cls, n: int, lam: float) -> CanonicalSpec:
        return cls(Kind.HYPERPLANE, n + 1, lam)

    @property
    def n(self) -> int:
        return self.ambient_dim - 1

    @property
    def radius(self) -> float | None:
        if self.kind is Kind.HYPERPLANE:
            return None
        return canonical_radius(self.kind, self.n, self.sphere_factor_dim, self.lam)

    @property
    def offset(self) -> float | None:
        if self.kind is Kind.HYPERPLANE:
            return -2.0 * self.lam
        return None

    @property
    def mean_curvature(self) -> float:
        if self.kind is Kind.HYPERPLANE:
            return 0.0
        m = self.n if self.kind is Kind.SPHERE else self.sphere_factor_dim
        return m / self.radius

    def _round_part(self, x: np.ndarray) -> np.ndarray:
        if self.kind is Kind.SPHERE:
            return x
        return x[..., : self.sphere_factor_dim + 1]

    def surface_defect(self, x) -> np.ndarray:
        """Signed distance of point(s) ``x`` from the hypersurface."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise InvalidDimensionError(
                f"expected points in R^{self.ambient_dim}, got shape {x.shape}"
            )
        if self.kind is Kind.HYPERPLANE:
            return x[..., -1] - self.offset
        return np.linalg.norm(self._round_part(x), axis=-1) - self.radius

    def normal(self, x) -> np.ndarray:
        """Outward unit normal at on-surface point(s) ``x``."""
        x = np.asarray(x, dtype=float)
        nrm = np.zeros_like(x)
        if self.kind is Kind.HYPERPLANE:
            nrm[..., -1] = 1.0
            return nrm
        y = self._round_part(x)
        nrm[..., : y.shape[-1]] = y / np.linalg.norm(y, axis=-1, keepdims=True)
        return nrm

    def sample(self, count: int, rng: np.random.Generator | None = None, spread: float = 3.0) -> np.ndarray:
        """Points on the hypersurface; flat directions drawn from N(0, spread^2)."""
        rng = np.random.default_rng(0) if rng is None else rng
        d = self.ambient_dim
        pts = rng.normal(scale=spread, size=(count, d))
        if self.kind is Kind.HYPERPLANE:
            pts[:, -1] = self.offset
            return pts
        j = d if self.kind is Kind.SPHERE else self.sphere_factor_dim + 1
        g = rng.normal(size=(count, j))
        pts[:, :j] = self.radius * g / np.linalg.norm(g, axis=1, keepdims=True)
        return pts


def lambda_residual(spec: CanonicalSpec, sample) -> np.ndarray | float:
    """``H - <x, n>/2 - lam`` at on-surface sample point(s).

    Raises
    ------
    OffSurfaceError
        If a sample is farther than ``1e-12`` (relative to the surface scale)
        from the hypersurface.
    """
    x = np.asarray(sample, dtype=float)
    scale = max(1.0, spec.radius or abs(spec.offset))
    defect = np.abs(spec.surface_defect(x))
    if np.any(defect > ON_SURFACE_TOL * scale):
        raise OffSurfaceError(f"sample off the surface by {float(np.max(defect)):.3e}")
    support = np.sum(x * spec.normal(x), axis=-1)
    res = spec.mean_curvature - 0.5 * support - spec.lam
    return float(res) if res.ndim == 0 else res


def second_fundamental_norm(spec: CanonicalSpec) -> float:
    """|A|: sqrt(n)/r on spheres, sqrt(k)/r on cylinders, 0 on hyperplanes."""
    if spec.kind is Kind.HYPERPLANE:
        return 0.0
    m = spec.n if spec.kind is Kind.SPHERE else spec.sphere_factor_dim
    return math.sqrt(m) / spec.radius


def gap_threshold(lam: float) -> float:
    """Pinching constant ``(sqrt(lam^2 + 2) - |lam|) / 2`` for the norm of the second fundamental form."""
    a = abs(lam)
    # conjugate form, stable for large |lam|
    return 1.0 / (math.sqrt(a * a + 2.0) + a)


def _require_nonnegative(lam: float, n: int | None = None) -> None:
    if not lam >= 0:
        raise DomainError(f"bound is only established for lambda >= 0, got {lam}")
    if n is not None and n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")


def closed_gap_bound(lam: float, n: int) -> float:
    """Upper bound on |A|^2 forcing a closed lambda-hypersurface to be a sphere."""
    _require_nonnegative(lam, n)
    return 0.5 + lam * (lam + math.sqrt(lam * lam + 2 * n)) / (2 * n)


def position_bound(lam: float, n: int) -> float:
    """Bound on |x| forcing a closed lambda-hypersurface to be a sphere."""
    _require_nonnegative(lam, n)
    return canonical_radius(Kind.SPHERE, n, None, lam)


def willmore_gap_bound(lam: float) -> float:
    """|A|^2 bound ``(1 + lam^2)/2`` for closed lambda-surfaces in R^3."""
    _require_nonnegative(lam)
    return 0.5 * (1.0 + lam * lam)


@dataclass(frozen=True)
class GapReport:
    spec: CanonicalSpec
    norm_A: float
    threshold: float
    outcome: str  # "below", "equal" or "above"
    predicted_class: str

    def to_dict(self) -> dict:
        return {
            "kind": self.spec.kind.value,
            "n": self.spec.n,
            "k": self.spec.sphere_factor_dim,
            "lambda": self.spec.lam,
            "norm_A": self.norm_A,
            "threshold": self.threshold,
            "outcome": self.outcome,
            "predicted_class": self.predicted_class,
        }


def classify_by_gap(spec: CanonicalSpec) -> GapReport:
    """Compare |A| of a canonical solution with the pinching constant.

    Below the threshold only hyperplanes survive.  At equality the round
    factor ``S^k x R^(n-k)`` is also allowed.  Above it nothing is predicted.
    """
    norm_a = second_fundamental_norm(spec)
    thr = gap_threshold(spec.lam)
    if abs(norm_a - thr) <= EQUALITY_TOL:
        outcome = "equal"
        predicted = "sphere-or-cylinder"
    elif norm_a < thr:
        outcome = "below"
        predicted = "hyperplane"
    else:
        outcome = "above"
        predicted = "outside-gap-regime"
    return GapReport(spec, norm_a, thr, outcome, predicted)
