"""Rescaled mean curvature flow of closed plane curves.

Each vertex moves by ``dx/dt = -(H - <x, n>/2) n`` (forward Euler).  Self-
shrinkers (``H = <x, n>/2``, the round circle of radius ``sqrt(2)``) are the
stationary points.  Curvature and normal come from the circumcircle through
three consecutive vertices, which is exact on inscribed regular polygons;
that keeps circles circular and makes the exact circle solution a sharp
oracle.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .curvegeom import PlaneCurve, edge_lengths, is_embedded, resample
from .errors import ConfigError, DegenerateCurveError, PreconditionError, StabilityError
from .report import WeightedReport

STABILITY_FACTOR = 0.25


class TerminalStatus(enum.Enum):
    REACHED_TMAX = "ReachedTmax"
    SINGULARITY_DETECTED = "SingularityDetected"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class FlowConfig:
    """Time stepping parameters.

    ``dt`` is the nominal step; the run shortens it to
    ``0.25 * (min edge)^2`` whenever that is smaller.  A singularity is
    declared when ``max |H|`` exceeds ``blowup_threshold`` or the shortest
    edge falls below ``edge_collapse`` times its initial value.
    """

    dt: float
    t_max: float
    resample_every: int = 10
    vertex_count: int = 512
    blowup_threshold: float = 1e3
    edge_collapse: float = 1e-4
    snapshot_every: int = 1000
    check_embedded: bool = True

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError("dt must be positive")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ConfigError("t_max must be positive")
        if self.vertex_count < 64:
            raise ConfigError("vertex_count must be at least 64")
        if self.resample_every < 1 or self.snapshot_every < 1:
            raise ConfigError("resample_every and snapshot_every must be >= 1")
        if not self.blowup_threshold > 0:
            raise ConfigError("blowup_threshold must be positive")


@dataclass
class FlowTrace:
    """Per-step monitors and sparse curve snapshots of one run."""

    times: list[float] = field(default_factory=list)
    min_rescaled_H: list[float] = field(default_factory=list)
    f_functional: list[float] = field(default_factory=list)
    max_abs_H: list[float] = field(default_factory=list)
    snapshot_times: list[float] = field(default_factory=list)
    curves: list[PlaneCurve] = field(default_factory=list)
    embedded: list[bool] = field(default_factory=list)
    terminal_status: TerminalStatus = TerminalStatus.REACHED_TMAX
    message: str = ""

    @property
    def final_time(self) -> float:
        return self.times[-1]

    @property
    def final_curve(self) -> PlaneCurve:
        return self.curves[-1]

    def f_increase(self) -> float:
        """Largest step-to-step increase of the F-functional (<= 0 if monotone)."""
        f = np.asarray(self.f_functional)
        if len(f) < 2:
            return 0.0
        return float(np.max(np.diff(f)))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,min_rescaled_H,F,max_abs_H\n")
            for row in zip(self.times, self.min_rescaled_H, self.f_functional, self.max_abs_H):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def stable_dt(curve: PlaneCurve) -> float:
    """Largest step allowed by the explicit parabolic bound ``0.25 h_min^2``."""
    return STABILITY_FACTOR * float(edge_lengths(curve.vertices).min()) ** 2


@dataclass
class _State:
    """Circumcircle geometry of a polygon, reused for the step and the monitors."""

    speed: np.ndarray  # normal speed H - <x, n>/2, i.e. the rescaled mean curvature
    normal: np.ndarray
    H: np.ndarray
    cell: np.ndarray  # dual-cell length (|x_i - x_{i-1}| + |x_{i+1} - x_i|) / 2
    h_min: float


def _state(x: np.ndarray, prev: np.ndarray | None = None, nxt: np.ndarray | None = None) -> _State:
    m = len(x)
    if prev is None:
        prev = np.r_[m - 1, 0 : m - 1]
        nxt = np.r_[1:m, 0]
    a = x - x[prev]
    b = x[nxt] - x
    c = a + b
    la = np.hypot(a[:, 0], a[:, 1])
    lb = np.hypot(b[:, 0], b[:, 1])
    lc = np.hypot(c[:, 0], c[:, 1])
    if lc.min() <= 0 or la.min() <= 0:
        raise DegenerateCurveError("zero edge or chord at a vertex")
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    H = 2 * cross / (la * lb * lc)
    normal = np.column_stack([c[:, 1] / lc, -c[:, 0] / lc])
    speed = H - 0.5 * (x[:, 0] * normal[:, 0] + x[:, 1] * normal[:, 1])
    return _State(speed, normal, H, 0.5 * (la + lb), float(la.min()))


def flow_step(curve: PlaneCurve, dt: float, resample_to: int | None = None) -> PlaneCurve:
    """One forward-Euler step ``x <- x - dt (H - <x, n>/2) n``.

    Raises
    ------
    StabilityError
        If ``dt`` exceeds ``0.25 * (min edge)^2``.
    DegenerateCurveError
        If the updated polygon collapses.
    """
    x = curve.vertices
    st = _state(x)
    if dt > STABILITY_FACTOR * st.h_min**2 * (1 + 1e-12):
        raise StabilityError(f"dt={dt:.3e} exceeds stability bound {STABILITY_FACTOR * st.h_min**2:.3e}")
    out = PlaneCurve(x - dt * st.speed[:, None] * st.normal)
    if resample_to is not None:
        out = resample(out, resample_to)
    return out


_F_NORM = 1.0 / math.sqrt(4 * math.pi)


def _monitors(x: np.ndarray, st: _State) -> tuple[float, float, float]:
    """``(min rescaled H, F, max |H|)``.

    Same quantities as ``derive_fields(..., "circumcircle")`` with
    ``weightedcalc.f_functional`` (trapezoid rule over dual cells).
    """
    w = np.exp(-0.25 * (x[:, 0] ** 2 + x[:, 1] ** 2))
    f = float(np.dot(w, st.cell)) * _F_NORM
    return float(st.speed.min()), f, float(np.abs(st.H).max())


def run_flow(curve: PlaneCurve, config: FlowConfig) -> FlowTrace:
    """Flow ``curve`` until ``t_max`` or a detected singularity.

    The initial curve is resampled to ``config.vertex_count`` vertices.
    Monitors are recorded for every state, snapshots every
    ``config.snapshot_every`` steps plus the first and last state.
    """
    if config.check_embedded and not is_embedded(curve):
        raise PreconditionError("initial curve is not embedded")
    cur = resample(curve, config.vertex_count)
    m = config.vertex_count
    prev = np.r_[m - 1, 0 : m - 1]
    nxt = np.r_[1:m, 0]
    trace = FlowTrace()
    x = cur.vertices
    h0 = float(edge_lengths(x).min())
    t = 0.0
    step = 0
    status = TerminalStatus.REACHED_TMAX
    trace.snapshot_times.append(t)
    trace.curves.append(cur)
    last_snapshot = 0
    while True:
        try:
            st = _state(x, prev, nxt)
        except (ValueError, ArithmeticError) as exc:
            status = TerminalStatus.STEP_FAILURE
            trace.message = f"{type(exc).__name__}: {exc}"
            break
        mn, f, hmax = _monitors(x, st)
        trace.times.append(t)
        trace.min_rescaled_H.append(mn)
        trace.f_functional.append(f)
        trace.max_abs_H.append(hmax)
        if hmax > config.blowup_threshold:
            status = TerminalStatus.SINGULARITY_DETECTED
            trace.message = f"max |H| = {hmax:.4g} exceeds {config.blowup_threshold:g}"
            break
        if st.h_min < config.edge_collapse * h0:
            status = TerminalStatus.SINGULARITY_DETECTED
            trace.message = f"edge length {st.h_min:.3g} collapsed below {config.edge_collapse:g} x initial"
            break
        if t >= config.t_max:
            break
        dt = min(config.dt, STABILITY_FACTOR * st.h_min * st.h_min, config.t_max - t)
        x = x - dt * st.speed[:, None] * st.normal
        step += 1
        t = config.t_max if config.t_max - t - dt <= 1e-15 * config.t_max else t + dt
        try:
            if not np.all(np.isfinite(x)):
                raise DegenerateCurveError("non-finite vertex after step")
            if step % config.resample_every == 0:
                cur = resample(PlaneCurve(x), m)
                x = cur.vertices
                if config.check_embedded:
                    trace.embedded.append(is_embedded(cur))
            if step % config.snapshot_every == 0:
                trace.snapshot_times.append(t)
                trace.curves.append(PlaneCurve(x))
                last_snapshot = step
        except (ValueError, ArithmeticError) as exc:
            status = TerminalStatus.STEP_FAILURE
            trace.message = f"{type(exc).__name__}: {exc}"
            break
    if last_snapshot != step or step == 0 and len(trace.curves) == 0:
        try:
            final = PlaneCurve(x)
        except (ValueError, ArithmeticError):
            final = trace.curves[-1]
        trace.snapshot_times.append(trace.times[-1])
        trace.curves.append(final)
    if trace.snapshot_times[0] == trace.snapshot_times[-1] and len(trace.curves) > 1 and step == 0:
        trace.snapshot_times.pop()
        trace.curves.pop()
    trace.terminal_status = status
    return trace


@dataclass(frozen=True)
class CircleFlow:
    """Exact rescaled flow of a round circle centred at the origin."""

    r0: float
    t: float
    radius: float | None
    extinction_time: float | None

    @property
    def extinct(self) -> bool:
        return self.radius is None


def circle_flow_exact(r0: float, t: float) -> CircleFlow:
    """``r(t)^2 = 2 + (r0^2 - 2) e^t``; extinction at ``log(2 / (2 - r0^2))`` when ``r0 < sqrt(2)``."""
    if not r0 > 0:
        raise PreconditionError("r0 must be positive")
    ext = math.log(2.0 / (2.0 - r0 * r0)) if r0 * r0 < 2 else None
    rad2 = 2.0 + (r0 * r0 - 2.0) * math.exp(t)
    radius = math.sqrt(rad2) if rad2 > 0 and (ext is None or t < ext) else None
    return CircleFlow(r0, t, radius, ext)


def sign_preservation_report(trace: FlowTrace, slack: float = 1e-5) -> WeightedReport:
    """Check that nonnegative rescaled mean curvature stays nonnegative.

    Raises
    ------
    PreconditionError
        If the initial curve has ``min rescaled H < -1e-8``.
    """
    m = np.asarray(trace.min_rescaled_H)
    if m[0] < -1e-8:
        raise PreconditionError(f"initial min rescaled H = {m[0]:.3e} is negative")
    lo = float(m.min())
    return WeightedReport("rescaled_H_sign_preserved", lo, 0.0, max(0.0, -lo), slack,
                          "H - <x,n>/2 >= 0 is preserved", {"initial_min": float(m[0]), "steps": len(m) - 1})


def f_monotonicity_report(trace: FlowTrace, slack: float = 1e-8) -> WeightedReport:
    inc = trace.f_increase()
    f = trace.f_functional
    return WeightedReport("f_functional_nonincreasing", float(f[-1]), float(f[0]), max(0.0, inc), slack,
                          "F decreases along the flow", {"max_step_increase": inc, "steps": len(f) - 1})


def hausdorff_distance(a: PlaneCurve, b: PlaneCurve) -> float:
    """Symmetric Hausdorff distance between two polygons.

    Vertex-to-polyline distances, with the nearest segment searched around
    the nearest vertex.
    """
    return max(_one_sided(a.vertices, b.vertices), _one_sided(b.vertices, a.vertices))


def _one_sided(p: np.ndarray, q: np.ndarray) -> float:
    _, idx = cKDTree(q).query(p)
    m = len(q)
    best = np.full(len(p), np.inf)
    for shift in (-1, 0):
        s0 = q[(idx + shift) % m]
        s1 = q[(idx + shift + 1) % m]
        d = s1 - s0
        tt = np.clip(np.einsum("ij,ij->i", p - s0, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
        proj = s0 + tt[:, None] * d
        best = np.minimum(best, np.hypot(*(p - proj).T))
    return float(best.max())


def write_run(trace: FlowTrace, config: FlowConfig, directory) -> Path:
    """Write ``trace.csv``, ``curve_XXXX.csv`` snapshots and ``metadata.json``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    trace.to_csv(out / "trace.csv")
    for i, c in enumerate(trace.curves):
        c.to_csv(out / f"curve_{i:04d}.csv")
    meta = {
        "dt": config.dt,
        "t_max": config.t_max,
        "vertex_count": config.vertex_count,
        "terminal_status": trace.terminal_status.value,
        "final_time": trace.final_time,
        "steps": len(trace.times) - 1,
        "snapshot_times": [float(t) for t in trace.snapshot_times],
    }
    (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out
