"""Command-line front end.

Every command takes its parameters from a flat JSON config (``--config``)
and/or flags; flags override the file.  Results go to ``<out>/report.json``
plus CSV artifacts.  Exit status: 0 when every check passes, 1 when a check
fails or a computation raises, 2 for usage and config errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import canonical, curvegeom, flow, lambdaode, surfint, weightedcalc
from .errors import ConfigError, LamhypError
from .report import WeightedReport, _clean


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Param:
    type: Callable[[Any], Any]
    default: Any = None
    help: str = ""
    choices: tuple = ()


OUT = Param(str, "lamhyp-out", "output directory")

COMMANDS: dict[str, dict[str, Param]] = {
    "canonical": {
        "kind": Param(str, "sphere", "sphere, cylinder or hyperplane", ("sphere", "cylinder", "hyperplane")),
        "n": Param(int, 2, "hypersurface dimension"),
        "k": Param(int, None, "sphere-factor dimension of a cylinder"),
        "lambda": Param(float, 0.0),
        "samples": Param(int, 200),
        "seed": Param(int, 0),
        "tolerance": Param(float, 1e-12),
    },
    "identities": {
        "curve": Param(str, "circle", "circle (the lambda-circle) or closed (closed lambda-curve)", ("circle", "closed")),
        "lambda": Param(float, 0.0),
        "vertex_count": Param(int, 2048),
        "p": Param(int, 3),
        "q": Param(int, 7),
        "tolerance": Param(float, 1e-3, "Simons-type identity tolerance"),
    },
    "ode-period": {
        "lambda": Param(float, 0.0),
        "energy": Param(float, None, "energy level; default E_min + 1"),
        "span": Param(float, 50.0, "theta span of the time-domain measurement"),
        "step": Param(float, 1e-3),
        "tolerance": Param(float, 1e-6),
    },
    "ode-close": {
        "lambda": Param(float, -1.0),
        "p": Param(int, 1),
        "q": Param(int, 2),
        "vertex_count": Param(int, 2048),
        "e_max": Param(float, lambdaode.E_CAP_OFFSET),
        "samples": Param(int, 200),
    },
    "ode-scan": {
        "lambda": Param(float, 0.0),
        "e_max": Param(float, lambdaode.E_CAP_OFFSET),
        "samples": Param(int, 200),
    },
    "flow-run": {
        "curve": Param(str, "ellipse", "circle or ellipse", ("circle", "ellipse")),
        "r0": Param(float, 1.0),
        "a": Param(float, 1.2),
        "b": Param(float, 0.9),
        "dt": Param(float, 1e-5),
        "t_max": Param(float, 0.5),
        "vertex_count": Param(int, 512),
        "resample_every": Param(int, 10),
        "blowup_threshold": Param(float, 1e3),
        "snapshot_every": Param(int, 1000),
    },
    "flow-circle": {
        "r0": Param(float, 1.0),
        "dt": Param(float, 1e-5),
        "t_max": Param(float, 5.0),
        "vertex_count": Param(int, 512),
        "resample_every": Param(int, 10),
        "blowup_threshold": Param(float, 1e3),
        "tolerance": Param(float, 1e-2),
    },
    "surface-check": {
        "chart": Param(str, "sphere", "sphere, ellipsoid or shifted-sphere", tuple(surfint.CHARTS)),
        "r": Param(float, 1.0),
        "a": Param(float, 2.0),
        "b": Param(float, 1.0),
        "c": Param(float, 1.0),
        "dx": Param(float, 0.3),
        "dy": Param(float, -0.1),
        "dz": Param(float, 0.2),
        "n_u": Param(int, 64),
        "n_v": Param(int, 128),
        "rel_tol": Param(float, 1e-6),
    },
    "gap-report": {
        "kind": Param(str, "sphere", "sphere, cylinder or hyperplane", ("sphere", "cylinder", "hyperplane")),
        "n": Param(int, 2),
        "k": Param(int, None),
        "lambda": Param(float, 0.0),
    },
}
for _spec in COMMANDS.values():
    _spec["out"] = OUT


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lamhyp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, spec in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat JSON config; flags override its keys")
        for key, prm in spec.items():
            p.add_argument(_flag(key), dest=key, default=None, help=prm.help or None)
    parser.add_argument("--config", dest="top_config", help="JSON config naming its own command")
    return parser


def resolve(command: str, file_params: dict, flag_params: dict) -> dict:
    """Merge defaults < config file < flags and coerce types."""
    spec = COMMANDS[command]
    unknown = sorted(set(file_params) - set(spec) - {"command"})
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {unknown}")
    if file_params.get("command", command) != command:
        raise UsageError(f"config is for command {file_params['command']!r}, not {command!r}")
    out = {}
    for key, prm in spec.items():
        raw = flag_params.get(key)
        if raw is None:
            raw = file_params.get(key, prm.default)
        if raw is None:
            out[key] = None
            continue
        try:
            out[key] = prm.type(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key}: {raw!r} ({exc})") from None
        if prm.type is float and not math.isfinite(out[key]):
            raise UsageError(f"{key} must be finite")
        if prm.choices and out[key] not in prm.choices:
            raise UsageError(f"{key} must be one of {list(prm.choices)}, got {out[key]!r}")
    return out


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


# ---------------------------------------------------------------------------
# commands; each returns (reports, result dict, artifacts {filename: writer})
# ---------------------------------------------------------------------------


def _cmd_canonical(P):
    kind = canonical.Kind(P["kind"])
    spec = canonical.CanonicalSpec(kind, P["n"] + 1, P["lambda"], P["k"] if kind is canonical.Kind.CYLINDER else None)
    pts = spec.sample(P["samples"], np.random.default_rng(P["seed"]))
    res = np.atleast_1d(canonical.lambda_residual(spec, pts))
    sup = float(np.max(np.abs(res)))
    rep = WeightedReport("canonical_lambda_residual", sup, 0.0, sup, P["tolerance"], "H - <x,n>/2 = lambda",
                         {"kind": kind.value, "n": spec.n, "k": spec.sphere_factor_dim, "lambda": spec.lam})
    result = {"radius": spec.radius, "offset": spec.offset, "mean_curvature": spec.mean_curvature,
              "norm_A": canonical.second_fundamental_norm(spec)}
    return [rep], result, {}


def _cmd_identities(P):
    lam = P["lambda"]
    result: dict[str, Any] = {"curve": P["curve"]}
    if P["curve"] == "circle":
        r = canonical.canonical_radius("sphere", 1, None, lam)
        curve = curvegeom.circle(r, P["vertex_count"])
        result["radius"] = r
    elif P["curve"] == "closed":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", lambdaode.NonMonotonePeriodWarning)
            search = lambdaode.find_closed_curve(lam, P["p"], P["q"], vertex_count=P["vertex_count"])
        if not search.found:
            raise LamhypError(f"no closed ({P['p']},{P['q']}) lambda-curve for lambda={lam}")
        curve = search.curve
        result["energy"] = search.energy
    else:
        raise UsageError(f"unknown curve {P['curve']!r}")
    x = curve.vertices
    reports = [
        weightedcalc.check_simons_curve(curve, lam, P["tolerance"]),
        weightedcalc.check_eigenfunction(curve, lam, (1.0, 0.0)),
        weightedcalc.check_eigenfunction(curve, lam, (0.0, 1.0)),
        weightedcalc.check_position_identity(curve, lam),
        weightedcalc.check_integration_by_parts(x[:, 0] ** 2, x[:, 0] * x[:, 1] + x[:, 1], curve),
        weightedcalc.check_weighted_LA2(curve, lam),
    ]
    return reports, result, {"curve.csv": curve.to_csv}


def _cmd_ode_period(P):
    lam = P["lambda"]
    info = lambdaode.potential_info(lam)
    E = P["energy"] if P["energy"] is not None else info.E_min + 1.0
    h_min, h_max = lambdaode.turning_points(lam, E)
    T = lambdaode.period(lam, E)
    prof = lambdaode.integrate_profile(lam, h_max, 0.0, P["span"], P["step"])
    T_osc = lambdaode.oscillation_period(prof)
    drift = float(np.max(np.abs(prof.energy_residual())))
    reports = [
        WeightedReport("period_consistency", T, T_osc, abs(T - T_osc), P["tolerance"],
                       "T = 2 int dH / sqrt(E - f(H)) vs measured oscillation", {"lambda": lam, "energy": E}),
        WeightedReport("energy_conservation", drift, 0.0, drift, 1e-8, "E = H_t^2 + f(H) is conserved",
                       {"span": P["span"], "step": P["step"]}),
    ]
    result = {"E_min": info.E_min, "H0": info.H0, "H_min": h_min, "H_max": h_max, "period": T,
              "small_amplitude_period": lambdaode.small_amplitude_period(lam)}
    return reports, result, {"profile.csv": prof.to_csv}


def _cmd_ode_close(P):
    lam = P["lambda"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", lambdaode.NonMonotonePeriodWarning)
        search = lambdaode.find_closed_curve(lam, P["p"], P["q"], vertex_count=P["vertex_count"],
                                             e_max=P["e_max"], samples=P["samples"])
    result = search.to_dict()
    result["warnings"] = [str(w.message) for w in caught]
    if not search.found:
        return [], result, {}
    curve = search.curve
    result["embedded"] = curvegeom.is_embedded(curve)
    result["turning_number"] = curvegeom.turning_number(curve)
    reports = [
        WeightedReport("closure_gap", search.closure_gap, 0.0, search.closure_gap, 1e-6 * search.diameter,
                       "q T(E) = 2 pi p closes the curve", {"diameter": search.diameter}),
        lambdaode.check_half_period_identity(lambdaode.half_period_profile(lam, search.energy)),
    ]
    return reports, result, {"curve.csv": curve.to_csv, "profile.csv": search.profile.to_csv}


def _cmd_ode_scan(P):
    lam = P["lambda"]
    E, T = lambdaode.period_scan(lam, P["e_max"], P["samples"])
    result = {"min_period": float(T.min()), "max_period": float(T.max()),
              "small_amplitude_period": lambdaode.small_amplitude_period(lam),
              "monotone": bool(np.all(np.diff(T) < 0) or np.all(np.diff(T) > 0))}
    reports = []
    if lam >= 0:
        tmin = float(T.min())
        reports.append(WeightedReport("min_period_exceeds_pi", tmin, math.pi, max(0.0, math.pi - tmin), 0.0,
                                      "T(E) > pi for lambda >= 0", {"lambda": lam}))

    def write(path):
        with open(path, "w") as fh:
            fh.write("E,T\n")
            for e, t in zip(E, T):
                fh.write(f"{float(e)!r},{float(t)!r}\n")

    return reports, result, {"scan.csv": write}


def _flow_config(P) -> flow.FlowConfig:
    return flow.FlowConfig(dt=P["dt"], t_max=P["t_max"], resample_every=P["resample_every"],
                           vertex_count=P["vertex_count"], blowup_threshold=P["blowup_threshold"],
                           snapshot_every=P.get("snapshot_every", 1000))


def _cmd_flow_run(P):
    cfg = _flow_config(P)
    if P["curve"] == "circle":
        curve = curvegeom.circle(P["r0"], cfg.vertex_count)
    elif P["curve"] == "ellipse":
        curve = curvegeom.ellipse(P["a"], P["b"], cfg.vertex_count)
    else:
        raise UsageError(f"unknown curve {P['curve']!r}")
    trace = flow.run_flow(curve, cfg)
    reports = [flow.f_monotonicity_report(trace)]
    if trace.min_rescaled_H[0] >= -1e-8:
        reports.append(flow.sign_preservation_report(trace))
    result = {"terminal_status": trace.terminal_status.value, "final_time": trace.final_time,
              "steps": len(trace.times) - 1, "message": trace.message,
              "embedded_throughout": bool(all(trace.embedded))}
    if trace.terminal_status is flow.TerminalStatus.STEP_FAILURE:
        reports.append(WeightedReport("flow_completed", 1.0, 0.0, 1.0, 0.0, "flow step succeeded", {}))
    return reports, result, {"": lambda d: flow.write_run(trace, cfg, d)}


def _cmd_flow_circle(P):
    cfg = _flow_config(P)
    r0 = P["r0"]
    trace = flow.run_flow(curvegeom.circle(r0, cfg.vertex_count), cfg)
    exact = flow.circle_flow_exact(r0, trace.final_time)
    result = {"terminal_status": trace.terminal_status.value, "final_time": trace.final_time,
              "exact_extinction_time": exact.extinction_time, "steps": len(trace.times) - 1}
    if exact.extinction_time is not None and exact.extinction_time <= cfg.t_max:
        detected = trace.final_time if trace.terminal_status is flow.TerminalStatus.SINGULARITY_DETECTED else math.inf
        result["detected_extinction_time"] = detected
        rep = WeightedReport("circle_extinction_time", detected, exact.extinction_time,
                             abs(detected - exact.extinction_time), P["tolerance"],
                             "r(t)^2 = 2 + (r0^2 - 2) e^t", {"r0": r0})
    else:
        radius = float(np.linalg.norm(trace.final_curve.vertices, axis=1).mean())
        result["final_radius"] = radius
        result["exact_radius"] = exact.radius
        gap = abs(radius - exact.radius) if exact.radius is not None else math.inf
        rep = WeightedReport("circle_radius", radius, exact.radius if exact.radius else math.nan, gap,
                             P["tolerance"], "r(t)^2 = 2 + (r0^2 - 2) e^t", {"r0": r0})
    return [rep, flow.f_monotonicity_report(trace)], result, {"": lambda d: flow.write_run(trace, cfg, d)}


def _cmd_surface_check(P):
    keys = surfint.CHARTS.get(P["chart"], (None, ()))[1]
    S = surfint.make_chart(P["chart"], {k: P[k] for k in keys}, P["n_u"], P["n_v"])
    I = surfint.surface_integrals(S)
    m1, m2 = surfint.check_minkowski(S, P["rel_tol"])
    reports = [surfint.check_gauss_bonnet(S, P["rel_tol"]), m1, m2, surfint.willmore_check(S)]
    return reports, {"integrals": I.to_dict()}, {}


def _cmd_gap_report(P):
    kind = canonical.Kind(P["kind"])
    spec = canonical.CanonicalSpec(kind, P["n"] + 1, P["lambda"], P["k"] if kind is canonical.Kind.CYLINDER else None)
    gap = canonical.classify_by_gap(spec)
    result = gap.to_dict()
    lam, n = P["lambda"], P["n"]
    if lam >= 0:
        result["closed_gap_bound"] = canonical.closed_gap_bound(lam, n)
        result["position_bound"] = canonical.position_bound(lam, n)
        if n == 2:
            result["willmore_gap_bound"] = canonical.willmore_gap_bound(lam)
    return [], result, {}


HANDLERS = {
    "canonical": _cmd_canonical,
    "identities": _cmd_identities,
    "ode-period": _cmd_ode_period,
    "ode-close": _cmd_ode_close,
    "ode-scan": _cmd_ode_scan,
    "flow-run": _cmd_flow_run,
    "flow-circle": _cmd_flow_circle,
    "surface-check": _cmd_surface_check,
    "gap-report": _cmd_gap_report,
}


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return _clean(obj)


def _write_report(out: Path, payload: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_json_ready(payload), indent=2, sort_keys=True) + "\n"
    (out / "report.json").write_text(text)


def run(command: str, params: dict) -> int:
    """Execute one command with resolved parameters; returns the exit status."""
    out = Path(params["out"])
    payload: dict[str, Any] = {"command": command, "params": params}
    try:
        reports, result, artifacts = HANDLERS[command](params)
    except UsageError:
        raise
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    except (LamhypError, ValueError, ArithmeticError) as exc:
        payload.update({"pass": False, "error": {"type": type(exc).__name__, "message": str(exc)}})
        _write_report(out, payload)
        print(json.dumps(_json_ready(payload["error"]), sort_keys=True))
        return 1
    out.mkdir(parents=True, exist_ok=True)
    for name, writer in artifacts.items():
        writer(out / name if name else out)
    ok = all(r.passed for r in reports)
    payload.update({"pass": ok, "reports": [r.to_dict() for r in reports], "result": result})
    _write_report(out, payload)
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.check}: gap={r.abs_gap:.3e} tol={r.tolerance:.3e}")
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command is None:
            file_params = _load_config(args.top_config)
            command = file_params.get("command")
            if command not in COMMANDS:
                raise UsageError("give a command, or a --config naming one of " + ", ".join(COMMANDS))
            flag_params = {}
        else:
            command = args.command
            file_params = _load_config(args.config)
            flag_params = {k: v for k, v in vars(args).items() if k in COMMANDS[command]}
        params = resolve(command, file_params, flag_params)
        return run(command, params)
    except UsageError as exc:
        print(f"lamhyp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
