import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from lamhyp import canonical as cn
from lamhyp import curvegeom as cg
from lamhyp import lambdaode as lo
from lamhyp import weightedcalc as wc
from lamhyp.errors import BelowMinimumEnergyError, CurvatureCollapseError, NotHalfPeriodError, PreconditionError

from conftest import closed_curve
from oracles import golden_minimum, mp_period


def f(t, lam):
    return t * t - math.log(t) - 2 * lam * t


# -- potential -----------------------------------------------------------------

@pytest.mark.parametrize("lam", [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0])
def test_potential_minimum_matches_golden_section(lam):
    info = lo.potential_info(lam)
    h = golden_minimum(lambda t: f(t, lam), 1e-3, 10.0)
    assert info.H0 == pytest.approx(h, abs=1e-6)
    assert info.E_min == pytest.approx(f(h, lam), abs=1e-12)
    assert 2 * info.H0 - 1 / info.H0 - 2 * lam == pytest.approx(0.0, abs=1e-12)


def test_potential_examples():
    i0 = lo.potential_info(0.0)
    assert i0.H0 == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    assert i0.E_min == pytest.approx(0.5 - math.log(math.sqrt(2) / 2), abs=1e-15)
    assert i0.E_min == pytest.approx(0.84657, abs=1e-5)
    assert lo.potential_info(-1.0).H0 == pytest.approx((math.sqrt(3) - 1) / 2, abs=1e-15)
    i1 = lo.potential_info(1.0)
    assert i1.H0 == pytest.approx((1 + math.sqrt(3)) / 2, abs=1e-15)
    assert 1 / i1.H0 == pytest.approx(cn.canonical_radius("cylinder", 2, 1, 1.0), abs=1e-14)


# -- integration ---------------------------------------------------------------

def test_equilibrium_profile():
    p = lo.integrate_profile(0.0, math.sqrt(2) / 2, 0.0, 10.0, 1e-3)
    assert np.max(np.abs(p.H - math.sqrt(2) / 2)) < 1e-12


def test_energy_conserved_over_span_100():
    p = lo.integrate_profile(0.0, 0.8, 0.0, 100.0, 1e-3)
    assert p.energy == pytest.approx(f(0.8, 0.0), abs=1e-15)
    assert abs(p.energy_residual()[-1]) < 1e-9
    assert np.max(np.abs(p.energy_residual())) < 1e-9


def test_deep_well_stays_positive_and_reaches_turning_point():
    p = lo.integrate_profile(0.0, 0.05, 0.0, 20.0, 1e-3)
    assert p.H.min() > 0
    E = f(0.05, 0.0)
    h_max = brentq(lambda t: f(t, 0.0) - E, math.sqrt(2) / 2, 10.0, xtol=1e-15)
    # the recorded maximum sits within a step of the true one: refine by Hermite
    peaks = p.H[1:-1][(p.H[1:-1] >= p.H[:-2]) & (p.H[1:-1] >= p.H[2:])]
    assert peaks.size > 0
    assert np.max(np.abs(peaks - h_max)) < 1e-6


@pytest.mark.parametrize("lam,offset", [(-2.0, 8.0), (-1.0, 4.0), (0.0, 8.0), (0.5, 0.1), (1.0, 8.0), (2.0, 8.0)])
def test_energy_drift_below_1e8_over_span_200(lam, offset):
    info = lo.potential_info(lam)
    _, h_max = lo.turning_points(lam, info.E_min + offset)
    p = lo.integrate_profile(lam, h_max, 0.0, 200.0, 1e-3, record_every=10)
    assert np.max(np.abs(p.energy_residual())) < 1e-8


def test_second_difference_matches_ode():
    errs = []
    for step in (2e-3, 1e-3):
        p = lo.integrate_profile(-1.0, 1.2, 0.0, 10.0, step)
        dd = (p.H[2:] - 2 * p.H[1:-1] + p.H[:-2]) / p.step ** 2
        errs.append(np.max(np.abs(dd - p.H_thetatheta[1:-1])))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_integration_preconditions():
    with pytest.raises(PreconditionError):
        lo.integrate_profile(0.0, -0.1, 0.0, 1.0, 1e-3)
    with pytest.raises(PreconditionError):
        lo.integrate_profile(0.0, 0.5, 0.0, 1.0, 1e-2)
    with pytest.raises(CurvatureCollapseError):
        lo.integrate_profile(0.0, 1e-4, -100.0, 5.0, 1e-3)


# -- turning points -------------------------------------------------------------

def test_turning_points_examples():
    E = f(0.8, 0.0)
    lo_, hi = lo.turning_points(0.0, E)
    assert hi == pytest.approx(0.8, abs=1e-12)
    assert abs(f(lo_, 0.0) - E) < 1e-12 and lo_ < math.sqrt(2) / 2

    info = lo.potential_info(0.0)
    a, b = lo.turning_points(0.0, info.E_min + 1e-12)
    assert abs(a - info.H0) < 1e-5 and abs(b - info.H0) < 1e-5

    E = f(0.1, -1.0)
    a, b = lo.turning_points(-1.0, E)
    assert a == pytest.approx(0.1, abs=1e-12)
    assert abs(f(a, -1.0) - E) < 1e-12 and abs(f(b, -1.0) - E) < 1e-12 and b > lo.potential_info(-1.0).H0


def test_below_minimum_energy():
    info = lo.potential_info(0.3)
    for E in (info.E_min, info.E_min - 1.0):
        with pytest.raises(BelowMinimumEnergyError):
            lo.turning_points(0.3, E)
        with pytest.raises(BelowMinimumEnergyError):
            lo.period(0.3, E)


# -- period -----------------------------------------------------------------------

@pytest.mark.parametrize("lam,offset", [(0.0, 0.5), (-1.0, 3.0), (1.0, 6.0), (-2.0, 8.0), (2.0, 0.01), (0.0, 8.0)])
def test_period_matches_arbitrary_precision_oracle(lam, offset):
    E = lo.potential_info(lam).E_min + offset
    assert lo.period(lam, E) == pytest.approx(mp_period(lam, E), abs=1e-11)


@pytest.mark.parametrize("lam,offset", [(-1.0, 48.0), (-1.0, 64.0), (0.0, 64.0), (2.0, 40.0)])
def test_period_in_deep_wells(lam, offset):
    # H_min is below 1e-20 here; the inner branch must not round log(H / H_min)
    E = lo.potential_info(lam).E_min + offset
    assert lo.turning_points(lam, E)[0] < 1e-15
    assert lo.period(lam, E) == pytest.approx(mp_period(lam, E, dps=40), abs=1e-8)


def test_period_at_minus_one_stays_below_pi():
    e0 = lo.potential_info(-1.0).E_min
    offsets = [8.0, 50.0, 100.0, 200.0, 400.0, 700.0]
    gaps = [math.pi - lo.period(-1.0, e0 + off) for off in offsets]
    assert all(g > 0 for g in gaps)
    assert all(np.diff(gaps) < 0)
    # the approach to pi is slow, roughly like E^(-1/2)
    assert gaps[-1] > 0.05


@pytest.mark.parametrize("lam", [-2.0, -1.0, 0.0, 1.0, 2.0])
def test_small_amplitude_limit(lam):
    info = lo.potential_info(lam)
    limit = 2 * math.pi / math.sqrt(1 + 1 / (2 * info.H0 ** 2))
    assert lo.small_amplitude_period(lam) == pytest.approx(limit, abs=1e-15)
    assert abs(lo.period(lam, info.E_min + 1e-8) - limit) < 1e-4


def test_small_amplitude_examples():
    assert lo.small_amplitude_period(0.0) == pytest.approx(math.pi * math.sqrt(2), abs=1e-14)
    assert lo.small_amplitude_period(0.0) == pytest.approx(4.44288, abs=1e-5)
    assert lo.small_amplitude_period(-1.0) == pytest.approx(2.8884, abs=1e-4)
    assert lo.small_amplitude_period(-1.0) < math.pi


def test_period_matches_time_domain_at_f08():
    E = f(0.8, 0.0)
    p = lo.integrate_profile(0.0, 0.8, 0.0, 40.0, 1e-3)
    assert abs(lo.oscillation_period(p) - lo.period(0.0, E)) < 1e-6


def test_period_consistency_twenty_random_cases():
    rng = np.random.default_rng(20)
    for _ in range(20):
        lam = float(rng.uniform(-2, 2))
        E = lo.potential_info(lam).E_min + float(rng.uniform(0.01, 8.0))
        T = lo.period(lam, E)
        _, h_max = lo.turning_points(lam, E)
        prof = lo.integrate_profile(lam, h_max, 0.0, 6 * T, 1e-3)
        assert abs(lo.oscillation_period(prof) - T) < 1e-6, (lam, E)


@settings(max_examples=25, deadline=None)
@given(lam=st.floats(-2, 2), offset=st.floats(1e-6, 8.0))
def test_period_positive_and_node_converged(lam, offset):
    E = lo.potential_info(lam).E_min + offset
    T = lo.period(lam, E)
    assert T > 0
    assert T == pytest.approx(lo.period(lam, E, nodes=400), abs=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 2.0])
def test_scan_min_period_exceeds_pi_for_nonnegative_lambda(lam):
    energies, periods = lo.period_scan(lam, 8.0, 200)
    assert len(energies) == 200
    assert energies[-1] == pytest.approx(lo.potential_info(lam).E_min + 8.0)
    assert periods.min() > math.pi


def test_scan_negative_lambda_dips_below_pi():
    _, periods = lo.period_scan(-1.0, 8.0, 200)
    assert periods.max() < math.pi
    _, periods = lo.period_scan(-0.5, 8.0, 200)
    assert periods.min() < math.pi < periods.max()


# -- reconstruction -----------------------------------------------------------------

def test_constant_profile_is_circle():
    for lam in (-1.0, 0.0, 1.5):
        info = lo.potential_info(lam)
        theta = np.linspace(0, 2 * np.pi, 513)
        prof = lo.CurvatureProfile(lam, info.E_min, theta, np.full(513, info.H0), np.zeros(513))
        c = lo.reconstruct_curve(prof)
        r = np.linalg.norm(c.vertices, axis=1)
        assert np.max(np.abs(r - 1 / info.H0)) < 1e-13
    prof = lo.CurvatureProfile(0.0, 0.0, theta, np.full(513, math.sqrt(2) / 2), np.zeros(513))
    assert np.max(np.abs(np.linalg.norm(lo.reconstruct_curve(prof).vertices, axis=1) - math.sqrt(2))) < 1e-13


def test_reconstruction_definitional_residuals():
    for lam, E_off in [(0.0, 1.0), (-1.0, 4.0), (1.0, 2.0)]:
        E = lo.potential_info(lam).E_min + E_off
        _, h_max = lo.turning_points(lam, E)
        prof = lo.integrate_profile(lam, h_max, 0.0, 20.0, 1e-3)
        nres, tres = lo.reconstruction_residual(prof)
        assert np.max(np.abs(nres)) < 1e-10 and np.max(np.abs(tres)) < 1e-10


def test_reconstruction_matches_quadrature_oracle():
    # the trapezoid oracle converges at second order to the closed form
    _, h_max = lo.turning_points(-1.0, lo.potential_info(-1.0).E_min + 2.0)
    errs = []
    for step in (1e-3, 5e-4, 2.5e-4):
        prof = lo.integrate_profile(-1.0, h_max, 0.0, 10.0, step)
        errs.append(np.max(np.abs(lo.reconstruct_by_quadrature(prof) - lo.profile_positions(prof))))
    assert errs[-1] < 5e-6
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_reconstructed_curve_is_discrete_lambda_curve():
    # the discrete residual is O(h^2): resolve finely enough for 1e-6
    c = closed_curve(-1.0, 3, 7, 32768).curve
    assert cg.lambda_residual_curve(c, -1.0).sup_norm < 1e-6
    res = [cg.lambda_residual_curve(closed_curve(-1.0, 3, 7, m).curve, -1.0).sup_norm for m in (4096, 8192)]
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.1)


def test_weighted_curvature_invariant_at_lambda_zero():
    E = lo.potential_info(0.0).E_min + 3.0
    _, h_max = lo.turning_points(0.0, E)
    prof = lo.integrate_profile(0.0, h_max, 0.0, 30.0, 1e-3)
    q = lo.gaussian_curvature_invariant(prof)
    assert np.ptp(q) / np.mean(q) < 1e-6
    assert np.mean(q) == pytest.approx(math.exp(-E), rel=1e-8)


def test_weighted_curvature_invariant_holds_for_nonzero_lambda():
    # |x|^2 = 4 (E + log H + lam^2) along the reconstruction, for any lam
    s = closed_curve(-1.0, 3, 7, 4096)
    q = lo.gaussian_curvature_invariant(s.profile)
    assert np.ptp(q) / np.mean(q) < 1e-6
    assert np.mean(q) == pytest.approx(math.exp(-s.energy - 1.0), rel=1e-8)


def test_profile_csv(tmp_path):
    prof = lo.integrate_profile(0.0, 0.8, 0.0, 1.0, 1e-2 / 10)
    prof.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "theta,H,H_theta"
    data = np.loadtxt(tmp_path / "p.csv", delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 1], prof.H) and np.array_equal(data[:, 2], prof.H_theta)


# -- closed curves ---------------------------------------------------------------------

def test_embedded_closed_curve_at_negative_half(curve_neg_half_12):
    s = curve_neg_half_12
    assert s.found and s.closure_ok
    assert s.period == pytest.approx(math.pi, abs=1e-10)
    assert cg.is_embedded(s.curve) and cg.turning_number(s.curve) == 1
    f = cg.derive_fields(s.curve)
    assert np.ptp(f.curvature) > 1.0  # far from a circle
    assert wc.check_simons_curve(s.curve, -0.5).passed
    assert s.curve.edge_ratio() <= 4


def test_lambda_minus_one_three_seven(curve_neg1_37):
    s = curve_neg1_37
    assert s.found and s.closure_ok and s.closure_gap < 1e-10
    assert 7 * s.period == pytest.approx(6 * math.pi, abs=1e-9)
    assert cg.turning_number(s.curve) == 3
    assert not cg.is_embedded(s.curve)
    assert not s.monotone
    assert s.curve.edge_ratio() <= 4


def test_non_monotone_period_warns():
    with pytest.warns(lo.NonMonotonePeriodWarning):
        lo.find_closed_curve(-1.0, 3, 7, vertex_count=256)


def test_smallest_energy_is_returned():
    s = closed_curve(-1.0, 3, 7, 1024)
    energies, periods = lo.period_scan(-1.0, 8.0, 200)
    below = energies < s.energy - 1e-6
    g = periods[below] - s.target_period
    assert np.all(g > 0) or np.all(g < 0)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 2.0])
def test_no_embedded_closed_curve_for_nonnegative_lambda(lam):
    s = lo.find_closed_curve(lam, 1, 2)
    assert not s.found and s.curve is None
    assert s.period_range[0] > math.pi
    assert s.to_dict()["found"] is False


def test_closed_curve_preconditions():
    with pytest.raises(PreconditionError):
        lo.find_closed_curve(0.0, 1, 1)
    with pytest.raises(PreconditionError):
        lo.find_closed_curve(-1.0, 2, 4)
    with pytest.raises(PreconditionError):
        lo.find_closed_curve(-1.0, 1.0, 2)
    with pytest.raises(PreconditionError):
        lo.find_closed_curve(-1.0, 0, 3)


# -- half-period identity ------------------------------------------------------------------

def test_half_period_identity_at_f08():
    prof = lo.half_period_profile(0.0, f(0.8, 0.0))
    rep = lo.check_half_period_identity(prof)
    assert rep.passed and rep.abs_gap < 1e-5
    # the bracket 1/2 - H^2 + lam H is positive at the minimum, so the sign of
    # the right side is that of sin T; here T > pi
    assert rep.details["period"] > math.pi
    assert rep.details["rhs_nonnegative"] is False


def test_half_period_identity_quadrature_refinement():
    E = f(0.8, 0.0)
    a = lo.check_half_period_identity(lo.half_period_profile(0.0, E, 1000))
    b = lo.check_half_period_identity(lo.half_period_profile(0.0, E, 4000))
    assert abs(a.lhs - b.lhs) < 1e-8 and abs(a.rhs - b.rhs) < 1e-8


def test_half_period_identity_on_closed_curve_profile(curve_neg1_37):
    prof = lo.half_period_profile(-1.0, curve_neg1_37.energy)
    rep = lo.check_half_period_identity(prof)
    assert rep.passed
    assert rep.details["sin_nonnegative"] and rep.details["lhs_nonpositive"]
    assert "rhs_nonnegative" not in rep.details


def test_half_period_identity_constant_profile():
    info = lo.potential_info(0.7)
    th = np.linspace(0, 1.0, 101)
    prof = lo.CurvatureProfile(0.7, info.E_min, th, np.full(101, info.H0), np.zeros(101))
    rep = lo.check_half_period_identity(prof)
    assert abs(rep.lhs) < 1e-14 and abs(rep.rhs) < 1e-14


def test_half_period_identity_rejects_bad_profiles():
    E = f(0.8, 0.0)
    T = lo.period(0.0, E)
    full = lo.integrate_profile(0.0, 0.8, 0.0, 0.3 * T, 1e-3)
    with pytest.raises(NotHalfPeriodError):
        lo.check_half_period_identity(full)
    lo_, _ = lo.turning_points(0.0, E)
    rising = lo.integrate_profile(0.0, lo_, 0.0, 0.5 * T, 0.5 * T / 2000)
    with pytest.raises(NotHalfPeriodError):
        lo.check_half_period_identity(rising)


def test_sign_diagnostics_follow_period_premise():
    # with T <= pi the weight sin(2 theta) is nonnegative and the left side
    # cannot be positive; for lam >= 0 the premise fails (T > pi) and the
    # left side may take either sign
    for lam in (-2.0, -1.0, -0.5):
        for off in (0.5, 2.0, 6.0, 8.0):
            E = lo.potential_info(lam).E_min + off
            rep = lo.check_half_period_identity(lo.half_period_profile(lam, E))
            assert rep.passed
            if rep.details["sin_nonnegative"]:
                assert rep.details["lhs_nonpositive"]
    rep = lo.check_half_period_identity(lo.half_period_profile(2.0, lo.potential_info(2.0).E_min + 6.0))
    assert rep.passed and not rep.details["sin_nonnegative"]
