import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modspace.experiments import (
    ASYMPTOTIC_BAND,
    DEFAULT_MATRIX_PAIRS,
    ENVELOPE_CASES,
    SHARPNESS_CASE_NAMES,
    SUITE_MANIFEST,
    EnvelopeCase,
    _enforce_index_bounds,
    dilation_scan,
    envelope_check,
    fit_loglog_slope,
    gauss_slope_matrix,
    gaussian_closed_form_table,
    packet_lower_bound,
    refinement_drift,
    sharpness_suite,
)
from modspace.exponents import ExponentPair
from modspace.report import (
    ScalingReport,
    ScanPoint,
    write_scaling_csv,
    write_scaling_json,
)


def test_fit_recovers_cubic_exactly():
    lams = [1.0, 2.0, 4.0, 8.0]
    slope, stderr = fit_loglog_slope(lams, [l ** 3 for l in lams])
    assert abs(slope - 3.0) < 1e-12
    assert stderr < 1e-12


def test_fit_recovers_scaled_negative_power():
    lams = [0.5, 1.0, 3.0, 7.0, 16.0]
    slope, stderr = fit_loglog_slope(lams, [2.0 * l ** -1.5 for l in lams])
    assert abs(slope + 1.5) < 1e-12
    assert stderr < 1e-12


def test_fit_on_transient_tail_is_nearly_flat():
    # lam^{-1} (1 + lam^2)^{1/2} tends to 1; its dyadic fit past the
    # asymptotic band must sit within 0.05 of slope 0
    lams = [4.0, 8.0, 16.0, 32.0]
    slope, _ = fit_loglog_slope(
        lams, [(1.0 + l * l) ** 0.5 / l for l in lams])
    assert abs(slope) <= 0.05


@settings(deadline=None, max_examples=40)
@given(a=st.floats(min_value=-3.0, max_value=3.0),
       c=st.floats(min_value=0.1, max_value=10.0))
def test_fit_recovers_any_power_law(a, c):
    lams = [1.0, 2.0, 4.0, 8.0, 16.0]
    slope, stderr = fit_loglog_slope(lams, [c * l ** a for l in lams])
    assert abs(slope - a) < 1e-9
    assert stderr < 1e-9


def test_fit_rejects_bad_inputs():
    with pytest.raises(ValueError):
        fit_loglog_slope([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_loglog_slope([1.0, 2.0, 4.0], [1.0, -2.0, 4.0])
    with pytest.raises(ValueError):
        fit_loglog_slope([1.0, 2.0, 4.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_loglog_slope([2.0, 2.0, 2.0], [1.0, 2.0, 4.0])


def test_scan_fits_past_the_asymptotic_band():
    report = dilation_scan("demo", "gauss", (2, 2), (1, 2, 4, 8, 16))
    assert report.mode == "expand"
    assert report.fit_lambdas == (4.0, 8.0, 16.0)
    assert abs(report.slope + 0.5) <= 0.05
    assert report.verdict == "pass"
    assert report.stderr < 0.05


def test_scan_shrink_regime_with_endpoint_one():
    lams = (1 / 16, 1 / 8, 1 / 4, 1 / 2, 1.0)
    report = dilation_scan("demo", "gauss", (2, 2), lams)
    assert report.mode == "shrink"
    assert report.fit_lambdas == (1 / 16, 1 / 8, 1 / 4)
    assert abs(report.slope + 0.5) <= 0.05
    assert report.verdict == "pass"


def test_scan_single_factor_reports_no_fit():
    report = dilation_scan("demo", "gauss", (2, 2), (1.0,))
    assert report.verdict == "no-fit"
    assert math.isnan(report.slope) and math.isnan(report.stderr)
    # the lambda = 1 entry is the undilated norm, pi at (2, 2)
    assert abs(report.points[0].value - math.pi) <= 1e-8 * math.pi


def test_scan_needs_enough_points_in_the_regime():
    lo, hi = ASYMPTOTIC_BAND
    report = dilation_scan("demo", "gauss", (2, 2), (1.0, 1.5, 2.0, 3.0))
    assert all(l < hi for l in (1.0, 1.5, 2.0, 3.0))
    assert report.verdict == "no-fit"


def test_scan_rejects_bad_grids():
    with pytest.raises(ValueError):
        dilation_scan("demo", "gauss", (2, 2), ())
    with pytest.raises(ValueError):
        dilation_scan("demo", "gauss", (2, 2), (0.5, 1.0, 2.0, 4.0))
    with pytest.raises(ValueError):
        dilation_scan("demo", "gauss", (2, 2), (1.0, 2.0, -4.0, 8.0))


def test_scan_is_deterministic_across_workers(tmp_path):
    r1 = dilation_scan("det", "gauss", (2, 2), (4, 8, 16, 32), workers=1)
    r2 = dilation_scan("det", "gauss", (2, 2), (4, 8, 16, 32), workers=2)
    paths = []
    for tag, rep in (("a", r1), ("b", r2)):
        csv_path = tmp_path / f"{tag}.csv"
        json_path = tmp_path / f"{tag}.json"
        write_scaling_csv(rep, csv_path)
        write_scaling_json(rep, json_path)
        paths.append((csv_path.read_bytes(), json_path.read_bytes()))
    assert paths[0] == paths[1]


def test_index_bound_enforcement_flips_impossible_slopes():
    pq = ExponentPair.from_pq(2, 2)
    points = tuple(ScanPoint(l, 1.0, 64, 8.0, 0, 0.0)
                   for l in (4.0, 8.0, 16.0, 32.0))
    base = dict(name="x", family="gauss", p="2", q="2",
                quantity="modulation norm", mode="expand", points=points,
                fit_lambdas=(4.0, 8.0, 16.0, 32.0), stderr=0.0, theory=0.2,
                slope_window=(-1.0, 1.0))
    # mu1(2, 2) = -1/2: an expanding modulation norm cannot grow like +0.2
    bogus = ScalingReport(slope=0.2, verdict="pass", **base)
    assert _enforce_index_bounds(bogus, pq, "expand").verdict == "fail"
    honest = ScalingReport(slope=-0.5, verdict="pass", **base)
    assert _enforce_index_bounds(honest, pq, "expand").verdict == "pass"


def test_closed_form_table_rows():
    rows = gaussian_closed_form_table(
        pairs=(("2", "2"), ("1", "1"), ("2", "inf")), lambdas=(1.0, 2.0))
    by_key = {(row.p, row.q, row.lam): row for row in rows}

    row = by_key[("2", "2", 1.0)]
    assert abs(row.predicted - math.pi) < 1e-12
    assert row.rel_err <= row.tol == 0.005

    row = by_key[("1", "1", 2.0)]
    assert abs(row.predicted - math.pi ** 1.5 * math.sqrt(5.0)) < 1e-12
    assert row.rel_err <= row.tol == 0.005

    row = by_key[("2", "inf", 1.0)]
    assert abs(row.predicted - math.pi ** 0.75 / math.sqrt(2.0)) < 1e-12
    assert row.rel_err <= row.tol == 0.01

    assert all(r.ok for r in rows)


def test_envelope_exact_bound_calibrates_to_one():
    # at (2, 2) the Gaussian norm is exactly pi lam^{-1/2}; folding pi into
    # the envelope makes the empirical constant exactly 1
    case = EnvelopeCase("trivial-exact", "gauss", (), "2:2",
                        "modulation norm", None, -0.5, 0.0,
                        (0.5, 1.0, 2.0, 4.0), math.pi)
    check = envelope_check(case)
    assert check.verdict == "pass"
    assert all(abs(r - 1.0) <= 1e-6 for r in check.ratios)
    assert abs(check.c_hat - 1.0) <= 1e-6
    assert check.rel_change <= 1e-6
    assert check.bound.startswith("3.14159")


def test_matrix_covers_both_regimes():
    pairs = (("2", "2"), ("1", "inf"))
    expand = gauss_slope_matrix(pairs, (4, 8, 16, 32))
    assert abs(expand["2:2"].slope + 0.5) <= 0.05
    assert abs(expand["1:inf"].slope + 1.0) <= 0.05
    shrink = gauss_slope_matrix(pairs, (1 / 32, 1 / 16, 1 / 8, 1 / 4))
    assert abs(shrink["2:2"].slope + 0.5) <= 0.05
    assert abs(shrink["1:inf"].slope + 1.0) <= 0.05
    for rep in list(expand.values()) + list(shrink.values()):
        assert rep.verdict == "pass"


def test_refinement_drift_small_for_gauss():
    _, _, rel = refinement_drift(("modnorm", "gauss", (), 4.0, ("2:2",), 1))
    assert rel < 0.005


def test_refinement_drift_small_for_lattice():
    _, _, rel = refinement_drift(
        ("modnorm", "gabor", (), 0.25, ("1:inf",), 1))
    assert rel < 0.02


def test_packet_lower_bound_formula():
    val = packet_lower_bound(2, float("inf"), 2, 0.25)
    ls = np.arange(1, 5, dtype=float)
    coeff = 2.0 * float(np.sum(ls ** -0.5))
    from modspace.windows import packet_window
    expect = 4.0 ** -0.5 * packet_window().linf * math.sqrt(coeff)
    assert abs(val - expect) < 1e-12
    with pytest.raises(ValueError):
        packet_lower_bound(2, float("inf"), float("inf"), 0.25)
    with pytest.raises(ValueError):
        packet_lower_bound(2, 3, 2, 0.25)


def test_sharpness_names_and_selection():
    assert SHARPNESS_CASE_NAMES == (
        "gauss-expand", "gauss-shrink", "lattice-shrink-I3", "packet-I3star",
        "translate-I1star", "besov-embed-I2star")
    with pytest.raises(ValueError):
        sharpness_suite("no-such-case")
    case = sharpness_suite("gauss-shrink")[0]
    assert case.name == "gauss-shrink"
    assert case.passed


def test_manifest_covers_the_matrix():
    for p, q in DEFAULT_MATRIX_PAIRS:
        assert f"{p}:{q}" in SUITE_MANIFEST
    for key, note in SUITE_MANIFEST.items():
        if key.endswith(":inf"):
            assert "no constructive extremal" in note


def test_envelope_case_roster():
    names = [case.name for case in ENVELOPE_CASES]
    assert len(names) == len(set(names)) == 6
    for case in ENVELOPE_CASES:
        assert case.bound(1.0) > 0
