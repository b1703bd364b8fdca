import json
import math

import numpy as np
import pytest

from modspace.grid import BoxGrid, sample
from modspace.extremals import gauss
from modspace.report import (EnvelopeCheck, ScalingReport, ScanPoint,
                             render_scaling_svg, render_tfm_svg,
                             write_envelope_json, write_scaling_csv,
                             write_scaling_json, write_tfm_csv)
from modspace.stft import stft
from modspace.windows import gauss_window


def make_report(verdict="pass", slope=-0.5, stderr=0.01):
    pts = tuple(ScanPoint(lam=float(2 ** k), value=float(2 ** (-k / 2)),
                          points_per_axis=1024, half_width=12.0, trunc=0,
                          tail_bound=0.0)
                for k in range(2, 7))
    return ScalingReport(
        name="demo", family="gauss", p="2", q="2",
        quantity="modulation norm", mode="expand", points=pts,
        fit_lambdas=tuple(pt.lam for pt in pts),
        slope=slope, stderr=stderr, theory=-0.5,
        slope_window=(-0.55, -0.45), verdict=verdict)


def test_report_rejects_bad_values():
    pt = ScanPoint(2.0, 0.0, 64, 4.0, 0, 0.0)
    with pytest.raises(ValueError):
        ScalingReport(name="bad", family="gauss", p="2", q="2",
                      quantity="norm", mode="expand", points=(pt,),
                      fit_lambdas=(2.0,), slope=float("nan"),
                      stderr=float("nan"), theory=-0.5,
                      slope_window=(-1.0, 1.0), verdict="no-fit")
    pt = ScanPoint(2.0, float("inf"), 64, 4.0, 0, 0.0)
    with pytest.raises(ValueError):
        ScalingReport(name="bad", family="gauss", p="2", q="2",
                      quantity="norm", mode="expand", points=(pt,),
                      fit_lambdas=(2.0,), slope=float("nan"),
                      stderr=float("nan"), theory=-0.5,
                      slope_window=(-1.0, 1.0), verdict="no-fit")


def test_scaling_csv_round_trip(tmp_path):
    report = make_report()
    path = tmp_path / "scan.csv"
    write_scaling_csv(report, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "lambda,norm,N,L,K,tail_bound"
    assert len(lines) == 1 + len(report.points)
    first = lines[1].split(",")
    # repr round-trip: parsing the text recovers the exact float
    assert float(first[0]) == report.points[0].lam
    assert float(first[1]) == report.points[0].value
    assert first[2] == "1024"


def test_scaling_csv_deterministic(tmp_path):
    report = make_report()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_scaling_csv(report, a)
    write_scaling_csv(report, b)
    assert a.read_bytes() == b.read_bytes()


def test_scaling_json_contents(tmp_path):
    report = make_report()
    path = tmp_path / "scan.json"
    write_scaling_json(report, path)
    payload = json.loads(path.read_text())
    assert payload["slope"] == report.slope
    assert payload["theory"] == -0.5
    assert payload["verdict"] == "pass"
    assert payload["slope_window"] == [-0.55, -0.45]
    # keys sorted on disk
    text = path.read_text()
    assert text.index('"family"') < text.index('"name"') < text.index('"p"')


def test_scaling_json_nan_becomes_null(tmp_path):
    pts = (ScanPoint(1.0, 3.0, 64, 4.0, 0, 0.0),)
    report = ScalingReport(
        name="single", family="gauss", p="2", q="2",
        quantity="norm", mode="expand", points=pts, fit_lambdas=(),
        slope=float("nan"), stderr=float("nan"), theory=-0.5,
        slope_window=(-1.0, 1.0), verdict="no-fit")
    path = tmp_path / "scan.json"
    write_scaling_json(report, path)
    payload = json.loads(path.read_text())
    assert payload["slope"] is None
    assert payload["stderr"] is None
    assert payload["verdict"] == "no-fit"


def test_scaling_svg_deterministic(tmp_path):
    report = make_report()
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render_scaling_svg(report, a)
    render_scaling_svg(report, b)
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert data.lstrip().startswith(b"<?xml")
    assert b"demo" in data


def test_scaling_svg_no_fit(tmp_path):
    pts = (ScanPoint(1.0, 3.0, 64, 4.0, 0, 0.0),)
    report = ScalingReport(
        name="single", family="gauss", p="2", q="2",
        quantity="norm", mode="expand", points=pts, fit_lambdas=(),
        slope=float("nan"), stderr=float("nan"), theory=-0.5,
        slope_window=(-1.0, 1.0), verdict="no-fit")
    path = tmp_path / "one.svg"
    render_scaling_svg(report, path)
    assert path.read_bytes().lstrip().startswith(b"<?xml")


def test_envelope_json(tmp_path):
    check = EnvelopeCheck(
        name="gauss-m21", family="gauss", p="2", q="1",
        bound="lam**-0.5 * (1 + lam**2)**0.5",
        lambdas=(0.125, 0.5, 2.0, 8.0),
        ratios=(3.1, 3.0, 2.9, 2.95),
        c_hat=3.1, c_hat_refined=3.1002, rel_change=6.45e-5,
        verdict="pass")
    path = tmp_path / "env.json"
    write_envelope_json(check, path)
    payload = json.loads(path.read_text())
    assert payload["c_hat"] == 3.1
    assert payload["verdict"] == "pass"
    assert payload["lambdas"] == [0.125, 0.5, 2.0, 8.0]
    write_envelope_json(check, tmp_path / "env2.json")
    assert (tmp_path / "env2.json").read_bytes() == path.read_bytes()


def test_tfm_csv_and_svg(tmp_path):
    grid = BoxGrid(dim=1, half_width=8.0, points_per_axis=128)
    signal = sample(gauss(), grid)
    tfm = stft(signal, gauss_window(), stride=8, x_half_width=4.0)
    csv_path = tmp_path / "tfm.csv"
    write_tfm_csv(tfm, csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "x,xi,re,im"
    assert len(lines) == 1 + tfm.values.shape[0] * tfm.values.shape[1]
    x0, xi0, re0, im0 = lines[1].split(",")
    assert float(x0) == tfm.x_axis[0]
    assert float(xi0) == tfm.xi_axis[0]
    assert math.isclose(complex(float(re0), float(im0)).real,
                        tfm.values[0, 0].real)

    svg_path = tmp_path / "tfm.svg"
    render_tfm_svg(tfm, svg_path)
    data = svg_path.read_bytes()
    assert data.lstrip().startswith(b"<?xml")
    render_tfm_svg(tfm, tmp_path / "tfm2.svg")
    assert (tmp_path / "tfm2.svg").read_bytes() == data
