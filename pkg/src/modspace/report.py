"""Report artifacts: scan results and their CSV / JSON / SVG serializations.

A `ScalingReport` is the record of one dilation scan: the measured values per
dilation factor with their discretization metadata, the fitted log-log slope
with its standard error, the predicted slope, and the pass/fail verdict
against an explicit slope window.  An `EnvelopeCheck` is the record of one
upper-bound check: the empirical constant ``C_hat = max norm / g(lambda)``
on a base grid and on a refined grid, passing when both are finite and agree
within 20%.

All writers are deterministic for fixed inputs: floats are written with
``repr`` (shortest round-trip form), JSON keys are sorted, and SVG rendering
pins matplotlib's hash salt and omits the creation date, so repeated runs
produce bit-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScanPoint",
    "ScalingReport",
    "EnvelopeCheck",
    "fit_loglog_slope",
    "write_scaling_csv",
    "write_scaling_json",
    "render_scaling_svg",
    "write_envelope_json",
    "write_tfm_csv",
    "render_tfm_svg",
]


@dataclass(frozen=True)
class ScanPoint:
    """One dilation sample: the value and how it was discretized."""

    lam: float
    value: float
    points_per_axis: int
    half_width: float
    trunc: int
    tail_bound: float


@dataclass(frozen=True)
class ScalingReport:
    """Result of one scan: per-lambda values plus the slope fit.

    ``quantity`` names what was measured (a modulation norm, a Besov norm, a
    pairing against a fixed analyzer, or a ratio).  ``fit_lambdas`` lists the
    subset of dilations the slope was fitted on (asymptotic regime only);
    ``slope_window`` is the closed interval the fitted slope must land in for
    the verdict to pass.  Scans with too few points for a trustworthy fit
    carry NaN slope and the verdict "no-fit".
    """

    name: str
    family: str
    p: str
    q: str
    quantity: str
    mode: str
    points: tuple
    fit_lambdas: tuple
    slope: float
    stderr: float
    theory: float
    slope_window: tuple
    verdict: str

    def __post_init__(self):
        for pt in self.points:
            if not (pt.value > 0 and math.isfinite(pt.value)):
                raise ValueError(
                    f"{self.name}: value {pt.value} at lambda={pt.lam} is "
                    "not positive and finite")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


@dataclass(frozen=True)
class EnvelopeCheck:
    """Empirical constant of an upper bound ``norm <= C g(lambda)``.

    ``bound`` is the printable form of ``g``; ``ratios`` are norm/g per
    lambda on the base grid; ``c_hat``/``c_hat_refined`` are the maxima on
    the base and points-doubled grids.
    """

    name: str
    family: str
    p: str
    q: str
    bound: str
    lambdas: tuple
    ratios: tuple
    c_hat: float
    c_hat_refined: float
    rel_change: float
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def fit_loglog_slope(lams, values) -> tuple[float, float]:
    """Least-squares slope of ``log value`` against ``log lambda``.

    Returns ``(slope, stderr)`` where ``stderr`` is the standard error of
    the slope estimate (0.0 for an exact two-parameter fit on 3 points with
    zero residual).  Raises ValueError on fewer than 3 points or on any
    nonpositive or non-finite input.
    """
    lams = np.asarray(lams, dtype=float)
    values = np.asarray(values, dtype=float)
    if lams.size < 3:
        raise ValueError(f"need at least 3 points to fit, got {lams.size}")
    if lams.shape != values.shape:
        raise ValueError("lams and values must have matching length")
    if np.any(lams <= 0) or np.any(values <= 0):
        raise ValueError("log-log fit requires positive factors and values")
    if not (np.all(np.isfinite(lams)) and np.all(np.isfinite(values))):
        raise ValueError("log-log fit requires finite inputs")
    x = np.log(lams)
    y = np.log(values)
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0.0:
        raise ValueError("all dilation factors coincide; slope is undefined")
    slope = float(np.dot(xc, y - y.mean()) / sxx)
    resid = (y - y.mean()) - slope * xc
    dof = x.size - 2
    stderr = math.sqrt(float(np.dot(resid, resid)) / dof / sxx) if dof else 0.0
    return slope, stderr


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_scaling_csv(report: ScalingReport, path) -> None:
    """Per-point data, one row per lambda."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "norm", "N", "L", "K", "tail_bound"])
        for pt in report.points:
            writer.writerow([_fmt(pt.lam), _fmt(pt.value),
                             pt.points_per_axis, _fmt(pt.half_width),
                             pt.trunc, _fmt(pt.tail_bound)])


def _json_float(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def write_scaling_json(report: ScalingReport, path) -> None:
    """Summary with the fit results; point data lives in the CSV."""
    payload = {
        "name": report.name,
        "family": report.family,
        "p": report.p,
        "q": report.q,
        "quantity": report.quantity,
        "mode": report.mode,
        "lambdas": [pt.lam for pt in report.points],
        "fit_lambdas": list(report.fit_lambdas),
        "slope": _json_float(report.slope),
        "stderr": _json_float(report.stderr),
        "theory": _json_float(report.theory),
        "slope_window": [_json_float(v) for v in report.slope_window],
        "verdict": report.verdict,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_envelope_json(check: EnvelopeCheck, path) -> None:
    payload = {
        "name": check.name,
        "family": check.family,
        "p": check.p,
        "q": check.q,
        "bound": check.bound,
        "lambdas": list(check.lambdas),
        "ratios": list(check.ratios),
        "c_hat": _json_float(check.c_hat),
        "c_hat_refined": _json_float(check.c_hat_refined),
        "rel_change": _json_float(check.rel_change),
        "verdict": check.verdict,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _svg_figure(figsize=(6.4, 4.8)):
    import matplotlib

    matplotlib.rcParams["svg.hashsalt"] = "modspace"
    from matplotlib.backends.backend_svg import FigureCanvasSVG
    from matplotlib.figure import Figure

    fig = Figure(figsize=figsize, dpi=100)
    FigureCanvasSVG(fig)
    return fig


def _save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def render_scaling_svg(report: ScalingReport, path) -> None:
    """Log-log plot of the scan with the predicted-slope line overlaid."""
    fig = _svg_figure()
    ax = fig.subplots()
    lams = np.array([pt.lam for pt in report.points])
    vals = np.array([pt.value for pt in report.points])
    ax.loglog(lams, vals, "o-", label="measured")
    if math.isfinite(report.theory) and report.fit_lambdas:
        anchor_lam = report.fit_lambdas[0]
        anchor_val = vals[int(np.argmin(np.abs(lams - anchor_lam)))]
        ax.loglog(lams, anchor_val * (lams / anchor_lam) ** report.theory,
                  "--", label=f"slope {report.theory:g}")
    ax.set_xlabel("dilation factor")
    ax.set_ylabel(report.quantity)
    slope_txt = ("n/a" if math.isnan(report.slope)
                 else f"{report.slope:.4f} +/- {report.stderr:.4f}")
    ax.set_title(f"{report.name}: fitted slope {slope_txt} [{report.verdict}]")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    _save_svg(fig, path)


def write_tfm_csv(tfm, path) -> None:
    """Flat table of a one-dimensional time-frequency matrix."""
    if tfm.dim != 1:
        raise ValueError("CSV dump implemented for one-dimensional STFTs")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "xi", "re", "im"])
        for i, x in enumerate(tfm.x_axis):
            row_vals = tfm.values[i]
            for j, xi in enumerate(tfm.xi_axis):
                writer.writerow([_fmt(float(x)), _fmt(float(xi)),
                                 _fmt(float(row_vals[j].real)),
                                 _fmt(float(row_vals[j].imag))])


def render_tfm_svg(tfm, path) -> None:
    """Magnitude heatmap of a one-dimensional STFT."""
    if tfm.dim != 1:
        raise ValueError("heatmap implemented for one-dimensional STFTs")
    fig = _svg_figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    mag = np.abs(tfm.values).T
    im = ax.imshow(mag, origin="lower", aspect="auto",
                   extent=(float(tfm.x_axis[0]), float(tfm.x_axis[-1]),
                           float(tfm.xi_axis[0]), float(tfm.xi_axis[-1])))
    fig.colorbar(im, ax=ax, label="|V f|")
    ax.set_xlabel("x")
    ax.set_ylabel("xi")
    _save_svg(fig, path)
