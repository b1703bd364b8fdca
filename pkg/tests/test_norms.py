import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modspace.exponents import ExponentPair
from modspace.grid import (
    BoxGrid,
    Constructor,
    SampledSignal,
    default_grid,
    dilate_constructor,
    lp_norm,
    sample,
)
from modspace.norms import (
    MixedNormSpec,
    m2inf_discrete_seminorm,
    m2inf_sandwich,
    mixed_norm,
    mixed_norm_streaming,
    modulation_norm,
)
from modspace.stft import TimeFreqMatrix, gauss_stft_closed_form, stft
from modspace.windows import (
    band_limited_window,
    bspline_window,
    cell_bump_window,
    gauss_window,
    plateau,
    seminorm_window,
)


def gauss(t):
    t = np.asarray(t, dtype=float)
    return np.exp(-t * t)


def tiny_tfm(values, dx=0.5, dxi=0.25):
    values = np.asarray(values, dtype=complex)
    nx, nf = values.shape
    return TimeFreqMatrix(x_axis=np.arange(nx) * dx,
                          xi_axis=np.arange(nf) * dxi,
                          values=values, dx=dx, dxi=dxi, dim=1)


def brute_mixed(values, p, q, dx, dxi):
    cols = []
    for m in range(values.shape[1]):
        col = np.abs(values[:, m])
        if math.isinf(p):
            cols.append(col.max())
        else:
            cols.append((np.sum(col ** p) * dx) ** (1 / p))
    cols = np.array(cols)
    if math.isinf(q):
        return cols.max()
    return (np.sum(cols ** q) * dxi) ** (1 / q)


ORDERS = [1, 2, 3, math.inf]


def test_mixed_norm_matches_nested_loops():
    rng = np.random.default_rng(7)
    values = rng.normal(size=(6, 9)) + 1j * rng.normal(size=(6, 9))
    tfm = tiny_tfm(values)
    for p in ORDERS:
        for q in ORDERS:
            want = brute_mixed(values, float(p), float(q), tfm.dx, tfm.dxi)
            got = mixed_norm(tfm, (p, q))
            assert math.isclose(got, want, rel_tol=1e-12)


@settings(max_examples=60)
@given(st.integers(0, 2 ** 30))
def test_mixed_norm_monotone(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(5, 7)) + 1j * rng.normal(size=(5, 7))
    bump = rng.uniform(0.0, 1.0, size=(5, 7))
    bigger = np.abs(a) + bump
    for p, q in ((1, 3), (2, math.inf), (math.inf, 1)):
        assert mixed_norm(tiny_tfm(a), (p, q)) <= \
            mixed_norm(tiny_tfm(bigger), (p, q)) + 1e-12


def test_spec_wrapper():
    spec = MixedNormSpec.of(2, "inf")
    assert spec.pq.q == math.inf
    values = np.ones((4, 4))
    assert mixed_norm(tiny_tfm(values), spec) == \
        mixed_norm(tiny_tfm(values), (2, math.inf))


def test_streaming_equals_dense():
    g = BoxGrid(dim=1, half_width=10.0, points_per_axis=256)
    f = sample(gauss, g)
    w = gauss_window()
    dense = stft(f, w)
    for pq in ((1, 1), (2, math.inf), (math.inf, 2), (4, 3)):
        assert math.isclose(mixed_norm_streaming(f, w, pq),
                            mixed_norm(dense, pq), rel_tol=1e-12)


def test_orthogonality_relation():
    # ||V_w f||_{2,2} == (2 pi)^{n/2} ||f||_2 ||w||_2
    w = gauss_window()
    for lam in (0.5, 1.0, 2.0):
        ctor = dilate_constructor(gauss, lam)
        f = sample(ctor, default_grid(1))
        want = math.sqrt(2.0 * math.pi) * lp_norm(f, 2) * w.l2
        got = modulation_norm(ctor, (2, 2))
        assert math.isclose(got, want, rel_tol=1e-6)


def test_gauss_reference_norms():
    # (2,2) at lambda=1 gives pi; (1,1) at lambda=2 gives sqrt(5) pi^{3/2}
    assert math.isclose(modulation_norm(gauss, (2, 2)), math.pi, rel_tol=5e-3)
    got = modulation_norm(dilate_constructor(gauss, 2.0), (1, 1))
    assert math.isclose(got, math.sqrt(5.0) * math.pi ** 1.5, rel_tol=5e-3)


def test_gauss_closed_form_agreement_quarter_to_four():
    grid = BoxGrid(dim=1, half_width=24.0, points_per_axis=2048)
    for lam in (0.25, 1.0, 4.0):
        for pq in ((2, 1), (3, 2), (1, math.inf)):
            got = modulation_norm(dilate_constructor(gauss, lam), pq, grid=grid)
            want = gauss_stft_closed_form(pq, lam)
            assert math.isclose(got, want, rel_tol=5e-3), (lam, pq)


def test_window_equivalence_band():
    # admissible windows give equivalent norms: ratios stay in a band
    # with spread well under 10 across the dilated family
    ratios = []
    bump = cell_bump_window()
    for lam in (0.5, 1.0, 2.0):
        ctor = dilate_constructor(gauss, lam)
        for pq in ((1, 1), (2, math.inf)):
            a = modulation_norm(ctor, pq, window=gauss_window())
            b = modulation_norm(ctor, pq, window=bump)
            ratios.append(a / b)
    assert max(ratios) / min(ratios) <= 10.0


def band_limited_signal(inner=0.125, outer=0.24):
    w = band_limited_window("bump_psi", lambda xi: plateau(xi, inner, outer),
                            outer)
    return Constructor(fn=w.profile, label="narrowband", dim=1)


def test_seminorm_window_validation():
    f = sample(gauss, default_grid(1))
    with pytest.raises(ValueError):
        m2inf_discrete_seminorm(f, gauss_window())  # no frequency profile
    with pytest.raises(ValueError):
        # hat spectrum tiles but has no plateau at 1
        m2inf_discrete_seminorm(f, bspline_window())
    assert m2inf_discrete_seminorm(f, seminorm_window()) > 0


@pytest.mark.filterwarnings("ignore::modspace.errors.BoundaryDecayWarning")
def test_seminorm_narrowband_equality():
    # compact spectra force sub-Gaussian but slow time decay, so some
    # boundary mass at any finite box is expected; the L2 quantities
    # compared here are insensitive to it
    # spectrum inside [-1/4, 1/4]: only k = 0 contributes and the seminorm
    # collapses to (2 pi)^{-1/2} || fhat ||_2 == || f ||_2
    g = BoxGrid(dim=1, half_width=220.0, points_per_axis=4096)
    f = sample(band_limited_signal(), g)
    w = seminorm_window()
    val = m2inf_discrete_seminorm(f, w)
    k0 = m2inf_discrete_seminorm(f, w, k_max=0)
    assert math.isclose(val, k0, rel_tol=1e-9)
    assert math.isclose(val, lp_norm(f, 2), rel_tol=1e-6)


def test_sandwich_on_gaussians():
    w = seminorm_window()
    for lam in (0.5, 1.0, 2.0):
        f = sample(dilate_constructor(gauss, lam), default_grid(1))
        res = m2inf_sandwich(f, w)
        assert res.holds, (lam, res)
        assert res.mixed > 0 and res.seminorm > 0


def test_streaming_empty_lattice_guard():
    g = BoxGrid(dim=1, half_width=8.0, points_per_axis=128)
    f = SampledSignal(grid=g, values=np.zeros(128, dtype=complex))
    # zero signal still has a well-defined (zero) norm
    assert mixed_norm_streaming(f, gauss_window(), (2, 2)) == 0.0
