"""Extremal signal families that attain the sharp dilation rates.

Each factory returns an analytic `Constructor` (see `modspace.grid`), so the
families compose with `dilate_constructor` and are always dilated before
sampling.  The families:

``gauss``
    The reference Gaussian ``exp(-|t|^2)``; its dilates have closed-form
    modulation norms, so every scaling experiment calibrates against it.

``modulated_gauss_sum(q, eps)``
    ``exp(-|t|^2) * sum_{0 < |k| <= K} |k|^{-n/q - eps} exp(i k . t)``:
    a frequency-lattice sum under a Gaussian envelope.  Under shrinking
    dilation its modulation norm can only decay like
    ``lambda^{n(1/q - 1) + eps}``, witnessing that the Gaussian shrink rate
    ``lambda^{n(1/q-1)}`` cannot be improved.  The Gaussian pairing
    ``<f_lambda, exp(-|.|^2)>`` has the exact series form frozen in
    :func:`gauss_pairing_series`.

``gabor_lattice_sum(K)``
    ``sum_{|k|_inf <= K} exp(i k . t) psi(t - k)`` with the compact cell
    bump ``psi`` (1 on the quarter cell, 0 outside the half cell): the
    unit-coefficient Gabor sum whose shrink-dilation M^{p,inf} norm is
    two-sided ``~ lambda^{-2n/p}`` for ``p <= 2``.  Cells are disjoint, so
    the truncation is exact on boxes inside the validity radius ``K + 1/2``.

``translate_sum(p, eps)``
    ``sum_{0 < |l| <= K} |l|^{-n/p - eps} Psi(t - l)`` with ``Psi`` the
    band-limited bump whose spectrum is 1 on ``|xi| <= 1/2`` and 0 outside
    ``|xi| <= 1``; optionally modulated by ``exp(8 i t_1)``, which moves the
    spectrum without changing any modulation norm.  Expanding dilations keep
    its norm above ``lambda^{-n/p - eps}``, detected through the pairing with
    the inverse-transform B-spline (:func:`bspline_pairing_series`).

``fj_packet(j, p, eps)``
    The dilated lattice packet ``2^{-jn/p} sum_{0 < |k| <= 2^j} |k|^{-n/p-eps}
    exp(i k . t) Psi_c(t - k)`` (cell-bump spectrum profile): the family
    whose STFT mixed norm against a narrowband window stays above
    ``2^{-j n (2/p - 1/q) - j eps}`` while its Besov norms stay bounded.

``bspline2`` / ``compact_phi``
    The order-2 B-spline pair (tensor hat spectrum, Fejer-type time profile
    in closed form) and the normalized compact bump whose spectrum is at
    least 1 on ``[-2, 2]^n``; the auxiliary functions the lower-bound
    pairings analyze against.

Truncation bookkeeping: every lattice family records its truncation radius
and coefficient tail bound in a `LatticeSumSpec` on ``Constructor.meta``.
When the requested tail tolerance (relative tail below 1e-6) is unreachable -
the coefficient series may even diverge - the factory warns with the bound
instead of failing, since the truncated functions are still legitimate
lower-bound witnesses on the scales the experiments probe.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TruncationWarning
from .grid import BoxGrid, Constructor, sample
from .windows import (
    Window,
    bspline_window,
    compact_bump_window,
    plateau,
)

__all__ = [
    "LatticeSumSpec",
    "gauss",
    "modulated_gauss_sum",
    "gauss_pairing_series",
    "gabor_lattice_sum",
    "translate_sum",
    "fj_packet",
    "bspline2",
    "plateau_cell",
    "compact_phi",
    "bspline_pairing_series",
    "bspline_pairing_quadrature",
    "dilated_pairing",
    "TAIL_TOLERANCE",
]

#: Relative coefficient-tail target for automatic truncation choices.
TAIL_TOLERANCE = 1e-6

#: Hard cap for automatic truncation searches.
TRUNC_CAP = 512


@dataclass(frozen=True)
class LatticeSumSpec:
    """Bookkeeping for a truncated lattice-sum family.

    ``decay`` is the coefficient exponent ``a`` in ``|k|^{-a}`` (0 for unit
    coefficients), ``trunc`` the lattice truncation radius, ``head`` the
    retained absolute coefficient mass, and ``tail_bound`` an upper bound on
    the discarded mass (0 when the truncation is exact, inf when the
    discarded series diverges).
    """

    mode: str
    decay: float
    eps: float
    trunc: int
    head: float
    tail_bound: float


def _coeff_tail_bound(a: float, k: int, dim: int) -> float:
    """Upper bound for ``sum_{|l| > k} |l|^{-a}`` over the integer lattice."""
    if a <= dim:
        return math.inf
    # integral comparison; the surface constant is 2 per axis pair
    if dim == 1:
        return 2.0 * k ** (1.0 - a) / (a - 1.0)
    return 2.0 * math.pi * k ** (2.0 - a) / (a - 2.0) if a > 2 else math.inf


def _coeff_head(a: float, k: int, dim: int) -> float:
    if dim == 1:
        return 2.0 * float(np.sum(np.arange(1, k + 1, dtype=float) ** (-a)))
    k1, k2 = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1),
                         indexing="ij")
    r = np.sqrt(k1 ** 2 + k2 ** 2).ravel()
    r = r[(r > 0) & (r <= k)]
    return float(np.sum(r ** (-a)))


def _choose_trunc(a: float, trunc: Optional[int], dim: int,
                  default: int, mode: str) -> tuple[int, float, float]:
    """Resolve a truncation radius against the tail tolerance, warning when
    the tolerance is unreachable."""
    if trunc is not None:
        if trunc < 1:
            raise ValueError(f"truncation radius must be >= 1, got {trunc}")
        k = int(trunc)
    elif a > dim:
        k = default
        while (_coeff_tail_bound(a, k, dim)
               > TAIL_TOLERANCE * _coeff_head(a, k, dim)) and k < TRUNC_CAP:
            k *= 2
    else:
        k = default
    head = _coeff_head(a, k, dim)
    tail = _coeff_tail_bound(a, k, dim)
    if not tail <= TAIL_TOLERANCE * head:
        warnings.warn(
            f"{mode}: truncation K={k} leaves coefficient tail bound "
            f"{tail:.3e} above {TAIL_TOLERANCE:g} of the head {head:.3e}; "
            "scaling conclusions hold on scales coarser than 1/K",
            TruncationWarning, stacklevel=3)
    return k, head, tail


def gauss(dim: int = 1) -> Constructor:
    """``exp(-|t|^2)`` with its closed-form spectrum attached."""

    def fn(t):
        t = np.asarray(t, dtype=float)
        sq = np.sum(t * t, axis=-1) if dim == 2 else t * t
        return np.exp(-sq)

    def spectrum(xi):
        xi = np.asarray(xi, dtype=float)
        sq = np.sum(xi * xi, axis=-1) if dim == 2 else xi * xi
        return math.pi ** (dim / 2.0) * np.exp(-sq / 4.0)

    return Constructor(fn=fn, label="gauss", dim=dim, spectrum=spectrum)


def modulated_gauss_sum(q, eps: float = 0.25, trunc: Optional[int] = None,
                        dim: int = 1) -> Constructor:
    """Gaussian envelope times a decaying frequency-lattice exponential sum.

    ``q`` is the frequency exponent of the norm the family is built to
    defeat; the coefficient decay is ``a = dim/q + eps``.  ``q`` may be inf.
    """
    q = float(q)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    a = (0.0 if math.isinf(q) else dim / q) + eps
    k, head, tail = _choose_trunc(a, trunc, dim, 64, "modulated_gauss_sum")
    spec = LatticeSumSpec(mode="modulated_gauss_sum", decay=a, eps=eps,
                          trunc=k, head=head, tail_bound=tail)

    if dim == 1:
        ks = np.arange(1, k + 1, dtype=float)
        coeffs = ks ** (-a)

        def fn(t):
            t = np.asarray(t, dtype=float)
            flat = t.reshape(-1)
            out = np.empty(flat.shape, dtype=float)
            block = max(1, 4_000_000 // k)
            for s in range(0, flat.size, block):
                seg = flat[s:s + block]
                out[s:s + block] = 2.0 * (np.cos(np.outer(seg, ks)) @ coeffs)
            return np.exp(-t * t) * out.reshape(t.shape)

        def spectrum(xi):
            xi = np.asarray(xi, dtype=float)
            acc = np.zeros(xi.shape, dtype=float)
            for kk, c in zip(ks, coeffs):
                acc += c * (np.exp(-(xi - kk) ** 2 / 4.0)
                            + np.exp(-(xi + kk) ** 2 / 4.0))
            return math.sqrt(math.pi) * acc
    else:
        k1, k2 = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1),
                             indexing="ij")
        pts = np.stack([k1.ravel(), k2.ravel()], axis=1).astype(float)
        r = np.sqrt(np.sum(pts * pts, axis=1))
        keep = (r > 0) & (r <= k)
        pts, r = pts[keep], r[keep]
        coeffs2 = r ** (-a)

        def fn(t):
            t = np.asarray(t, dtype=float)
            flat = t.reshape(-1, 2)
            out = np.empty(flat.shape[0], dtype=complex)
            block = max(1, 4_000_000 // pts.shape[0])
            for s in range(0, flat.shape[0], block):
                seg = flat[s:s + block]
                out[s:s + block] = np.exp(1j * (seg @ pts.T)) @ coeffs2
            sq = np.sum(flat * flat, axis=1)
            return (np.exp(-sq) * out).reshape(t.shape[:-1])

        spectrum = None

    return Constructor(fn=fn, label="modulated_gauss_sum", dim=dim,
                       spectrum=spectrum, trunc_radius=k, tail_bound=tail,
                       meta=spec)


def gauss_pairing_series(ctor: Constructor, lam: float) -> float:
    """Exact value of ``<f(lambda .), exp(-|.|^2)>`` for the modulated
    Gaussian sum: completing the square term by term gives

        (pi/(1+lambda^2))^{n/2} sum_k c_k exp(-lambda^2 |k|^2 / (4(1+lambda^2)))
    """
    spec = ctor.meta
    if not isinstance(spec, LatticeSumSpec) or spec.mode != "modulated_gauss_sum":
        raise ValueError("pairing series is defined for modulated_gauss_sum")
    if ctor.dim != 1:
        raise ValueError("pairing series implemented for dim 1")
    s = 1.0 + lam * lam
    ks = np.arange(1, spec.trunc + 1, dtype=float)
    series = 2.0 * np.sum(ks ** (-spec.decay)
                          * np.exp(-lam * lam * ks * ks / (4.0 * s)))
    return math.sqrt(math.pi / s) * float(series)


def dilated_pairing(f_ctor: Constructor, g_ctor: Constructor, lam: float,
                    grid: BoxGrid) -> complex:
    """Quadrature of ``integral f(lambda t) conj(g(t)) dt`` on a box grid."""
    from .grid import dilate_constructor

    fv = sample(dilate_constructor(f_ctor, lam), grid).values
    gv = sample(g_ctor, grid).values
    return complex(np.sum(fv * np.conj(gv)) * grid.cell_measure)


def gabor_lattice_sum(trunc: int = 4, dim: int = 1) -> Constructor:
    """Unit-coefficient Gabor sum over the integer lattice, cells disjoint.

    Valid on boxes up to half-width ``K + 1/2``; there the truncation is
    exact (the discarded cells vanish identically on the box), recorded as
    tail bound 0.
    """
    if trunc < 1:
        raise ValueError(f"truncation radius must be >= 1, got {trunc}")
    k = int(trunc)

    def cell(u):
        return plateau(u, 0.25, 0.5)

    if dim == 1:
        def fn(t):
            t = np.asarray(t, dtype=float)
            near = np.clip(np.round(t), -k, k)
            return np.exp(1j * near * t) * cell(t - near)
    else:
        def fn(t):
            t = np.asarray(t, dtype=float)
            near = np.clip(np.round(t), -k, k)
            phase = np.sum(near * t, axis=-1)
            return (np.exp(1j * phase) * cell(t[..., 0] - near[..., 0])
                    * cell(t[..., 1] - near[..., 1]))

    head = float((2 * k + 1) ** dim)
    spec = LatticeSumSpec(mode="gabor_lattice_sum", decay=0.0, eps=0.0,
                          trunc=k, head=head, tail_bound=0.0)
    return Constructor(fn=fn, label="gabor_lattice_sum", dim=dim,
                       valid_half_width=k + 0.5, trunc_radius=k,
                       tail_bound=0.0, meta=spec)


def _adaptive_nodes(band: float, max_abs_t: float, feature_scale: float,
                    min_points: int = 8192) -> tuple[np.ndarray, float]:
    """Midpoint nodes over [-band, band] resolving both the integrand's own
    features and the oscillation exp(i t xi) at the largest |t|."""
    h_max = min(feature_scale / 8.0, 0.25 / max(1.0, max_abs_t))
    m = max(min_points, int(math.ceil(2.0 * band / h_max)))
    m = 1 << int(math.ceil(math.log2(m)))
    if m > (1 << 22):
        raise ValueError("quadrature node count exploded; reduce the box")
    h = 2.0 * band / m
    return -band + h * (np.arange(m) + 0.5), h


def _spectral_eval(spectrum_fn, band: float, feature_scale: float):
    """Pointwise time-domain evaluator for a compactly supported spectrum."""

    def fn(t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        tmax = float(np.abs(flat).max()) if flat.size else 1.0
        nodes, h = _adaptive_nodes(band, tmax, feature_scale)
        weights = spectrum_fn(nodes) * (h / (2.0 * math.pi))
        out = np.empty(flat.shape, dtype=complex)
        block = max(1, 4_000_000 // nodes.size)
        for s in range(0, flat.size, block):
            seg = flat[s:s + block]
            out[s:s + block] = np.exp(1j * np.outer(seg, nodes)) @ weights
        return out.reshape(t.shape)

    return fn


def translate_sum(p, eps: float = 0.25, trunc: Optional[int] = None,
                  modulated: bool = False) -> Constructor:
    """Decaying sum of integer translates of the band-limited bump Psi.

    One-dimensional.  The plain variant has spectrum
    ``psi(xi) * 2 sum_l l^{-a} cos(l xi)`` supported in ``[-1, 1]``; the
    modulated variant multiplies by ``exp(8 i t)``, shifting the spectrum to
    ``[7, 9]`` while leaving every modulation norm unchanged.
    """
    p = float(p)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    a = (0.0 if math.isinf(p) else 1.0 / p) + eps
    k, head, tail = _choose_trunc(a, trunc, 1, 32, "translate_sum")
    spec = LatticeSumSpec(mode="translate_sum", decay=a, eps=eps, trunc=k,
                          head=head, tail_bound=tail)
    ls = np.arange(1, k + 1, dtype=float)
    coeffs = ls ** (-a)

    def plain_hat(xi):
        xi = np.asarray(xi, dtype=float)
        flat = xi.reshape(-1)
        out = np.empty(flat.shape, dtype=float)
        block = max(1, 4_000_000 // k)
        for s in range(0, flat.size, block):
            seg = flat[s:s + block]
            out[s:s + block] = 2.0 * (np.cos(np.outer(seg, ls)) @ coeffs)
        return plateau(xi, 0.5, 1.0) * out.reshape(xi.shape)

    base_eval = _spectral_eval(plain_hat, 1.0, feature_scale=min(0.5, 1.0 / k))

    if modulated:
        def fn(t):
            t = np.asarray(t, dtype=float)
            return np.exp(8j * t) * base_eval(t)

        def spectrum(xi):
            return plain_hat(np.asarray(xi, dtype=float) - 8.0)
    else:
        fn = base_eval
        spectrum = plain_hat

    label = "translate_sum" + ("|modulated" if modulated else "")
    return Constructor(fn=fn, label=label, dim=1, spectrum=spectrum,
                       trunc_radius=k, tail_bound=tail, meta=spec)


def fj_packet(j: int, p, eps: float = 0.25) -> Constructor:
    """The dilated lattice packet at scale ``2^j`` (one-dimensional).

    ``fn`` evaluates ``2^{-j/p} sum_{0 < |k| <= 2^j} |k|^{-1/p - eps}
    exp(i k t) Psi_c(t - k)`` where ``Psi_c`` has the cell-bump spectrum
    (1 on [-1/4, 1/4], 0 outside [-1/2, 1/2]); this is already the
    ``lambda = 2^j`` dilate of the bounded-Besov packet, so shrink it by
    ``2^{-j}`` to recover the undilated family member.
    """
    if not 1 <= j <= 6:
        raise ValueError(f"packet scale j must be in 1..6, got {j}")
    p = float(p)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    a = (0.0 if math.isinf(p) else 1.0 / p) + eps
    kmax = 2 ** j
    amp = 2.0 ** (-j * (0.0 if math.isinf(p) else 1.0 / p))
    head = 2.0 * float(np.sum(np.arange(1, kmax + 1, dtype=float) ** (-a)))
    spec_meta = LatticeSumSpec(mode="fj_packet", decay=a, eps=eps, trunc=kmax,
                               head=head, tail_bound=0.0)

    def packet_hat(xi):
        # cell spectra are disjoint: each xi sees only the nearest lattice
        # modulation, and at half-integers the cell bump vanishes anyway
        xi = np.asarray(xi, dtype=float)
        kk = np.round(xi)
        mag = np.abs(kk)
        c = np.where((mag >= 1) & (mag <= kmax),
                     np.maximum(mag, 1.0) ** (-a), 0.0)
        u = xi - kk
        return amp * c * plateau(u, 0.25, 0.5) * np.exp(-1j * u * kk)

    fn = _spectral_eval(packet_hat, kmax + 0.5,
                        feature_scale=min(0.25, 1.0 / kmax))
    return Constructor(fn=fn, label=f"fj_packet(j={j})", dim=1,
                       spectrum=packet_hat, trunc_radius=kmax,
                       tail_bound=0.0, meta=spec_meta)


def bspline2(dim: int = 1) -> Constructor:
    """The inverse transform of the tensor hat function, in closed form:
    ``(2 pi)^{-n} prod_j (sin(t_j / 2) / (t_j / 2))^2``, spectrum
    ``prod_j (1 - |xi_j|)_+``."""
    w = bspline_window(dim)

    def spectrum(xi):
        xi = np.asarray(xi, dtype=float)
        if dim == 1:
            return np.clip(1.0 - np.abs(xi), 0.0, None)
        return (np.clip(1.0 - np.abs(xi[..., 0]), 0.0, None)
                * np.clip(1.0 - np.abs(xi[..., 1]), 0.0, None))

    return Constructor(fn=w.__call__, label="bspline2", dim=dim,
                       spectrum=spectrum)


def plateau_cell() -> Constructor:
    """The smooth spectral plateau: spectrum 1 on ``|xi| <= 1/2``, supported
    in ``|xi| <= 1``; the building block the translate sums shift around.
    Its own dyadic dilates probe scaling of band-limited bumps directly."""

    def spectrum(xi):
        return plateau(np.asarray(xi, dtype=float), 0.5, 1.0)

    fn = _spectral_eval(spectrum, 1.0, feature_scale=0.5)
    return Constructor(fn=fn, label="plateau_cell", dim=1, spectrum=spectrum)


def compact_phi(dim: int = 1) -> Window:
    """The normalized compact bump window (supp in [-1/8, 1/8]^n, spectrum
    verified numerically to stay at or above 1 on [-2, 2]^n)."""
    return compact_bump_window(dim)


def bspline_pairing_series(p, eps: float, trunc: int, lam: float) -> float:
    """Exact pairing of the dilated plain translate sum with the B-spline
    window, valid once ``lambda >= 2`` (the dilated plateau covers the hat):

        <f(lambda .), bspline2> = (2 pi)^{-1} lambda^{-1}
            sum_{0 < |l| <= K} |l|^{-a} (sin(l / 2 lambda) / (l / 2 lambda))^2
    """
    if lam < 2.0:
        raise ValueError("series form needs lambda >= 2")
    a = (0.0 if math.isinf(float(p)) else 1.0 / float(p)) + eps
    ls = np.arange(1, trunc + 1, dtype=float)
    u = ls / (2.0 * lam)
    sinc2 = (np.sin(u) / u) ** 2
    series = 2.0 * float(np.sum(ls ** (-a) * sinc2))
    return series / (2.0 * math.pi * lam)


def bspline_pairing_quadrature(ctor: Constructor, lam: float,
                               quad_points: int = 1 << 15) -> float:
    """Frequency-side quadrature of the same pairing: with both spectra
    known, ``(2 pi)^{-1} integral lam^{-1} fhat(xi / lam) hat(xi) dxi``
    over the hat's support [-1, 1]."""
    if ctor.spectrum is None:
        raise ValueError("constructor must expose its spectrum")
    h = 2.0 / quad_points
    xi = -1.0 + h * (np.arange(quad_points) + 0.5)
    hat = np.clip(1.0 - np.abs(xi), 0.0, None)
    vals = ctor.spectrum(xi / lam) / lam
    return float(np.real(np.sum(vals * hat) * h / (2.0 * math.pi)))
