"""Adaptive Simpson quadrature, batched over many segments at once.

All integrands must accept numpy arrays. The batch variant keeps a flat queue
of active panels (segment id, endpoints, cached endpoint/midpoint values) and
refines every failing panel per sweep, so the integrand is always evaluated on
one array per sweep instead of recursing panel by panel.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteEvaluation, QuadratureFailure

# Hard cap on the total number of panels across one integration call.
MAX_PANELS = 2 ** 20

# Panels narrower than width * 2^-46 are accepted unconditionally: below that
# scale the Richardson estimate is dominated by rounding noise.
_WIDTH_FLOOR_FACTOR = 2.0 ** -46


def _ensure_finite(values: np.ndarray, points: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = np.atleast_1d(points)[np.atleast_1d(bad)]
        raise NonFiniteEvaluation(f"integrand not finite near {where.flat[0]!r}")


def integrate_segments(fn, lo, hi, tol, max_panels: int = MAX_PANELS) -> np.ndarray:
    """Integrate fn over each [lo_i, hi_i] with per-segment absolute tolerance.

    Returns one value per segment. Accepted panels use Richardson
    extrapolation of the two Simpson estimates.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    nseg = lo.size
    tol = np.broadcast_to(np.asarray(tol, dtype=float), (nseg,)).copy()
    tol = np.maximum(tol, 1e-17)

    totals = np.zeros(nseg)
    seg = np.arange(nseg)
    a = lo.copy()
    b = hi.copy()
    mid = 0.5 * (a + b)
    fa = np.asarray(fn(a), dtype=float)
    fm = np.asarray(fn(mid), dtype=float)
    fb = np.asarray(fn(b), dtype=float)
    _ensure_finite(fa, a)
    _ensure_finite(fm, mid)
    _ensure_finite(fb, b)
    coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    budget = tol.copy()
    floor_w = np.abs(hi - lo) * _WIDTH_FLOOR_FACTOR
    floor_per_panel = floor_w[seg]

    n_panels = nseg
    while seg.size:
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = np.asarray(fn(lm), dtype=float)
        frm = np.asarray(fn(rm), dtype=float)
        _ensure_finite(flm, lm)
        _ensure_finite(frm, rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        fine = left + right
        err = (fine - coarse) / 15.0
        accept = (np.abs(err) <= budget) | ((b - a) <= floor_per_panel)

        if np.any(accept):
            np.add.at(totals, seg[accept], fine[accept] + err[accept])

        keep = ~accept
        n_new = 2 * int(np.count_nonzero(keep))
        n_panels += n_new
        if n_panels > max_panels:
            raise QuadratureFailure(
                f"panel cap {max_panels} exceeded ({seg[keep].size} panels still open)"
            )
        seg = np.concatenate([seg[keep], seg[keep]])
        a = np.concatenate([a[keep], m[keep]])
        b = np.concatenate([m[keep], b[keep]])
        fa = np.concatenate([fa[keep], fm[keep]])
        fb = np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
        half = 0.5 * budget[keep]
        budget = np.concatenate([half, half])
        floor_per_panel = np.concatenate([floor_per_panel[keep], floor_per_panel[keep]])
    return totals


def adaptive_simpson(fn, a: float, b: float, tol: float = 1e-10,
                     max_panels: int = MAX_PANELS) -> float:
    """Adaptive Simpson integral of fn over [a, b] to absolute tolerance tol."""
    if a == b:
        return 0.0
    return float(integrate_segments(fn, [a], [b], [tol], max_panels=max_panels)[0])


def cumulative_integral(fn, points, tol: float = 1e-12,
                        max_panels: int = MAX_PANELS) -> np.ndarray:
    """Cumulative integral of fn along ascending points, zero at points[0].

    The per-segment tolerance is tol scaled by the segment's share of the
    total width (with a small absolute floor), so the accumulated error over
    all segments stays near tol while neighbouring values remain consistent
    to much better than tol.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size < 1:
        raise ValueError("points must be a 1-d array")
    if pts.size == 1:
        return np.zeros(1)
    widths = np.diff(pts)
    if np.any(widths < 0):
        raise ValueError("points must be ascending")
    total = pts[-1] - pts[0]
    if total <= 0:
        return np.zeros(pts.size)
    seg_tol = np.maximum(tol * widths / total, 1e-16)
    increments = integrate_segments(fn, pts[:-1], pts[1:], seg_tol,
                                    max_panels=max_panels)
    out = np.empty(pts.size)
    out[0] = 0.0
    np.cumsum(increments, out=out[1:])
    return out


_GL15_NODES, _GL15_WEIGHTS = np.polynomial.legendre.leggauss(15)


def gauss_segments(fn, a, b) -> np.ndarray:
    """Fixed 15-point Gauss-Legendre integral over each [a_i, b_i].

    Intended for short panels with a smooth integrand, where it is exact to
    rounding; used for the local corrections in monotone reparametrization.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    nodes = centre[..., None] + half[..., None] * _GL15_NODES
    values = np.asarray(fn(nodes.reshape(-1)), dtype=float).reshape(nodes.shape)
    return half * (values @ _GL15_WEIGHTS)
