"""Adaptive Gauss-Legendre quadrature.

Composite 15-point panels refined by interval bisection until each panel
agrees with its two halves to the panel tolerance.  Infinite domains are
handled by window doubling with a truncation-growth test: windows stop
expanding once the integrand drops below ``rel_floor`` of its peak, and
integrals whose tail contributions keep growing raise
:class:`~warpft.errors.DivergenceError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, NonConvergenceError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tuning knobs for the adaptive integrator."""

    panel_tol: float = 1e-10
    max_depth: int = 40
    rel_floor: float = 1e-16
    max_half_width: float = 1e6


DEFAULT_QUAD = QuadratureSpec()


def _panel(fn, a, b):
    """One 15-point panel; returns (integral, integral of |fn|)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    v = np.asarray(fn(mid + half * _NODES))
    if not np.all(np.isfinite(v)):
        raise DivergenceError(f"non-finite integrand values on [{a}, {b}]")
    return half * np.sum(v * _WEIGHTS), half * np.sum(np.abs(v) * _WEIGHTS)


def integrate(fn, a: float, b: float, quad: QuadratureSpec | None = None):
    """Integrate a vectorized callable over the finite interval [a, b].

    ``fn`` may return real or complex values.  Accuracy target is
    ``panel_tol`` relative to the L1 mass of the integrand.
    """
    quad = quad or DEFAULT_QUAD
    if b <= a:
        return 0.0
    whole, whole_abs = _panel(fn, a, b)
    scale = max(whole_abs, 1e-300)
    width = b - a
    total = 0.0 + 0.0j if np.iscomplexobj(np.asarray(whole)) else 0.0
    slop = 0.0
    stack = [(a, b, whole, 0)]
    while stack:
        lo, hi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, left_abs = _panel(fn, lo, mid)
        right, right_abs = _panel(fn, mid, hi)
        scale = max(scale, left_abs + right_abs)
        err = abs(est - (left + right))
        if err <= quad.panel_tol * scale * max((hi - lo) / width, 1e-3):
            total += left + right
        elif depth >= quad.max_depth:
            total += left + right
            slop += err
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    if slop > 1e-6 * scale:
        raise NonConvergenceError(
            f"quadrature failed to settle: residual {slop:.3e} vs scale {scale:.3e}"
        )
    return total


def integrate_decaying(fn, quad: QuadratureSpec | None = None, center: float = 0.0,
                       initial_half_width: float = 1.0):
    """Integrate over the whole line assuming eventual decay away from ``center``.

    The window doubles until boundary samples fall below ``rel_floor`` of
    the running peak.  Growth of successive boundary samples (or overflow)
    is reported as divergence.
    """
    quad = quad or DEFAULT_QUAD
    w = float(initial_half_width)
    probe = np.linspace(center - w, center + w, 65)
    vals = np.abs(np.asarray(fn(probe)))
    if not np.all(np.isfinite(vals)):
        raise DivergenceError("integrand overflows inside the initial window")
    peak = float(np.max(vals))
    prev_edge = None
    grow_count = 0
    while w < quad.max_half_width:
        edge_pts = np.array([center - w, center - 0.95 * w, center + 0.95 * w, center + w])
        edge_vals = np.asarray(fn(edge_pts))
        if not np.all(np.isfinite(edge_vals)):
            raise DivergenceError("integrand overflows while expanding the window")
        edge = float(np.max(np.abs(edge_vals)))
        peak = max(peak, edge)
        if edge <= quad.rel_floor * max(peak, 1e-300):
            break
        if prev_edge is not None and edge > prev_edge:
            grow_count += 1
            if grow_count >= 3:
                raise DivergenceError(
                    f"integrand still growing at half-width {w:.3e}"
                )
        else:
            grow_count = 0
        prev_edge = edge
        w *= 2.0
    else:
        raise DivergenceError(
            f"no decay detected out to half-width {quad.max_half_width:.3e}"
        )
    return integrate(fn, center - w, center + w, quad)
