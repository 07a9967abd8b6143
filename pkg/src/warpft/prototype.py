"""Prototype windows and their admissibility checks.

A prototype ``theta`` lives on the warped axis; warped atoms are built
by translating it to each channel position.  Three built-in families:

``gaussian(sigma)``
    ``exp(-s^2 / (2 sigma^2))`` — smooth, never compactly supported.
``hann_bump(r)``
    ``cos^2(pi s / (2r))`` on ``|s| < r`` — compact, C^1 at the edges.
``smooth_bump(r)``
    ``exp(-1 / (1 - (s/r)^2))`` on ``|s| < r`` — compact and smooth.

Derivatives are symbolic up to order 4 (Hermite recursion for the
Gaussian, Faà di Bruno for the bump), which covers the second-order
stationary-phase machinery in :mod:`warpft.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigError, DivergenceError, UnsupportedOrderError
from .quadrature import QuadratureSpec, integrate, integrate_decaying
from .warping import WarpingFunction, WeightSpec, _ret, _split

MAX_DERIVATIVE_ORDER = 4

# probabilists' Hermite polynomials He_0..He_4
_HERMITE = (
    lambda u: np.ones_like(u),
    lambda u: u,
    lambda u: u * u - 1.0,
    lambda u: u ** 3 - 3.0 * u,
    lambda u: u ** 4 - 6.0 * u * u + 3.0,
)


@dataclass(frozen=True)
class Prototype:
    """A prototype window, possibly shifted (``center``) and scaled."""

    kind: str
    sigma: float = 1.0
    radius: float = 1.0
    center: float = 0.0
    scale: float = 1.0

    @property
    def compact(self) -> bool:
        return self.kind in ("hann_bump", "smooth_bump")

    def support_radius(self, floor: float = 1e-8) -> float:
        """Radius beyond which ``|theta|`` stays below ``floor * peak``."""
        if self.compact:
            return self.radius
        return self.sigma * np.sqrt(2.0 * np.log(1.0 / floor))

    def eval(self, s, order: int = 0):
        if order < 0 or order > MAX_DERIVATIVE_ORDER:
            raise UnsupportedOrderError(
                f"prototype derivatives available for order <= {MAX_DERIVATIVE_ORDER}")
        arr, scalar = _split(s)
        u = arr - self.center
        if self.kind == "gaussian":
            out = self._gaussian(u, order)
        elif self.kind == "hann_bump":
            out = self._hann(u, order)
        elif self.kind == "smooth_bump":
            out = self._bump(u, order)
        else:
            raise ConfigError(f"unknown prototype kind {self.kind!r}")
        return _ret(self.scale * out, scalar)

    __call__ = eval

    def _gaussian(self, u, order):
        z = u / self.sigma
        sign = -1.0 if order % 2 else 1.0
        return sign * self.sigma ** (-order) * _HERMITE[order](z) * np.exp(-0.5 * z * z)

    def _hann(self, u, order):
        r = self.radius
        inside = np.abs(u) < r
        out = np.zeros_like(u)
        phase = np.pi * u[inside] / r
        if order == 0:
            out[inside] = 0.5 * (1.0 + np.cos(phase))
        else:
            out[inside] = 0.5 * (np.pi / r) ** order * np.cos(phase + 0.5 * np.pi * order)
        return out

    def _bump(self, u, order):
        r = self.radius
        # Stay clear of the support edge: every derivative vanishes there
        # faster than the rational prefactors blow up.
        inside = np.abs(u) < r * (1.0 - 1e-9)
        out = np.zeros_like(u)
        s = u[inside]
        r2 = r * r
        den = r2 - s * s
        g = np.exp(-r2 / den)
        if order == 0:
            out[inside] = g
            return out
        g1 = -2.0 * r2 * s / den ** 2
        if order == 1:
            out[inside] = g1 * g
            return out
        g2 = -2.0 * r2 * (r2 + 3.0 * s * s) / den ** 3
        if order == 2:
            out[inside] = (g2 + g1 ** 2) * g
            return out
        g3 = -24.0 * r2 * s * (r2 + s * s) / den ** 4
        if order == 3:
            out[inside] = (g3 + 3.0 * g1 * g2 + g1 ** 3) * g
            return out
        g4 = -24.0 * r2 * (r2 ** 2 + 10.0 * r2 * s * s + 5.0 * s ** 4) / den ** 5
        out[inside] = (g4 + 4.0 * g1 * g3 + 3.0 * g2 ** 2
                       + 6.0 * g1 ** 2 * g2 + g1 ** 4) * g
        return out


def gaussian_prototype(sigma: float = 1.0) -> Prototype:
    if sigma <= 0:
        raise ConfigError("gaussian prototype needs sigma > 0")
    return Prototype("gaussian", sigma=sigma)


def hann_prototype(radius: float = 1.0) -> Prototype:
    if radius <= 0:
        raise ConfigError("hann_bump prototype needs radius > 0")
    return Prototype("hann_bump", radius=radius)


def bump_prototype(radius: float = 1.0) -> Prototype:
    if radius <= 0:
        raise ConfigError("smooth_bump prototype needs radius > 0")
    return Prototype("smooth_bump", radius=radius)


def prototype_from_params(kind: str, **params) -> Prototype:
    makers = {
        "gaussian": lambda: gaussian_prototype(params.get("sigma", 1.0)),
        "hann_bump": lambda: hann_prototype(params.get("radius", 1.0)),
        "smooth_bump": lambda: bump_prototype(params.get("radius", 1.0)),
    }
    if kind not in makers:
        raise ConfigError(f"unknown prototype kind {kind!r}")
    return makers[kind]()


def eval_prototype(theta: Prototype, s, order: int = 0):
    """Functional form of :meth:`Prototype.eval`."""
    return theta.eval(s, order)


def _weight_callable(weight):
    if weight is None:
        return lambda s: np.ones_like(np.asarray(s, dtype=float))
    if isinstance(weight, WeightSpec):
        return weight
    return weight  # already a vectorized callable


def weighted_l2_norm(theta: Prototype, weight=None,
                     quad: Optional[QuadratureSpec] = None) -> float:
    """``(∫ |theta(s)|^2 weight(s)^2 ds)^{1/2}``.

    Compact prototypes integrate over their support; decaying ones over
    an adaptively expanded window.  A combination whose integrand keeps
    growing (or overflows) raises :class:`DivergenceError`.
    """
    wfn = _weight_callable(weight)

    def integrand(s):
        # overflow shows up as inf/nan and is reported as divergence
        with np.errstate(over="ignore", invalid="ignore"):
            th = theta.eval(s)
            wv = np.asarray(wfn(s), dtype=float)
            return th * th * wv * wv

    if theta.compact:
        lo = theta.center - theta.radius
        hi = theta.center + theta.radius
        val = integrate(integrand, lo, hi, quad)
    else:
        val = integrate_decaying(integrand, quad, center=theta.center,
                                 initial_half_width=max(1.0, theta.sigma))
    val = float(np.real(val))
    if not np.isfinite(val):
        raise DivergenceError("weighted norm overflowed")
    return float(np.sqrt(max(val, 0.0)))


def l2_norm(theta: Prototype, quad: Optional[QuadratureSpec] = None) -> float:
    return weighted_l2_norm(theta, None, quad)


def normalized(theta: Prototype, quad: Optional[QuadratureSpec] = None) -> Prototype:
    """Rescale so that the L2 norm equals 1."""
    return replace(theta, scale=theta.scale / l2_norm(theta, quad))


def admissibility_inner_product(theta1: Prototype, theta2: Prototype,
                                quad: Optional[QuadratureSpec] = None) -> complex:
    """``<theta1, theta2>`` in L2; this is the constant appearing next to
    ``<f1, f2>`` in the orthogonality relation."""
    if theta1.compact and theta2.compact:
        lo = max(theta1.center - theta1.radius, theta2.center - theta2.radius)
        hi = min(theta1.center + theta1.radius, theta2.center + theta2.radius)
        if hi <= lo:
            return 0.0 + 0.0j
        val = integrate(lambda s: theta1.eval(s) * np.conj(theta2.eval(s)), lo, hi, quad)
    else:
        center = 0.5 * (theta1.center + theta2.center)
        val = integrate_decaying(
            lambda s: theta1.eval(s) * np.conj(theta2.eval(s)), quad, center=center,
            initial_half_width=max(1.0, getattr(theta1, "sigma", 1.0)))
    return complex(val)


# -- admissibility conditions for the kernel-algebra membership ------------


@dataclass(frozen=True)
class ConditionEntry:
    name: str
    value: float
    finite: bool


@dataclass(frozen=True)
class ThetaConditionReport:
    entries: tuple
    p: int
    eps: float

    @property
    def passed(self) -> bool:
        return all(e.finite for e in self.entries)

    def failures(self):
        return [e for e in self.entries if not e.finite]


def _decays(fn, probes) -> bool:
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.abs(np.asarray(fn(probes), dtype=float))
    if not np.all(np.isfinite(vals)):
        return False
    peak = max(float(np.max(vals)), 1e-300)
    return bool(np.all(vals[-4:] <= 1e-10 * peak))


def check_theta_conditions(theta: Prototype, warp: WarpingFunction,
                           v1: WeightSpec, p: int, eps: float,
                           quad: Optional[QuadratureSpec] = None) -> ThetaConditionReport:
    """Check the decay/integrability conditions that put the frame kernel
    in the weighted kernel algebra.

    With ``w`` the warp weight and ``v1`` a submultiplicative majorant
    for the composed frequency weight, the auxiliary weights are::

        w1(s) = v1(s) (1+|s|)^{1+eps} w(-s)^{1/2}
        w2(s) = w1(-s) w(s)
        w3(s) = w1(-s) w(-s)^{p+1}

    Checked: (a) decay of ``w(-s)^j theta^{(k+1)}`` for ``k <= j <= p+1``,
    (b) ``theta`` in L2_{w1} and L2_{w2}, (c) ``theta^{(k)}`` in L2_{w1}
    and L2_{w3} for ``k <= p+2``.  Divergent or overflowing entries are
    flagged with ``finite=False``.
    """
    from .warping import POSITIVE_HALF_LINE

    if p < 0:
        raise ConfigError("p must be >= 0")
    if warp.domain == POSITIVE_HALF_LINE and p != 0:
        raise ConfigError("half-line warps require p = 0")
    if p + 2 > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(
            f"p={p} needs derivatives of order {p + 2} > {MAX_DERIVATIVE_ORDER}")

    def w(s):
        return warp.weight(s)

    def w1(s):
        s = np.asarray(s, dtype=float)
        return v1(s) * (1.0 + np.abs(s)) ** (1.0 + eps) * np.sqrt(w(-s))

    def w2(s):
        s = np.asarray(s, dtype=float)
        return w1(-s) * w(s)

    def w3(s):
        s = np.asarray(s, dtype=float)
        return w1(-s) * w(-s) ** (p + 1)

    entries = []

    # (a) decay of theta and of w(-s)^j * theta^(k+1)
    half = theta.support_radius(1e-16) if not theta.compact else theta.radius
    probes = np.concatenate([-np.geomspace(half, 64.0 * half, 25)[::-1],
                             np.geomspace(half, 64.0 * half, 25)])
    entries.append(ConditionEntry("decay theta", 0.0, _decays(theta.eval, probes)))
    for j in range(p + 2):
        for k in range(j + 1):
            def fn(s, j=j, k=k):
                s = np.asarray(s, dtype=float)
                tv = theta.eval(s, k + 1)
                with np.errstate(over="ignore"):
                    wv = w(-s) ** j
                # a vanished prototype kills any weight growth
                return np.where(tv == 0.0, 0.0, tv * wv)
            entries.append(ConditionEntry(
                f"decay w(-s)^{j} theta^({k + 1})", 0.0, _decays(fn, probes)))

    # (b) and (c): weighted L2 norms
    def norm_entry(name, order, wfn):
        target = theta if order == 0 else _DerivativeView(theta, order)
        try:
            val = weighted_l2_norm(target, wfn, quad)
            entries.append(ConditionEntry(name, val, bool(np.isfinite(val))))
        except DivergenceError:
            entries.append(ConditionEntry(name, float("inf"), False))

    norm_entry("theta in L2_w1", 0, w1)
    norm_entry("theta in L2_w2", 0, w2)
    for k in range(p + 3):
        norm_entry(f"theta^({k}) in L2_w1", k, w1)
        norm_entry(f"theta^({k}) in L2_w3", k, w3)

    return ThetaConditionReport(tuple(entries), p, eps)


class _DerivativeView:
    """Minimal prototype-like wrapper exposing a fixed derivative order."""

    def __init__(self, theta: Prototype, order: int):
        self._theta = theta
        self._order = order
        self.compact = theta.compact
        self.center = theta.center
        self.radius = theta.radius
        self.sigma = theta.sigma

    def support_radius(self, floor: float = 1e-8) -> float:
        extra = 1.0 + 0.5 * self._order  # derivatives widen the Gaussian tail
        return self._theta.support_radius(floor) * extra

    def eval(self, s, order: int = 0):
        return self._theta.eval(s, self._order + order)
