"""Discrete warped filterbank systems.

A system samples the continuous warped atoms on a finite DFT grid.  The
warped axis is cut into steps of width ``delta``; channel ``l`` sits at
the centre frequency ``F^{-1}(delta (l + 1/2))`` and carries the atom

    g_l[j] = sqrt(F'(x_l)) * theta(F(xi_j) - F(x_l))

sampled on the DFT bins ``xi_j``.  Each channel's time hop comes from
the induced phase-space tiling: the cell height ``delta^2 / |I_l|``
(seconds, after an optional ``time_scale`` calibration) is rounded
*down* to a power-of-two number of samples.  Keeping hops divisors of N
makes every per-channel time lattice a subgroup of Z_N, which is what
turns the painless support condition into an exact diagonal inversion.

Half-line warps analyze the analytic part only: non-positive bins are
zeroed and reconstructions live on positive frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import ConfigError, DegenerateAtomError, ShapeError
from .prototype import Prototype, normalized
from .warping import POSITIVE_HALF_LINE, WarpingFunction


@dataclass(frozen=True)
class SignalGrid:
    """A periodic sampling grid: ``length`` samples at ``sample_rate`` Hz."""

    length: int
    sample_rate: float

    def __post_init__(self):
        n = self.length
        if n < 16 or (n & (n - 1)) != 0:
            raise ConfigError(f"grid length must be a power of two >= 16, got {n}")
        if self.sample_rate <= 0:
            raise ConfigError("sample_rate must be positive")

    @property
    def bin_hz(self) -> float:
        return self.sample_rate / self.length

    def bin_freqs(self) -> np.ndarray:
        """Bin frequencies in DFT storage order, spanning (-fs/2, fs/2]."""
        f = np.fft.fftfreq(self.length, 1.0 / self.sample_rate)
        f[self.length // 2] = 0.5 * self.sample_rate  # Nyquist kept positive
        return f

    def active_mask(self, domain: str) -> np.ndarray:
        f = self.bin_freqs()
        if domain == POSITIVE_HALF_LINE:
            return f > 0
        return np.ones_like(f, dtype=bool)


@dataclass(frozen=True)
class Channel:
    """Geometry of one filterbank channel."""

    index: int               # warped slot l
    center_hz: float         # F^{-1}(delta (l + 1/2))
    band_lo_hz: float        # F^{-1}(delta l)
    band_hi_hz: float        # F^{-1}(delta (l + 1))
    bandwidth_hz: float
    tau_seconds: float       # nominal hop, time_scale * delta^2 / bandwidth
    hop_samples: int         # power of two dividing the grid length
    frames: int

    @property
    def hop_seconds_at(self):  # pragma: no cover - convenience only
        return self.hop_samples


def _pow2_floor(x: float) -> int:
    if x < 2.0:
        return 1
    return 1 << (int(np.floor(np.log2(x))))


def design_channels(warp: WarpingFunction, delta: float, grid: SignalGrid,
                    time_scale: float = 1.0) -> List[Channel]:
    """All channels whose centre lies in the grid's active band.

    Raises :class:`ConfigError` when fewer than two channels fit.
    """
    if delta <= 0:
        raise ConfigError("delta must be positive")
    if time_scale <= 0:
        raise ConfigError("time_scale must be positive")
    freqs = grid.bin_freqs()
    active = grid.active_mask(warp.domain)
    f_lo = float(np.min(freqs[active]))
    f_hi = float(np.max(freqs[active]))
    w_lo = warp.eval(f_lo)
    w_hi = warp.eval(f_hi)
    l_min = int(np.ceil(w_lo / delta - 0.5))
    l_max = int(np.floor(w_hi / delta - 0.5))
    if l_max - l_min + 1 < 2:
        raise ConfigError(
            f"delta={delta} leaves {max(0, l_max - l_min + 1)} channel(s); need >= 2")
    channels = []
    for l in range(l_min, l_max + 1):
        lo = float(warp.inverse(delta * l))
        hi = float(warp.inverse(delta * (l + 1)))
        center = float(warp.inverse(delta * (l + 0.5)))
        bw = hi - lo
        tau = time_scale * delta * delta / bw
        hop = min(_pow2_floor(tau * grid.sample_rate), grid.length)
        channels.append(Channel(l, center, lo, hi, bw, tau, hop,
                                grid.length // hop))
    return channels


@dataclass(frozen=True)
class Atom:
    """A sampled atom: dense values plus its retained support indices."""

    values: np.ndarray        # float64, length N, zero off support
    support: np.ndarray       # bin indices with values != 0
    center_hz: float

    @property
    def support_bins(self) -> int:
        return int(self.support.size)


def build_atom(warp: WarpingFunction, theta: Prototype, x: float,
               grid: SignalGrid, truncation: float = 1e-8) -> Atom:
    """Sample ``sqrt(F'(x)) theta(F(.) - F(x))`` on the grid bins.

    Values below ``truncation`` times the peak are zeroed; an atom with
    empty retained support raises :class:`DegenerateAtomError`.
    """
    freqs = grid.bin_freqs()
    active = grid.active_mask(warp.domain)
    vals = np.zeros(grid.length)
    fx = warp.eval(float(x))
    vals[active] = np.sqrt(warp.derivative(float(x))) * theta.eval(
        warp.eval(freqs[active]) - fx)
    peak = float(np.max(np.abs(vals)))
    if peak == 0.0:
        raise DegenerateAtomError(f"atom at {x} Hz vanishes on the grid")
    if truncation:
        vals[np.abs(vals) < truncation * peak] = 0.0
    support = np.flatnonzero(vals)
    if support.size == 0:
        raise DegenerateAtomError(f"atom at {x} Hz fully truncated")
    return Atom(vals, support, float(x))


@dataclass(frozen=True)
class PainlessReport:
    painless: bool
    support_hz: np.ndarray      # per-channel retained support width
    limit_hz: np.ndarray        # per-channel 1 / tau_l
    alias_free: np.ndarray      # fold injectivity per channel
    violations: tuple           # channel list positions failing either test


def painless_check(system: "WarpedSystem") -> PainlessReport:
    """Painless iff every channel's retained support fits its cell: the
    support width in Hz must not exceed ``1/tau_l``, and the support bins
    must occupy distinct residues modulo the per-channel frame count
    (which makes the subsampled analysis alias-free)."""
    sup = np.array([a.support_bins * system.grid.bin_hz for a in system.atoms])
    lim = np.array([1.0 / ch.tau_seconds for ch in system.channels])
    alias = np.array([
        np.unique(a.support % ch.frames).size == a.support.size
        for a, ch in zip(system.atoms, system.channels)])
    bad = tuple(i for i in range(len(system.channels))
                if sup[i] > lim[i] or not alias[i])
    return PainlessReport(len(bad) == 0, sup, lim, alias, bad)


class WarpedSystem:
    """A fully built warped filterbank on a signal grid.

    Use :func:`build_system`; the constructor only wires the parts
    together and derives the diagonal frame profile.
    """

    def __init__(self, warp: WarpingFunction, theta: Prototype, delta: float,
                 grid: SignalGrid, channels: List[Channel], atoms: List[Atom],
                 time_scale: float = 1.0, truncation: float = 1e-8,
                 normalize: bool = True):
        self.warp = warp
        self.theta = theta
        self.delta = delta
        self.grid = grid
        self.channels = channels
        self.atoms = atoms
        self.time_scale = time_scale
        self.truncation = truncation
        self.normalize = normalize
        self._painless: Optional[PainlessReport] = None
        self._diag: Optional[np.ndarray] = None

    @property
    def painless_report(self) -> PainlessReport:
        if self._painless is None:
            self._painless = painless_check(self)
        return self._painless

    @property
    def painless(self) -> bool:
        return self.painless_report.painless

    def frame_diag(self) -> np.ndarray:
        """Diagonal frame profile ``S_d[j] = sum_l |g_l[j]|^2 / n_l``.

        In the painless regime this is the whole frame operator in the
        DFT basis.
        """
        if self._diag is None:
            d = np.zeros(self.grid.length)
            for atom, ch in zip(self.atoms, self.channels):
                d[atom.support] += atom.values[atom.support] ** 2 / ch.hop_samples
            self._diag = d
        return self._diag

    def interior_bins(self) -> np.ndarray:
        """Bins whose warped position sees every prototype translate that
        an unbounded channel set would contribute (full-coverage band)."""
        radius = self.theta.support_radius(max(self.truncation, 1e-12))
        w_lo = self.delta * (self.channels[0].index + 0.5) + radius
        w_hi = self.delta * (self.channels[-1].index + 0.5) - radius
        if w_hi <= w_lo:
            return np.array([], dtype=int)
        freqs = self.grid.bin_freqs()
        active = self.grid.active_mask(self.warp.domain)
        lo_hz = float(self.warp.inverse(w_lo))
        hi_hz = float(self.warp.inverse(w_hi))
        return np.flatnonzero(active & (freqs >= lo_hz) & (freqs <= hi_hz))

    def channel_positions(self) -> np.ndarray:
        return np.array([ch.center_hz for ch in self.channels])


def build_system(warp: WarpingFunction, theta: Prototype, delta: float,
                 grid: SignalGrid, time_scale: float = 1.0,
                 normalize: bool = True, truncation: float = 1e-8) -> WarpedSystem:
    """Design channels and atoms for a warp/prototype pair.

    ``normalize=True`` (the default) rescales the prototype to unit L2
    norm first, which fixes the reconstruction constant at 1.
    """
    if normalize:
        theta = normalized(theta)
    channels = design_channels(warp, delta, grid, time_scale)
    atoms = [build_atom(warp, theta, ch.center_hz, grid, truncation)
             for ch in channels]
    return WarpedSystem(warp, theta, delta, grid, channels, atoms,
                        time_scale, truncation, normalize)


class Coefficients:
    """Warped transform coefficients: one complex array per channel.

    Carries enough channel metadata (centre, hop in seconds, frame
    count) to be serialized standalone.
    """

    def __init__(self, data: List[np.ndarray], centers_hz: np.ndarray,
                 hop_seconds: np.ndarray, sample_rate: float, length: int):
        if not (len(data) == len(centers_hz) == len(hop_seconds)):
            raise ShapeError("coefficient metadata lengths disagree")
        self.data = [np.asarray(c, dtype=complex) for c in data]
        self.centers_hz = np.asarray(centers_hz, dtype=float)
        self.hop_seconds = np.asarray(hop_seconds, dtype=float)
        self.sample_rate = float(sample_rate)
        self.length = int(length)

    @property
    def channel_count(self) -> int:
        return len(self.data)

    def frame_counts(self) -> np.ndarray:
        return np.array([c.size for c in self.data], dtype=int)

    def total_coefficients(self) -> int:
        return int(sum(c.size for c in self.data))

    def matches_system(self, system: WarpedSystem) -> bool:
        if self.channel_count != len(system.channels):
            return False
        if self.length != system.grid.length:
            return False
        return all(c.size == ch.frames
                   for c, ch in zip(self.data, system.channels))
