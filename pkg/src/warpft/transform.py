"""Analysis and synthesis with warped filterbanks.

Analysis correlates the signal with time translates of each channel
atom.  In the DFT domain that is a product followed by an inverse FFT,
subsampled by the channel hop:

    c_l[k] = ifft(fft(f) * conj(g_l))[k * n_l]

With unit-norm prototypes these coefficients approximate the continuous
inner products ``<f, g_{x_l, k n_l / fs}>`` directly, no extra scaling.

Painless synthesis folds each coefficient stream back to the DFT grid
and divides by the diagonal frame profile.  Because hops divide the
grid length and atom supports occupy distinct residues mod the frame
count, the fold is exact and the round trip reproduces every covered
bin to machine precision.  The iterative path solves the normal
equations with conjugate gradients instead and works for any system.
"""

from __future__ import annotations

import csv
from typing import Optional

import numpy as np

from .errors import (IllConditionedError, NonConvergenceError,
                     NotPainlessError, ShapeError)
from .prototype import admissibility_inner_product
from .system import Coefficients, WarpedSystem

#: bins with frame profile below this fraction of its peak are treated
#: as uncovered by the diagonal inverse
DIAG_FLOOR = 1e-12


def _as_signal(f, n: int) -> np.ndarray:
    arr = np.asarray(f)
    if arr.ndim != 1 or arr.size != n:
        raise ShapeError(f"signal must be 1-d of length {n}, got shape {arr.shape}")
    return arr.astype(complex)


def analyze(f, system: WarpedSystem) -> Coefficients:
    """Warped transform coefficients of ``f`` (length must match the grid)."""
    fhat = np.fft.fft(_as_signal(f, system.grid.length))
    data = []
    for atom, ch in zip(system.atoms, system.channels):
        prod = np.zeros_like(fhat)
        prod[atom.support] = fhat[atom.support] * atom.values[atom.support]
        data.append(np.fft.ifft(prod)[::ch.hop_samples])
    fs = system.grid.sample_rate
    return Coefficients(data,
                        system.channel_positions(),
                        np.array([ch.hop_samples / fs for ch in system.channels]),
                        fs, system.grid.length)


def adjoint(coeffs: Coefficients, system: WarpedSystem) -> np.ndarray:
    """Apply the synthesis map ``V* c = sum_{l,k} c_l[k] g_{l,k}``."""
    return np.fft.ifft(_adjoint_hat(coeffs, system))


def _adjoint_hat(coeffs: Coefficients, system: WarpedSystem) -> np.ndarray:
    if not coeffs.matches_system(system):
        raise ShapeError("coefficient layout does not match the system")
    n = system.grid.length
    out = np.zeros(n, dtype=complex)
    for c, atom, ch in zip(coeffs.data, system.atoms, system.channels):
        spread = np.fft.fft(c)  # length M_l; index by j mod M_l
        idx = atom.support
        out[idx] += spread[idx % ch.frames] * atom.values[idx]
    return out


def apply_frame_operator(f, system: WarpedSystem) -> np.ndarray:
    """``S f = V* V f`` via the full analysis/synthesis pipeline."""
    return adjoint(analyze(f, system), system)


def synthesize(coeffs: Coefficients, system: WarpedSystem,
               iterative: bool = False, tol: float = 1e-10,
               max_iterations: int = 500) -> np.ndarray:
    """Reconstruct a signal from coefficients.

    The default path requires a painless system and inverts the diagonal
    frame profile; ``iterative=True`` runs preconditioned conjugate
    gradients on the frame operator instead.
    """
    if iterative:
        return _synthesize_cg(coeffs, system, tol, max_iterations)
    if not system.painless:
        raise NotPainlessError(
            "system fails the painless support condition; "
            "use the iterative path")
    diag = system.frame_diag()
    peak = float(np.max(diag))
    interior = system.interior_bins()
    if interior.size and float(np.min(diag[interior])) < DIAG_FLOOR * peak:
        raise IllConditionedError(
            "frame profile nearly vanishes inside the covered band")
    num = _adjoint_hat(coeffs, system)
    fhat = np.zeros_like(num)
    good = diag >= DIAG_FLOOR * peak
    fhat[good] = num[good] / diag[good]
    return np.fft.ifft(fhat)


def _synthesize_cg(coeffs, system, tol, max_iterations):
    rhs = _adjoint_hat(coeffs, system)
    diag = system.frame_diag()
    peak = float(np.max(diag))
    covered = diag >= DIAG_FLOOR * peak
    precond = np.where(covered, 1.0 / np.maximum(diag, DIAG_FLOOR * peak), 0.0)

    def op(v_hat):
        out = np.zeros_like(v_hat)
        for atom, ch in zip(system.atoms, system.channels):
            idx = atom.support
            prod = np.zeros_like(v_hat)
            prod[idx] = v_hat[idx] * atom.values[idx]
            c = np.fft.ifft(prod)[::ch.hop_samples]
            out[idx] += np.fft.fft(c)[idx % ch.frames] * atom.values[idx]
        return out

    x = np.zeros_like(rhs)
    r = rhs - op(x)
    r[~covered] = 0.0
    z = precond * r
    p = z.copy()
    rz = np.vdot(r, z).real
    target = tol * float(np.linalg.norm(rhs))
    if np.linalg.norm(r) <= target:
        return np.fft.ifft(x)
    for _ in range(max_iterations):
        q = op(p)
        q[~covered] = 0.0
        denom = np.vdot(p, q).real
        if denom <= 0:
            raise NonConvergenceError("frame operator lost positivity in CG")
        alpha = rz / denom
        x += alpha * p
        r -= alpha * q
        if np.linalg.norm(r) <= target:
            return np.fft.ifft(x)
        z = precond * r
        rz_new = np.vdot(r, z).real
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NonConvergenceError(
        f"conjugate gradients did not reach tol={tol} "
        f"in {max_iterations} iterations")


def roundtrip_residual(f, system: WarpedSystem, iterative: bool = False) -> float:
    """Relative L2 error of analyze-then-synthesize on ``f``."""
    f = _as_signal(f, system.grid.length)
    rec = synthesize(analyze(f, system), system, iterative=iterative)
    denom = float(np.linalg.norm(f))
    if denom == 0:
        return float(np.linalg.norm(rec))
    return float(np.linalg.norm(rec - f) / denom)


def moyal_residual(f1, f2, system1: WarpedSystem,
                   system2: Optional[WarpedSystem] = None) -> float:
    """Orthogonality-relation defect for a pair of signals.

    The weighted coefficient pairing (cell measure times the warp weight
    at each channel slot) should match ``<f1, f2> <theta2, theta1>``;
    the absolute difference is returned.  ``system2`` defaults to
    ``system1`` and must share its grid, warp and channel layout.
    """
    s1 = system1
    s2 = system2 if system2 is not None else system1
    if (s1.grid.length != s2.grid.length
            or s1.grid.sample_rate != s2.grid.sample_rate
            or s1.delta != s2.delta
            or len(s1.channels) != len(s2.channels)
            or s1.warp.kind != s2.warp.kind):
        raise ShapeError("moyal_residual needs systems on a shared layout")
    c1 = analyze(f1, s1)
    c2 = analyze(f2, s2)
    fs = s1.grid.sample_rate
    lhs = 0.0 + 0.0j
    for a, b, ch in zip(c1.data, c2.data, s1.channels):
        slot = s1.delta * (ch.index + 0.5)
        wslot = float(s1.warp.weight(slot))
        lhs += s1.delta * wslot * (ch.hop_samples / fs) * np.vdot(b, a)
    inner = np.vdot(_as_signal(f2, s1.grid.length),
                    _as_signal(f1, s1.grid.length)) / fs
    rhs = inner * admissibility_inner_product(s2.theta, s1.theta)
    return float(abs(lhs - rhs))


def stft_reference(f, system: WarpedSystem) -> Coefficients:
    """Sliding-window reference transform, computed the slow direct way.

    Each channel's window is the inverse FFT of its sampled response;
    coefficient ``(l, k)`` is the plain dot product of the signal with
    the window advanced by ``k`` hops.  Useful as an independent check
    of the FFT-subsampling analysis path.
    """
    n = system.grid.length
    sig = _as_signal(f, n)
    data = []
    for atom, ch in zip(system.atoms, system.channels):
        window = np.fft.ifft(atom.values.astype(complex))
        frames = np.empty(ch.frames, dtype=complex)
        for k in range(ch.frames):
            rolled = np.roll(sig, -k * ch.hop_samples)
            frames[k] = np.vdot(window, rolled)
        data.append(frames)
    fs = system.grid.sample_rate
    return Coefficients(data, system.channel_positions(),
                        np.array([ch.hop_samples / fs for ch in system.channels]),
                        fs, n)


def coefficient_deviation(a: Coefficients, b: Coefficients) -> float:
    """Largest absolute entrywise difference between two coefficient sets."""
    if a.channel_count != b.channel_count:
        raise ShapeError("channel counts differ")
    dev = 0.0
    for ca, cb in zip(a.data, b.data):
        if ca.size != cb.size:
            raise ShapeError("frame counts differ")
        dev = max(dev, float(np.max(np.abs(ca - cb))) if ca.size else 0.0)
    return dev


def export_spectrogram(coeffs: Coefficients, path: str) -> None:
    """Write ``channel,frame,time_seconds,center_hz,magnitude`` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel", "frame", "time_seconds",
                         "center_hz", "magnitude"])
        for l, c in enumerate(coeffs.data):
            hop = coeffs.hop_seconds[l]
            center = coeffs.centers_hz[l]
            for k in range(c.size):
                writer.writerow([l, k, "%.17g" % (k * hop),
                                 "%.17g" % center,
                                 "%.17g" % abs(c[k])])
