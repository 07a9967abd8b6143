"""File formats: flat configs, system descriptors, signals, containers.

Everything on disk is either flat ``key = value`` text (configs and
descriptors, ``#`` comments allowed, numbers printed with 17 significant
digits so they round-trip) or little-endian binary:

* signals — raw interleaved f64 re/im pairs, length from file size;
* coefficients — magic ``WTC1``, u32 version, u32 channel count,
  per-channel ``{f64 center_hz, f64 hop_seconds, u64 frame_count}``
  headers, then per-channel interleaved f64 re/im frames;
* atom cache — magic ``WTS1``, u32 version, u32 channel count,
  u64 transform length, per-channel ``{f64 center_hz, u64 hop,
  u64 support_count}`` then u64 support indices and f64 values.
"""

from __future__ import annotations

import struct
from typing import Dict, List, Tuple

import numpy as np

from .errors import ConfigError, FormatError, ShapeError
from .prototype import Prototype, prototype_from_params
from .system import SignalGrid, WarpedSystem, build_system
from .transform import Coefficients
from .warping import WarpingFunction, warp_from_params

_COEFF_MAGIC = b"WTC1"
_CACHE_MAGIC = b"WTS1"
_VERSION = 1

_WARP_PARAMS = {
    "linear": ("c",),
    "log": (),
    "power_law": ("c", "d", "l"),
    "erb": ("c1", "c2"),
    "alpha_like": ("l",),
}


def fmt(value) -> str:
    """17-significant-digit decimal text; round-trips doubles exactly."""
    return format(float(value), ".17g")


# -- flat key = value text -------------------------------------------------


def parse_config(text: str) -> Dict[str, str]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', "
                              f"got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_config(path) -> Dict[str, str]:
    try:
        with open(path, "r", encoding="ascii") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except UnicodeDecodeError:
        raise FormatError(f"{path} is not a text config") from None


def format_config(entries: Dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in entries.items())


def _take_float(cfg: Dict[str, str], key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return float(default)
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: {cfg[key]!r} is not a number") \
            from None


def _take_bool(cfg: Dict[str, str], key: str, default: bool) -> bool:
    raw = cfg.get(key, "true" if default else "false").lower()
    if raw not in ("true", "false"):
        raise ConfigError(f"key {key!r}: expected true/false, got {raw!r}")
    return raw == "true"


# -- system descriptors ----------------------------------------------------


def system_from_config(cfg: Dict[str, str]) -> WarpedSystem:
    """Build a system from parsed descriptor/config keys."""
    kind = cfg.get("warp.kind")
    if kind is None:
        raise ConfigError("missing required key 'warp.kind'")
    if kind not in _WARP_PARAMS:
        raise ConfigError(f"unknown warp kind {kind!r}")
    params = {p: _take_float(cfg, f"warp.{p}")
              for p in _WARP_PARAMS[kind] if f"warp.{p}" in cfg}
    warp = warp_from_params(kind, **params)

    pkind = cfg.get("prototype.kind")
    if pkind is None:
        raise ConfigError("missing required key 'prototype.kind'")
    pparams = {}
    if "prototype.sigma" in cfg:
        pparams["sigma"] = _take_float(cfg, "prototype.sigma")
    if "prototype.radius" in cfg:
        pparams["radius"] = _take_float(cfg, "prototype.radius")
    theta = prototype_from_params(pkind, **pparams)

    length = _take_float(cfg, "length")
    if length != int(length):
        raise ConfigError("length must be an integer")
    grid = SignalGrid(int(length), _take_float(cfg, "sample_rate"))
    known = {"warp.kind", "prototype.kind", "delta", "sample_rate", "length",
             "time_scale", "truncation", "prototype.normalize"}
    known |= {f"warp.{p}" for p in _WARP_PARAMS[kind]}
    known |= {"prototype.sigma", "prototype.radius"}
    stray = sorted(set(cfg) - known)
    if stray:
        raise ConfigError(f"unknown keys: {', '.join(stray)}")
    return build_system(
        warp, theta, _take_float(cfg, "delta"), grid,
        time_scale=_take_float(cfg, "time_scale", 1.0),
        normalize=_take_bool(cfg, "prototype.normalize", True),
        truncation=_take_float(cfg, "truncation", 1e-8))


def system_to_config(system: WarpedSystem) -> Dict[str, str]:
    warp, theta = system.warp, system.theta
    out = {"warp.kind": warp.kind}
    for p in _WARP_PARAMS[warp.kind]:
        out[f"warp.{p}"] = fmt(getattr(warp, p))
    out["prototype.kind"] = theta.kind
    if theta.kind == "gaussian":
        out["prototype.sigma"] = fmt(theta.sigma)
    else:
        out["prototype.radius"] = fmt(theta.radius)
    out["prototype.normalize"] = "true" if system.normalize else "false"
    out["delta"] = fmt(system.delta)
    out["sample_rate"] = fmt(system.grid.sample_rate)
    out["length"] = str(system.grid.length)
    out["time_scale"] = fmt(system.time_scale)
    out["truncation"] = fmt(system.truncation)
    return out


def write_descriptor(path, system: WarpedSystem):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_config(system_to_config(system)))


def read_descriptor(path) -> WarpedSystem:
    return system_from_config(read_config(path))


# -- raw signals -----------------------------------------------------------


def write_signal(path, signal: np.ndarray):
    np.asarray(signal, dtype=np.complex128).astype("<c16").tofile(path)


def read_signal(path) -> np.ndarray:
    try:
        raw = np.fromfile(path, dtype=np.uint8)
    except OSError as exc:
        raise FormatError(f"cannot read signal {path}: {exc}") from None
    if raw.size % 16:
        raise FormatError(f"signal file {path} is not a whole number of "
                          "f64 re/im pairs")
    return raw.view("<c16").astype(np.complex128)


# -- WTC1 coefficient containers ------------------------------------------


def write_coefficients(path, coeffs: Coefficients):
    with open(path, "wb") as fh:
        fh.write(_COEFF_MAGIC)
        fh.write(struct.pack("<II", _VERSION, len(coeffs.data)))
        for center, hop, frames in zip(coeffs.centers_hz,
                                       coeffs.hop_seconds,
                                       coeffs.frame_counts()):
            fh.write(struct.pack("<ddQ", center, hop, frames))
        for block in coeffs.data:
            fh.write(np.asarray(block, dtype=np.complex128)
                     .astype("<c16").tobytes())


def read_coefficients(path, system: WarpedSystem) -> Coefficients:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read coefficients {path}: {exc}") from None
    if blob[:4] != _COEFF_MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}, "
                          f"expected {_COEFF_MAGIC!r}")
    version, count = struct.unpack_from("<II", blob, 4)
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported container version {version}")
    if count != len(system.channels):
        raise ShapeError(f"{path}: container has {count} channels, "
                         f"system has {len(system.channels)}")
    off = 12
    headers: List[Tuple[float, float, int]] = []
    for _ in range(count):
        headers.append(struct.unpack_from("<ddQ", blob, off))
        off += 24
    data = []
    for ch, (center, hop, frames) in zip(system.channels, headers):
        if frames != ch.frames:
            raise ShapeError(f"{path}: channel {ch.index} has {frames} "
                             f"frames, system expects {ch.frames}")
        end = off + 16 * frames
        if end > len(blob):
            raise FormatError(f"{path}: truncated payload")
        data.append(np.frombuffer(blob[off:end], dtype="<c16")
                    .astype(np.complex128))
        off = end
    if off != len(blob):
        raise FormatError(f"{path}: {len(blob) - off} trailing bytes")
    return Coefficients(data, [h[0] for h in headers],
                        [h[1] for h in headers],
                        system.grid.sample_rate, system.grid.length)


# -- WTS1 atom cache -------------------------------------------------------


def write_atom_cache(path, system: WarpedSystem):
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IIQ", _VERSION, len(system.channels),
                             system.grid.length))
        for ch, atom in zip(system.channels, system.atoms):
            fh.write(struct.pack("<dQQ", ch.center_hz, ch.hop_samples,
                                 atom.support.size))
            fh.write(atom.support.astype("<u8").tobytes())
            fh.write(atom.values[atom.support].astype("<f8").tobytes())


def read_atom_cache(path) -> List[Tuple[float, int, np.ndarray, np.ndarray]]:
    """Returns per-channel (center_hz, hop, support indices, values)."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read atom cache {path}: {exc}") from None
    if blob[:4] != _CACHE_MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}, "
                          f"expected {_CACHE_MAGIC!r}")
    version, count, length = struct.unpack_from("<IIQ", blob, 4)
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported cache version {version}")
    off = 20
    out = []
    for _ in range(count):
        center, hop, nsup = struct.unpack_from("<dQQ", blob, off)
        off += 24
        idx = np.frombuffer(blob[off:off + 8 * nsup], dtype="<u8") \
            .astype(np.int64)
        off += 8 * nsup
        vals = np.frombuffer(blob[off:off + 8 * nsup], dtype="<f8") \
            .astype(np.float64)
        off += 8 * nsup
        if idx.size != nsup or vals.size != nsup or np.any(idx >= length):
            raise FormatError(f"{path}: truncated or inconsistent cache")
        out.append((center, int(hop), idx, vals))
    if off != len(blob):
        raise FormatError(f"{path}: {len(blob) - off} trailing bytes")
    return out
