"""
Complex-baseband signal blocks.

Signals are plain 1-D ``complex128`` numpy arrays; chip channels are 1-D
complex arrays of FIR taps. Power is expressed in dBm under a fixed digital
convention: an amplitude-squared of 1.0 corresponds to 1 mW, so a block with
unit mean-square magnitude sits at 0 dBm. All power figures are realized
per-block values, never ensemble expectations.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError

SIGNAL_KINDS = ("gaussian", "qpsk", "qam16")

_KIND_ALIASES = {
    "gaussian": "gaussian",
    "circular-complex-gaussian": "gaussian",
    "qpsk": "qpsk",
    "qam16": "qam16",
}


def derive_seed(seed: int, *key: int) -> int:
    """Hash ``seed`` and a tuple of non-negative integers into a 64-bit seed.

    Uses numpy's ``SeedSequence`` with ``key`` as the spawn key, so
    distinct keys give statistically independent streams.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def as_block(x, name: str = "signal") -> np.ndarray:
    """Validate and convert ``x`` into a finite 1-D complex block."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidArgumentError(f"{name} must contain at least one sample")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains NaN or Inf")
    return arr


def as_channel(h) -> np.ndarray:
    taps = as_block(h, "channel")
    if not np.any(taps):
        raise InvalidArgumentError("channel must have at least one nonzero tap")
    return taps


def _draw(kind: str, P: int, rng: np.random.Generator) -> np.ndarray:
    # Raw draws, nominally unit mean-square before any normalization.
    if kind == "gaussian":
        return (rng.standard_normal(P) + 1j * rng.standard_normal(P)) / np.sqrt(2.0)
    if kind == "qpsk":
        bits = rng.integers(0, 2, size=(2, P))
        return ((2 * bits[0] - 1) + 1j * (2 * bits[1] - 1)) / np.sqrt(2.0)
    if kind == "qam16":
        levels = rng.integers(0, 4, size=(2, P)) * 2 - 3
        return (levels[0] + 1j * levels[1]) / np.sqrt(10.0)
    raise InvalidArgumentError(f"unknown signal kind {kind!r}; expected one of {SIGNAL_KINDS}")


def generate_block(P: int, kind: str = "gaussian", seed: int = 0) -> np.ndarray:
    """Generate a length-``P`` block at exactly 0 dBm.

    Parameters
    ----------
    P : int
        Number of samples, at least 1.
    kind : str
        ``"gaussian"`` (circularly-symmetric complex Gaussian), ``"qpsk"`` or
        ``"qam16"``.
    seed : int
        Generator seed; identical arguments give identical blocks.

    Returns
    -------
    numpy.ndarray
        Complex block with realized mean-square magnitude 1.
    """
    if int(P) < 1:
        raise InvalidArgumentError(f"block size must be positive, got {P}")
    try:
        kind = _KIND_ALIASES[kind]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown signal kind {kind!r}; expected one of {SIGNAL_KINDS}"
        ) from None
    block = _draw(kind, int(P), np.random.default_rng(seed))
    if kind == "qpsk":
        # constant modulus: already exactly on the unit-power constellation
        return block
    return set_power(block, 0.0)


def fir_filter(s, h) -> np.ndarray:
    """Filter ``s`` through FIR taps ``h`` assuming zeros before the block.

    ``out(n) = sum_k h(k) s(n-k)``; the output has the same length as ``s``.
    """
    s = as_block(s)
    h = as_channel(h)
    return np.convolve(s, h)[: s.size]


def delay(s: np.ndarray, lag: int) -> np.ndarray:
    """Delay ``s`` by ``lag`` samples, shifting in zeros."""
    if lag < 0:
        raise InvalidArgumentError(f"lag must be non-negative, got {lag}")
    out = np.zeros_like(s)
    if lag < s.size:
        out[lag:] = s[: s.size - lag]
    return out


def measure_power(s) -> float:
    """Block power in dBm; ``-inf`` for an all-zero block."""
    s = as_block(s)
    ms = float(np.mean(s.real**2 + s.imag**2))
    if ms == 0.0:
        return -np.inf
    return float(10.0 * np.log10(ms))


def set_power(s, target_dbm: float) -> np.ndarray:
    """Scale ``s`` by one positive real factor so its block power is ``target_dbm``."""
    s = as_block(s)
    if not np.isfinite(target_dbm):
        raise InvalidArgumentError(f"target power must be finite, got {target_dbm}")
    ms = float(np.mean(s.real**2 + s.imag**2))
    if ms == 0.0:
        raise DegenerateInputError("cannot set the power of an all-zero block")
    return s * np.sqrt(10.0 ** (target_dbm / 10.0) / ms)


def awgn_block(P: int, power_dbm: float, seed: int = 0) -> np.ndarray:
    """White circular complex Gaussian noise with realized power ``power_dbm``."""
    if int(P) < 1:
        raise InvalidArgumentError(f"block size must be positive, got {P}")
    rng = np.random.default_rng(seed)
    return set_power(_draw("gaussian", int(P), rng), power_dbm)
