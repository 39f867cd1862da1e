"""
LNA distortion synthesis and received-frame assembly.

Harmonic distortion raises one leaked signal to an integer power; two-tone
inter-modulation multiplies powers of two leaked signals, with a source
replaced by its complex conjugate whenever its exponent is negative.
Both are taken literally in complex baseband (no extra conjugate-product
terms).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError
from .signal import as_block, awgn_block, derive_seed, generate_block, set_power

HD = "HD"
IMD = "IMD"


@dataclass(frozen=True)
class DistortionSpec:
    """Nonlinearity description.

    For ``kind == "HD"`` only ``Q`` is used. For ``kind == "IMD"`` the
    signed exponents ``p`` and ``q`` apply to the first and second leaked
    signal respectively.
    """

    kind: str
    Q: int = 0
    p: int = 0
    q: int = 0
    c0: complex = 1.0

    def __post_init__(self):
        if self.kind == HD:
            if int(self.Q) < 2:
                raise InvalidArgumentError(f"HD order must be >= 2, got {self.Q}")
        elif self.kind == IMD:
            if self.p == 0 or self.q == 0:
                raise InvalidArgumentError("IMD exponents p and q must be nonzero")
        else:
            raise InvalidArgumentError(f"unknown distortion kind {self.kind!r}")
        c0 = complex(self.c0)
        if not np.isfinite(c0) or c0 == 0:
            raise InvalidArgumentError(f"gain c0 must be finite and nonzero, got {self.c0}")

    @classmethod
    def hd(cls, Q: int, c0: complex = 1.0) -> "DistortionSpec":
        return cls(HD, Q=int(Q), c0=c0)

    @classmethod
    def imd(cls, p: int, q: int, c0: complex = 1.0) -> "DistortionSpec":
        return cls(IMD, p=int(p), q=int(q), c0=c0)

    @property
    def order(self) -> int:
        """Total nonlinearity order (``Q`` or ``|p| + |q|``)."""
        if self.kind == HD:
            return self.Q
        return abs(self.p) + abs(self.q)

    @property
    def exponents(self) -> tuple[int, ...]:
        """Signed exponent per source."""
        if self.kind == HD:
            return (self.Q,)
        return (self.p, self.q)


def hd_distortion(x, spec: DistortionSpec) -> np.ndarray:
    """``c0 * x(n)**Q`` (no conjugation)."""
    if spec.kind != HD:
        raise InvalidArgumentError(f"expected an HD spec, got {spec.kind}")
    x = as_block(x, "x")
    return complex(spec.c0) * x**spec.Q


def imd_distortion(x1, x2, spec: DistortionSpec) -> np.ndarray:
    """``c0 * u1**|p| * u2**|q|`` where ``u_i`` is conjugated for a negative exponent."""
    if spec.kind != IMD:
        raise InvalidArgumentError(f"expected an IMD spec, got {spec.kind}")
    x1 = as_block(x1, "x1")
    x2 = as_block(x2, "x2")
    if x1.size != x2.size:
        raise InvalidArgumentError(f"length mismatch: {x1.size} vs {x2.size}")
    u1 = np.conj(x1) if spec.p < 0 else x1
    u2 = np.conj(x2) if spec.q < 0 else x2
    return complex(spec.c0) * u1 ** abs(spec.p) * u2 ** abs(spec.q)


def distort(spec: DistortionSpec, *leaked) -> np.ndarray:
    """Dispatch to :func:`hd_distortion` or :func:`imd_distortion`."""
    if spec.kind == HD:
        (x,) = leaked
        return hd_distortion(x, spec)
    x1, x2 = leaked
    return imd_distortion(x1, x2, spec)


@dataclass(frozen=True)
class ReceiveFrame:
    """Observed block ``r = p_true + y + z`` plus its ground-truth parts."""

    r: np.ndarray
    p_true: np.ndarray
    y: np.ndarray
    z: np.ndarray
    distortion_dbm: float
    P_s_dbm: float
    noise_dbm: float

    @property
    def P(self) -> int:
        return self.r.size


def make_frame(
    p,
    distortion_dbm: float,
    P_s: float,
    inr_db: float,
    seed: int,
) -> ReceiveFrame:
    """Scale the distortion and add a desired DL block and white noise.

    The DL block ``y`` is complex Gaussian at ``P_s`` dBm and the noise sits
    at ``distortion_dbm - inr_db``. Pass ``P_s = -inf`` to omit the DL signal
    and ``inr_db = +inf`` to omit the noise.
    """
    p = as_block(p, "distortion")
    if not np.any(p):
        raise DegenerateInputError("distortion block is all zero")
    p_true = set_power(p, distortion_dbm)
    P = p_true.size

    if P_s == -np.inf:
        y = np.zeros(P, dtype=np.complex128)
    else:
        y = set_power(generate_block(P, "gaussian", derive_seed(seed, 0)), P_s)

    noise_dbm = distortion_dbm - inr_db
    if noise_dbm == -np.inf:
        z = np.zeros(P, dtype=np.complex128)
    else:
        z = awgn_block(P, noise_dbm, derive_seed(seed, 1))

    return ReceiveFrame(
        r=p_true + y + z,
        p_true=p_true,
        y=y,
        z=z,
        distortion_dbm=float(distortion_dbm),
        P_s_dbm=float(P_s),
        noise_dbm=float(noise_dbm),
    )
