"""Distortion reconstruction and cancellation figures of merit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary
from .distortion import ReceiveFrame
from .errors import InvalidArgumentError
from .signal import measure_power


def reconstruct(D, v_hat) -> np.ndarray:
    """Estimated distortion ``sum_j v_hat[j] * raw_column_j``.

    ``v_hat`` is in de-normalized units, as returned by the solvers.
    """
    v = np.asarray(v_hat, dtype=np.complex128)
    if isinstance(D, Dictionary):
        if v.shape != (D.J,):
            raise InvalidArgumentError(f"expected {D.J} coefficients, got {v.shape}")
        return D.columns @ (v * D.norms)
    A = np.asarray(D, dtype=np.complex128)
    if v.shape != (A.shape[1],):
        raise InvalidArgumentError(f"expected {A.shape[1]} coefficients, got {v.shape}")
    return A @ v


def residual_distortion_power(frame: ReceiveFrame, p_hat) -> float:
    """Power of ``p_true - p_hat`` in dBm; ``-inf`` for perfect cancellation.

    Uses the simulator's ground truth, so the DL signal and noise never enter
    the metric directly.
    """
    p_hat = np.asarray(p_hat, dtype=np.complex128)
    if p_hat.shape != frame.p_true.shape:
        raise InvalidArgumentError("estimate and frame lengths differ")
    return measure_power(frame.p_true - p_hat)


@dataclass(frozen=True)
class CancellationReport:
    original_distortion_dbm: float
    residual_distortion_dbm: float
    suppression_db: float
    inr_db: float
    isr_db: float
    solver_id: str
    J_used: int


def make_report(frame: ReceiveFrame, p_hat, solver_id: str, J: int) -> CancellationReport:
    original = measure_power(frame.p_true)
    residual = residual_distortion_power(frame, p_hat)
    return CancellationReport(
        original_distortion_dbm=original,
        residual_distortion_dbm=residual,
        suppression_db=original - residual,
        inr_db=frame.distortion_dbm - frame.noise_dbm,
        isr_db=frame.distortion_dbm - frame.P_s_dbm,
        solver_id=solver_id,
        J_used=int(J),
    )
