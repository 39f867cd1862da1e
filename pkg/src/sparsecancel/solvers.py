"""
Coefficient estimators: full least squares and orthogonal matching pursuit.

Both accept either a :class:`~sparsecancel.dictionary.Dictionary` (unit-norm
columns, coefficients returned de-normalized against the raw reference
signals) or a bare 2-D array whose columns are used as given.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from .dictionary import Dictionary
from .errors import (
    DegenerateColumnError,
    InvalidArgumentError,
    SingularDictionaryError,
    UnderdeterminedError,
)
from .signal import as_block

PIVOT_TOL = 1e-12
RESIDUAL_STOP = 1e-12
CORRELATION_FLOOR = 1e-14
LOADING = 1e-10


def _unpack(D) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(D, Dictionary):
        return D.columns, D.norms
    A = np.asarray(D, dtype=np.complex128)
    if A.ndim != 2:
        raise InvalidArgumentError(f"dictionary must be 2-D, got shape {A.shape}")
    return A, np.ones(A.shape[1])


def _observation(r, P: int) -> np.ndarray:
    r = as_block(r, "observation")
    if r.size != P:
        raise InvalidArgumentError(f"observation has {r.size} samples, dictionary has {P} rows")
    return r


@dataclass
class LlsSolution:
    v_hat: np.ndarray
    residual_norm: float
    condition_flag: bool = False


def lls_solve(D, r) -> LlsSolution:
    """Least-squares fit ``min ||r - D v||`` through the normal equations.

    The Gram matrix ``R = D^H D`` is Cholesky-factored; only if that fails
    is it loaded with ``1e-10 * trace(R) / J`` on the diagonal, in which case
    ``condition_flag`` is set.
    """
    A, norms = _unpack(D)
    P, J = A.shape
    r = _observation(r, P)
    if P < J:
        raise UnderdeterminedError(f"{P} observations cannot determine {J} coefficients")

    R = A.conj().T @ A
    q = A.conj().T @ r
    loaded = False
    try:
        C = np.linalg.cholesky(R)
    except np.linalg.LinAlgError:
        loaded = True
        R = R + (LOADING * np.trace(R).real / J) * np.eye(J)
        try:
            C = np.linalg.cholesky(R)
        except np.linalg.LinAlgError:
            raise SingularDictionaryError("Gram matrix is singular even after diagonal loading") from None
    w = solve_triangular(C, q, lower=True)
    v = solve_triangular(C.conj().T, w, lower=False)
    resid = r - A @ v
    return LlsSolution(v / norms, float(np.linalg.norm(resid)), loaded)


@dataclass(frozen=True)
class CholeskyState:
    """Lower-triangular ``factor`` with ``factor @ factor^H`` equal to the Gram of ``support``."""

    factor: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.complex128))
    support: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.support)


def cholesky_augment(
    state: CholeskyState,
    gram_column,
    index: Optional[int] = None,
    pivot_tol: float = PIVOT_TOL,
) -> CholeskyState:
    """Append one column to the factored Gram matrix by forward substitution.

    ``gram_column`` holds the inner products of the new column with each
    selected column followed by its own squared norm. Costs ``O(k^2)``.

    Raises
    ------
    DegenerateColumnError
        If the new pivot ``self - ||w||^2`` is at or below ``pivot_tol``
        times the column's squared norm.
    """
    g = np.asarray(gram_column, dtype=np.complex128)
    k = state.k
    if g.shape != (k + 1,):
        raise InvalidArgumentError(f"expected {k + 1} Gram entries, got {g.shape}")
    self_term = g[k].real
    if k:
        w = solve_triangular(state.factor, g[:k], lower=True)
    else:
        w = np.zeros(0, dtype=np.complex128)
    pivot_sq = self_term - np.vdot(w, w).real
    if not pivot_sq > pivot_tol * self_term:
        raise DegenerateColumnError(f"pivot {pivot_sq:.3e} below threshold")
    factor = np.zeros((k + 1, k + 1), dtype=np.complex128)
    factor[:k, :k] = state.factor
    factor[k, :k] = w.conj()
    factor[k, k] = np.sqrt(pivot_sq)
    idx = k if index is None else int(index)
    return CholeskyState(factor, state.support + (idx,))


@dataclass
class OmpSolution:
    support: list[int]
    v_hat: np.ndarray
    residual_norms: list[float]
    selection_scores: list[float]
    stop_reason: Optional[str] = None

    @property
    def degenerate(self) -> bool:
        """True when the run ended because every remaining atom was degenerate."""
        return self.stop_reason == "degenerate"


def _check_js(Js: int, P: int, J: int) -> int:
    Js = int(Js)
    if Js < 1:
        raise InvalidArgumentError(f"sparsity level must be positive, got {Js}")
    if Js > J:
        raise InvalidArgumentError(f"sparsity level {Js} exceeds the {J} available columns")
    if Js > P:
        raise InvalidArgumentError(f"sparsity level {Js} exceeds the block size {P}")
    return Js


def _correlations(A: np.ndarray, residual: np.ndarray) -> np.ndarray:
    # Same reduction order for every column, so bit-identical columns score
    # bit-identically and ties resolve by index (BLAS gemv does not guarantee it).
    return np.abs((A.conj() * residual[:, None]).sum(axis=0))


def _ranked_candidates(delta: np.ndarray, selected: list[int]) -> np.ndarray:
    # descending score, lowest column index first among ties
    order = np.argsort(-delta, kind="stable")
    if selected:
        order = order[~np.isin(order, selected)]
    return order


def omp_solve(D, r, Js: int) -> OmpSolution:
    """Orthogonal matching pursuit with an incrementally grown Cholesky factor.

    Each iteration picks the unselected column with the largest
    ``|r_{k-1}^H d_i|`` (lowest index on ties), appends it to the factored
    Gram matrix, and re-solves the least-squares fit on the support by two
    triangular solves. Candidates whose pivot falls below ``1e-12`` are
    skipped in favour of the next best. The loop stops after ``Js``
    selections, or earlier when the residual or every remaining correlation
    is negligible.
    """
    A, norms = _unpack(D)
    P, J = A.shape
    r = _observation(r, P)
    Js = _check_js(Js, P, J)

    r_norm = float(np.linalg.norm(r))
    state = CholeskyState()
    support: list[int] = []
    b = np.zeros(0, dtype=np.complex128)  # D_S^H r
    u = np.zeros(0, dtype=np.complex128)  # forward-substituted b
    coef = np.zeros(0, dtype=np.complex128)
    residual = r.copy()
    history = [r_norm]
    scores: list[float] = []
    stop = None

    while len(support) < Js:
        if history[-1] <= RESIDUAL_STOP * r_norm:
            stop = "residual"
            break
        delta = _correlations(A, residual)
        chosen = None
        for c in _ranked_candidates(delta, support):
            if delta[c] <= CORRELATION_FLOOR * r_norm:
                break
            col = A[:, c]
            gram = np.append(A[:, support].conj().T @ col, np.vdot(col, col))
            try:
                state = cholesky_augment(state, gram, index=int(c))
            except DegenerateColumnError:
                continue
            chosen = int(c)
            break
        if chosen is None:
            stop = "degenerate" if delta.max() > CORRELATION_FLOOR * r_norm else "correlation"
            break

        support.append(chosen)
        scores.append(float(delta[chosen]))
        Lk = state.factor
        b = np.append(b, np.vdot(A[:, chosen], r))
        u = np.append(u, (b[-1] - Lk[-1, :-1] @ u) / Lk[-1, -1])
        coef = solve_triangular(Lk.conj().T, u, lower=False)
        residual = r - A[:, support] @ coef
        history.append(float(np.linalg.norm(residual)))

    if stop == "degenerate":
        warnings.warn("OMP stopped early: all remaining atoms are degenerate", RuntimeWarning)

    v = np.zeros(J, dtype=np.complex128)
    if support:
        v[support] = coef / norms[support]
    return OmpSolution(support, v, history, scores, stop)


def omp_solve_reference(D, r, Js: int) -> OmpSolution:
    """Plain OMP that re-solves a dense least-squares problem every iteration.

    Kept as an independent check on :func:`omp_solve`; same contract.
    """
    A, norms = _unpack(D)
    P, J = A.shape
    r = _observation(r, P)
    Js = _check_js(Js, P, J)

    r_norm = float(np.linalg.norm(r))
    support: list[int] = []
    coef = np.zeros(0, dtype=np.complex128)
    residual = r.copy()
    history = [r_norm]
    scores: list[float] = []
    stop = None

    for _ in range(Js):
        if history[-1] <= RESIDUAL_STOP * r_norm:
            stop = "residual"
            break
        delta = _correlations(A, residual)
        chosen = None
        for c in _ranked_candidates(delta, support):
            if delta[c] <= CORRELATION_FLOOR * r_norm:
                break
            col = A[:, c]
            if support:
                S = A[:, support]
                proj = S @ np.linalg.lstsq(S, col, rcond=None)[0]
                leftover = np.vdot(col - proj, col - proj).real
            else:
                leftover = np.vdot(col, col).real
            if not leftover > PIVOT_TOL * np.vdot(col, col).real:
                continue
            chosen = int(c)
            break
        if chosen is None:
            stop = "degenerate" if delta.max() > CORRELATION_FLOOR * r_norm else "correlation"
            break
        support.append(chosen)
        scores.append(float(delta[chosen]))
        coef = np.linalg.lstsq(A[:, support], r, rcond=None)[0]
        residual = r - A[:, support] @ coef
        history.append(float(np.linalg.norm(residual)))

    if stop == "degenerate":
        warnings.warn("OMP stopped early: all remaining atoms are degenerate", RuntimeWarning)

    v = np.zeros(J, dtype=np.complex128)
    if support:
        v[support] = coef / norms[support]
    return OmpSolution(support, v, history, scores, stop)
