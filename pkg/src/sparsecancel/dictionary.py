"""
Reference-signal dictionaries.

Expanding ``(sum_k h(k) s(n-k))**Q`` with the multinomial theorem turns the
nonlinear channel-estimation problem into a linear one over products of
delayed source samples. Each product is one *term*; its samples form one
dictionary column. Three term sets are supported:

``exact``
    every term of the expansion (one multiset of lags per source).
``prior``
    one term per lag pair ``(k1, k2)``: each source delayed once and raised
    to its full power, i.e. the nonlinearity applied before the filter on a
    per-source basis (IMD only).
``hammerstein``
    one term per shared lag ``k``: the memoryless distortion of the raw
    sources, delayed by ``k``.

Multinomial coefficients are not applied to columns; they are absorbed into
the estimated coefficients. Columns are stored with unit 2-norm and the
original norms are kept for de-normalization.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .distortion import HD, DistortionSpec
from .errors import DegenerateInputError, InvalidArgumentError
from .signal import as_block, delay

_INDEX_MAX = np.iinfo(np.int64).max


class Model(str, enum.Enum):
    EXACT = "exact"
    PRIOR = "prior"
    HAMMERSTEIN = "hammerstein"


@dataclass(frozen=True, order=True)
class Factor:
    """One delayed, possibly conjugated, source power ``u(n - lag)**exponent``."""

    lag: int
    exponent: int
    conjugated: bool = False


@dataclass(frozen=True, order=True)
class TermDescriptor:
    """Product of factors; ``sources[i]`` lists the factors drawn from source ``i``."""

    sources: tuple[tuple[Factor, ...], ...]

    def __str__(self) -> str:
        parts = []
        for i, factors in enumerate(self.sources):
            name = "s" if len(self.sources) == 1 else f"s{i + 1}"
            for f in factors:
                arg = "n" if f.lag == 0 else f"n-{f.lag}"
                base = f"{name}({arg})"
                if f.conjugated:
                    base = f"conj({base})"
                parts.append(base if f.exponent == 1 else f"{base}^{f.exponent}")
        return " ".join(parts)


def _checked(count: int) -> int:
    if count > _INDEX_MAX:
        raise OverflowError(f"term count {count} exceeds the addressable range")
    return count


def hd_term_count(Q: int, L: int) -> int:
    """Number of distinct terms in ``(sum of L delayed samples)**Q``: C(Q+L-1, L-1)."""
    if Q < 1 or L < 1:
        raise InvalidArgumentError(f"Q and L must be positive, got Q={Q}, L={L}")
    return _checked(math.comb(Q + L - 1, L - 1))


def imd_term_count(p: int, q: int, L1: int, L2: int) -> int:
    if p == 0 or q == 0:
        raise InvalidArgumentError("IMD exponents must be nonzero")
    return _checked(hd_term_count(abs(p), L1) * hd_term_count(abs(q), L2))


def _multisets(exponent: int, L: int, conjugated: bool) -> list[tuple[Factor, ...]]:
    # combinations_with_replacement yields sorted lag multisets in
    # lexicographic order: s(n)^3, s(n)^2 s(n-1), s(n) s(n-1)^2, s(n-1)^3, ...
    out = []
    for lags in itertools.combinations_with_replacement(range(L), exponent):
        counts = Counter(lags)
        out.append(tuple(Factor(lag, counts[lag], conjugated) for lag in sorted(counts)))
    return out


def _lengths_tuple(spec: DistortionSpec, lengths) -> tuple[int, ...]:
    n_src = 1 if spec.kind == HD else 2
    if isinstance(lengths, (int, np.integer)):
        lengths = (int(lengths),) * n_src
    lengths = tuple(int(L) for L in lengths)
    if len(lengths) != n_src:
        raise InvalidArgumentError(f"expected {n_src} model length(s), got {lengths}")
    if any(L < 1 for L in lengths):
        raise InvalidArgumentError(f"model lengths must be positive, got {lengths}")
    return lengths


def enumerate_terms(spec: DistortionSpec, lengths) -> list[TermDescriptor]:
    """All terms of the exact multinomial expansion, in canonical order.

    Ordering is lexicographic over the sorted lag multiset of each source,
    source 1 varying slowest.
    """
    lengths = _lengths_tuple(spec, lengths)
    per_source = [
        _multisets(abs(e), L, e < 0) for e, L in zip(spec.exponents, lengths)
    ]
    return [TermDescriptor(tuple(combo)) for combo in itertools.product(*per_source)]


def prior_terms(spec: DistortionSpec, lengths) -> list[TermDescriptor]:
    """One term per lag pair, each source raised to its full power at a single lag."""
    if spec.kind == HD:
        raise InvalidArgumentError("the prior-art model is defined for IMD only")
    lengths = _lengths_tuple(spec, lengths)
    return [
        TermDescriptor(
            tuple((Factor(k, abs(e), e < 0),) for k, e in zip(lags, spec.exponents))
        )
        for lags in itertools.product(*(range(L) for L in lengths))
    ]


def hammerstein_terms(spec: DistortionSpec, n_taps: int) -> list[TermDescriptor]:
    """Memoryless distortion of the raw sources, delayed by ``0 .. n_taps-1``."""
    if int(n_taps) < 1:
        raise InvalidArgumentError(f"Hammerstein length must be positive, got {n_taps}")
    return [
        TermDescriptor(tuple((Factor(k, abs(e), e < 0),) for e in spec.exponents))
        for k in range(int(n_taps))
    ]


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Unit-norm reference columns with their term descriptors.

    ``columns[:, j] * norms[j]`` is the raw reference signal of ``terms[j]``.
    """

    columns: np.ndarray
    terms: tuple[TermDescriptor, ...]
    norms: np.ndarray
    model: Model

    @property
    def P(self) -> int:
        return self.columns.shape[0]

    @property
    def J(self) -> int:
        return self.columns.shape[1]

    def raw_columns(self) -> np.ndarray:
        return self.columns * self.norms


def term_column(term: TermDescriptor, sources: Sequence[np.ndarray], _cache=None) -> np.ndarray:
    """Raw (un-normalized) samples of one term, zeros before the block start."""
    P = sources[0].size
    col = np.ones(P, dtype=np.complex128)
    for i, factors in enumerate(term.sources):
        for f in factors:
            key = (i, f.lag, f.exponent, f.conjugated)
            if _cache is not None and key in _cache:
                val = _cache[key]
            else:
                base = np.conj(sources[i]) if f.conjugated else sources[i]
                val = delay(base, f.lag) ** f.exponent
                if _cache is not None:
                    _cache[key] = val
            col = col * val
    return col


def build_dictionary(
    model: Union[Model, str],
    spec: DistortionSpec,
    s1,
    s2=None,
    lengths: Union[int, Sequence[int], None] = None,
) -> Dictionary:
    """Materialize the ``P x J`` reference matrix for ``model``.

    Parameters
    ----------
    model : Model or str
        ``"exact"``, ``"prior"`` or ``"hammerstein"``.
    spec : DistortionSpec
        Distortion whose terms are modelled.
    s1, s2 : array_like
        Known UL baseband signals; ``s2`` only for IMD.
    lengths : int or sequence of int
        Model channel length(s) for ``exact``/``prior`` (``L`` or
        ``(L1, L2)``); the number of shared lags ``J`` for ``hammerstein``.

    Raises
    ------
    DegenerateInputError
        If any column has zero energy.
    """
    model = Model(model)
    sources = [as_block(s1, "s1")]
    if spec.kind != HD:
        if s2 is None:
            raise InvalidArgumentError("IMD dictionaries need both UL signals")
        sources.append(as_block(s2, "s2"))
        if sources[1].size != sources[0].size:
            raise InvalidArgumentError("UL signals must have equal length")
    if lengths is None:
        raise InvalidArgumentError("model lengths are required")

    if model is Model.EXACT:
        terms = enumerate_terms(spec, lengths)
    elif model is Model.PRIOR:
        terms = prior_terms(spec, lengths)
    else:
        terms = hammerstein_terms(spec, lengths)

    cache: dict = {}
    raw = np.column_stack([term_column(t, sources, cache) for t in terms])
    norms = np.linalg.norm(raw, axis=0)
    if np.any(norms == 0.0):
        bad = [str(terms[j]) for j in np.flatnonzero(norms == 0.0)]
        raise DegenerateInputError(f"zero-energy dictionary column(s): {bad}")
    return Dictionary(raw / norms, tuple(terms), norms, model)


def exact_count(spec: DistortionSpec, lengths) -> int:
    lengths = _lengths_tuple(spec, lengths)
    if spec.kind == HD:
        return hd_term_count(spec.Q, lengths[0])
    return imd_term_count(spec.p, spec.q, *lengths)


def prior_count(spec: DistortionSpec, lengths) -> int:
    if spec.kind == HD:
        raise InvalidArgumentError("the prior-art model is defined for IMD only")
    L1, L2 = _lengths_tuple(spec, lengths)
    return L1 * L2


def model_count(model: Union[Model, str], spec: DistortionSpec, lengths: Optional[object]) -> int:
    """Closed-form column count of ``model``."""
    model = Model(model)
    if model is Model.EXACT:
        return exact_count(spec, lengths)
    if model is Model.PRIOR:
        return prior_count(spec, lengths)
    return int(lengths)
