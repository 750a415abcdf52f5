"""Exact sparse PCA by exhaustive support enumeration.

Ground truth for small instances: for PSD A the best unit vector on a fixed
support is the top eigenpair of the corresponding principal submatrix, so
enumerating all size-k supports solves the problem exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationBudgetExceeded, InvalidSupport
from .matrix import SymmetricMatrix, _fix_signs, ensure_psd
from .svd_threshold import SparseUnitVector

DEFAULT_ENUMERATION_BUDGET = 2_000_000


@dataclass(frozen=True)
class OracleResult:
    optimal_value: float
    optimal_vector: SparseUnitVector
    support: tuple
    instances_enumerated: int


def restricted_top_eigenpair(A: SymmetricMatrix, support):
    """Top eigenvalue and eigenvector of the principal submatrix A[S, S]."""
    idx = np.asarray(sorted(support), dtype=np.int64)
    if idx.size == 0:
        raise InvalidSupport("support must be nonempty")
    if np.unique(idx).size != idx.size:
        raise InvalidSupport("support indices must be distinct")
    if idx[0] < 0 or idx[-1] >= A.n:
        raise InvalidSupport(f"support indices outside [0, {A.n})")
    sub = A.entries[np.ix_(idx, idx)]
    w, v = np.linalg.eigh(sub)
    vec = _fix_signs(v[:, -1:])[:, 0]
    return float(w[-1]), vec


def exact_spca(
    A: SymmetricMatrix, k: int, max_enumeration: int = DEFAULT_ENUMERATION_BUDGET
) -> OracleResult:
    """Exhaustive optimum of max x.T A x over unit x with at most k nonzeros.

    Enumerates supports in lexicographic order and keeps the first best, so
    ties resolve to the lexicographically smallest support. Raises
    :class:`EnumerationBudgetExceeded` when C(n, k) exceeds the budget.
    """
    ensure_psd(A)
    if not 1 <= k <= A.n:
        raise ValueError(f"k={k} outside [1, {A.n}]")
    required = math.comb(A.n, k)
    if required > max_enumeration:
        raise EnumerationBudgetExceeded(required, max_enumeration)

    entries = A.entries
    best_value = -math.inf
    best_support = None
    count = 0
    for support in itertools.combinations(range(A.n), k):
        count += 1
        sub = entries[np.ix_(support, support)]
        value = float(np.linalg.eigvalsh(sub)[-1])
        if value > best_value:
            best_value = value
            best_support = support

    top_value, top_vec = restricted_top_eigenpair(A, best_support)
    vector = SparseUnitVector(A.n, np.asarray(best_support, dtype=np.int64), top_vec)
    return OracleResult(
        optimal_value=top_value,
        optimal_vector=vector,
        support=tuple(best_support),
        instances_enumerated=count,
    )
