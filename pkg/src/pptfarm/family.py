"""Construction of the multipartite PPT state family.

The family lives on ``H_A^{(x)n} (x) H_B^{(x)n}`` and mixes

* ``rho0``, a sum of ``E_ij^{(x)n} (x) a`` over all ``i, j`` (the
  maximally-entangled-form component), with
* one operator ``rho_l`` per label ``l = 1 .. N*D``.  Each label is a pair
  ``i < j`` together with a nonzero transposition pattern ``alpha``; the
  operator carries the payload ``b`` on the four A-blocks spanned by the
  support vectors ``v`` and ``w`` (``w`` is ``v`` with ``i`` and ``j``
  exchanged).

Labels are ranked by the lexicographic order of ``v`` over all A-side
vectors with exactly two distinct values whose first component is the
smaller one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, DomainError, StructureError
from .tensor_core import (
    DEFAULT_TOL,
    FactorSpace,
    MultiIndex,
    SymMatrix,
    min_eigenvalue,
    partial_transpose,
    place_block,
    psd_threshold,
)

__all__ = [
    "MAX_ORDER",
    "TranspositionPattern",
    "OperatorLabel",
    "LabelMap",
    "FamilyParams",
    "BlockPair",
    "OrthogonalityReport",
    "count_patterns",
    "enumerate_patterns",
    "label_map",
    "canonical_blocks",
    "check_block_pair",
    "build_rho0",
    "build_rho_l",
    "build_labelled_sum",
    "build_mixture",
    "support_orthogonality_check",
    "block_layout",
]

MAX_ORDER = 1024


def _check_parties(n: int):
    if int(n) != n or n < 2:
        raise DomainError(f"party count n must be an integer >= 2, got {n}")


def _check_local_dim(d: int, name: str):
    if int(d) != d or d < 2:
        raise DomainError(f"{name} must be an integer >= 2, got {d}")


def count_patterns(n: int) -> int:
    """Number of nonzero transposition patterns, ``2**(n-1) - 1``."""
    _check_parties(n)
    return 2 ** (n - 1) - 1


@dataclass(frozen=True)
class TranspositionPattern:
    """Binary pattern ``alpha`` of length ``n - 1``.

    ``alpha[k-2] == 1`` transposes party ``k``; party 1 is never transposed.
    """

    alpha: tuple[int, ...]

    def __post_init__(self):
        alpha = tuple(int(a) for a in self.alpha)
        if not alpha or any(a not in (0, 1) for a in alpha):
            raise DomainError(f"alpha must be a nonempty binary vector, got {self.alpha}")
        if not any(alpha):
            raise DomainError("alpha must not be the zero vector")
        object.__setattr__(self, "alpha", alpha)

    @property
    def n(self) -> int:
        return len(self.alpha) + 1

    @property
    def parties(self) -> tuple[int, ...]:
        """1-based parties whose factors are transposed."""
        return tuple(k + 2 for k, a in enumerate(self.alpha) if a)


def enumerate_patterns(n: int) -> list[TranspositionPattern]:
    """All nonzero patterns, in the order induced by :func:`label_map`."""
    _check_parties(n)
    return [TranspositionPattern(a) for a in itertools.product((0, 1), repeat=n - 1) if any(a)]


@dataclass(frozen=True)
class OperatorLabel:
    l: int
    alpha: TranspositionPattern
    i: int
    j: int
    v: MultiIndex
    w: MultiIndex


class LabelMap:
    """The bijection ``l <-> (alpha, i, j)`` for given ``n`` and ``d_A``."""

    def __init__(self, n: int, d_A: int):
        _check_parties(n)
        _check_local_dim(d_A, "d_A")
        self.n = n
        self.d_A = d_A
        self.space_A = FactorSpace((d_A,) * n, tuple(f"A{k}" for k in range(1, n + 1)))
        labels = []
        for v in itertools.product(range(1, d_A + 1), repeat=n):
            values = set(v)
            if len(values) != 2 or v[0] != min(values):
                continue
            i, j = v[0], max(values)
            alpha = TranspositionPattern(tuple(int(c == j) for c in v[1:]))
            w = tuple(j if c == i else i for c in v)
            labels.append(OperatorLabel(
                len(labels) + 1, alpha, i, j,
                MultiIndex(v, self.space_A), MultiIndex(w, self.space_A),
            ))
        self._labels = labels
        self._rank = {(lab.alpha.alpha, lab.i, lab.j): lab.l for lab in labels}

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self) -> Iterator[OperatorLabel]:
        return iter(self._labels)

    def label(self, l: int) -> OperatorLabel:
        if not 1 <= l <= len(self._labels):
            raise DomainError(f"label {l} out of range 1..{len(self._labels)}")
        return self._labels[l - 1]

    def rank(self, alpha, i: int, j: int) -> int:
        """Label ``l`` of ``(alpha, i, j)``; ``alpha`` may be a pattern or a tuple."""
        key = tuple(alpha.alpha if isinstance(alpha, TranspositionPattern) else alpha)
        try:
            return self._rank[(key, int(i), int(j))]
        except KeyError:
            raise DomainError(f"no label for alpha={key}, i={i}, j={j}") from None


def label_map(n: int, d_A: int) -> LabelMap:
    return LabelMap(n, d_A)


@dataclass(frozen=True)
class FamilyParams:
    """Knobs of the two-parameter mixture ``p*rho0 + (q/ND) * sum_l rho_l``."""

    n: int
    d_A: int
    d_B: int
    q: float = 0.0

    def __post_init__(self):
        _check_parties(self.n)
        _check_local_dim(self.d_A, "d_A")
        _check_local_dim(self.d_B, "d_B")
        q = float(self.q)
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"q must lie in [0, 1], got {self.q}")
        object.__setattr__(self, "q", q)

    @property
    def p(self) -> float:
        return 1.0 - self.q

    @property
    def N(self) -> int:
        return 2 ** (self.n - 1) - 1

    @property
    def D(self) -> int:
        return self.d_A * (self.d_A - 1) // 2

    @property
    def x(self) -> float:
        return self.q / (self.N * self.D)

    @property
    def order(self) -> int:
        return (self.d_A * self.d_B) ** self.n

    @property
    def block_order(self) -> int:
        return self.d_B ** self.n

    @property
    def space(self) -> FactorSpace:
        return FactorSpace.family(self.n, self.d_A, self.d_B)

    def with_q(self, q: float) -> "FamilyParams":
        return FamilyParams(self.n, self.d_A, self.d_B, q)

    def check_capacity(self, max_order: int = MAX_ORDER):
        if self.order > max_order:
            raise CapacityError(
                f"matrix order (d_A*d_B)^n = {self.order} exceeds the dense limit {max_order}"
            )


@dataclass(frozen=True)
class BlockPair:
    """B-side payloads: ``a`` on the diagonal family, ``b`` on mixed positions."""

    a: SymMatrix
    b: SymMatrix
    canonical: bool = False


def canonical_blocks(params: FamilyParams) -> BlockPair:
    """``a = I / (d_A d_B^n)`` and ``b = J / (2 d_B^n)`` with ``J`` all ones."""
    m = params.block_order
    space_B = params.space.b_space
    a = SymMatrix(np.eye(m) / (params.d_A * m), space_B)
    b = SymMatrix(np.ones((m, m)) / (2 * m), space_B)
    return BlockPair(a, b, canonical=True)


def check_block_pair(blocks: BlockPair, params: FamilyParams, tol: float = DEFAULT_TOL) -> None:
    """Raise :class:`StructureError` unless both payloads are usable.

    Each payload must have order ``d_B^n``, be PSD, and be invariant under
    partial transposition over every subset of the B-factors.
    """
    m = params.block_order
    space_B = params.space.b_space
    for name, M in (("a", blocks.a), ("b", blocks.b)):
        if M.order != m:
            raise StructureError(f"payload {name} has order {M.order}, expected {m}")
        M = SymMatrix(M.array, space_B)
        if min_eigenvalue(M) < psd_threshold(M, tol):
            raise StructureError(f"payload {name} is not positive semidefinite")
        scale = max(M.maxabs(), 1.0)
        for r in range(1, params.n + 1):
            for subset in itertools.combinations(range(params.n), r):
                diff = np.max(np.abs(partial_transpose(M, subset).array - M.array))
                if diff > 1e-12 * scale:
                    raise StructureError(
                        f"payload {name} is not invariant under partial transposition "
                        f"of B-factors {[k + 1 for k in subset]}"
                    )


def _resolve_blocks(params: FamilyParams, blocks: Optional[BlockPair]) -> BlockPair:
    if blocks is None:
        return canonical_blocks(params)
    if not blocks.canonical:
        check_block_pair(blocks, params)
    return blocks


def build_rho0(params: FamilyParams, a: SymMatrix) -> SymMatrix:
    """Place ``a`` at every A-block ``((i,..,i), (j,..,j))``."""
    params.check_capacity()
    space = params.space
    if a.order != params.block_order:
        raise StructureError(f"payload a has order {a.order}, expected {params.block_order}")
    out = np.zeros((params.order, params.order))
    diag = [MultiIndex((i,) * params.n, space.a_space) for i in range(1, params.d_A + 1)]
    for r in diag:
        for c in diag:
            place_block(out, space, r, c, a)
    return SymMatrix(out, space)


def build_rho_l(params: FamilyParams, label: OperatorLabel, b: SymMatrix) -> SymMatrix:
    """Place ``b`` at the A-blocks ``(v,v), (v,w), (w,v), (w,w)`` of ``label``."""
    params.check_capacity()
    space = params.space
    if label.v.space.dims != space.a_space.dims:
        raise StructureError("label was built for a different (n, d_A)")
    if b.order != params.block_order:
        raise StructureError(f"payload b has order {b.order}, expected {params.block_order}")
    out = np.zeros((params.order, params.order))
    for r in (label.v, label.w):
        for c in (label.v, label.w):
            place_block(out, space, r, c, b)
    return SymMatrix(out, space)


def build_labelled_sum(params: FamilyParams, b: SymMatrix) -> SymMatrix:
    """``sum_l rho_l`` over all labels, accumulated in label order."""
    params.check_capacity()
    total = np.zeros((params.order, params.order))
    for lab in label_map(params.n, params.d_A):
        total += build_rho_l(params, lab, b).array
    return SymMatrix(total, params.space)


def build_mixture(params: FamilyParams, blocks: Optional[BlockPair] = None) -> SymMatrix:
    """Dense ``rho = p*rho0 + (q/(N*D)) * sum_l rho_l``.

    Parameters
    ----------
    params : FamilyParams
        ``n``, ``d_A``, ``d_B`` and the mixing weight ``q``.
    blocks : BlockPair, optional
        Payloads; canonical ones by default. User payloads are checked with
        :func:`check_block_pair` first.

    Returns
    -------
    SymMatrix
        Unit-trace matrix of order ``(d_A*d_B)**n`` (for normalized payloads).
    """
    params.check_capacity()
    blocks = _resolve_blocks(params, blocks)
    rho0 = build_rho0(params, blocks.a)
    rest = build_labelled_sum(params, blocks.b)
    return SymMatrix(params.p * rho0.array + params.x * rest.array, params.space)


@dataclass(frozen=True)
class OrthogonalityReport:
    passed: bool
    max_residual: float
    threshold: float
    n_products: int

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_residual": self.max_residual,
            "threshold": self.threshold,
            "n_products": self.n_products,
        }


def _max_abs_product(A: sp.csr_matrix, B: sp.csr_matrix) -> float:
    P = A @ B
    return float(abs(P).max()) if P.nnz else 0.0


def support_orthogonality_check(params: FamilyParams, blocks: Optional[BlockPair] = None,
                                components: Optional[list] = None) -> OrthogonalityReport:
    """Verify that ``rho0`` and all ``rho_l`` multiply pairwise to zero.

    ``components`` overrides the list ``[rho0, rho_1, ..., rho_ND]`` and is
    meant for diagnostics with deliberately overlapping operators.
    """
    if components is None:
        params.check_capacity()
        blocks = _resolve_blocks(params, blocks)
        components = [build_rho0(params, blocks.a)]
        components += [build_rho_l(params, lab, blocks.b) for lab in label_map(params.n, params.d_A)]
    mats = [sp.csr_matrix(c.array if isinstance(c, SymMatrix) else c) for c in components]
    order = mats[0].shape[0]
    maxabs = max((float(abs(m).max()) if m.nnz else 0.0) for m in mats)
    threshold = 1e-12 * order * maxabs
    worst = 0.0
    count = 0
    for s, t in itertools.combinations(range(len(mats)), 2):
        worst = max(worst, _max_abs_product(mats[s], mats[t]))
        count += 1
    return OrthogonalityReport(bool(worst <= threshold), worst, threshold, count)


def block_layout(n: int, d_A: int) -> np.ndarray:
    """A-block occupancy grid of the family (1-based positions map to 0-based cells).

    Cell values: ``-1`` empty, ``0`` a ``rho0`` block (payload ``a``), ``l > 0``
    a block of ``rho_l`` (payload ``b``).
    """
    lm = label_map(n, d_A)
    size = d_A ** n
    grid = np.full((size, size), -1, dtype=int)
    diag = [MultiIndex((i,) * n, lm.space_A).flat for i in range(1, d_A + 1)]
    for r in diag:
        for c in diag:
            grid[r - 1, c - 1] = 0
    for lab in lm:
        for r in (lab.v.flat, lab.w.flat):
            for c in (lab.v.flat, lab.w.flat):
                grid[r - 1, c - 1] = lab.l
    return grid
