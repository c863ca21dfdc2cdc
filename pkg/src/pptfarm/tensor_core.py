"""Tensor-factor bookkeeping and dense symmetric-matrix primitives.

Conventions used throughout the package:

* multi-indices are 1-based and flattened row-major (leftmost factor most
  significant), matching the block layout of the state family;
* factor *positions* (arguments of :func:`partial_transpose`) are 0-based
  Python positions into ``FactorSpace.dims``;
* for the state family the factor order is ``A1 .. An, B1 .. Bn``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Union

import numpy as np

from .errors import InvalidIndexError, NumericError, StructureError

__all__ = [
    "FactorSpace",
    "MultiIndex",
    "SymMatrix",
    "DensityReport",
    "flat_index",
    "multi_index",
    "elementary_block",
    "place_block",
    "partial_transpose",
    "eigenvalues",
    "min_eigenvalue",
    "trace_norm",
    "trace_distance",
    "validate_density",
    "psd_threshold",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FactorSpace:
    """Ordered tensor factors with optional role tags such as ``"A1"``."""

    dims: tuple[int, ...]
    roles: tuple[str, ...] = ()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise StructureError(f"factor dimensions must be positive, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        roles = tuple(self.roles)
        if roles and len(roles) != len(dims):
            raise StructureError("one role tag per factor is required")
        object.__setattr__(self, "roles", roles)

    @classmethod
    def family(cls, n: int, d_A: int, d_B: int) -> "FactorSpace":
        """Space ``H_A^{(x)n} (x) H_B^{(x)n}`` ordered ``A1..An, B1..Bn``."""
        if n < 1:
            raise StructureError(f"party count must be positive, got {n}")
        roles = tuple(f"A{k}" for k in range(1, n + 1)) + tuple(f"B{k}" for k in range(1, n + 1))
        return cls((d_A,) * n + (d_B,) * n, roles)

    @property
    def order(self) -> int:
        return prod(self.dims)

    @property
    def nfactors(self) -> int:
        return len(self.dims)

    @property
    def n_parties(self) -> int:
        if not self.roles:
            raise StructureError("space carries no role tags")
        return len(self.roles) // 2

    def positions(self, side: str) -> tuple[int, ...]:
        """Positions of all factors whose role starts with ``side`` ("A" or "B")."""
        return tuple(k for k, r in enumerate(self.roles) if r.startswith(side))

    def party_factors(self, party: int) -> tuple[int, ...]:
        """Positions of the A- and B-factor owned by ``party`` (1-based)."""
        out = tuple(k for k, r in enumerate(self.roles) if r[1:] == str(party))
        if len(out) != 2:
            raise StructureError(f"party {party} does not own one A- and one B-factor")
        return out

    def subspace(self, positions: Iterable[int]) -> "FactorSpace":
        positions = tuple(positions)
        roles = tuple(self.roles[k] for k in positions) if self.roles else ()
        return FactorSpace(tuple(self.dims[k] for k in positions), roles)

    @property
    def a_space(self) -> "FactorSpace":
        return self.subspace(self.positions("A"))

    @property
    def b_space(self) -> "FactorSpace":
        return self.subspace(self.positions("B"))


@dataclass(frozen=True)
class MultiIndex:
    """1-based factor-local indices into a :class:`FactorSpace`."""

    components: tuple[int, ...]
    space: FactorSpace

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if len(comps) != self.space.nfactors:
            raise InvalidIndexError(
                f"{len(comps)} components given for {self.space.nfactors} factors"
            )
        for c, d in zip(comps, self.space.dims):
            if not 1 <= c <= d:
                raise InvalidIndexError(f"component {c} out of range 1..{d}")
        object.__setattr__(self, "components", comps)

    @property
    def flat(self) -> int:
        return flat_index(self)


def flat_index(idx: MultiIndex) -> int:
    """Row-major 1-based flat index of ``idx``.

    >>> flat_index(MultiIndex((2, 2, 2), FactorSpace((3, 3, 3))))
    14
    """
    flat = 0
    for c, d in zip(idx.components, idx.space.dims):
        flat = flat * d + (c - 1)
    return flat + 1


def multi_index(flat: int, space: FactorSpace) -> MultiIndex:
    """Inverse of :func:`flat_index`."""
    if not 1 <= flat <= space.order:
        raise InvalidIndexError(f"flat index {flat} out of range 1..{space.order}")
    comps = np.unravel_index(flat - 1, space.dims)
    return MultiIndex(tuple(int(c) + 1 for c in comps), space)


ArrayLike = Union["SymMatrix", np.ndarray]


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Dense real symmetric matrix tagged with its factor space.

    The stored array is a read-only copy; exact symmetry is required.
    """

    array: np.ndarray
    space: FactorSpace = field(default=None)

    def __post_init__(self):
        arr = np.array(self.array, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise StructureError(f"expected a square matrix, got shape {arr.shape}")
        space = self.space if self.space is not None else FactorSpace((arr.shape[0],))
        if space.order != arr.shape[0]:
            raise StructureError(
                f"matrix order {arr.shape[0]} does not match space order {space.order}"
            )
        if not np.array_equal(arr, arr.T, equal_nan=True):
            raise StructureError("matrix is not exactly symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)
        object.__setattr__(self, "space", space)

    @property
    def order(self) -> int:
        return self.array.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.array))

    def maxabs(self) -> float:
        return float(np.max(np.abs(self.array))) if self.array.size else 0.0

    def _check_same(self, other: "SymMatrix"):
        if self.space.dims != other.space.dims:
            raise StructureError(
                f"factor spaces differ: {self.space.dims} vs {other.space.dims}"
            )

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        self._check_same(other)
        return SymMatrix(self.array + other.array, self.space)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        self._check_same(other)
        return SymMatrix(self.array - other.array, self.space)

    def __mul__(self, scalar: float) -> "SymMatrix":
        return SymMatrix(float(scalar) * self.array, self.space)

    __rmul__ = __mul__

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(-self.array, self.space)

    def __repr__(self):
        return f"SymMatrix(order={self.order}, dims={self.space.dims})"


def _as_array(M: ArrayLike) -> np.ndarray:
    return M.array if isinstance(M, SymMatrix) else np.asarray(M, dtype=np.float64)


def elementary_block(space_A: FactorSpace, row: MultiIndex, col: MultiIndex) -> tuple[int, int]:
    """1-based A-block coordinates of the operator ``|row><col|`` on ``space_A``.

    Together with :func:`place_block` this realizes products of elementary
    matrices ``e_{v1 w1} (x) ... (x) e_{vn wn}`` carrying a B-side payload.
    """
    for idx in (row, col):
        if idx.space.dims != space_A.dims:
            raise StructureError(
                f"multi-index over {idx.space.dims} used with A-space {space_A.dims}"
            )
    return row.flat, col.flat


def place_block(target: np.ndarray, space: FactorSpace, row: MultiIndex,
                col: MultiIndex, payload: ArrayLike, scale: float = 1.0) -> None:
    """Add ``scale * payload`` into the ``(row, col)`` A-block of ``target`` in place.

    Entry ``((row, beta), (col, gamma))`` receives ``payload[beta, gamma]`` for
    all B-side multi-indices, with A-factors preceding B-factors.
    """
    space_A = space.a_space
    r, c = elementary_block(space_A, row, col)
    P = _as_array(payload)
    nb = space.b_space.order
    if P.shape != (nb, nb):
        raise StructureError(f"payload of shape {P.shape} does not fit B-block order {nb}")
    if target.shape != (space.order, space.order):
        raise StructureError("target array does not match the space order")
    r0, c0 = (r - 1) * nb, (c - 1) * nb
    target[r0:r0 + nb, c0:c0 + nb] += scale * P


def partial_transpose(M: SymMatrix, factors: Iterable[int]) -> SymMatrix:
    """Transpose ``M`` on the tensor factors at the given 0-based positions.

    Parameters
    ----------
    M : SymMatrix
        Matrix over ``M.space``.
    factors : iterable of int
        Factor positions to transpose; the empty set returns ``M`` unchanged.

    Returns
    -------
    SymMatrix
        The partially transposed matrix over the same space. Real symmetric
        input gives real symmetric output, since the operation only permutes
        entries.
    """
    dims = M.space.dims
    nf = len(dims)
    factors = sorted(set(int(k) for k in factors))
    for k in factors:
        if not 0 <= k < nf:
            raise StructureError(f"factor position {k} out of range 0..{nf - 1}")
    if not factors:
        return M
    axes = list(range(2 * nf))
    for k in factors:
        axes[k], axes[nf + k] = axes[nf + k], axes[k]
    T = M.array.reshape(dims + dims).transpose(axes).reshape(M.order, M.order)
    return SymMatrix(T, M.space)


def eigenvalues(M: ArrayLike) -> np.ndarray:
    """Ascending eigenvalues from a dense self-adjoint (LAPACK) solve."""
    A = _as_array(M)
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    try:
        return np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolve did not converge: {exc}") from exc


def min_eigenvalue(M: ArrayLike) -> float:
    return float(eigenvalues(M)[0])


def trace_norm(M: ArrayLike) -> float:
    """Sum of absolute eigenvalues of a symmetric matrix."""
    return float(np.sum(np.abs(eigenvalues(M))))


def trace_distance(rho: SymMatrix, sigma: SymMatrix) -> float:
    """Half the trace norm of ``rho - sigma``."""
    if rho.order != sigma.order:
        raise StructureError(f"orders differ: {rho.order} vs {sigma.order}")
    return 0.5 * trace_norm(rho - sigma)


def psd_threshold(M: ArrayLike, tol: float = DEFAULT_TOL) -> float:
    """Most negative eigenvalue still counted as PSD: ``-tol * order * maxabs``."""
    A = _as_array(M)
    maxabs = float(np.max(np.abs(A))) if A.size else 0.0
    return -tol * A.shape[0] * maxabs


@dataclass(frozen=True)
class DensityReport:
    trace_deviation: float
    min_eigenvalue: float
    psd_threshold: float
    tol: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "trace_deviation": self.trace_deviation,
            "min_eigenvalue": self.min_eigenvalue,
            "psd_threshold": self.psd_threshold,
            "tol": self.tol,
            "passed": self.passed,
        }


def validate_density(M: ArrayLike, tol: float = DEFAULT_TOL) -> DensityReport:
    """Check unit trace and positive semidefiniteness of ``M``.

    Passes iff ``|tr M - 1| <= tol`` and the smallest eigenvalue is at least
    ``-tol * order * maxabs``. Never raises on a failed check; non-finite
    entries still raise :class:`NumericError`.
    """
    A = _as_array(M)
    dev = abs(float(np.trace(A)) - 1.0)
    lam = min_eigenvalue(A)
    thr = psd_threshold(A, tol)
    return DensityReport(dev, lam, thr, tol, bool(dev <= tol and lam >= thr))

