"""Closed-form quantities of the family and the numerical PPT audit.

Formula evaluators are pure functions.  :func:`ppt_audit` measures the
spectra of ``rho(q)`` and of its partial transposes with the dense
eigensolver and puts them next to the analytic positivity margins, without
assuming either side is right.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, UnsupportedDecompositionError
from .family import (
    BlockPair,
    FamilyParams,
    _resolve_blocks,
    build_labelled_sum,
    build_mixture,
    build_rho0,
    canonical_blocks,
)
from .tensor_core import (
    DEFAULT_TOL,
    eigenvalues,
    partial_transpose,
    psd_threshold,
    trace_norm,
)

__all__ = [
    "q_star",
    "q_star_exact",
    "lemma1_distance",
    "verify_lemma1",
    "Lemma1Check",
    "rho0_sep_bound",
    "sep_distance_lower_bound",
    "C_n",
    "ConditionMargins",
    "analytic_conditions",
    "binding_q",
    "condition_matrices",
    "CutSpec",
    "canonical_cuts",
    "all_cuts",
    "ppt_audit",
    "AuditReport",
    "BoundReport",
    "bound_report",
    "dims_for_epsilon",
    "scaling_table",
]


def _check_dims(n, d_A, d_B=None):
    # FamilyParams carries the shared domain checks
    FamilyParams(n, d_A, 2 if d_B is None else d_B)


def q_star_exact(n: int, d_A: int, d_B: int) -> Fraction:
    """``q*`` as an exact rational, ``N(d_A-1) / (N(d_A-1) + d_B^n)``."""
    _check_dims(n, d_A, d_B)
    N = 2 ** (n - 1) - 1
    return Fraction(N * (d_A - 1), N * (d_A - 1) + d_B ** n)


def q_star(n: int, d_A: int, d_B: int) -> float:
    """Mixing weight at which the top-eigenvalue positivity condition binds.

    >>> q_star(2, 2, 2)
    0.2
    """
    _check_dims(n, d_A, d_B)
    N = 2 ** (n - 1) - 1
    return 1.0 / (1.0 + d_B ** n / (N * (d_A - 1)))


def lemma1_distance(q: float) -> float:
    """Trace norm ``||rho - rho0||_1 = 2q`` for orthogonally supported components."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    return 2.0 * q


@dataclass(frozen=True)
class Lemma1Check:
    q: float
    measured: float
    expected: float
    residual: float

    def as_dict(self) -> dict:
        return asdict(self)


def verify_lemma1(params: FamilyParams, blocks: Optional[BlockPair] = None) -> Lemma1Check:
    """Measure ``||rho - rho0||_1`` by a dense eigensolve and compare with ``2q``."""
    blocks = _resolve_blocks(params, blocks)
    rho = build_mixture(params, blocks)
    rho0 = build_rho0(params, blocks.a)
    measured = trace_norm(rho - rho0)
    expected = lemma1_distance(params.q)
    return Lemma1Check(params.q, measured, expected, abs(measured - expected))


def rho0_sep_bound(n: int, d_A: int) -> float:
    """Lower bound ``1 - 1/d_A^n`` on the distance of ``rho0`` from separable states."""
    _check_dims(n, d_A)
    return 1.0 - 1.0 / d_A ** n


def sep_distance_lower_bound(n: int, d_A: int, d_B: int) -> float:
    """``1 - 1/d_A^n - q*``: triangle inequality applied to ``rho0`` and ``rho(q*)``."""
    return rho0_sep_bound(n, d_A) - q_star(n, d_A, d_B)


def C_n(n: int) -> float:
    """Scaling constant ``8 N 2^(1/n)``."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return 8 * (2 ** (n - 1) - 1) * 2 ** (1.0 / n)


# -- analytic positivity margins ------------------------------------------

MARGIN_FAMILIES = ("X+", "X-", "Y+", "Y-")


@dataclass(frozen=True)
class ConditionMargins:
    """Margins of the four eigenvalue families for one ``q``.

    ``pairs`` lists ``(mu, nu, multiplicity)`` with ``mu`` an eigenvalue of
    ``b`` and ``nu`` the (single) eigenvalue of ``a`` on the same joint
    eigenvector.  ``values[family]`` is aligned with ``pairs``.
    """

    mode: str
    q: float
    p: float
    x: float
    d_A: int
    pairs: tuple[tuple[float, float, int], ...]
    values: dict = field(default_factory=dict)

    def min_margin(self, family: Optional[str] = None) -> float:
        fams = MARGIN_FAMILIES if family is None else (family,)
        return min(min(self.values[f]) for f in fams)

    def satisfied(self, family: str) -> bool:
        return self.min_margin(family) >= 0.0

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "q": self.q,
            "pairs": [{"mu": mu, "nu": nu, "multiplicity": m} for mu, nu, m in self.pairs],
            **{f: list(self.values[f]) for f in MARGIN_FAMILIES},
            "min": self.min_margin(),
        }


def _cluster(values: np.ndarray, tol: float = 1e-12) -> list[tuple[float, int]]:
    """Group sorted eigenvalues that agree within ``tol`` (relative to 1)."""
    out: list[list] = []
    for v in np.sort(values)[::-1]:
        if out and abs(out[-1][0] - v) <= tol * max(1.0, abs(v)):
            out[-1][1] += 1
        else:
            out.append([float(v), 1])
    return [(v, m) for v, m in out]


def _payload_spectra(blocks: BlockPair) -> tuple[float, list[tuple[float, int]]]:
    a = blocks.a.array
    nu = float(a[0, 0])
    scale = max(float(np.max(np.abs(a))), 1e-300)
    if np.max(np.abs(a - nu * np.eye(a.shape[0]))) > 1e-12 * scale:
        raise UnsupportedDecompositionError(
            "the margin decomposition needs payload a to be a multiple of the identity"
        )
    return nu, _cluster(eigenvalues(blocks.b))


def analytic_conditions(params: FamilyParams, blocks: Optional[BlockPair] = None,
                        mode: str = "full") -> ConditionMargins:
    """Eigenvalue margins of the block matrices ``X`` and ``Y``.

    With ``a = nu * I`` every term of ``X = [[x b, p a], [p a, x b]]`` and of
    the ``d_A x d_A`` block matrix ``Y`` (``p a`` on the diagonal, ``x b``
    off it) commutes, so their eigenvalues are

    * ``X+ = x mu + p nu`` and ``X- = x mu - p nu``,
    * ``Y+ = p nu + (d_A - 1) x mu`` and ``Y- = p nu - x mu``,

    with ``mu`` running over the spectrum of ``b``.  ``mode="top-eigenvalue"``
    keeps only the top ``mu``; ``mode="full"`` keeps every ``mu``, including
    the zero eigenvalues of a rank-one ``b``.
    """
    if mode not in ("full", "top-eigenvalue"):
        raise DomainError(f"unknown pairing mode {mode!r}")
    blocks = blocks if blocks is not None else canonical_blocks(params)
    nu, mus = _payload_spectra(blocks)
    if mode == "top-eigenvalue":
        mus = mus[:1]
    p, x, dA = params.p, params.x, params.d_A
    mu = np.array([m for m, _ in mus])
    values = {
        "X+": tuple(float(v) for v in x * mu + p * nu),
        "X-": tuple(float(v) for v in x * mu - p * nu),
        "Y+": tuple(float(v) for v in p * nu + (dA - 1) * x * mu),
        "Y-": tuple(float(v) for v in p * nu - x * mu),
    }
    pairs = tuple((m, nu, k) for m, k in mus)
    return ConditionMargins(mode, params.q, p, x, dA, pairs, values)


def binding_q(n: int, d_A: int, d_B: int, blocks: Optional[BlockPair] = None) -> float:
    """Solve the top-eigenvalue ``Y-`` margin ``(1-q) nu = q mu / (N D)`` for ``q``."""
    params = FamilyParams(n, d_A, d_B)
    blocks = blocks if blocks is not None else canonical_blocks(params)
    nu, mus = _payload_spectra(blocks)
    mu = mus[0][0]
    return nu / (nu + mu / (params.N * params.D))


def condition_matrices(params: FamilyParams, blocks: Optional[BlockPair] = None):
    """Literal block assembly of ``X`` (order ``2 d_B^n``) and ``Y`` (order ``d_A d_B^n``)."""
    blocks = blocks if blocks is not None else canonical_blocks(params)
    a, b = blocks.a.array, blocks.b.array
    p, x = params.p, params.x
    X = np.block([[x * b, p * a], [p * a, x * b]])
    Y = np.block([[p * a if r == c else x * b for c in range(params.d_A)]
                  for r in range(params.d_A)])
    return X, Y


# -- cuts and audit -----------------------------------------------------------

@dataclass(frozen=True)
class CutSpec:
    """A set of parties whose A- and B-factors are transposed together."""

    parties: tuple[int, ...]
    factors: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"parties": list(self.parties), "factors": list(self.factors)}


def _cut(space, parties) -> CutSpec:
    factors = sorted(k for party in parties for k in space.party_factors(party))
    return CutSpec(tuple(parties), tuple(factors))


def canonical_cuts(params: FamilyParams) -> list[CutSpec]:
    """Nonempty subsets of parties ``2..n``; the complement cuts are spectrally equal."""
    space = params.space
    out = []
    for r in range(1, params.n):
        for parties in itertools.combinations(range(2, params.n + 1), r):
            out.append(_cut(space, parties))
    return out


def all_cuts(params: FamilyParams) -> list[CutSpec]:
    """Every nonempty proper subset of ``1..n``."""
    space = params.space
    return [_cut(space, parties)
            for r in range(1, params.n)
            for parties in itertools.combinations(range(1, params.n + 1), r)]


@dataclass
class AuditReport:
    """Measured spectra of ``rho(q)`` and its partial transposes.

    Measured values come from the dense eigensolver only.  ``feasible_q`` is
    ``None`` when no ``q`` in ``[0, 1]`` makes ``rho(q)`` and every audited
    partial transpose PSD.
    """

    n: int
    d_A: int
    d_B: int
    tol: float
    q_grid: list
    q_star: float
    lemma3_bound: float
    rho_min_eig: list
    rho_psd_threshold: list
    cuts: list
    margins: list
    analytic_min_margin: list
    feasible_q: Optional[list]
    feasible_bracket: Optional[dict]
    best_q: float
    best_min_eig: float
    resolution: float

    @property
    def ppt_at(self) -> list:
        return [self.rho_min_eig[k] >= self.rho_psd_threshold[k]
                and all(c["min_eig"][k] >= c["psd_threshold"][k] for c in self.cuts)
                for k in range(len(self.q_grid))]

    def as_dict(self) -> dict:
        return {
            "params": {"n": self.n, "d_A": self.d_A, "d_B": self.d_B},
            "tol": self.tol,
            "q_star": self.q_star,
            "lemma3_bound": self.lemma3_bound,
            "q_grid": list(self.q_grid),
            "rho_min_eig": list(self.rho_min_eig),
            "rho_psd_threshold": list(self.rho_psd_threshold),
            "cuts": self.cuts,
            "margins": self.margins,
            "analytic_min_margin": self.analytic_min_margin,
            "feasible_q": self.feasible_q,
            "feasible_bracket": self.feasible_bracket,
            "best_q": self.best_q,
            "best_min_eig": self.best_min_eig,
            "resolution": self.resolution,
        }


class _Pencil:
    """``M(q) = (1-q) * M0 + q/(N D) * M1`` for ``rho`` and each audited transpose."""

    def __init__(self, params, blocks, factor_sets, threads):
        rho0 = build_rho0(params, blocks.a)
        rest = build_labelled_sum(params, blocks.b)
        self.params = params
        self.pairs = [(rho0, rest)]
        self.pairs += [(partial_transpose(rho0, f), partial_transpose(rest, f)) for f in factor_sets]
        self.threads = max(1, int(threads or 1))

    def matrices(self, q: float) -> list[np.ndarray]:
        pq = self.params.with_q(q)
        return [pq.p * m0.array + pq.x * m1.array for m0, m1 in self.pairs]

    def _map(self, fn, items):
        if self.threads == 1:
            return list(map(fn, items))
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    def evaluate(self, q: float, tol: float):
        mats = self.matrices(q)
        mins = self._map(lambda M: float(eigenvalues(M)[0]), mats)
        thr = [psd_threshold(M, tol) for M in mats]
        return mins, thr


def _golden_max(f, lo: float, hi: float, xtol: float = 1e-10) -> tuple[float, float]:
    """Maximize a concave ``f`` on ``[lo, hi]`` by golden-section search."""
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    q = (a + b) / 2
    return q, f(q)


def _bisect_edge(feasible, inside: float, outside: float, resolution: float) -> tuple[float, float]:
    while abs(outside - inside) > resolution:
        mid = 0.5 * (inside + outside)
        if feasible(mid):
            inside = mid
        else:
            outside = mid
    return inside, outside


def ppt_audit(params: FamilyParams, q_grid: Sequence[float] = (0.0, 1.0),
              cuts: str = "canonical", extra_factor_sets: Sequence[Sequence[int]] = (),
              tol: float = DEFAULT_TOL, resolution: float = 1e-6,
              blocks: Optional[BlockPair] = None, threads: int = 1) -> AuditReport:
    """Measure positivity of ``rho(q)`` and its partial transposes.

    Parameters
    ----------
    params : FamilyParams
        ``n``, ``d_A``, ``d_B``; its ``q`` is ignored in favour of ``q_grid``.
    q_grid : sequence of float
        Mixing weights reported individually.
    cuts : {"canonical", "all"}
        ``"canonical"`` transposes party subsets that exclude party 1;
        ``"all"`` adds their complements (spectrally redundant).
    extra_factor_sets : sequence of sequences of int
        Additional raw factor-position subsets, for diagnostics.
    tol : float
        A matrix counts as PSD when its smallest eigenvalue is at least
        ``-tol * order * maxabs``.
    resolution : float
        Bisection resolution of the feasible-interval endpoints.
    threads : int
        Maximum number of concurrent eigensolves.

    Notes
    -----
    The smallest eigenvalue of an affine matrix pencil is concave in ``q``,
    and so is the minimum over all audited matrices.  Its maximum is found
    by golden-section search; the feasible set is an interval around that
    point whose edges are located by bisection.
    """
    params.check_capacity()
    blocks = _resolve_blocks(params, blocks)
    if cuts == "canonical":
        cut_specs = canonical_cuts(params)
    elif cuts == "all":
        cut_specs = all_cuts(params)
    else:
        raise DomainError(f"unknown cut policy {cuts!r}")
    nf = params.space.nfactors
    extra = [tuple(sorted(set(int(k) for k in f))) for f in extra_factor_sets]
    for f in extra:
        if any(not 0 <= k < nf for k in f):
            raise DomainError(f"factor set {list(f)} out of range 0..{nf - 1}")
    factor_sets = [c.factors for c in cut_specs] + extra
    pencil = _Pencil(params, blocks, factor_sets, threads)

    q_grid = [float(FamilyParams(params.n, params.d_A, params.d_B, q).q) for q in q_grid]
    evals = [pencil.evaluate(q, tol) for q in q_grid]

    cut_rows = []
    for k, f in enumerate(factor_sets, start=1):
        row = cut_specs[k - 1].as_dict() if k <= len(cut_specs) else {"parties": None, "factors": list(f)}
        row["min_eig"] = [e[0][k] for e in evals]
        row["psd_threshold"] = [e[1][k] for e in evals]
        cut_rows.append(row)

    margins, analytic_min = [], []
    for q in q_grid:
        try:
            full = analytic_conditions(params.with_q(q), blocks, "full")
            top = analytic_conditions(params.with_q(q), blocks, "top-eigenvalue")
        except UnsupportedDecompositionError:
            margins.append(None)
            analytic_min.append(None)
            continue
        margins.append({"q": q, "full": full.as_dict(), "top-eigenvalue": top.as_dict()})
        analytic_min.append(full.min_margin())

    def worst(q):
        return min(pencil.evaluate(q, tol)[0])

    def feasible(q):
        mins, thr = pencil.evaluate(q, tol)
        return all(m >= t for m, t in zip(mins, thr))

    best_q, best_val = _golden_max(worst, 0.0, 1.0)
    for q, (mins, _) in zip(q_grid + [0.0, 1.0], evals + [pencil.evaluate(0.0, tol), pencil.evaluate(1.0, tol)]):
        if min(mins) > best_val:
            best_q, best_val = q, min(mins)

    feasible_q = bracket = None
    if feasible(best_q):
        lo_in, lo_out = (0.0, 0.0) if feasible(0.0) else _bisect_edge(feasible, best_q, 0.0, resolution)
        hi_in, hi_out = (1.0, 1.0) if feasible(1.0) else _bisect_edge(feasible, best_q, 1.0, resolution)
        feasible_q = [lo_in, hi_in]
        bracket = {"lo": [lo_out, lo_in], "hi": [hi_in, hi_out]}

    return AuditReport(
        n=params.n, d_A=params.d_A, d_B=params.d_B, tol=tol, q_grid=q_grid,
        q_star=q_star(params.n, params.d_A, params.d_B),
        lemma3_bound=sep_distance_lower_bound(params.n, params.d_A, params.d_B),
        rho_min_eig=[e[0][0] for e in evals],
        rho_psd_threshold=[e[1][0] for e in evals],
        cuts=cut_rows, margins=margins, analytic_min_margin=analytic_min,
        feasible_q=feasible_q, feasible_bracket=bracket,
        best_q=best_q, best_min_eig=best_val, resolution=resolution,
    )


# -- bounds and dimension scaling -------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """Formula values for one configuration and, optionally, one target ``epsilon``.

    ``d_ideal`` is the product ``d_A^n * d_B^n`` of the ideal (real-valued)
    dimensions; ``d_ideal_4N`` is the same quantity written with the prefactor
    ``4N``, which is what the constant ``C(n)`` is derived from.
    """

    n: int
    d_A: Optional[int]
    d_B: Optional[int]
    q_star: Optional[float]
    lemma1_distance: Optional[float]
    rho0_sep_bound: Optional[float]
    sep_distance_lower_bound: Optional[float]
    C_n: float
    epsilon: Optional[float] = None
    dA_ideal: Optional[float] = None
    dB_ideal: Optional[float] = None
    d_ideal: Optional[float] = None
    d_ideal_4N: Optional[float] = None
    d_bound: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "d_A": self.d_A,
            "d_B": self.d_B,
            "q_star": self.q_star,
            "lemma1_distance": self.lemma1_distance,
            "rho0_sep_bound": self.rho0_sep_bound,
            "lemma3_bound": self.sep_distance_lower_bound,
            "C_n": self.C_n,
            "epsilon": self.epsilon,
            "dA_ideal": self.dA_ideal,
            "dB_ideal": self.dB_ideal,
            "d_ideal": self.d_ideal,
            "d_ideal_4N": self.d_ideal_4N,
            "d_bound": self.d_bound,
        }


def bound_report(n: int, d_A: int, d_B: int, epsilon: Optional[float] = None) -> BoundReport:
    qs = q_star(n, d_A, d_B)
    fixed = dict(
        n=n, d_A=d_A, d_B=d_B, q_star=qs, lemma1_distance=lemma1_distance(qs),
        rho0_sep_bound=rho0_sep_bound(n, d_A),
        sep_distance_lower_bound=sep_distance_lower_bound(n, d_A, d_B), C_n=C_n(n),
    )
    if epsilon is None:
        return BoundReport(**fixed)
    ideal = _ideal_dims(n, epsilon)
    return BoundReport(**fixed, **ideal)


def _ideal_dims(n: int, epsilon: float) -> dict:
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    N = 2 ** (n - 1) - 1
    root = (2.0 / epsilon) ** (1.0 / n)
    dA_n = 2.0 / epsilon
    dB_n = N * (2.0 - epsilon) / epsilon * (root - 1.0)
    return dict(
        epsilon=epsilon,
        dA_ideal=root,
        dB_ideal=dB_n ** (1.0 / n),
        d_ideal=dA_n * dB_n,
        d_ideal_4N=4 * N * (2.0 - epsilon) / epsilon ** 2 * (root - 1.0),
        d_bound=C_n(n) / epsilon ** (2.0 + 1.0 / n),
    )


def _ceil_dim(x: float) -> int:
    # guard against roots like 2.0000000000000004
    return max(2, math.ceil(x - 1e-9))


def dims_for_epsilon(n: int, epsilon: float) -> BoundReport:
    """Dimensions that make the distance bound reach ``1 - epsilon``.

    Sets ``1/d_A^n = epsilon/2`` and ``q* = epsilon/2``, giving
    ``d_A^n = 2/epsilon`` and ``d_B^n = N (2-epsilon)/epsilon ((2/epsilon)^(1/n) - 1)``.
    The formula fields (``q_star`` and the bounds) are evaluated at the
    integer dimensions obtained by rounding the ideal ones up (minimum 2).
    """
    ideal = _ideal_dims(n, epsilon)
    d_A = _ceil_dim(ideal["dA_ideal"])
    d_B = _ceil_dim(ideal["dB_ideal"])
    return bound_report(n, d_A, d_B, epsilon)


SCALING_HEADER = ("n", "epsilon", "dA_ideal", "dB_ideal", "d_ideal", "d_bound")


def scaling_table(ns: Sequence[int], epsilons: Sequence[float]) -> list[dict]:
    """Rows of ideal dimensions over an ``(n, epsilon)`` grid."""
    rows = []
    for n in ns:
        for eps in epsilons:
            ideal = _ideal_dims(n, eps)
            rows.append({"n": n, **{k: ideal[k] for k in SCALING_HEADER[1:]}})
    return rows
