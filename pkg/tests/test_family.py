import itertools
import json
from pathlib import Path

import numpy as np
import pytest

from oracles import brute_family
from pptfarm import (
    BlockPair,
    CapacityError,
    DomainError,
    FamilyParams,
    StructureError,
    SymMatrix,
    block_layout,
    build_mixture,
    build_rho0,
    build_rho_l,
    canonical_blocks,
    count_patterns,
    enumerate_patterns,
    label_map,
    support_orthogonality_check,
    validate_density,
)
from pptfarm.family import TranspositionPattern, check_block_pair
from pptfarm.tensor_core import eigenvalues, min_eigenvalue, partial_transpose

GOLDEN = Path(__file__).parent / "data" / "golden_layout_n3_dA3.json"


def golden_grid():
    doc = json.loads(GOLDEN.read_text())
    grid = np.full((doc["size"], doc["size"]), -1)
    for r, c, l in doc["blocks"]:
        grid[r - 1, c - 1] = l
    return grid


@pytest.mark.parametrize("n, N", [(2, 1), (3, 3), (4, 7)])
def test_count_patterns(n, N):
    assert count_patterns(n) == N
    assert len(enumerate_patterns(n)) == N


def test_count_patterns_domain():
    with pytest.raises(DomainError):
        count_patterns(1)
    with pytest.raises(DomainError):
        enumerate_patterns(1)


def test_enumerate_patterns():
    assert [p.alpha for p in enumerate_patterns(2)] == [(1,)]
    assert {p.alpha for p in enumerate_patterns(3)} == {(0, 1), (1, 0), (1, 1)}
    pats = enumerate_patterns(4)
    assert len({p.alpha for p in pats}) == 7
    assert all(len(p.alpha) == 3 and any(p.alpha) for p in pats)


def test_pattern_rejects_zero():
    with pytest.raises(DomainError):
        TranspositionPattern((0, 0))
    assert TranspositionPattern((0, 1)).parties == (3,)


def test_pattern_order_matches_label_order():
    lm = label_map(4, 2)
    assert [lab.alpha for lab in lm] == enumerate_patterns(4)


@pytest.mark.parametrize("l, v, w, alpha, ij", [
    (1, (1, 1, 2), (2, 2, 1), (0, 1), (1, 2)),
    (9, (2, 3, 3), (3, 2, 2), (1, 1), (2, 3)),
    (4, (1, 2, 2), (2, 1, 1), (1, 1), (1, 2)),
])
def test_label_map_examples(l, v, w, alpha, ij):
    lab = label_map(3, 3).label(l)
    assert lab.v.components == v
    assert lab.w.components == w
    assert lab.alpha.alpha == alpha
    assert (lab.i, lab.j) == ij


def test_label_map_qubit_case():
    lm = label_map(2, 2)
    assert len(lm) == 1
    lab = lm.label(1)
    assert (lab.v.components, lab.w.components, lab.alpha.alpha) == ((1, 2), (2, 1), (1,))


def test_label_positions_n3_dA3():
    lm = label_map(3, 3)
    assert [lab.v.flat for lab in lm] == [2, 3, 4, 5, 7, 9, 15, 17, 18]
    assert lm.label(9).w.flat == 23


@pytest.mark.parametrize("n, d_A", list(itertools.product([2, 3, 4], [2, 3, 4])))
def test_label_map_bijection(n, d_A):
    lm = label_map(n, d_A)
    N, D = 2 ** (n - 1) - 1, d_A * (d_A - 1) // 2
    assert len(lm) == N * D
    seen = set()
    diag = {(i,) * n for i in range(1, d_A + 1)}
    for lab in lm:
        assert lm.rank(lab.alpha, lab.i, lab.j) == lab.l
        assert lab.v.components[0] == lab.i and lab.w.components[0] == lab.j
        for k in range(1, n):
            assert lab.v.components[k] == (lab.j if lab.alpha.alpha[k - 1] else lab.i)
        assert lab.w.components == tuple(lab.j if c == lab.i else lab.i for c in lab.v.components)
        for vec in (lab.v.components, lab.w.components):
            assert vec not in seen and vec not in diag
            seen.add(vec)
    assert sorted(lab.v.components for lab in lm) == [lab.v.components for lab in lm]


def test_label_out_of_range():
    with pytest.raises(DomainError):
        label_map(3, 3).label(10)


def test_params_derived():
    P = FamilyParams(3, 3, 2, 0.3)
    assert (P.N, P.D, P.order, P.block_order) == (3, 3, 216, 8)
    assert P.p == pytest.approx(0.7)
    assert P.x == pytest.approx(0.3 / 9)


@pytest.mark.parametrize("args", [(1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2, 1.5), (2, 2, 2, -0.1)])
def test_params_domain(args):
    with pytest.raises(DomainError):
        FamilyParams(*args)


def test_capacity():
    with pytest.raises(CapacityError):
        build_mixture(FamilyParams(4, 4, 2, 0.2))


@pytest.mark.parametrize("n, d_A, d_B", [(2, 2, 2), (3, 3, 2), (2, 4, 3)])
def test_canonical_blocks_spectra(n, d_A, d_B):
    P = FamilyParams(n, d_A, d_B)
    blocks = canonical_blocks(P)
    m = d_B ** n
    ea = eigenvalues(blocks.a)
    eb = eigenvalues(blocks.b)
    assert np.max(np.abs(ea - 1 / (d_A * m))) <= 1e-12
    assert abs(eb[-1] - 0.5) <= 1e-12
    assert np.max(np.abs(eb[:-1])) <= 1e-12
    assert blocks.a.trace() == pytest.approx(1 / d_A, abs=1e-15)
    assert blocks.b.trace() == pytest.approx(0.5, abs=1e-15)
    check_block_pair(blocks, P)


def test_rho0_support_and_trace():
    P = FamilyParams(3, 3, 2)
    rho0 = build_rho0(P, canonical_blocks(P).a)
    assert rho0.trace() == pytest.approx(1.0, abs=1e-14)
    nb = 8
    occupied = {(r // nb + 1, c // nb + 1) for r, c in zip(*np.nonzero(rho0.array))}
    assert occupied == set(itertools.product([1, 14, 27], repeat=2))


def test_rho0_qubit_spectrum():
    d_B = 2
    P = FamilyParams(2, 2, d_B)
    ev = eigenvalues(build_rho0(P, canonical_blocks(P).a))
    assert abs(ev[0]) <= 1e-14
    assert ev[-1] == pytest.approx(1 / d_B ** 2, abs=1e-14)


def test_rho_l_blocks():
    P = FamilyParams(3, 3, 2)
    lab = label_map(3, 3).label(4)
    rho = build_rho_l(P, lab, canonical_blocks(P).b)
    nb = 8
    occupied = {(r // nb + 1, c // nb + 1) for r, c in zip(*np.nonzero(rho.array))}
    assert occupied == {(5, 5), (5, 10), (10, 5), (10, 10)}
    assert rho.trace() == pytest.approx(1.0)
    assert min_eigenvalue(rho) >= -1e-14


def test_rho_l_wrong_label():
    P = FamilyParams(3, 3, 2)
    with pytest.raises(StructureError):
        build_rho_l(P, label_map(2, 3).label(1), canonical_blocks(P).b)


def test_mixture_endpoints():
    P = FamilyParams(2, 3, 2)
    blocks = canonical_blocks(P)
    rho0 = build_rho0(P, blocks.a)
    assert np.array_equal(build_mixture(P.with_q(0.0)).array, rho0.array)
    uniform = sum(build_rho_l(P, lab, blocks.b).array for lab in label_map(2, 3)) / 3
    assert np.allclose(build_mixture(P.with_q(1.0)).array, uniform, atol=1e-15)


@pytest.mark.parametrize("n, d_A, d_B, q", [(2, 2, 2, 0.2), (3, 3, 2, 0.3), (2, 3, 3, 0.7)])
def test_mixture_matches_kron_oracle(n, d_A, d_B, q):
    rho = build_mixture(FamilyParams(n, d_A, d_B, q))
    ref, _, _ = brute_family(n, d_A, d_B, q)
    assert np.max(np.abs(rho.array - ref)) <= 1e-15
    assert abs(rho.trace() - 1) <= 1e-12 * rho.order


def test_mixture_sparsity_matches_golden_layout():
    rho = build_mixture(FamilyParams(3, 3, 2, 0.3))
    nb = 8
    grid = np.zeros((27, 27), dtype=bool)
    for r, c in zip(*np.nonzero(rho.array)):
        grid[r // nb, c // nb] = True
    assert np.array_equal(grid, golden_grid() >= 0)


def test_block_layout_golden():
    assert np.array_equal(block_layout(3, 3), golden_grid())
    g = block_layout(3, 3)
    assert np.count_nonzero(np.diag(g) >= 0) == 21
    assert np.count_nonzero(g >= 0) == 45


def test_block_layout_small():
    g = block_layout(2, 2)
    assert [tuple(x + 1) for x in np.argwhere(g == 0)] == [(1, 1), (1, 4), (4, 1), (4, 4)]
    assert [tuple(x + 1) for x in np.argwhere(g == 1)] == [(2, 2), (2, 3), (3, 2), (3, 3)]
    g = block_layout(2, 3)
    assert g.shape == (9, 9)
    assert set(np.unique(g)) == {-1, 0, 1, 2, 3}


@pytest.mark.parametrize("n, d_A, d_B", [(2, 2, 2), (3, 3, 2), (2, 3, 2)])
def test_orthogonality_and_components(n, d_A, d_B):
    P = FamilyParams(n, d_A, d_B, 0.4)
    rep = support_orthogonality_check(P)
    assert rep.passed and rep.max_residual == 0.0
    blocks = canonical_blocks(P)
    assert validate_density(build_rho0(P, blocks.a)).passed
    for lab in label_map(n, d_A):
        assert validate_density(build_rho_l(P, lab, blocks.b)).passed
    assert validate_density(build_mixture(P)).passed


def test_orthogonality_detects_overlap():
    P = FamilyParams(2, 2, 2)
    blocks = canonical_blocks(P)
    rho0 = build_rho0(P, blocks.a)
    bad = np.zeros((16, 16))
    bad[0:4, 0:4] = blocks.b.array  # b on the diagonal-family block (1, 1)
    rep = support_orthogonality_check(P, components=[rho0, SymMatrix(bad, P.space)])
    assert not rep.passed
    assert rep.max_residual > rep.threshold


def test_user_blocks_accepted_and_checked():
    P = FamilyParams(2, 2, 2, 0.2)
    space_B = P.space.b_space
    a = SymMatrix(np.eye(4) / 8, space_B)
    b = SymMatrix(np.ones((4, 4)) / 8, space_B)
    rho = build_mixture(P, BlockPair(a, b))
    assert rho.order == 16
    # not invariant under transposition of a B-factor
    M = np.zeros((4, 4))
    M[0, 3] = M[3, 0] = 0.1
    M += np.eye(4) * 0.2
    with pytest.raises(StructureError, match="invariant"):
        build_mixture(P, BlockPair(a, SymMatrix(M, space_B)))
    assert not np.array_equal(partial_transpose(SymMatrix(M, space_B), [0]).array, M)
    with pytest.raises(StructureError, match="semidefinite"):
        build_mixture(P, BlockPair(SymMatrix(-np.eye(4), space_B), b))
    with pytest.raises(StructureError):
        build_mixture(P, BlockPair(SymMatrix(np.eye(8)), b))
