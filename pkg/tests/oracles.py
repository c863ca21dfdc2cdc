"""Independent reference implementations used only by the tests.

Nothing here imports pptfarm: matrices are assembled from explicit Kronecker
products, partial transposes by per-entry re-indexing, and eigenvalues by a
cyclic Jacobi solver or mpmath.
"""

import itertools

import mpmath
import numpy as np


def naive_partial_transpose(A, dims, factors):
    """Per-entry re-indexing with 0-based factor positions."""
    factors = set(factors)
    idx = list(itertools.product(*(range(d) for d in dims)))
    flat = {m: k for k, m in enumerate(idx)}
    out = np.empty_like(A)
    for r, rm in enumerate(idx):
        for c, cm in enumerate(idx):
            rr = tuple(cm[k] if k in factors else rm[k] for k in range(len(dims)))
            cc = tuple(rm[k] if k in factors else cm[k] for k in range(len(dims)))
            out[r, c] = A[flat[rr], flat[cc]]
    return out


def jacobi_eigvalsh(A, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi with round-robin ordering: each round applies disjoint rotations."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if n == 1:
        return A.diagonal().copy()
    m = n + (n % 2)
    players = list(range(m))
    scale = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(max(0.0, np.sum(A ** 2) - np.sum(A.diagonal() ** 2)))
        if off <= tol * scale:
            break
        for _ in range(m - 1):
            pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
            pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
            P = np.array([a for a, _ in pairs])
            Q = np.array([b for _, b in pairs])
            apq = A[P, Q]
            app = A[P, P]
            aqq = A[Q, Q]
            c = np.ones(len(P))
            s = np.zeros(len(P))
            nz = apq != 0
            with np.errstate(over="ignore", divide="ignore"):
                tau = (aqq[nz] - app[nz]) / (2 * apq[nz])
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c[nz] = 1 / np.sqrt(1 + t ** 2)
            s[nz] = t * c[nz]
            colP, colQ = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = c * colP - s * colQ
            A[:, Q] = s * colP + c * colQ
            rowP, rowQ = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * rowP - s[:, None] * rowQ
            A[Q, :] = s[:, None] * rowP + c[:, None] * rowQ
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            players = [players[0]] + [players[-1]] + players[1:-1]
    return np.sort(A.diagonal())


def mp_eigvalsh(A, dps=40):
    with mpmath.workdps(dps):
        ev = mpmath.eigsy(mpmath.matrix(A.tolist()), eigvals_only=True)
        return sorted(float(v) for v in ev)


def unit(k, d):
    e = np.zeros(d)
    e[k - 1] = 1.0
    return e


def kron_all(mats):
    out = np.array([[1.0]])
    for m in mats:
        out = np.kron(out, m)
    return out


def e_op(i, j, d):
    return np.outer(unit(i, d), unit(j, d))


def brute_family(n, d_A, d_B, q):
    """rho(q), rho0 and the list of rho_l from the defining Kronecker products.

    Labels are enumerated as (alpha, i, j) and mapped to support vectors via
    tau_alpha(E_ij^n) = e_ij (x) T^alpha_1(e_ij) (x) ...; the order of the
    returned rho_l list is irrelevant for the mixture.
    """
    m = d_B ** n
    a = np.eye(m) / (d_A * m)
    b = np.ones((m, m)) / (2 * m)
    N = 2 ** (n - 1) - 1
    D = d_A * (d_A - 1) // 2
    rho0 = sum(np.kron(kron_all([e_op(i, j, d_A)] * n), a)
               for i in range(1, d_A + 1) for j in range(1, d_A + 1))
    rhos = []
    for alpha in itertools.product((0, 1), repeat=n - 1):
        if not any(alpha):
            continue
        for i in range(1, d_A + 1):
            for j in range(i + 1, d_A + 1):
                off = kron_all([e_op(i, j, d_A)] + [e_op(i, j, d_A).T if t else e_op(i, j, d_A)
                                                   for t in alpha])
                # off = |v><w|; recover |v> and |w> from its single nonzero
                r, c = np.argwhere(off)[0]
                v = np.zeros(d_A ** n)
                w = np.zeros(d_A ** n)
                v[r] = 1.0
                w[c] = 1.0
                s = v + w
                rhos.append(np.kron(np.outer(s, s), b))
    assert len(rhos) == N * D
    rho = (1 - q) * rho0 + q / (N * D) * sum(rhos)
    return rho, rho0, rhos


def cut_factors(n, parties):
    """0-based positions of A_k and B_k for 1-based parties k (order A1..An, B1..Bn)."""
    return sorted([k - 1 for k in parties] + [n + k - 1 for k in parties])
