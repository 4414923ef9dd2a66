"""Truncated operator realisation of the sphere generators.

Hilbert space ``l2(N_0)^{(x) l} (x) l2(Z)`` with basis ``(n_1, .., n_l, m)``.
Each N_0 factor is cut to ``0..d-1`` (the weighted shift sends
``e_{d-1}`` to zero) and the Z factor to ``-M..M`` with a cyclic shift,
so only the weighted shift introduces truncation error.

    z_1 = D (x) ... (x) D (x) U
    z_j = D^{(x)(N-j)} (x) W (x) 1 ... (x) 1      (j > 1)

with ``W e_n = sqrt(1 - q^{2(n+1)}) e_{n+1}`` and ``D e_n = q^n e_n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp

from .haar import PreconditionError, expectation, simplex_reduce
from .sphere import NCPoly

DEFAULT_MAX_DIM = 250_000


@dataclass(frozen=True)
class TruncParams:
    ell: int
    q0: float
    d: int
    M: int
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be positive")
        if not 0 < self.q0 < 1:
            raise ValueError("q0 must lie in (0, 1)")
        if self.d < 2:
            raise ValueError("truncation size d must be >= 2")
        if self.M < 1:
            raise ValueError("torus half-size M must be >= 1")

    @property
    def N(self) -> int:
        return self.ell + 1

    @property
    def dim(self) -> int:
        return self.d ** self.ell * (2 * self.M + 1)


def shift_W(q: float, d: int) -> sp.csr_matrix:
    rows = np.arange(1, d)
    cols = np.arange(0, d - 1)
    vals = np.sqrt(1 - q ** (2 * (cols + 1.0)))
    return sp.csr_matrix((vals, (rows, cols)), shape=(d, d))


def diag_D(q: float, d: int) -> sp.csr_matrix:
    return sp.diags(q ** np.arange(d, dtype=float)).tocsr()


def cyclic_U(M: int) -> sp.csr_matrix:
    size = 2 * M + 1
    cols = np.arange(size)
    rows = (cols + 1) % size
    return sp.csr_matrix((np.ones(size), (rows, cols)), shape=(size, size))


def build_rep(params: TruncParams) -> Dict[int, sp.csr_matrix]:
    """Truncated images of ``z_1..z_N`` keyed by generator index."""
    if params.dim > params.max_dim:
        raise ValueError(f"truncated dimension {params.dim} exceeds cap {params.max_dim}")
    q, d, ell, N = params.q0, params.d, params.ell, params.N
    W, D, I = shift_W(q, d), diag_D(q, d), sp.identity(d, format="csr")
    U = cyclic_U(params.M)
    IZ = sp.identity(2 * params.M + 1, format="csr")
    out = {1: reduce(lambda a, b: sp.kron(a, b, format="csr"), [D] * ell + [U])}
    for j in range(2, N + 1):
        factors = [D] * (N - j) + [W] + [I] * (j - 2) + [IZ]
        out[j] = reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)
    return out


def basis_indices(params: TruncParams) -> np.ndarray:
    """Rows ``(n_1, .., n_l, m)`` in the Kronecker ordering of `build_rep`."""
    grids = [range(params.d)] * params.ell + [range(-params.M, params.M + 1)]
    return np.array(list(product(*grids)), dtype=int)


def interior_mask(params: TruncParams, margin: int) -> np.ndarray:
    if not 1 <= margin < params.d:
        raise ValueError("interior margin must satisfy 1 <= margin < d")
    idx = basis_indices(params)
    return np.all(idx[:, : params.ell] <= params.d - 1 - margin, axis=1)


def _col_norms(mat: sp.spmatrix) -> np.ndarray:
    sq = mat.multiply(mat) if sp.issparse(mat) else mat * mat
    return np.sqrt(np.asarray(sq.sum(axis=0)).ravel())


def relation_residual(rep: Dict[int, sp.csr_matrix], params: TruncParams,
                      interior_margin: int = 2) -> Dict[str, float]:
    """Largest Euclidean residual of each relation family on basis vectors.

    ``q_commutation`` runs over the whole truncation; ``star_commutator``
    and ``sphere`` over the interior; ``edge_defect`` is the commutator
    residual on the excluded boundary vectors.
    """
    q = params.q0
    N = params.N
    z = rep
    zs = {j: m.T.tocsr() for j, m in rep.items()}
    inner = interior_mask(params, interior_margin)

    qcomm = []
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i < j:
                qcomm.append(z[i] @ z[j] - q * (z[j] @ z[i]))
                qcomm.append(zs[j] @ zs[i] - q * (zs[i] @ zs[j]))
            if i != j:
                qcomm.append(zs[i] @ z[j] - q * (z[j] @ zs[i]))

    dim = params.dim
    A = [sp.csr_matrix((dim, dim))]
    for j in range(1, N + 1):
        A.append(A[-1] + z[j] @ zs[j])
    comm = [zs[1] @ z[1] - z[1] @ zs[1]]
    for j in range(1, N):
        comm.append(zs[j + 1] @ z[j + 1] - z[j + 1] @ zs[j + 1] - (1 - q * q) * A[j])
    sphere_res = A[N] - sp.identity(dim, format="csr")

    def worst(mats, mask=None):
        best = 0.0
        for mat in mats:
            norms = _col_norms(mat)
            if mask is not None:
                norms = norms[mask]
            if norms.size:
                best = max(best, float(norms.max()))
        return best

    return {
        "q_commutation": worst(qcomm),
        "star_commutator": worst(comm, inner),
        "sphere": worst([sphere_res], inner),
        "edge_defect": worst(comm, ~inner),
    }


def represent(x: NCPoly, rep: Dict[int, sp.csr_matrix], params: TruncParams) -> sp.csr_matrix:
    """Image of a sphere element under the truncated representation."""
    alg = x.algebra
    if alg.ell != params.ell:
        raise ValueError("signature mismatch between element and representation")
    dim = params.dim
    mats = {}
    for j, mat in rep.items():
        mats[alg.code_of(j, False)] = mat
        mats[alg.code_of(j, True)] = mat.T.tocsr()
    total = sp.csr_matrix((dim, dim))
    ident = sp.identity(dim, format="csr")
    for w, c in x.words():
        term = ident
        for code in w:
            term = term @ mats[code]
        total = total + float(c(params.q0)) * term
    return total.tocsr()


@dataclass(frozen=True)
class DiagonalReport:
    diagonal: float
    off_diagonal: float

    @property
    def deviation(self) -> float:
        return self.diagonal + self.off_diagonal


def diagonal_consistency(x: NCPoly, params: TruncParams, margin: int | None = None,
                         rep: Dict[int, sp.csr_matrix] | None = None) -> DiagonalReport:
    """Compare ``pi(x)`` on interior vectors with the reduced polynomial.

    ``x`` must be diagonal (fixed by the conditional expectation).  The
    expected eigenvalue of ``A_j`` on ``e_n`` is ``q^{2(n_1+..+n_{N-j})}``.
    """
    if expectation(x) != x:
        raise PreconditionError("diagonal_consistency needs E(x) = x")
    poly = simplex_reduce(x)
    rep = rep or build_rep(params)
    margin = max(1, x.degree()) if margin is None else margin
    mask = interior_mask(params, margin)
    mat = represent(x, rep, params).tocsc()
    idx = basis_indices(params)
    q2 = params.q0 ** 2
    N, ell = params.N, params.ell
    csum = np.cumsum(idx[:, :ell], axis=1)
    a_vals = [q2 ** csum[:, N - j - 1] for j in range(1, ell + 1)]
    expected = np.zeros(params.dim)
    for m, c in poly.items():
        term = np.full(params.dim, float(c(params.q0)))
        for a, e in zip(a_vals, m):
            if e:
                term = term * a ** e
        expected += term
    diag = mat.diagonal()
    diag_dev = float(np.max(np.abs(diag - expected)[mask])) if mask.any() else 0.0
    off = (mat - sp.diags(diag)).tocsc()
    off_cols = np.zeros(params.dim)
    absoff = abs(off)
    if absoff.nnz:
        off_cols = np.asarray(absoff.max(axis=0).todense()).ravel()
    off_dev = float(off_cols[mask].max()) if mask.any() else 0.0
    return DiagonalReport(diag_dev, off_dev)
