"""Quantum matrix algebra O(M_q(N)), quantum minors and two identity checks.

Generators ``u_ij`` are coded row-major, ``code = (i-1)*N + (j-1)``, and
canonical words are nondecreasing in that order.  For ``i < j``, ``k < l``
the reductions are

    u_jk u_ik -> q^-1 u_ik u_jk              (same column)
    u_kj u_ki -> q^-1 u_ki u_kj              (same row)
    u_jk u_il -> u_il u_jk
    u_jl u_ik -> u_ik u_jl - (q - q^-1) u_jk u_il
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .rewriting import Combo, RewriteSystem, Word, add_into
from .scalarq import QScalar, qpow

ONE = QScalar.const(1)
Q_MINUS_QINV = QScalar({1: 1, -1: -1})


class MatrixAlgebra:
    """Rewriting data for O(M_q(N)).

    ``families`` selects which relation families reduce; dropping
    ``"cross"`` (the u_jl u_ik family) gives a deliberately broken system
    used as a negative control.
    """

    ALL_FAMILIES = frozenset({"row", "column", "commute", "cross"})

    def __init__(self, N: int, families: Iterable[str] = ALL_FAMILIES):
        if N < 1:
            raise ValueError("N must be positive")
        self.N = N
        self.families = frozenset(families)
        self.system = RewriteSystem(self._rule)

    def __repr__(self):
        return f"MatrixAlgebra(N={self.N})"

    def code(self, i: int, j: int) -> int:
        if not (1 <= i <= self.N and 1 <= j <= self.N):
            raise ValueError(f"u[{i},{j}] out of range for N={self.N}")
        return (i - 1) * self.N + (j - 1)

    def pair(self, code: int) -> Tuple[int, int]:
        return code // self.N + 1, code % self.N + 1

    def _rule(self, a: int, b: int) -> Optional[List[Tuple[QScalar, Word]]]:
        if a <= b:
            return None
        ra, ca = self.pair(a)
        rb, cb = self.pair(b)
        fam = self.families
        if ra == rb:
            return [(qpow(-1), (b, a))] if "row" in fam else None
        # now ra > rb
        if ca == cb:
            return [(qpow(-1), (b, a))] if "column" in fam else None
        if ca < cb:
            return [(ONE, (b, a))] if "commute" in fam else None
        if "cross" not in fam:
            return None
        # a = u_{jl}, b = u_{ik} with i < j, k < l
        j, l, i, k = ra, ca, rb, cb
        return [(ONE, (b, a)), (-Q_MINUS_QINV, (self.code(j, k), self.code(i, l)))]

    def element(self, combo: Combo) -> "UPoly":
        return UPoly(self, combo)

    def one(self) -> "UPoly":
        return UPoly(self, {(): ONE})

    def zero(self) -> "UPoly":
        return UPoly(self, {})

    def scalar(self, c) -> "UPoly":
        c = QScalar._coerce(c)
        return UPoly(self, {(): c} if c else {})

    def u(self, i: int, j: int) -> "UPoly":
        return UPoly(self, {(self.code(i, j),): ONE})

    def normal_form(self, word: Sequence[Tuple[int, int]]) -> "UPoly":
        codes = tuple(self.code(i, j) for i, j in word)
        return UPoly(self, self.system.normal_form(codes))


_ALGEBRAS: Dict[Tuple[int, FrozenSet[str]], MatrixAlgebra] = {}


def matrix_algebra(N: int, families: Iterable[str] = MatrixAlgebra.ALL_FAMILIES) -> MatrixAlgebra:
    key = (N, frozenset(families))
    alg = _ALGEBRAS.get(key)
    if alg is None:
        alg = _ALGEBRAS[key] = MatrixAlgebra(N, key[1])
    return alg


class UPoly:
    """Element of O(M_q(N)) as canonical word -> coefficient."""

    __slots__ = ("algebra", "_coeffs")

    def __init__(self, algebra: MatrixAlgebra, coeffs: Combo):
        self.algebra = algebra
        self._coeffs = {w: c for w, c in coeffs.items() if not c.is_zero()}

    @property
    def coeffs(self) -> Combo:
        return dict(self._coeffs)

    def words(self):
        for w in sorted(self._coeffs, key=lambda w: (len(w), w)):
            yield w, self._coeffs[w]

    def is_zero(self) -> bool:
        return not self._coeffs

    def _lift(self, other):
        if isinstance(other, UPoly):
            if other.algebra is not self.algebra:
                raise ValueError("elements of different matrix algebras")
            return other
        if isinstance(other, (int, QScalar)) or hasattr(other, "denominator"):
            return self.algebra.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for w, c in other._coeffs.items():
            add_into(out, w, c)
        return UPoly(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return UPoly(self.algebra, {w: -c for w, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, UPoly):
            self._lift(other)
            return UPoly(self.algebra, self.algebra.system.multiply(self._coeffs, other._coeffs))
        if isinstance(other, (int, QScalar)) or hasattr(other, "denominator"):
            c = QScalar._coerce(other)
            return UPoly(self.algebra, {w: v * c for w, v in self._coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, UPoly):
            return self.algebra is other.algebra and self._coeffs == other._coeffs
        lifted = self._lift(other)
        if lifted is NotImplemented:
            return NotImplemented
        return self._coeffs == lifted._coeffs

    def __hash__(self):
        return hash((self.algebra.N, frozenset(self._coeffs.items())))

    def __repr__(self):
        return f"UPoly({self})"

    def __str__(self):
        from .sphere import format_combo

        alg = self.algebra

        def body(w):
            if not w:
                return "1"
            return "*".join("u[%d,%d]" % alg.pair(c) for c in w)

        return format_combo((c, body(w)) for w, c in self.words())


def flip(x: UPoly) -> UPoly:
    """Linear anti-automorphism ``u_ij -> u_{N+1-i, N+1-j}``.

    It maps each relation family onto itself, so it stands in for an
    involution when testing reversal compatibility of the rewriting.
    """
    alg = x.algebra
    N = alg.N
    out = alg.zero()
    for w, c in x.words():
        rev = [(N + 1 - i, N + 1 - j) for i, j in (alg.pair(k) for k in reversed(w))]
        out = out + alg.normal_form(rev) * c
    return out


def u_normal_form(word: Sequence[Tuple[int, int]], N: int) -> UPoly:
    return matrix_algebra(N).normal_form(word)


def inversions(sigma: Sequence[int]) -> int:
    """Number of pairs ``a < b`` with ``sigma[a] > sigma[b]``."""
    sigma = list(sigma)
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{len(sigma)}")
    return sum(1 for a, b in combinations(range(len(sigma)), 2) if sigma[a] > sigma[b])


def quantum_minor(rows: Iterable[int], cols: Iterable[int], N: int,
                  algebra: MatrixAlgebra | None = None) -> UPoly:
    """``sum_sigma (-q)^{inv(sigma)} u_{i_sigma(1) j_1} ... u_{i_sigma(n) j_n}``."""
    I = sorted(set(rows))
    J = sorted(set(cols))
    if not I or not J:
        raise ValueError("quantum minor needs non-empty row and column sets")
    if len(I) != len(J):
        raise ValueError("row and column sets must have equal cardinality")
    alg = algebra or matrix_algebra(N)
    n = len(I)
    total = alg.zero()
    for perm in permutations(range(1, n + 1)):
        inv = inversions(perm)
        coeff = QScalar({inv: (-1) ** inv})
        word = [(I[perm[t] - 1], J[t]) for t in range(n)]
        total = total + alg.normal_form(word) * coeff
    return total


def quantum_det(N: int, algebra: MatrixAlgebra | None = None) -> UPoly:
    full = range(1, N + 1)
    return quantum_minor(full, full, N, algebra)


def cofactor(i: int, j: int, N: int, algebra: MatrixAlgebra | None = None) -> UPoly:
    """``A_ij``: minor with row i and column j removed (1 when N = 1)."""
    alg = algebra or matrix_algebra(N)
    rows = [r for r in range(1, N + 1) if r != i]
    cols = [c for c in range(1, N + 1) if c != j]
    if not rows:
        return alg.one()
    return quantum_minor(rows, cols, N, alg)


@dataclass
class CheckResult:
    ok: bool
    witness: Optional[Tuple[int, int]] = None
    residual: Optional[UPoly] = None
    checked: List[Tuple[int, int]] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_central(N: int, families: Iterable[str] = MatrixAlgebra.ALL_FAMILIES) -> CheckResult:
    """Does the quantum determinant commute with every generator?"""
    alg = matrix_algebra(N, families)
    D = quantum_det(N, alg)
    result = CheckResult(True)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            u = alg.u(i, j)
            res = D * u - u * D
            result.checked.append((i, j))
            if not res.is_zero():
                return CheckResult(False, (i, j), res, result.checked)
    return result


def check_laplace(N: int, families: Iterable[str] = MatrixAlgebra.ALL_FAMILIES) -> CheckResult:
    """``sum_k u_ik (-q)^{k-j} A_jk == delta_ij D_q`` for all i, j."""
    alg = matrix_algebra(N, families)
    D = quantum_det(N, alg)
    cof = {(j, k): cofactor(j, k, N, alg) for j in range(1, N + 1) for k in range(1, N + 1)}
    result = CheckResult(True)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            lhs = alg.zero()
            for k in range(1, N + 1):
                s = k - j
                lhs = lhs + alg.u(i, k) * cof[(j, k)] * QScalar({s: (-1) ** abs(s)})
            res = lhs - (D if i == j else alg.zero())
            result.checked.append((i, j))
            if not res.is_zero():
                return CheckResult(False, (i, j), res, result.checked)
    return result
