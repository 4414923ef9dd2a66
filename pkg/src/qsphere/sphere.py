"""Coordinate algebra of the quantum sphere S_q^{2l+1}.

Generators ``z_1..z_N`` (``N = l + 1``) and their adjoints obey

    z_i z_j   = q z_j z_i          (i < j)
    z_i* z_j  = q z_j z_i*         (i != j)
    z_j* z_j  = z_j z_j* + (1 - q^2) sum_{i<j} z_i z_i*
    sum_i z_i z_i* = 1

Letters are coded as integers so that the canonical order is integer
order:  ``z_i -> i`` and ``z_i* -> 2N + 1 - i``, i.e.

    z_1 < z_2 < ... < z_N < z_N* < ... < z_1*.

A canonical word is nondecreasing in that order and does not contain the
junction ``z_N z_N*``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .rewriting import Combo, RewriteSystem, Word, add_into
from .scalarq import QScalar, qpow

ONE = QScalar.const(1)


class Letter(NamedTuple):
    index: int
    starred: bool = False

    def __str__(self):
        return f"z{self.index}" + ("'" if self.starred else "")


class CanonicalMonomial(NamedTuple):
    """``z_1^{n_1} .. z_N^{n_N} (z_N*)^{m_N} .. (z_1*)^{m_1}``."""

    n: Tuple[int, ...]
    m: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.n) + sum(self.m)

    def is_matched(self) -> bool:
        return self.n == self.m


@dataclass(frozen=True)
class Signature:
    ell: int

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be a positive integer")

    @property
    def N(self) -> int:
        return self.ell + 1


class SphereAlgebra:
    """Rewriting system and element factory for one signature.

    Instances are cached per ``ell`` (see `sphere`), so the memoised
    products are shared by all elements of the same algebra.
    """

    def __init__(self, ell: int):
        self.signature = Signature(ell)
        self.ell = ell
        self.N = ell + 1
        self.system = RewriteSystem(self._rule)

    def __repr__(self):
        return f"SphereAlgebra(ell={self.ell})"

    # -- letter codes -----------------------------------------------------
    def code(self, letter: Letter) -> int:
        if not 1 <= letter.index <= self.N:
            raise ValueError(f"generator index {letter.index} out of range 1..{self.N}")
        return 2 * self.N + 1 - letter.index if letter.starred else letter.index

    def code_of(self, index: int, starred: bool = False) -> int:
        return self.code(Letter(index, starred))

    def letter(self, code: int) -> Letter:
        if code <= self.N:
            return Letter(code, False)
        return Letter(2 * self.N + 1 - code, True)

    def star_code(self, code: int) -> int:
        return 2 * self.N + 1 - code

    def _rule(self, a: int, b: int) -> Optional[List[Tuple[QScalar, Word]]]:
        N = self.N
        a_star, b_star = a > N, b > N
        if not a_star and not b_star:
            if a > b:  # z_a z_b -> q^-1 z_b z_a
                return [(qpow(-1), (b, a))]
            return None
        if a_star and not b_star:
            i = 2 * N + 1 - a
            j = b
            if i != j:  # z_i* z_j -> q z_j z_i*
                return [(qpow(1), (b, a))]
            out = [(ONE, (b, a))]
            corr = QScalar({0: 1, 2: -1})
            for k in range(1, j):
                out.append((corr, (k, 2 * N + 1 - k)))
            return out
        if a_star and b_star:
            if a > b:  # z_i* z_j* (i < j) -> q^-1 z_j* z_i*
                return [(qpow(-1), (b, a))]
            return None
        if a == N and b == N + 1:  # z_N z_N* -> 1 - sum_{i<=l} z_i z_i*
            out = [(ONE, ())]
            for k in range(1, N):
                out.append((QScalar.const(-1), (k, 2 * N + 1 - k)))
            return out
        return None

    # -- monomials <-> words ----------------------------------------------
    def word_of(self, mono: CanonicalMonomial) -> Word:
        N = self.N
        out: List[int] = []
        for i in range(N):
            out.extend([i + 1] * mono.n[i])
        for i in range(N - 1, -1, -1):
            out.extend([2 * N - i] * mono.m[i])
        return tuple(out)

    def monomial_of(self, word: Word) -> CanonicalMonomial:
        N = self.N
        n = [0] * N
        m = [0] * N
        for c in word:
            if c <= N:
                n[c - 1] += 1
            else:
                m[2 * N - c] += 1
        return CanonicalMonomial(tuple(n), tuple(m))

    # -- element constructors ---------------------------------------------
    def element(self, combo: Combo) -> "NCPoly":
        return NCPoly(self, combo)

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): ONE})

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def scalar(self, c) -> "NCPoly":
        c = QScalar._coerce(c)
        return NCPoly(self, {(): c} if c else {})

    def z(self, j: int, starred: bool = False) -> "NCPoly":
        return NCPoly(self, {(self.code(Letter(j, starred)),): ONE})

    def monomial(self, n: Sequence[int], m: Sequence[int], coeff=ONE) -> "NCPoly":
        mono = CanonicalMonomial(tuple(n), tuple(m))
        if len(mono.n) != self.N or len(mono.m) != self.N:
            raise ValueError("exponent vectors must have length N")
        if min(mono.n[-1], mono.m[-1]) != 0:
            raise ValueError("canonical monomials need min(n_N, m_N) = 0")
        return NCPoly(self, {self.word_of(mono): QScalar._coerce(coeff)})

    def normal_form(self, letters: Iterable[Letter]) -> "NCPoly":
        codes = tuple(self.code(Letter(*l)) for l in letters)
        return NCPoly(self, self.system.normal_form(codes))

    def build_A(self, j: int) -> "NCPoly":
        """``A_j = sum_{i <= j} z_i z_i*`` in canonical form (``A_0 = 0``)."""
        if not 0 <= j <= self.N:
            raise ValueError(f"A index {j} out of range 0..{self.N}")
        total = self.zero()
        for i in range(1, j + 1):
            total = total + self.normal_form([Letter(i), Letter(i, True)])
        return total


_ALGEBRAS: Dict[int, SphereAlgebra] = {}


def sphere(ell: int) -> SphereAlgebra:
    """Shared `SphereAlgebra` for ``ell``."""
    alg = _ALGEBRAS.get(ell)
    if alg is None:
        alg = _ALGEBRAS[ell] = SphereAlgebra(ell)
    return alg


class NCPoly:
    """Element of the sphere algebra as canonical word -> coefficient."""

    __slots__ = ("algebra", "_coeffs")

    def __init__(self, algebra: SphereAlgebra, coeffs: Combo):
        self.algebra = algebra
        self._coeffs: Combo = {w: c for w, c in coeffs.items() if not c.is_zero()}

    @property
    def coeffs(self) -> Combo:
        return dict(self._coeffs)

    def terms(self) -> Iterator[Tuple[CanonicalMonomial, QScalar]]:
        for w in sorted(self._coeffs, key=lambda w: (len(w), w)):
            yield self.algebra.monomial_of(w), self._coeffs[w]

    def words(self) -> Iterator[Tuple[Word, QScalar]]:
        for w in sorted(self._coeffs, key=lambda w: (len(w), w)):
            yield w, self._coeffs[w]

    def __len__(self):
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def degree(self) -> int:
        return max((len(w) for w in self._coeffs), default=0)

    def _check(self, other: "NCPoly"):
        if other.algebra.ell != self.algebra.ell:
            raise ValueError("signature mismatch between sphere elements")

    def _lift(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            self._check(other)
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
        return NCPoly(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.algebra, {w: -c for w, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            return mul(self, other)
        if isinstance(other, (int, QScalar)) or hasattr(other, "denominator"):
            c = QScalar._coerce(other)
            return NCPoly(self.algebra, {w: v * c for w, v in self._coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        result = self.algebra.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.algebra.ell == other.algebra.ell and self._coeffs == other._coeffs
        lifted = self._lift(other)
        if lifted is NotImplemented:
            return NotImplemented
        return self._coeffs == lifted._coeffs

    def __hash__(self):
        return hash((self.algebra.ell, frozenset(self._coeffs.items())))

    def map_coeffs(self, fn) -> "NCPoly":
        """Apply ``fn(monomial, coeff) -> QScalar`` termwise."""
        out = {}
        for w, c in self._coeffs.items():
            out[w] = fn(self.algebra.monomial_of(w), c)
        return NCPoly(self.algebra, out)

    def __repr__(self):
        return f"NCPoly({format_ncpoly(self)})"

    def __str__(self):
        return format_ncpoly(self)


def mul(a: NCPoly, b: NCPoly) -> NCPoly:
    if a.algebra.ell != b.algebra.ell:
        raise ValueError("signature mismatch between sphere elements")
    return NCPoly(a.algebra, a.algebra.system.multiply(a._coeffs, b._coeffs))


def star(a: NCPoly) -> NCPoly:
    """Conjugate-linear anti-involution (coefficients are real here)."""
    alg = a.algebra
    out: Combo = {}
    for w, c in a._coeffs.items():
        rev = tuple(alg.star_code(x) for x in reversed(w))
        for w2, c2 in alg.system.normal_form(rev).items():
            add_into(out, w2, c.star() * c2)
    return NCPoly(alg, out)


def normal_form(word: Iterable, ell: int) -> NCPoly:
    return sphere(ell).normal_form(word)


def build_A(j: int, ell: int) -> NCPoly:
    return sphere(ell).build_A(j)


def format_word(alg: SphereAlgebra, word: Word) -> str:
    if not word:
        return "1"
    parts = []
    i = 0
    while i < len(word):
        k = i
        while k < len(word) and word[k] == word[i]:
            k += 1
        text = str(alg.letter(word[i]))
        parts.append(text if k - i == 1 else f"{text}^{k - i}")
        i = k
    return "*".join(parts)


def format_term(coeff: QScalar, body: str) -> Tuple[bool, str]:
    """Sign and text for ``coeff * body`` in parser-compatible syntax."""
    from fractions import Fraction

    items = coeff.items()
    if len(items) == 1:
        (e, c), = items
        neg = c < 0
        a = Fraction(-c if neg else c)
        pieces = []
        if a != 1:
            pieces.append(str(a.numerator) if a.denominator == 1 else f"({a.numerator}/{a.denominator})")
        if e != 0:
            qtext = "q" if e == 1 else f"q^{e}"
            if pieces:
                pieces[-1] += qtext
            else:
                pieces.append(qtext)
        if body != "1" or not pieces:
            pieces.append(body)
        return neg, "*".join(pieces)
    inner = []
    for e, c in items:
        inner.append(format_term(QScalar({e: c}), "1"))
    text = "".join(
        (("-" if neg else "") if idx == 0 else (" - " if neg else " + ")) + t
        for idx, (neg, t) in enumerate(inner)
    )
    return False, f"({text})" + ("" if body == "1" else f"*{body}")


def format_combo(items: Iterable[Tuple[QScalar, str]]) -> str:
    out = []
    for coeff, body in items:
        neg, text = format_term(coeff, body)
        if not out:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out) if out else "0"


def format_ncpoly(x: NCPoly) -> str:
    return format_combo((c, format_word(x.algebra, w)) for w, c in x.words())
