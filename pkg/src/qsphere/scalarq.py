"""Exact coefficient arithmetic in the deformation parameter ``q``.

`QScalar` is a Laurent polynomial in ``q`` with rational coefficients and
`QRat` is a reduced quotient of two of them.  Both are immutable.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import mpmath

__all__ = [
    "QScalar",
    "QRat",
    "PoleError",
    "qint",
    "qpow",
    "one_minus_q2",
    "rat_eval",
    "limit_q1",
    "as_fraction",
    "format_qscalar",
    "format_pochhammer",
    "pochhammer_form",
]

Number = Union[int, Fraction]


class PoleError(ZeroDivisionError):
    """The reduced denominator vanishes at the requested point."""


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings and ``"a/b"`` strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class QScalar:
    """Laurent polynomial in q, stored as ``{exponent: coefficient}``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | None = None):
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    clean[int(e)] = _clean(c)
        self._terms: Dict[int, Number] = clean
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c: Number) -> "QScalar":
        return cls({0: c})

    @classmethod
    def monomial(cls, exp: int, c: Number = 1) -> "QScalar":
        return cls({exp: c})

    @classmethod
    def _raw(cls, terms: Dict[int, Number]) -> "QScalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Dict[int, Number]:
        return dict(self._terms)

    def items(self) -> Iterable[Tuple[int, Number]]:
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def min_exp(self) -> int:
        return min(self._terms)

    def max_exp(self) -> int:
        return max(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def constant(self) -> Number:
        return self._terms.get(0, 0)

    def leading(self) -> Number:
        return self._terms[max(self._terms)]

    # -- ring operations --------------------------------------------------
    @staticmethod
    def _coerce(other) -> "QScalar":
        if isinstance(other, QScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return QScalar.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return QScalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return QScalar._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return QScalar._raw({})
        if len(b) == 1:
            (eb, cb), = b.items()
            return QScalar._raw({e + eb: _clean(c * cb) for e, c in a.items()})
        if len(a) == 1:
            (ea, ca), = a.items()
            return QScalar._raw({e + ea: _clean(c * ca) for e, c in b.items()})
        out: Dict[int, Number] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                out[e] = out.get(e, 0) + ca * cb
        return QScalar({e: c for e, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self._terms.items()
            return QScalar({e * k: Fraction(c) ** k})
        result = QScalar.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "QScalar":
        """Multiply by ``q**k``."""
        return QScalar._raw({e + k: c for e, c in self._terms.items()})

    def scale(self, c: Number) -> "QScalar":
        return QScalar({e: v * c for e, v in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QScalar.const(other)
        if not isinstance(other, QScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation -------------------------------------------------------
    def __call__(self, q0):
        """Evaluate at ``q0``; exact for ints and Fractions."""
        if isinstance(q0, (int, Fraction)):
            q0 = Fraction(q0)
            total = Fraction(0)
            for e, c in self._terms.items():
                total += c * q0 ** e
            return total
        return sum((c * q0 ** e for e, c in self._terms.items()), 0 * q0)

    def at_one(self) -> Number:
        return sum(self._terms.values(), 0)

    def star(self) -> "QScalar":
        # q is real, coefficients are rational: conjugation is trivial
        return self

    # -- dense polynomial views (used by gcd) -----------------------------
    def to_dense(self) -> Tuple[int, List[Fraction]]:
        """Return ``(shift, coeffs)`` with ``self == q**shift * sum(c_i q**i)``."""
        if not self._terms:
            return 0, []
        lo, hi = self.min_exp(), self.max_exp()
        coeffs = [Fraction(self._terms.get(e, 0)) for e in range(lo, hi + 1)]
        return lo, coeffs

    @classmethod
    def from_dense(cls, coeffs: List[Number], shift: int = 0) -> "QScalar":
        return cls({i + shift: c for i, c in enumerate(coeffs)})

    # -- printing ---------------------------------------------------------
    def __repr__(self):
        return f"QScalar({format_qscalar(self)})"

    def __str__(self):
        return format_qscalar(self)


def _fmt_coeff(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def format_qscalar(x: QScalar) -> str:
    """Ascending-power text form, e.g. ``1-q^2+(1/2)q^4``."""
    if x.is_zero():
        return "0"
    parts = []
    for e, c in x.items():
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = _fmt_coeff(a)
        else:
            qpart = "q" if e == 1 else f"q^{e}"
            body = qpart if a == 1 else f"{_fmt_coeff(a)}{qpart}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("-" if neg else "+") + body)
    return "".join(parts)


def qpow(k: int, c: Number = 1) -> QScalar:
    return QScalar.monomial(k, c)


def qint(n: int) -> QScalar:
    """The q^2-integer ``1 + q^2 + ... + q^(2(n-1))``."""
    if n < 0:
        raise ValueError("qint needs n >= 0")
    return QScalar({2 * i: 1 for i in range(n)})


def one_minus_q2(k: int) -> QScalar:
    """``1 - q^(2k)``."""
    if k == 0:
        return QScalar()
    return QScalar({0: 1, 2 * k: -1})


# ---------------------------------------------------------------------------
# dense polynomial helpers over Q (lists, lowest degree first)


def _trim(p: List[Fraction]) -> List[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _divmod(a: List[Fraction], b: List[Fraction]):
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(a) - 1 < db:
        return [], _trim(a)
    quo = [Fraction(0)] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c == 0:
            continue
        f = c / lead
        quo[i - db] = f
        for j in range(db + 1):
            a[i - db + j] -= f * b[j]
    return _trim(quo), _trim(a[:db])


def _monic(p: List[Fraction]) -> List[Fraction]:
    lead = p[-1]
    return [c / lead for c in p]


def poly_gcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    """Monic gcd of two dense polynomials over Q (Euclid)."""
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, (_monic(r) if r else r)
    return _monic(a) if a else [Fraction(1)]


def poly_exact_div(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    q, r = _divmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


class QRat:
    """Reduced ratio ``num/den`` of Laurent polynomials in q.

    The denominator is stored as an ordinary polynomial (exponents >= 0,
    constant term nonzero) with leading coefficient 1, and shares no
    factor with the numerator, so equality is structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _reduced: bool = False):
        num = QScalar._coerce(num)
        den = QScalar.const(1) if den is None else QScalar._coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("QRat with zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num: QScalar = num
        self.den: QScalar = den

    @classmethod
    def coerce(cls, x) -> "QRat":
        if isinstance(x, QRat):
            return x
        return cls(x)

    def __add__(self, other):
        other = QRat.coerce(other)
        if self.den == other.den:
            return QRat(self.num + other.num, self.den)
        return QRat(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return QRat(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-QRat.coerce(other))

    def __rsub__(self, other):
        return QRat.coerce(other) - self

    def __mul__(self, other):
        other = QRat.coerce(other)
        return QRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QRat.coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero QRat")
        return QRat(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return QRat.coerce(other) / self

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QScalar)):
            other = QRat(other)
        if not isinstance(other, QRat):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, q0):
        return rat_eval(self, q0)

    def __repr__(self):
        return f"QRat({self})"

    def __str__(self):
        if self.den == QScalar.const(1):
            return format_qscalar(self.num)
        return f"{_paren(self.num)}/{_paren(self.den)}"


def _paren(x: QScalar) -> str:
    text = format_qscalar(x)
    return f"({text})" if len(x.terms) > 1 else text


def _reduce(num: QScalar, den: QScalar) -> Tuple[QScalar, QScalar]:
    if num.is_zero():
        return QScalar(), QScalar.const(1)
    ns, nd = num.to_dense()
    ds, dd = den.to_dense()
    shift = ns - ds
    if len(dd) > 1 and len(nd) > 1:
        g = poly_gcd(nd, dd)
        if len(g) > 1:
            nd = poly_exact_div(nd, g)
            dd = poly_exact_div(dd, g)
    lead = dd[-1]
    nd = [c / lead for c in nd]
    dd = [c / lead for c in dd]
    return QScalar.from_dense(nd, shift), QScalar.from_dense(dd)


def rat_eval(x, q0, precision: int = 30):
    """Value of ``x`` at ``q = q0``.

    Rational ``q0`` (int, Fraction, or a string such as ``"1/2"``) gives an
    exact Fraction.  Anything else (float, mpmath number) is evaluated with
    mpmath at ``precision`` decimal digits.
    """
    x = QRat.coerce(x)
    exact = isinstance(q0, (int, Fraction, str))
    if exact:
        q0 = as_fraction(q0)
        if not (0 < q0 <= 1):
            raise ValueError(f"q0 must lie in (0, 1], got {q0}")
        d = x.den(q0)
        if d == 0:
            raise PoleError(f"denominator vanishes at q = {q0}")
        return x.num(q0) / d
    with mpmath.workdps(precision + 10):
        qv = mpmath.mpf(q0)
        if not (0 < qv <= 1):
            raise ValueError(f"q0 must lie in (0, 1], got {q0}")
        d = x.den(qv)
        if d == 0:
            raise PoleError(f"denominator vanishes at q = {q0}")
        val = x.num(qv) / d
    with mpmath.workdps(precision):
        return +val


def limit_q1(x) -> Fraction:
    """Exact value at q = 1 of the reduced ratio."""
    x = QRat.coerce(x)
    d = x.den.at_one()
    if d == 0:
        raise PoleError("denominator vanishes at q = 1")
    return Fraction(x.num.at_one()) / d


# ---------------------------------------------------------------------------
# display of ratios over products of (1 - q^(2k))


def _cyclotomic(d: int, _cache: Dict[int, List[Fraction]] = {}) -> List[Fraction]:
    if d in _cache:
        return _cache[d]
    p = [Fraction(-1)] + [Fraction(0)] * (d - 1) + [Fraction(1)]
    for e in range(1, d):
        if d % e == 0:
            p = poly_exact_div(p, _cyclotomic(e))
    _cache[d] = p
    return p


def _totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def pochhammer_form(x: QRat) -> Tuple[QScalar, List[int]] | None:
    """Write ``x`` as ``num' / prod_k (1 - q^(2k))``.

    Returns ``(num', [k...])`` or None when the reduced denominator is
    not a product of cyclotomic factors.
    """
    x = QRat.coerce(x)
    _, rem = x.den.to_dense()
    extra = [Fraction(1)]
    ks: List[int] = []
    while len(rem) > 1:
        deg = len(rem) - 1
        found = None
        for d in range(2 * deg * deg + 2, 0, -1):
            if _totient(d) > deg:
                continue
            _, r = _divmod(rem, _cyclotomic(d))
            if not r:
                found = d
                break
        if found is None:
            return None
        k = found // 2 if found % 2 == 0 else found
        full = one_minus_q2(k)
        _, fd = full.to_dense()
        g = poly_gcd(rem, fd)
        rem = poly_exact_div(rem, g)
        cof = poly_exact_div(fd, g)
        extra = _mul_dense(extra, cof)
        ks.append(k)
    # rem is now a nonzero constant
    c = rem[0] if rem else Fraction(1)
    num = x.num * QScalar.from_dense(extra)
    num = num.scale(Fraction(1) / c)
    return num, sorted(ks)


def _mul_dense(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def format_pochhammer(x: QRat) -> str:
    """Human form such as ``(1-q^2)/(1-q^4)``; falls back to ``str(x)``."""
    x = QRat.coerce(x)
    if x.den == QScalar.const(1):
        return format_qscalar(x.num)
    form = pochhammer_form(x)
    if form is None:
        return str(x)
    num, ks = form
    den = "".join(f"(1-q^{2 * k})" for k in ks)
    return f"{_paren(num)}/{den}"
