"""Haar state on the quantum sphere.

The pipeline is ``x -> expectation(x) -> simplex_reduce -> APoly`` followed
by the closed form on products of the central elements
``A_j = z_1 z_1* + ... + z_j z_j*``::

    h(A_1^{m_1} ... A_l^{m_l}) = prod_k (1 - q^{2k}) / (1 - q^{2(k + m_1 + ... + m_k)})

`haar_numeric` is the independent route: it sums the reduced polynomial
against the discrete probability measure on the grid ``N_0^l``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .scalarq import QRat, QScalar, as_fraction, limit_q1, one_minus_q2, qint, qpow, rat_eval
from .sphere import NCPoly, SphereAlgebra, sphere

Exps = Tuple[int, ...]


class PreconditionError(ValueError):
    pass


class ToleranceError(RuntimeError):
    """Requested accuracy needs more grid points than the configured cap."""


class APoly:
    """Commutative polynomial ``sum c_m A_1^{m_1} ... A_l^{m_l}``."""

    __slots__ = ("ell", "_coeffs")

    def __init__(self, ell: int, coeffs: Dict[Exps, QScalar] | None = None):
        self.ell = ell
        self._coeffs = {}
        for m, c in (coeffs or {}).items():
            if len(m) != ell:
                raise ValueError("exponent vector has wrong length")
            c = QScalar._coerce(c)
            if not c.is_zero():
                self._coeffs[tuple(m)] = c

    @classmethod
    def one(cls, ell: int) -> "APoly":
        return cls(ell, {(0,) * ell: QScalar.const(1)})

    @classmethod
    def gen(cls, ell: int, j: int) -> "APoly":
        """``A_j`` with ``A_0 = 0`` and ``A_{l+1} = 1``."""
        if j == 0:
            return cls(ell)
        if j == ell + 1:
            return cls.one(ell)
        if not 1 <= j <= ell:
            raise ValueError(f"A index {j} out of range")
        m = [0] * ell
        m[j - 1] = 1
        return cls(ell, {tuple(m): QScalar.const(1)})

    @property
    def coeffs(self) -> Dict[Exps, QScalar]:
        return dict(self._coeffs)

    def items(self):
        return sorted(self._coeffs.items())

    def is_zero(self) -> bool:
        return not self._coeffs

    def __add__(self, other: "APoly") -> "APoly":
        out = dict(self._coeffs)
        for m, c in other._coeffs.items():
            out[m] = out[m] + c if m in out else c
        return APoly(self.ell, out)

    def __neg__(self):
        return APoly(self.ell, {m: -c for m, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, APoly):
            out: Dict[Exps, QScalar] = {}
            for ma, ca in self._coeffs.items():
                for mb, cb in other._coeffs.items():
                    m = tuple(a + b for a, b in zip(ma, mb))
                    out[m] = out[m] + ca * cb if m in out else ca * cb
            return APoly(self.ell, out)
        c = QScalar._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return APoly(self.ell, {m: v * c for m, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = APoly.one(self.ell)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, APoly):
            return NotImplemented
        return self.ell == other.ell and self._coeffs == other._coeffs

    def __repr__(self):
        return f"APoly({self})"

    def __str__(self):
        from .sphere import format_combo

        def body(m):
            parts = []
            for j, e in enumerate(m, start=1):
                if e:
                    parts.append(f"A{j}" if e == 1 else f"A{j}^{e}")
            return "*".join(parts) if parts else "1"

        return format_combo((c, body(m)) for m, c in self.items())

    def to_ncpoly(self, alg: SphereAlgebra | None = None) -> NCPoly:
        """Expand back into the sphere algebra through `build_A`."""
        alg = alg or sphere(self.ell)
        gens = [alg.build_A(j) for j in range(1, self.ell + 1)]
        total = alg.zero()
        for m, c in self._coeffs.items():
            term = alg.scalar(c)
            for g, e in zip(gens, m):
                for _ in range(e):
                    term = term * g
            total = total + term
        return total

    def evaluate(self, a_values: Sequence, q0) -> float:
        """Value with ``A_j = a_values[j-1]`` and coefficients at ``q0``."""
        total = 0
        for m, c in self._coeffs.items():
            term = c(q0)
            for a, e in zip(a_values, m):
                term = term * a ** e
            total = total + term
        return total


# ---------------------------------------------------------------------------
# conditional expectation, modular automorphism, simplex reduction


def expectation(x: NCPoly) -> NCPoly:
    """Keep the canonical monomials with equal exponent vectors."""
    alg = x.algebra
    keep = {w: c for w, c in x.coeffs.items() if alg.monomial_of(w).is_matched()}
    return alg.element(keep)


def theta_weight(n: Sequence[int], m: Sequence[int]) -> int:
    """Exponent of q by which theta scales a monomial."""
    return 2 * sum(j * (a - b) for j, (a, b) in enumerate(zip(n, m)))


def theta(x: NCPoly) -> NCPoly:
    """Modular automorphism: ``z_j -> q^{2(j-1)} z_j``, ``z_j* -> q^{-2(j-1)} z_j*``."""
    return x.map_coeffs(lambda mono, c: c.shift(theta_weight(mono.n, mono.m)))


def _block(ell: int, k: int, a: int) -> APoly:
    # z_k^a (z_k*)^a = prod_{r<a} (A_k - q^{-2r} A_{k-1})
    out = APoly.one(ell)
    Ak = APoly.gen(ell, k)
    Ak1 = APoly.gen(ell, k - 1)
    for r in range(a):
        out = out * (Ak - Ak1 * qpow(-2 * r))
    return out


def simplex_reduce(x: NCPoly) -> APoly:
    """Rewrite a diagonal element as a polynomial in ``A_1..A_l``."""
    alg = x.algebra
    ell = alg.ell
    total = APoly(ell)
    for mono, c in x.terms():
        if not mono.is_matched():
            raise PreconditionError(f"simplex_reduce needs matched exponents, got {mono}")
        term = APoly.one(ell) * c
        for k in range(1, ell + 1):
            if mono.n[k - 1]:
                term = term * _block(ell, k, mono.n[k - 1])
        total = total + term
    return total


# ---------------------------------------------------------------------------
# exact Haar values


def _haar_A_parts(m: Sequence[int]) -> Tuple[QScalar, Counter]:
    """Numerator and denominator multiset ``{K: count}`` of qint(K) factors."""
    num = QScalar.const(1)
    den: Counter = Counter()
    s = 0
    for k, mk in enumerate(m, start=1):
        s += mk
        if s:
            num = num * qint(k)
            den[k + s] += 1
    return num, den


def haar_A(m: Sequence[int]) -> QRat:
    """``h(A^m) = prod_k qint(k) / qint(k + m_1 + ... + m_k)``."""
    if any(e < 0 for e in m):
        raise ValueError("exponents must be nonnegative")
    num, den = _haar_A_parts(m)
    d = QScalar.const(1)
    for K, cnt in den.items():
        d = d * qint(K) ** cnt
    return QRat(num, d)


def haar_apoly(p: APoly) -> QRat:
    """Linear extension of `haar_A`, summed over a common denominator."""
    parts = []
    common: Counter = Counter()
    for m, c in p.items():
        num, den = _haar_A_parts(m)
        parts.append((c * num, den))
        common |= den
    if not parts:
        return QRat(0)
    total = QScalar()
    for num, den in parts:
        for K, cnt in (common - den).items():
            num = num * qint(K) ** cnt
        total = total + num
    d = QScalar.const(1)
    for K, cnt in common.items():
        d = d * qint(K) ** cnt
    return QRat(total, d)


def haar(x: NCPoly) -> QRat:
    return haar_apoly(simplex_reduce(expectation(x)))


def haar_classical(m: Sequence[int]) -> Fraction:
    """``l! * prod_k 1/(k + m_1 + ... + m_k)``, the q = 1 value of ``h(A^m)``."""
    out = Fraction(math.factorial(len(m)))
    s = 0
    for k, mk in enumerate(m, start=1):
        s += mk
        out /= k + s
    return out


# ---------------------------------------------------------------------------
# the discrete measure


def measure_weight(n: Sequence[int]) -> QScalar:
    """Exact mass of the grid point ``n``."""
    ell = len(n)
    N = ell + 1
    out = QScalar.const(1)
    for k, nk in enumerate(n, start=1):
        if nk < 0:
            raise ValueError("grid index must be nonnegative")
        out = out * one_minus_q2(k) * qpow(2 * (N - k) * nk)
    return out


def measure_mass(ell: int) -> QRat:
    """Total mass, summing each coordinate's geometric series exactly.

    The ratio of each series is read off `measure_weight` itself.
    """
    zero = (0,) * ell
    base = measure_weight(zero)
    total = QRat(base)
    for k in range(ell):
        e = [0] * ell
        e[k] = 1
        step = measure_weight(e)
        # step = base * ratio with ratio a pure power of q
        ratio = QRat(step, base)
        total = total / (1 - ratio)
    return total


def lambda_point(n: Sequence[int], q0) -> Tuple:
    """Coordinates of the atom indexed by ``n`` (values of ``z_j z_j*``)."""
    ell = len(n)
    exact = isinstance(q0, (int, Fraction, str))
    q0 = as_fraction(q0) if exact else float(q0)
    if not 0 < q0 < 1:
        raise ValueError("q0 must lie in (0, 1)")
    q2 = q0 * q0
    pts = [q2 ** sum(n)]
    for t in range(2, ell + 1):
        head = sum(n[: ell - t + 1])
        pts.append(q2 ** head * (1 - q2 ** n[ell - t + 1]))
    return tuple(pts)


def a_eigenvalue(j: int, n: Sequence[int]) -> QScalar:
    """Eigenvalue of ``A_j`` on the grid point ``n``: ``q^{2(n_1+...+n_{N-j})}``."""
    ell = len(n)
    N = ell + 1
    if not 1 <= j <= N:
        raise ValueError(f"A index {j} out of range 1..{N}")
    return qpow(2 * sum(n[: N - j]))


@dataclass(frozen=True)
class NumericHaar:
    value: float
    bound: float
    tail_bound: float
    box: Tuple[int, ...]


def haar_numeric(x, q0, tol: float = 1e-10, max_points: int = 5_000_000) -> NumericHaar:
    """Sum the reduced polynomial against the measure on a finite box.

    The box ``0 <= n_k <= T_k`` is chosen so that the exact measure of its
    complement times ``sum |c_m(q0)|`` (a bound for the polynomial on
    ``[0,1]^l``) stays below ``tol``.  ``bound`` adds a float rounding
    allowance to that tail bound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = x if isinstance(x, APoly) else simplex_reduce(expectation(x))
    ell = p.ell
    N = ell + 1
    exact = isinstance(q0, (int, Fraction, str))
    qf = as_fraction(q0) if exact else q0
    if not 0 < qf < 1:
        raise ValueError("q0 must lie in (0, 1)")
    coeffs = [(m, float(c(qf))) for m, c in p.items()]
    sup = sum(abs(c) for _, c in coeffs)
    ratios = [qf ** (2 * (N - k)) for k in range(1, ell + 1)]
    if sup == 0:
        return NumericHaar(0.0, 0.0, 0.0, (0,) * ell)
    target = tol / (2 * ell * sup)
    box = []
    for r in ratios:
        # r^(T+1) <= target
        T = max(0, math.ceil(math.log(target) / math.log(float(r))) - 1)
        box.append(T)
    npts = math.prod(T + 1 for T in box)
    if npts > max_points:
        raise ToleranceError(f"tolerance {tol} needs {npts} grid points (cap {max_points})")
    inside = 1
    for r, T in zip(ratios, box):
        inside *= 1 - r ** (T + 1)
    tail = float(1 - inside) * sup

    q = float(qf)
    q2 = q * q
    axes = np.meshgrid(*[np.arange(T + 1, dtype=float) for T in box], indexing="ij")
    csum = []
    acc = np.zeros_like(axes[0])
    for ax in axes:
        acc = acc + ax
        csum.append(acc)
    # A_j = q^{2(n_1+..+n_{N-j})}
    a_vals = [q2 ** csum[N - j - 1] for j in range(1, ell + 1)]
    weight = np.ones_like(axes[0])
    for k, ax in enumerate(axes, start=1):
        weight = weight * (1 - q2 ** k) * q2 ** ((N - k) * ax)
    poly = np.zeros_like(axes[0])
    for m, c in coeffs:
        term = np.full_like(axes[0], c)
        for a, e in zip(a_vals, m):
            if e:
                term = term * a ** e
        poly = poly + term
    value = math.fsum((poly * weight).ravel())
    rounding = 8 * np.finfo(float).eps * sup * (1 + len(coeffs))
    return NumericHaar(value, float(tail + rounding), tail, tuple(box))


def haar_curve(x: NCPoly, grid: Iterable) -> List[Tuple[Fraction, Fraction]]:
    """Exact Haar values along a grid in (0, 1]; q = 1 uses the limit."""
    exact = haar(x)
    out = []
    for g in grid:
        qv = as_fraction(g)
        if not 0 < qv <= 1:
            raise ValueError(f"grid value {g} outside (0, 1]")
        if qv == 1:
            out.append((qv, limit_q1(exact)))
        else:
            out.append((qv, rat_eval(exact, qv)))
    return out
