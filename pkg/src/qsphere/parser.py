"""Expression syntax for sphere and matrix algebra elements.

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := "-" factor | scalar | atom ("^" uint)? | "(" expr ")" ("^" uint)?
    atom   := "z" uint "'"? | "A" uint | "u[" uint "," uint "]"
    scalar := ("(" int "/" uint ")" | int) ("q^" int)? | "q^" int | "q"

``z2'`` is the adjoint of ``z2``; ``A<k>`` expands to ``z1 z1' + ... + zk zk'``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .scalarq import QScalar


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")


class IndexRangeError(ParseError):
    pass


class MixedAlgebraError(ParseError):
    pass


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    value: Fraction
    qexp: int = 0


@dataclass(frozen=True)
class Atom:
    kind: str  # "z", "A" or "u"
    i: int
    j: int = 0
    starred: bool = False


@dataclass(frozen=True)
class Power:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Group:
    body: "Node"


@dataclass(frozen=True)
class Neg:
    body: "Node"


@dataclass(frozen=True)
class Product:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Sum:
    items: Tuple[Tuple[int, "Node"], ...]  # (+1 | -1, term); first sign is +1


Node = Union[Scalar, Atom, Power, Group, Neg, Product, Sum]


# -- lexer -----------------------------------------------------------------

TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<num>\d+)
      | (?P<z>z\d+'?)
      | (?P<A>A\d+)
      | (?P<u>u\[\s*\d+\s*,\s*\d+\s*\])
      | (?P<q>q)
      | (?P<op>[-+*^()/])
    )""",
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tok = m.group(kind)
        out.append(Token(tok if kind == "op" else kind, tok, start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


# -- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str) -> Token:
        t = self.tok
        if t.kind != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError(f"expected {want}, found {got}", t.pos)
        self.i += 1
        return t

    def expr(self) -> Node:
        items = [(1, self.term())]
        while self.tok.kind in ("+", "-"):
            sign = 1 if self.take(self.tok.kind).kind == "+" else -1
            items.append((sign, self.term()))
        return items[0][1] if len(items) == 1 else Sum(tuple(items))

    def term(self) -> Node:
        factors = [self.factor()]
        while self.tok.kind == "*":
            self.take("*")
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def uint(self) -> int:
        return int(self.take("num").text)

    def sint(self) -> int:
        if self.tok.kind == "-":
            self.take("-")
            return -self.uint()
        return self.uint()

    def qpart(self) -> int:
        self.take("q")
        if self.tok.kind == "^":
            self.take("^")
            return self.sint()
        return 1

    def _looks_like_fraction(self) -> bool:
        k = 1
        if self.peek(k).kind == "-":
            k += 1
        return (self.peek(k).kind == "num" and self.peek(k + 1).kind == "/"
                and self.peek(k + 2).kind == "num" and self.peek(k + 3).kind == ")")

    def power_suffix(self, base: Node) -> Node:
        if self.tok.kind == "^":
            self.take("^")
            return Power(base, self.uint())
        return base

    def factor(self) -> Node:
        t = self.tok
        if t.kind == "-":
            self.take("-")
            return Neg(self.factor())
        if t.kind == "num":
            value = Fraction(self.uint())
            qexp = self.qpart() if self.tok.kind == "q" else 0
            return Scalar(value, qexp)
        if t.kind == "q":
            return Scalar(Fraction(1), self.qpart())
        if t.kind == "(":
            if self._looks_like_fraction():
                self.take("(")
                num = self.sint()
                self.take("/")
                den_tok = self.tok
                den = self.uint()
                if den == 0:
                    raise ParseError("zero denominator", den_tok.pos)
                self.take(")")
                qexp = self.qpart() if self.tok.kind == "q" else 0
                return Scalar(Fraction(num, den), qexp)
            self.take("(")
            body = self.expr()
            self.take(")")
            return self.power_suffix(Group(body))
        if t.kind == "z":
            self.i += 1
            starred = t.text.endswith("'")
            idx = int(t.text[1:].rstrip("'"))
            return self.power_suffix(Atom("z", idx, 0, starred))
        if t.kind == "A":
            self.i += 1
            return self.power_suffix(Atom("A", int(t.text[1:])))
        if t.kind == "u":
            self.i += 1
            a, b = re.findall(r"\d+", t.text)
            return self.power_suffix(Atom("u", int(a), int(b)))
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {got}", t.pos)


def _atoms(node: Node):
    if isinstance(node, Atom):
        yield node
    elif isinstance(node, (Power,)):
        yield from _atoms(node.base)
    elif isinstance(node, (Group, Neg)):
        yield from _atoms(node.body)
    elif isinstance(node, Product):
        for f in node.factors:
            yield from _atoms(f)
    elif isinstance(node, Sum):
        for _, t in node.items:
            yield from _atoms(t)


def algebra_kind(node: Node) -> Optional[str]:
    """``"sphere"``, ``"matrix"`` or None for pure scalars."""
    kinds = {a.kind for a in _atoms(node)}
    if "u" in kinds and kinds & {"z", "A"}:
        raise MixedAlgebraError("cannot mix z/A atoms with u atoms in one expression")
    if "u" in kinds:
        return "matrix"
    if kinds:
        return "sphere"
    return None


def check_indices(node: Node, N: int) -> None:
    for a in _atoms(node):
        if a.kind == "z" and not 1 <= a.i <= N:
            raise IndexRangeError(f"z{a.i} out of range 1..{N}")
        if a.kind == "A" and not 0 <= a.i <= N:
            raise IndexRangeError(f"A{a.i} out of range 0..{N}")
        if a.kind == "u" and not (1 <= a.i <= N and 1 <= a.j <= N):
            raise IndexRangeError(f"u[{a.i},{a.j}] out of range 1..{N}")


def parse(text: str, N: int | None = None) -> Node:
    """Parse ``text``; with ``N`` given, also validate indices and mixing."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    p = _Parser(text)
    node = p.expr()
    p.take("end")
    algebra_kind(node)
    if N is not None:
        check_indices(node, N)
    return node


# -- printing --------------------------------------------------------------

def _scalar_text(s: Scalar) -> str:
    v, e = s.value, s.qexp
    qtext = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
    if v.denominator != 1:
        return f"({v.numerator}/{v.denominator}){qtext}"
    n = v.numerator
    if qtext and n == 1:
        return qtext
    if qtext and n == -1:
        return "-" + qtext
    return f"{n}{qtext}"


def to_text(node: Node) -> str:
    """Render in the input syntax (``parse(to_text(x))`` reprints identically)."""
    if isinstance(node, Scalar):
        return _scalar_text(node)
    if isinstance(node, Atom):
        if node.kind == "z":
            return f"z{node.i}" + ("'" if node.starred else "")
        if node.kind == "A":
            return f"A{node.i}"
        return f"u[{node.i},{node.j}]"
    if isinstance(node, Power):
        base = node.base
        inner = to_text(base) if isinstance(base, (Atom, Group)) else f"({to_text(base)})"
        return f"{inner}^{node.exp}"
    if isinstance(node, Group):
        return f"({to_text(node.body)})"
    if isinstance(node, Neg):
        body = node.body
        inner = to_text(body)
        if isinstance(body, (Sum, Product)):
            inner = f"({inner})"
        return "-" + inner
    if isinstance(node, Product):
        parts = []
        for f in node.factors:
            t = to_text(f)
            parts.append(f"({t})" if isinstance(f, (Sum, Product)) else t)
        return "*".join(parts)
    if isinstance(node, Sum):
        out = []
        for k, (sign, term) in enumerate(node.items):
            t = to_text(term)
            if isinstance(term, Sum):
                t = f"({t})"
            if k == 0:
                out.append(t if sign > 0 else f"-({t})")
            else:
                out.append((" + " if sign > 0 else " - ") + t)
        return "".join(out)
    raise TypeError(f"not an AST node: {node!r}")


# -- evaluation ------------------------------------------------------------

def evaluate(node: Node, algebra):
    """Evaluate against a `SphereAlgebra` or `MatrixAlgebra`."""
    from .qmatrix import MatrixAlgebra

    matrix = isinstance(algebra, MatrixAlgebra)

    def ev(n):
        if isinstance(n, Scalar):
            return algebra.scalar(QScalar({n.qexp: n.value}))
        if isinstance(n, Atom):
            if matrix:
                if n.kind != "u":
                    raise MixedAlgebraError(f"{to_text(n)} is not a matrix generator")
                return algebra.u(n.i, n.j)
            if n.kind == "u":
                raise MixedAlgebraError(f"{to_text(n)} is not a sphere generator")
            if n.kind == "A":
                return algebra.build_A(n.i)
            return algebra.z(n.i, n.starred)
        if isinstance(n, Power):
            return ev(n.base) ** n.exp
        if isinstance(n, Group):
            return ev(n.body)
        if isinstance(n, Neg):
            return -ev(n.body)
        if isinstance(n, Product):
            out = ev(n.factors[0])
            for f in n.factors[1:]:
                out = out * ev(f)
            return out
        if isinstance(n, Sum):
            out = algebra.zero()
            for sign, t in n.items:
                out = out + ev(t) if sign > 0 else out - ev(t)
            return out
        raise TypeError(f"not an AST node: {n!r}")

    check_indices(node, algebra.N)
    return ev(node)
