import io
import json
import random
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest

from qsphere.cli import run
from qsphere.parser import (
    Atom, Group, IndexRangeError, MixedAlgebraError, Neg, ParseError, Power, Product, Scalar,
    Sum, evaluate, parse, to_text,
)
from qsphere.qmatrix import matrix_algebra
from qsphere.scalarq import QScalar
from qsphere.sphere import sphere


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


# -- parser ------------------------------------------------------------------

def test_parse_examples():
    alg = sphere(1)
    x = evaluate(parse("z1*z2' - q^2*z2'*z1"), alg)
    assert x == alg.z(1) * alg.z(2, True) * QScalar({0: 1, 3: -1})
    assert str(x) == "(1 - q^3)*z1*z2'"
    assert evaluate(parse("A1^2"), alg) == (alg.z(1) * alg.z(1, True)) ** 2
    m = evaluate(parse("u[1,1]*u[2,2]"), matrix_algebra(2))
    assert str(m) == "u[1,1]*u[2,2]"


def test_scalars():
    alg = sphere(1)
    assert evaluate(parse("(1/2)q^-1"), alg) == alg.scalar(QScalar({-1: Fraction(1, 2)}))
    assert evaluate(parse("(-3/4)"), alg) == alg.scalar(Fraction(-3, 4))
    assert evaluate(parse("3q^2 - q"), alg) == alg.scalar(QScalar({2: 3, 1: -1}))


def test_precedence():
    alg = sphere(1)
    a, b = alg.z(1), alg.z(2)
    assert evaluate(parse("z1 + z2*z1^2"), alg) == a + b * a * a
    assert evaluate(parse("(z1 + z2)^2"), alg) == (a + b) * (a + b)
    assert evaluate(parse("-z1 - -z2"), alg) == b - a


@pytest.mark.parametrize("text, pos", [("z1 +", 4), ("z1 $ z2", 3), ("(z1", 3), ("", 0),
                                       ("z1 z2", 3), ("(1/0)", 3)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position == pos


def test_index_and_mixing_errors():
    with pytest.raises(IndexRangeError):
        parse("z3", N=2)
    with pytest.raises(IndexRangeError):
        parse("u[1,4]", N=3)
    parse("A0 + A2", N=2)
    with pytest.raises(MixedAlgebraError):
        parse("z1*u[1,1]")


def random_ast(rnd, kinds="zAS", depth=0):
    roll = rnd.random()
    if depth > 3 or roll < 0.35:
        kind = rnd.choice(kinds)
        if kind == "z":
            return Atom("z", rnd.randint(1, 3), 0, rnd.random() < 0.5)
        if kind == "A":
            return Atom("A", rnd.randint(0, 3))
        if kind == "u":
            return Atom("u", rnd.randint(1, 3), rnd.randint(1, 3))
        return Scalar(Fraction(rnd.randint(-5, 5), rnd.choice([1, 1, 2, 7])), rnd.randint(-2, 3))
    if roll < 0.5:
        return Power(random_ast(rnd, kinds, depth + 1), rnd.randint(0, 3))
    if roll < 0.6:
        return Group(random_ast(rnd, kinds, depth + 1))
    if roll < 0.7:
        return Neg(random_ast(rnd, kinds, depth + 1))
    if roll < 0.85:
        return Product(tuple(random_ast(rnd, kinds, depth + 1) for _ in range(rnd.randint(2, 3))))
    items = [(1, random_ast(rnd, kinds, depth + 1))]
    items += [(rnd.choice([1, -1]), random_ast(rnd, kinds, depth + 1)) for _ in range(rnd.randint(1, 2))]
    return Sum(tuple(items))


def test_pretty_print_round_trip():
    rnd = random.Random(11)
    for k in range(500):
        text = to_text(random_ast(rnd, "zAS" if k % 2 else "uS"))
        assert to_text(parse(text)) == text, text


def test_round_trip_preserves_value():
    rnd = random.Random(5)
    alg = sphere(2)
    done = 0
    while done < 100:
        text = to_text(random_ast(rnd))
        try:
            first = evaluate(parse(text), alg)
        except (IndexRangeError, MixedAlgebraError):
            continue
        assert evaluate(parse(to_text(parse(text))), alg) == first
        done += 1


# -- CLI ---------------------------------------------------------------------

def test_haar_exact_and_at_q():
    assert cli("haar", "--ell", "1", "--exact", "z1*z1'") == (0, "(1-q^2)/(1-q^4)\n", "")
    assert cli("haar", "--ell", "1", "--at-q", "1/2", "z1*z1'")[:2] == (0, "4/5\n")
    code, out, _ = cli("haar", "--N", "3", "--at-q", "0.5", "--prec", "12", "z1*z1'")
    assert code == 0 and out.splitlines() == ["16/21", "~ 0.761904761905"]


def test_curve_command():
    code, out, _ = cli("curve", "--ell", "1", "--grid", "0.9:0.999:10", "--include-1", "z1*z1'")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 11
    assert lines[0].split()[:2] == ["9/10", "100/181"]
    assert lines[-1].split()[:2] == ["1", "1/2"]


@pytest.mark.parametrize("argv, expected", [
    (("normalize", "--ell", "1", "z2'*z2"), "1 - q^2*z1*z1'"),
    (("expect", "--ell", "1", "z1 + z1*z1'"), "z1*z1'"),
    (("theta", "--ell", "1", "z2'"), "q^-2*z2'"),
    (("simplex", "--ell", "1", "z1*z2*z2'*z1'"), "A1 - A1^2"),
    (("qminor", "--N", "2", "--rows", "1,2", "--cols", "1,2"), "u[1,1]*u[2,2] - q*u[1,2]*u[2,1]"),
    (("central-check", "--N", "2"), "true"),
    (("laplace-check", "--N", "3"), "true"),
])
def test_text_commands(argv, expected):
    code, out, _ = cli(*argv)
    assert code == 0 and out.strip() == expected


def test_repcheck():
    code, out, _ = cli("repcheck", "--ell", "2", "--q", "0.7", "--dim", "16", "--torus", "4",
                       "z1*z2*z2'*z1'")
    assert code == 0 and out.strip().endswith("ok")
    # with d = 3 there is no interior for a degree-6 element at all
    assert cli("repcheck", "--ell", "1", "--q", "0.7", "--dim", "3", "z1*z2^2*z2'^2*z1'")[0] == 3


@pytest.mark.parametrize("argv, code", [
    (("normalize", "z1 +"), 2),
    (("normalize", "z1*u[1,1]"), 2),
    (("normalize", "--ell", "1", "z3"), 3),
    (("haar", "--at-q", "2", "z1"), 3),
    (("haar", "--at-q", "0", "z1"), 3),
    (("haar", "--ell", "0", "z1"), 3),
    (("repcheck", "--q", "1", "z1*z1'"), 3),
    (("curve", "--grid", "0.5:1.5:3", "z1"), 3),
    (("qminor", "--rows", "1,2", "--cols", "1"), 3),
    (("simplex", "z1"), 3),
    (("central-check", "--N", "5"), 3),
    (("bogus",), 2),
])
def test_exit_codes(argv, code):
    assert cli(*argv)[0] == code


def test_failed_check_exit_code(monkeypatch):
    import qsphere.cli as cli_mod
    from qsphere.qmatrix import check_central

    broken = lambda N: check_central(N, families={"row", "column", "commute"})
    monkeypatch.setattr(cli_mod, "check_central", broken)
    code, out, _ = cli("central-check", "--N", "2")
    assert code == 4 and out.startswith("false at")


QRAT = {
    "type": "object", "required": ["num", "den"],
    "properties": {k: {"type": "array", "items": {
        "type": "array", "minItems": 2, "maxItems": 2,
        "prefixItems": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+/\d+$"}],
    }} for k in ("num", "den")},
}
SCHEMA = {
    "type": "object",
    "required": ["signature", "input", "result"],
    "properties": {
        "signature": {"type": "object", "required": ["ell", "N"]},
        "result": {"anyOf": [
            QRAT,
            {"type": "array", "items": {
                "type": "object", "required": ["coeff", "word"],
                "properties": {"coeff": QRAT, "word": {"type": "array", "items": {"type": "string"}}},
            }},
            {"type": "object", "required": ["ok"]},
            {"type": "object", "required": ["q", "value"]},
            {"type": "array", "items": {"type": "object", "required": ["q", "value"]}},
        ]},
    },
}


@pytest.mark.parametrize("argv", [
    ("haar", "--ell", "2", "z1*z1' + z2^2*z2'^2"),
    ("haar", "--at-q", "1/3", "z1*z1'"),
    ("normalize", "--ell", "2", "z3'*z3 + (1/2)q^-1*z1"),
    ("simplex", "--ell", "2", "z1*z1'*z2*z2'"),
    ("qminor", "--N", "3", "--rows", "1,3", "--cols", "2,3"),
    ("central-check", "--N", "2"),
    ("curve", "--grid", "1/2:1:3", "z1*z1'"),
])
def test_json_schema(argv):
    code, out, _ = cli(*argv, "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.Draft202012Validator(SCHEMA).validate(doc)


def test_json_words_use_input_letters():
    doc = json.loads(cli("normalize", "--json", "--ell", "1", "z2'*z2")[1])
    assert [t["word"] for t in doc["result"]] == [[], ["z1", "z1'"]]
    assert doc["result"][1]["coeff"] == {"num": [[2, "-1/1"]], "den": [[0, "1/1"]]}


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qsphere", "haar", "--at-q", "1/2", "z1*z1'"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "4/5\n"
