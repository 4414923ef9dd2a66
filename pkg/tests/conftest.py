import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from qsphere.scalarq import QScalar
from qsphere.sphere import sphere

settings.register_profile(
    "repo", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def random_scalar(rnd, max_terms=2, exp_range=3):
    terms = {}
    for _ in range(rnd.randint(1, max_terms)):
        terms[rnd.randint(-exp_range, exp_range)] = rnd.choice([-3, -2, -1, 1, 2, 3])
    return QScalar(terms)


def random_word(rnd, ell, max_len):
    N = ell + 1
    return [(rnd.randint(1, N), rnd.random() < 0.5) for _ in range(rnd.randint(0, max_len))]


def random_poly(rnd, ell, max_deg=4, max_terms=3):
    """Sum of a few scaled random words, already normal ordered."""
    alg = sphere(ell)
    out = alg.zero()
    for _ in range(rnd.randint(1, max_terms)):
        w = alg.one()
        for j, s in random_word(rnd, ell, max_deg):
            w = w * alg.z(j, s)
        out = out + w * random_scalar(rnd)
    return out


def random_matched(rnd, ell, max_deg):
    """Random canonical monomial with E(x) = x, total degree <= max_deg."""
    # n == m and min(n_N, m_N) = 0 force the z_N exponent to vanish
    n = [0] * (ell + 1)
    for _ in range(rnd.randint(0, max_deg // 2)):
        n[rnd.randrange(ell)] += 1
    return sphere(ell).monomial(n, n)


@pytest.fixture
def rnd():
    return random.Random(20261015)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
