"""Shared fixtures: the translated cubic Kolmogorov family and its Lyapunov
constants, computed once per session."""

import pytest
from gmpy2 import mpq

from lyap.centers import translated_cubic_family
from lyap.lyapunov import compute_lyapunov
from lyap.parsing import parse_poly, parse_ratfunc
from lyap.system import NormalFormSystem

CUBIC_PARAMS = ("a1", "a2", "a3", "b1", "b2", "b3")


def rf(text, variables=CUBIC_PARAMS):
    return parse_ratfunc(text, variables)


def pp(text, variables=CUBIC_PARAMS):
    return parse_poly(text, variables)


@pytest.fixture(scope="session")
def cubic_family():
    return translated_cubic_family()


@pytest.fixture(scope="session")
def cubic_nf(cubic_family):
    return NormalFormSystem(cubic_family.state, cubic_family.params,
                            cubic_family.P, cubic_family.Q)


@pytest.fixture(scope="session")
def cubic_seq3(cubic_nf):
    return compute_lyapunov(cubic_nf, 3)


@pytest.fixture(scope="session")
def cubic_seq6(cubic_nf):
    return compute_lyapunov(cubic_nf, 6)


@pytest.fixture(scope="session")
def prop41_report():
    """The full quadratic-cofactor pipeline on the one-parameter cubic center
    family with b2 = 2; shared by the acceptance and driver tests (the run
    takes about a minute)."""
    from lyap.driver import get_preset, run_pipeline
    return run_pipeline(get_preset("prop41"))


def q(n, d=1):
    return mpq(n, d)
