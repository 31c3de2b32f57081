import pytest

from minfol.catalog import (certified_bump, flat, scaling_bump, strong_bump,
                            weak_bump)
from minfol.odeflow import IntegratorConfig
from minfol.potential import to_log_form

TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13)


@pytest.fixture(scope="session")
def flat_pot():
    return flat()


@pytest.fixture(scope="session")
def weak_pot():
    return weak_bump()


@pytest.fixture(scope="session")
def strong_pot():
    return strong_bump()


@pytest.fixture(scope="session")
def scaling_pot():
    return scaling_bump()


@pytest.fixture(scope="session")
def certified_pot():
    return certified_bump(n=3, safety=0.9)


@pytest.fixture(scope="session")
def flat_log(flat_pot):
    return to_log_form(flat_pot)


@pytest.fixture(scope="session")
def weak_log(weak_pot):
    return to_log_form(weak_pot)


@pytest.fixture(scope="session")
def strong_log(strong_pot):
    return to_log_form(strong_pot)


@pytest.fixture(scope="session")
def scaling_log(scaling_pot):
    return to_log_form(scaling_pot)
