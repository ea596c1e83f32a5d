"""Shared fixtures: each built-in group's Hopf data is built once per run."""

import numpy as np
import pytest

from qpermlab.hopf import build_hopf
from qpermlab.magic import (
    dual_group,
    kac_paljutkin,
    perm_from_cycles,
    symmetric_group,
    symmetric_group_table,
)


@pytest.fixture(scope="session")
def kp():
    return build_hopf(kac_paljutkin())


@pytest.fixture(scope="session")
def s3c():
    return build_hopf(symmetric_group(3))


@pytest.fixture(scope="session")
def s4c():
    return build_hopf(symmetric_group(4))


@pytest.fixture(scope="session")
def s3_table():
    return symmetric_group_table(3, [perm_from_cycles(3, [(1, 2)]),
                                     perm_from_cycles(3, [(1, 3)])])


@pytest.fixture(scope="session")
def s4_table():
    return symmetric_group_table(4, [perm_from_cycles(4, [(1, 2)]),
                                     perm_from_cycles(4, [(2, 3, 4)])])


@pytest.fixture(scope="session")
def d3(s3_table):
    return build_hopf(dual_group(s3_table, "S3-hat"))


@pytest.fixture(scope="session")
def d4(s4_table):
    return build_hopf(dual_group(s4_table, "S4-hat"))


@pytest.fixture(scope="session")
def builtin_groups(kp, s3c, s4c, d3, d4):
    return {"kac_paljutkin": kp, "s3": s3c, "s4": s4c, "dual_s3": d3, "dual_s4": d4}


def random_density(dim, rng):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
