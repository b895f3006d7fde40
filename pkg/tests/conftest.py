"""Shared builders for test expressions."""

import pytest

from lfpoly import characters as chars
from lfpoly import expr as E
from lfpoly.descriptors import dirichlet_descriptor, zeta_descriptor

ZETA = zeta_descriptor()


def zpoly(*terms):
    """Expression in zeta derivatives: terms are (coeff, [(l, d), ...])."""
    monos = [
        E.Monomial.make(c, [(ZETA.id, l, d) for l, d in facs]) for c, facs in terms
    ]
    return E.PolyExpression(monos, {ZETA.id: ZETA})


def build(monos, descs):
    """Expression from (coeff, [(desc, l, d), ...]) terms over any descriptors."""
    reg = {d.id: d for d in descs}
    out = [
        E.Monomial.make(c, [(d.id, l, e) for d, l, e in facs]) for c, facs in monos
    ]
    return E.PolyExpression(out, reg)


@pytest.fixture(scope="session")
def zeta_expr():
    return zpoly((1.0, [(0, 1)]))


@pytest.fixture(scope="session")
def zeta_prime():
    return zpoly((1.0, [(1, 1)]))


@pytest.fixture(scope="session")
def chi3():
    return chars.character_table(3)[1]


@pytest.fixture(scope="session")
def chi4():
    return chars.character_table(4)[1]


@pytest.fixture(scope="session")
def l_chi3(chi3):
    return dirichlet_descriptor(chi3)


@pytest.fixture(scope="session")
def l_chi4(chi4):
    return dirichlet_descriptor(chi4)
