from __future__ import annotations

import pytest

from braided.hecke import flip
from braided.re_weyl import build_weyl
from braided.u2_calculus import U2


@pytest.fixture(scope="session")
def u2():
    return U2()


@pytest.fixture(scope="session")
def weyl2():
    return build_weyl(flip(2))


@pytest.fixture(scope="session")
def weyl3():
    return build_weyl(flip(3))
