import pytest

from secat.posets import build_space


def chain(n, prefix="c"):
    names = [f"{prefix}{i}" for i in range(n)]
    return build_space(names, list(zip(names, names[1:])))


def antichain(n, prefix="a"):
    return build_space([f"{prefix}{i}" for i in range(n)])


def make_pseudocircle():
    """Four points, two minimal below two maximal; the minimal finite circle."""
    return build_space("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


@pytest.fixture
def pseudocircle():
    return make_pseudocircle()


@pytest.fixture
def three_chain():
    return chain(3)


@pytest.fixture
def two_antichain():
    return antichain(2)
