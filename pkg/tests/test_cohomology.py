"""Mod-2 cohomology of order complexes: differentials, rings, pullbacks."""

import random

import numpy as np
import pytest

from secat.cohomology import (
    betti_numbers,
    coboundary,
    cohomology_ring,
    dimension_bound,
    homological_connectivity_estimate,
    induced_map,
    order_complex,
    pavesic_check,
    weighted_cup_length,
)
from secat.engine import Cospan
from secat.errors import SizeLimit
from secat.posets import (
    PosetMap,
    build_space,
    compose,
    identity,
    product,
    singleton,
)
from secat.propcheck import random_map, random_space

from conftest import antichain, chain, make_pseudocircle


def cat_cospan(space):
    return Cospan(identity(space), PosetMap(singleton(), space, [0]))


def test_order_complex_of_a_chain():
    oc = order_complex(chain(3))
    assert oc.counts() == (3, 3, 1)


def test_order_complex_of_pseudocircle(pseudocircle):
    oc = order_complex(pseudocircle)
    assert oc.counts() == (4, 4)


def test_order_complex_limit():
    with pytest.raises(SizeLimit):
        order_complex(chain(5), limit=10)


def test_boundary_squares_to_zero_on_random_spaces():
    rng = random.Random(7)
    for _ in range(25):
        sp = random_space(rng, 6, 0.4)
        oc = order_complex(sp)
        for d in range(oc.dim + 1):
            dd = (coboundary(oc, d + 1) @ coboundary(oc, d)) % 2
            assert not dd.any()


def test_betti_numbers_of_reference_spaces(pseudocircle):
    assert betti_numbers(chain(3)) == (1,)
    assert betti_numbers(singleton()) == (1,)
    assert betti_numbers(pseudocircle) == (1, 1)
    torus, _, _ = product(pseudocircle, pseudocircle)
    assert betti_numbers(torus) == (1, 2, 1)


def test_betti_counts_components(two_antichain):
    assert betti_numbers(two_antichain) == (2,)


def test_cup_product_on_the_torus(pseudocircle):
    """The two degree-1 generators multiply to the fundamental class."""
    torus, _, _ = product(pseudocircle, pseudocircle)
    ring = cohomology_ring(torus)
    assert ring.dimension(1) == 2
    a = np.array([1, 0], dtype=np.uint8)
    b = np.array([0, 1], dtype=np.uint8)
    assert ring.cup(1, a, 1, b).any()
    assert not ring.cup(1, a, 1, a).any(), "squares vanish mod 2 on the torus"


def test_weighted_cup_length_frozen_values(pseudocircle):
    assert weighted_cup_length(cat_cospan(pseudocircle)) == 1
    torus, _, _ = product(pseudocircle, pseudocircle)
    assert weighted_cup_length(cat_cospan(torus)) == 2
    assert weighted_cup_length(cat_cospan(chain(3))) == 0


def test_pullback_is_a_ring_map_on_seeded_instances():
    rng = random.Random(11)
    spaces = [make_pseudocircle(), chain(3), random_space(rng, 5, 0.4)]
    for _ in range(30):
        P = spaces[rng.randrange(len(spaces))]
        Q = spaces[rng.randrange(len(spaces))]
        f = random_map(rng, P, Q)
        ind = induced_map(f)
        ring = ind.source
        for d1 in range(ring.top_degree + 1):
            for d2 in range(ring.top_degree + 1 - d1):
                for _ in range(3):
                    u = np.array(
                        [rng.randrange(2) for _ in range(ring.dimension(d1))],
                        dtype=np.uint8,
                    )
                    v = np.array(
                        [rng.randrange(2) for _ in range(ring.dimension(d2))],
                        dtype=np.uint8,
                    )
                    lhs = ind.apply(d1 + d2, ring.cup(d1, u, d2, v))
                    rhs = ind.target.cup(d1, ind.apply(d1, u), d2, ind.apply(d2, v))
                    assert (lhs == rhs).all()


def test_pullback_is_functorial_on_seeded_instances():
    rng = random.Random(13)
    for _ in range(30):
        X = random_space(rng, 5, 0.4, prefix="x")
        Y = random_space(rng, 5, 0.4, prefix="y")
        Z = random_space(rng, 5, 0.4, prefix="z")
        f = random_map(rng, X, Y)
        g = random_map(rng, Y, Z)
        h = compose(g, f)
        ind_f, ind_g, ind_h = induced_map(f), induced_map(g), induced_map(h)
        top = cohomology_ring(Z).top_degree
        for d in range(top + 1):
            direct = ind_h.matrix(d)
            stepwise = (ind_f.matrix(d) @ ind_g.matrix(d)) % 2
            assert (direct == stepwise).all()


def test_identity_induces_identity(pseudocircle):
    ind = induced_map(identity(pseudocircle))
    for d in (0, 1):
        assert (ind.matrix(d) == np.eye(ind.source.dimension(d), dtype=np.uint8)).all()


def test_dimension_bound_divides_by_connectivity(pseudocircle):
    report = dimension_bound(cat_cospan(pseudocircle), r=0)
    assert report.value == 1
    assert "advisory" in report.caveat
    assert dimension_bound(cat_cospan(pseudocircle), r=3).value == 0


def test_connectivity_estimate_never_certifies(pseudocircle):
    est = homological_connectivity_estimate(PosetMap(singleton(), pseudocircle, [0]))
    assert est.value == 0
    assert not est.certifying
    est = homological_connectivity_estimate(identity(pseudocircle))
    assert est.value == float("inf")
    assert not est.certifying


def test_pavesic_check_arithmetic():
    report = pavesic_check(2, 1, 1, 2)
    assert report.implies_bound is ((1 + 1) * 2 > 2 - 1 + 1)
    report = pavesic_check(0, 0, 0, 3)
    assert not report.implies_bound
    assert report.conditions["strict_inequality"] is False
