"""The sectional-subset decision procedure and the exact cover searches.

Frozen expected values come from the brute-force reference
implementations in oracles.py; see the acceptance module for the full
sweep.
"""

import pytest

from secat.engine import (
    INFINITE,
    Cospan,
    clear_caches,
    finiteness_check,
    generalized_relative_secat,
    is_sectional,
    minimize_open_cover,
    relative_secat,
)
from secat.errors import (
    EmptyBase,
    EngineTimeout,
    MismatchedSignature,
    SearchBudgetExceeded,
    ValidationError,
)
from secat.homotopy import validate_fence
from secat.posets import (
    PosetMap,
    build_space,
    compose,
    constant_map,
    identity,
    singleton,
    subset,
)

from conftest import antichain, chain, make_pseudocircle
from oracles import oracle_generalized, oracle_relative_secat


def cat_cospan(space):
    """Identity against a point inclusion; the classical category."""
    return Cospan(identity(space), PosetMap(singleton(), space, [0]))


def test_cospan_legs_must_share_target(pseudocircle, three_chain):
    with pytest.raises(MismatchedSignature):
        Cospan(identity(pseudocircle), identity(three_chain))


def test_cospan_base_must_be_nonempty(pseudocircle):
    empty = build_space([])
    with pytest.raises(EmptyBase):
        Cospan(
            PosetMap(empty, pseudocircle, ()),
            identity(pseudocircle),
        )


def test_contractible_open_piece_is_sectional(pseudocircle):
    cos = cat_cospan(pseudocircle)
    ok, witness = is_sectional(cos, ["a", "b", "c"])
    assert ok
    section, fence = witness
    assert section.codomain == cos.total
    restriction = cos.base_map
    sub = section.domain
    incl = PosetMap(sub, pseudocircle, (pseudocircle.index[x] for x in sub.elements))
    validate_fence(fence, compose(cos.projection, section), compose(restriction, incl))


def test_whole_pseudocircle_is_not_sectional_over_a_point(pseudocircle):
    ok, witness = is_sectional(cat_cospan(pseudocircle), "abcd")
    assert not ok and witness is None


def test_require_open_rejects_non_open_subsets(pseudocircle):
    with pytest.raises(ValidationError):
        is_sectional(cat_cospan(pseudocircle), ["c"], require_open=True)
    ok, _ = is_sectional(cat_cospan(pseudocircle), ["c"])
    assert ok


def test_subset_from_wrong_space_rejected(pseudocircle, three_chain):
    with pytest.raises(MismatchedSignature):
        is_sectional(cat_cospan(pseudocircle), subset(three_chain, ["c0"]))


def test_cat_of_pseudocircle(pseudocircle):
    answer = relative_secat(cat_cospan(pseudocircle))
    assert answer.value == 1
    cert = answer.certificate
    assert cert.mode == "open"
    assert sorted(cls.members for cls in cert.classes) == [
        frozenset("abc"),
        frozenset("abd"),
    ]
    assert all(cls.is_open for cls in cert.classes)
    for cls, section, fence in zip(cert.classes, cert.sections, cert.fences):
        assert set(section.domain.elements) == cls.members
        validate_fence(fence, fence.steps[0], fence.steps[-1])


def test_infinite_when_some_minimal_open_has_no_section(two_antichain):
    proj = PosetMap(singleton(), two_antichain, [0])
    answer = relative_secat(Cospan(identity(two_antichain), proj))
    assert answer.value == INFINITE
    assert answer.certificate is None
    assert "no section" in answer.lower_evidence


def test_finiteness_check_matches_values(pseudocircle, two_antichain):
    good = cat_cospan(pseudocircle)
    bad = Cospan(identity(two_antichain), PosetMap(singleton(), two_antichain, [0]))
    assert finiteness_check(good)
    assert not finiteness_check(bad)
    assert finiteness_check(good, generalized=True)
    assert not finiteness_check(bad, generalized=True)


def test_generalized_never_exceeds_open(pseudocircle):
    cos = cat_cospan(pseudocircle)
    open_value = relative_secat(cos).value
    gen = generalized_relative_secat(cos)
    assert gen.value <= open_value
    assert gen.certificate.mode == "generalized"


def test_engine_agrees_with_brute_force_on_references(pseudocircle, three_chain):
    for cos in (cat_cospan(pseudocircle), cat_cospan(three_chain)):
        assert relative_secat(cos).value == oracle_relative_secat(cos)
        assert generalized_relative_secat(cos).value == oracle_generalized(cos)


def test_value_carries_its_cospan(pseudocircle):
    cos = cat_cospan(pseudocircle)
    assert relative_secat(cos).cospan is cos
    assert generalized_relative_secat(cos).cospan is cos


def test_max_level_exhaustion_reports_bracket(pseudocircle):
    with pytest.raises(SearchBudgetExceeded) as exc:
        relative_secat(cat_cospan(pseudocircle), max_level=0)
    lo, hi = exc.value.bracket
    assert lo == 1
    assert hi == 1, "two maximal points give the trivial upper bound"


def test_timeout_raises(pseudocircle):
    with pytest.raises(EngineTimeout):
        relative_secat(cat_cospan(pseudocircle), timeout=-1.0)


def test_generalized_size_cap(pseudocircle):
    with pytest.raises(SearchBudgetExceeded):
        generalized_relative_secat(cat_cospan(pseudocircle), max_size=3)


def test_store_round_trip(pseudocircle):
    class Store:
        def __init__(self):
            self.data = {}
            self.puts = 0

        def get(self, key):
            return self.data.get(key)

        def put(self, key, payload):
            self.puts += 1
            self.data[key] = payload

    store = Store()
    cos = cat_cospan(pseudocircle)
    first = relative_secat(cos, store=store)
    assert store.puts > 0
    puts_after_first = store.puts
    clear_caches()
    second = relative_secat(cos, store=store)
    assert second.value == first.value
    assert store.puts == puts_after_first


def test_store_rejects_corrupt_entries(pseudocircle):
    """A store that hands back garbage must not poison the verdict."""

    class LyingStore:
        def get(self, key):
            return {"sectional": True, "section": [0, 0, 0, 0], "fence": None}

        def put(self, key, payload):
            pass

    clear_caches()
    cos = cat_cospan(pseudocircle)
    answer = relative_secat(cos, store=LyingStore())
    assert answer.value == 1
    clear_caches()


def test_minimize_open_cover_generic_predicate(pseudocircle):
    value, masks = minimize_open_cover(pseudocircle, lambda m: m.bit_count() <= 3)
    assert value == 1
    assert len(masks) == 2
    value, _ = minimize_open_cover(pseudocircle, lambda m: True)
    assert value == 0
    value, blocker = minimize_open_cover(
        pseudocircle, lambda m: not (m & (1 << pseudocircle.index["c"]))
    )
    assert value == INFINITE and blocker == "c"
