"""Named sectional-type invariants, each phrased as a cospan and delegated.

Path fibrations never appear: on finite models the diagonal map has the
same sectional behaviour up to homotopy, so every operation below builds
its cospan with a diagonal (or a plain map) and hands it to the engine.
Connectivity preconditions are enforced where the classical identity
needs them; ``tc`` and ``homotopic_distance`` deliberately accept
disconnected inputs because the infinite answer is well defined there.
"""

from __future__ import annotations

import time

from .engine import (
    DEFAULT_HOM_BUDGET,
    Cospan,
    generalized_relative_secat,
    minimize_open_cover,
    relative_secat,
)
from .errors import (
    CrossCheckMismatch,
    EmptySubset,
    MismatchedSignature,
    NotConnected,
    ValidationError,
)
from .homotopy import homotopic
from .posets import (
    PosetMap,
    Subset,
    components,
    compose,
    diagonal,
    identity,
    map_product,
    pairing,
    product,
    singleton,
    subset_from_mask,
    subspace_from_mask,
)


def _cospan_relative(phi, p):
    return Cospan(phi, p, label="relative_secat")


def _cospan_secat(p):
    return Cospan(identity(p.codomain), p, label="secat")


def _cospan_cat(phi):
    point = singleton()
    return Cospan(phi, PosetMap(point, phi.codomain, [0]), label="cat")


def _cospan_tc(space):
    square, _, _ = product(space, space)
    return Cospan(identity(square), diagonal(space), label="tc")


def _resolve_pair_mask(space, square, chosen):
    if isinstance(chosen, Subset):
        if chosen.space != square:
            raise MismatchedSignature(
                "the subset must live in the self-product of the space"
            )
        return chosen.mask
    return square.mask_of(chosen)


def _cospan_subspace_tc(space, chosen):
    square, _, _ = product(space, space)
    mask = _resolve_pair_mask(space, square, chosen)
    if mask == 0:
        raise EmptySubset("subspace tc needs a nonempty subset of the product")
    sub, incl = subspace_from_mask(square, mask)
    return Cospan(incl, diagonal(space), label="subspace tc")


def _cospan_tc_pair(space, second):
    if isinstance(second, Subset):
        if second.space != space:
            raise MismatchedSignature("the second argument must be a subset of the first")
        members = second.members
    else:
        members = tuple(second)
    rows = sorted({space._idx(y) for y in members})
    mask = 0
    for i in range(space.n):
        for j in rows:
            mask |= 1 << (i * space.n + j)
    square, _, _ = product(space, space)
    return _cospan_subspace_tc(space, subset_from_mask(square, mask))


def _cospan_tc_scott(f):
    return Cospan(map_product(f, f), diagonal(f.codomain), label="tc_scott")


def _cospan_tc_mixed(f):
    Y = f.codomain
    return Cospan(map_product(identity(Y), f), diagonal(Y), label="tc_mixed")


def _cospan_mw_secat(p, f):
    if p.codomain != f.domain:
        raise MismatchedSignature("the second map must start where the first one lands")
    return Cospan(f, compose(f, p), label="mw_secat")


def _cospan_tc_mw(f):
    leg = compose(diagonal(f.codomain), f)
    return Cospan(map_product(f, f), leg, label="tc_mw")


def _cospan_distance(phi, psi):
    if phi.domain != psi.domain or phi.codomain != psi.codomain:
        raise MismatchedSignature("homotopic distance needs two maps with one signature")
    return Cospan(pairing(phi, psi), diagonal(phi.codomain), label="distance")


_BUILDERS = {
    "relative_secat": _cospan_relative,
    "generalized": _cospan_relative,
    "secat": _cospan_secat,
    "cat": _cospan_cat,
    "tc": _cospan_tc,
    "subspace_tc": _cospan_subspace_tc,
    "tc_pair": _cospan_tc_pair,
    "tc_scott": _cospan_tc_scott,
    "tc_mixed": _cospan_tc_mixed,
    "mw_secat": _cospan_mw_secat,
    "tc_mw": _cospan_tc_mw,
    "distance": _cospan_distance,
}


def problem_cospan(kind, *parts):
    """The cospan a named problem reduces to, without solving it.

    The certificate validator leans on this so that a stored certificate
    is checked against the same cospan the value was computed on.
    """
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise ValidationError(f"unknown problem kind {kind!r}") from None
    return builder(*parts)


def _run(cospan, generalized, options):
    if generalized:
        options = dict(options)
        options.pop("max_level", None)
        options.pop("use_cohomology_bound", None)
        return generalized_relative_secat(cospan, **options)
    return relative_secat(cospan, **options)


def _require_connected(space, what):
    parts = len(components(space))
    if parts > 1:
        raise NotConnected(f"{what} needs a connected space, got {parts} components")


def secat(p, *, generalized=False, **options):
    """Sectional number of a single map: covers of its codomain."""
    return _run(_cospan_secat(p), generalized, options)


def cat_map(phi, *, generalized=False, **options):
    """Category of a map: covers of the domain on which phi is null-homotopic.

    The target must be connected; otherwise the value would depend on the
    choice of basepoint and the classical identity breaks down.
    """
    _require_connected(phi.codomain, "cat of a map")
    return _run(_cospan_cat(phi), generalized, options)


def tc(space, *, generalized=False, **options):
    """Topological complexity via the diagonal.

    Disconnected input is allowed and yields the infinite value: an
    off-diagonal point whose coordinates sit in different components can
    never be moved onto the diagonal.
    """
    return _run(_cospan_tc(space), generalized, options)


def subspace_tc(space, chosen, *, generalized=False, **options):
    """Topological complexity relative to a subset of the self-product."""
    _require_connected(space, "subspace tc")
    return _run(_cospan_subspace_tc(space, chosen), generalized, options)


def tc_pair(space, second, *, generalized=False, **options):
    """Pair complexity: subspace tc of (space x second) inside the square."""
    _require_connected(space, "subspace tc")
    return _run(_cospan_tc_pair(space, second), generalized, options)


def tc_scott(f, *, generalized=False, **options):
    """Scott complexity of a map: covers of the square against f x f."""
    _require_connected(f.codomain, "scott complexity")
    return _run(_cospan_tc_scott(f), generalized, options)


def tc_mixed(f, *, generalized=False, **options):
    """Mixed complexity: covers of (codomain x domain) against id x f."""
    _require_connected(f.codomain, "mixed complexity")
    return _run(_cospan_tc_mixed(f), generalized, options)


def mw_secat(p, f, *, generalized=False, **options):
    """Sectional number of p relative to f: covers of the middle space.

    Here p: E -> B and f: B -> X; the cospan has base map f and leg f o p.
    """
    return _run(_cospan_mw_secat(p, f), generalized, options)


def tc_mw(f, *, generalized=False, **options):
    """Complexity of a map measured after pushing the diagonal through f."""
    _require_connected(f.codomain, "mw complexity")
    return _run(_cospan_tc_mw(f), generalized, options)


def homotopic_distance(
    phi,
    psi,
    *,
    generalized=False,
    max_level=None,
    budget=DEFAULT_HOM_BUDGET,
    timeout=None,
    use_cohomology_bound=True,
    store=None,
):
    """Least number of open classes on which the two maps agree up to homotopy.

    Computed twice: once on the cospan ((phi,psi), diagonal) and once from
    the cover definition directly.  The routes share no search code beyond
    the colouring enumerator, so disagreement is a genuine bug and raises
    CrossCheckMismatch.  The generalized variant has a single route.
    """
    cos = _cospan_distance(phi, psi)
    if generalized:
        return generalized_relative_secat(cos, budget=budget, timeout=timeout, store=store)
    answer = relative_secat(
        cos,
        max_level=max_level,
        budget=budget,
        timeout=timeout,
        use_cohomology_bound=use_cohomology_bound,
        store=store,
    )
    direct, _ = _direct_distance(phi, psi, budget=budget, max_level=max_level, timeout=timeout)
    if direct != answer.value:
        raise CrossCheckMismatch(
            f"engine route gave {answer.value} but the cover route gave {direct}"
        )
    return answer


def _direct_distance(phi, psi, *, budget, max_level, timeout):
    deadline = time.monotonic() + timeout if timeout is not None else None
    X = phi.domain
    memo = {}

    def class_ok(mask):
        hit = memo.get(mask)
        if hit is None:
            sub, incl = subspace_from_mask(X, mask)
            hit = homotopic(compose(phi, incl), compose(psi, incl), budget=budget)[0]
            memo[mask] = hit
        return hit

    return minimize_open_cover(X, class_ok, max_level=max_level, deadline=deadline)
