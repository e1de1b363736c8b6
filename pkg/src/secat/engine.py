"""Exact sectional numbers of cospans over finite spaces.

A cospan is a pair of order-preserving maps into a common target,

    base_map : base -> target    and    projection : total -> target.

A subset Z of the base is *sectional* when some order-preserving
s : Z -> total satisfies projection o s ~ base_map restricted to Z.  The
open sectional number is the least n such that n+1 sectional open sets
cover the base (conventionally n, not n+1), or infinity when no such
cover exists; the generalized variant drops openness.

Two structural facts drive the search.  Sectional subsets are closed
under passing to subsets (restrict the section and the fence), and every
open cover refines to one whose classes are unions of minimal open sets
of maximal points.  Minimising over open covers therefore reduces to
colouring the maximal points, which the engine does by iterative
deepening with the cohomological lower bound as the starting level.

Deciding whether one subset is sectional is itself a search: walk the
homotopy component of the restricted base map and test each map met for
an exact factorisation through the projection.  A negative answer is
only ever returned after the component is exhausted; running out of
budget raises instead of answering.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .cohomology import weighted_cup_length
from .errors import (
    EmptyBase,
    EngineTimeout,
    MismatchedSignature,
    SearchBudgetExceeded,
    SizeLimit,
    ValidationError,
)
from .homotopy import Fence, _bfs, validate_fence
from .limits import DEFAULT_HOM_BUDGET, GENERALIZED_SIZE_LIMIT
from .posets import (
    PosetMap,
    Subset,
    bits,
    component_labels,
    compose,
    subset_from_mask,
    subspace,
)

INFINITE = math.inf


class Cospan:
    """Two maps with a common target; the thing the engine computes on."""

    __slots__ = ("base_map", "projection", "label", "key")

    def __init__(self, base_map, projection, label=""):
        if base_map.codomain != projection.codomain:
            raise MismatchedSignature("the two legs of a cospan must share a target")
        if base_map.domain.n == 0:
            raise EmptyBase("the base of a cospan must be nonempty")
        self.base_map = base_map
        self.projection = projection
        self.label = label
        self.key = "|".join(
            (
                base_map.domain.key,
                base_map.codomain.key,
                projection.domain.key,
                repr(base_map.vector),
                repr(projection.vector),
            )
        )

    @property
    def base(self):
        return self.base_map.domain

    @property
    def target(self):
        return self.base_map.codomain

    @property
    def total(self):
        return self.projection.domain

    def __eq__(self, other):
        return isinstance(other, Cospan) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return (
            f"Cospan(base {self.base.n}, target {self.target.n}, "
            f"total {self.total.n}{', ' + self.label if self.label else ''})"
        )


@dataclass(frozen=True)
class CoverCertificate:
    """A witnessed cover: per class a section and a fence tying it down."""

    mode: str
    classes: tuple
    sections: tuple
    fences: tuple


@dataclass(frozen=True)
class InvariantValue:
    """A computed value with its certificate and lower-bound provenance."""

    value: object
    certificate: CoverCertificate | None = None
    lower_evidence: str | None = None
    cospan: Cospan | None = None

    @property
    def is_finite(self):
        return self.value != INFINITE


class SectionalChecker:
    """Memoised decision procedure for sectional subsets of one cospan.

    Answers are cached per bitmask together with a witness (section
    vector and fence vectors over the subspace's element order) so
    certificates can be rebuilt without searching again.
    """

    def __init__(self, cospan, *, budget=DEFAULT_HOM_BUDGET, deadline=None, store=None):
        self.cospan = cospan
        self.budget = budget
        self.deadline = deadline
        self.store = store
        K, X, A = cospan.base, cospan.target, cospan.total
        self._phi = cospan.base_map.vector
        self._fibers = [[] for _ in range(X.n)]
        for a, x in enumerate(cospan.projection.vector):
            self._fibers[x].append(a)
        labels = component_labels(X)
        reachable = {labels[x] for x in cospan.projection.vector}
        self._feasible = tuple(labels[self._phi[i]] in reachable for i in range(K.n))
        self._memo = {}
        self._witness = {}
        self._subspaces = {}

    # -- public surface -------------------------------------------------

    def sectional(self, mask):
        hit = self._memo.get(mask)
        if hit is not None:
            return hit
        if mask == 0:
            self._memo[0] = True
            self._witness[0] = ((), ((),))
            return True
        if not all(self._feasible[i] for i in bits(mask)):
            self._memo[mask] = False
            return False
        inherited = None
        for known, verdict in self._memo.items():
            if verdict and known & mask == mask:
                inherited = True
                break
            if not verdict and known and known & mask == known:
                inherited = False
                break
        if inherited is not None:
            self._memo[mask] = inherited
            return inherited
        stored = self._load(mask)
        if stored is not None:
            return stored
        verdict = self._decide(mask)
        self._save(mask)
        return verdict

    def witness(self, mask):
        """(section PosetMap, fence Fence) for a mask known to be sectional."""
        if not self.sectional(mask):
            raise ValidationError("no witness: the subset is not sectional")
        if mask not in self._witness:
            donor = None
            for known in self._witness:
                if known & mask == mask:
                    donor = known
                    break
            if donor is None:
                # Heredity answered True without a stored superset witness;
                # decide directly to make one.
                self._decide(mask)
            else:
                self._restrict_witness(donor, mask)
        svec, fvecs = self._witness[mask]
        sub = self._subspace(mask)
        A, X = self.cospan.total, self.cospan.target
        section = PosetMap.from_vector(sub, A, svec)
        fence = Fence(tuple(PosetMap.from_vector(sub, X, v) for v in fvecs))
        return section, fence

    # -- internals ------------------------------------------------------

    def _subspace(self, mask):
        hit = self._subspaces.get(mask)
        if hit is None:
            hit, _ = subspace(self.cospan.base, self.cospan.base.names_of(mask))
            self._subspaces[mask] = hit
        return hit

    def _restrict_witness(self, donor_mask, mask):
        donor_sub = self._subspace(donor_mask)
        sub = self._subspace(mask)
        positions = [donor_sub.index[x] for x in sub.elements]
        svec, fvecs = self._witness[donor_mask]
        self._witness[mask] = (
            tuple(svec[p] for p in positions),
            tuple(tuple(v[p] for p in positions) for v in fvecs),
        )

    def _decide(self, mask):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise EngineTimeout("sectional search hit the wall-clock deadline")
        K, X, A = self.cospan.base, self.cospan.target, self.cospan.total
        sub = self._subspace(mask)
        start = tuple(self._phi[K.index[x]] for x in sub.elements)
        cover_preds = [[] for _ in range(sub.n)]
        for i, j in sub.covers_idx:
            cover_preds[j].append(i)
        found_section = None

        def lifts(h):
            nonlocal found_section
            assigned = [0] * sub.n
            order = sub.linext

            def rec(k):
                if k == sub.n:
                    return True
                e = order[k]
                for a in self._fibers[h[e]]:
                    ok = True
                    for pred in cover_preds[e]:
                        if not A.leq_idx(assigned[pred], a):
                            ok = False
                            break
                    if ok:
                        assigned[e] = a
                        if rec(k + 1):
                            return True
                return False

            if rec(0):
                found_section = tuple(assigned)
                return True
            return False

        deadline = self.deadline

        def goal(vec):
            if deadline is not None and time.monotonic() > deadline:
                raise EngineTimeout("sectional search hit the wall-clock deadline")
            return lifts(vec)

        hit, parents = _bfs(sub, X, start, goal, self.budget)
        if hit is None:
            self._memo[mask] = False
            return False
        chain = []
        cur = hit
        while cur is not None:
            chain.append(cur)
            cur = parents[cur]
        # chain runs hit -> start, i.e. projection o section -> base map.
        self._memo[mask] = True
        self._witness[mask] = (found_section, tuple(chain))
        return True

    # -- persistent store hooks ------------------------------------------

    def _store_key(self, mask):
        return ("sectional", self.cospan.key, mask)

    def _load(self, mask):
        if self.store is None:
            return None
        payload = self.store.get(self._store_key(mask))
        if payload is None:
            return None
        try:
            verdict = bool(payload["sectional"])
            if verdict:
                svec = tuple(payload["section"])
                fvecs = tuple(tuple(v) for v in payload["fence"])
                sub = self._subspace(mask)
                A, X = self.cospan.total, self.cospan.target
                section = PosetMap.from_vector(sub, A, svec)
                steps = tuple(PosetMap.from_vector(sub, X, v) for v in fvecs)
                _validate_witness(self.cospan, sub, section, Fence(steps))
                self._witness[mask] = (svec, fvecs)
            self._memo[mask] = verdict
            return verdict
        except Exception:
            return None

    def _save(self, mask):
        if self.store is None or mask not in self._memo:
            return
        verdict = self._memo[mask]
        payload = {"sectional": verdict}
        if verdict and mask in self._witness:
            svec, fvecs = self._witness[mask]
            payload["section"] = list(svec)
            payload["fence"] = [list(v) for v in fvecs]
        elif verdict:
            return
        self.store.put(self._store_key(mask), payload)


def _validate_witness(cospan, sub, section, fence):
    incl = PosetMap.from_vector(
        sub, cospan.base, tuple(cospan.base.index[x] for x in sub.elements)
    )
    restricted = compose(cospan.base_map, incl)
    composed = compose(cospan.projection, section)
    validate_fence(fence, composed, restricted)


_checker_cache = {}


def clear_caches():
    _checker_cache.clear()


def _checker(cospan, budget, deadline, store):
    key = (cospan.key, budget)
    hit = _checker_cache.get(key)
    if hit is None or hit.deadline != deadline or hit.store is not store:
        hit = SectionalChecker(cospan, budget=budget, deadline=deadline, store=store)
        _checker_cache[key] = hit
    return hit


def is_sectional(cospan, zset, *, require_open=False, budget=DEFAULT_HOM_BUDGET, store=None):
    """Decide one subset.  Returns (decision, (section, fence) or None)."""
    if isinstance(zset, Subset):
        if zset.space != cospan.base:
            raise MismatchedSignature("subset lives in a different space than the base")
        mask = zset.mask
        if require_open and not zset.is_open:
            raise ValidationError("an open-mode query needs a down-closed subset")
    else:
        mask = cospan.base.mask_of(zset)
        if require_open and not cospan.base.is_down_mask(mask):
            raise ValidationError("an open-mode query needs a down-closed subset")
    checker = _checker(cospan, budget, None, store)
    if checker.sectional(mask):
        return True, checker.witness(mask)
    return False, None


def finiteness_check(cospan, *, generalized=False, budget=DEFAULT_HOM_BUDGET, store=None):
    """Whether a finite value exists at all.

    Open mode: every minimal open set of a maximal point is sectional
    (minimal opens of other points are subsets of these, so this decides
    all of them).  Generalized mode: every singleton is sectional.
    """
    checker = _checker(cospan, budget, None, store)
    K = cospan.base
    if generalized:
        return all(checker.sectional(1 << i) for i in range(K.n))
    return all(checker.sectional(K.down[m]) for m in K.maximal_idx)


def minimize_open_cover(space, class_ok, *, start_level=0, max_level=None, deadline=None):
    """Least n with an (n+1)-colouring of maximal points whose classes pass.

    ``class_ok`` must be hereditary (true on subsets of true masks); the
    classes handed to it are unions of minimal opens of maximal points.
    Returns (n, class_masks) for finite answers, (INFINITE, blocking
    maximal point name) otherwise.
    """
    maximal = list(space.maximal_idx)
    umasks = [space.down[m] for m in maximal]
    for m, um in zip(maximal, umasks):
        if not class_ok(um):
            return INFINITE, space.elements[m]
    count = len(maximal)
    upper = count - 1
    level = min(start_level, upper)
    while level <= upper:
        if max_level is not None and level > max_level:
            raise SearchBudgetExceeded(
                f"no cover with at most {max_level + 1} classes",
                bracket=(level, upper),
            )
        hit = _colouring_search(umasks, level + 1, class_ok, deadline, (level, upper))
        if hit is not None:
            return level, hit
        level += 1
    raise AssertionError("colouring all maximal points separately must succeed")


def _colouring_search(umasks, k, class_ok, deadline, bracket):
    count = len(umasks)
    classes = [0] * k

    def rec(i, used):
        if deadline is not None and time.monotonic() > deadline:
            raise EngineTimeout("cover search hit the wall-clock deadline", bracket=bracket)
        if count - i < k - used:
            return None
        if i == count:
            return tuple(classes) if used == k else None
        limit = min(used + 1, k)
        for c in range(limit):
            old = classes[c]
            merged = old | umasks[i]
            if merged == old:
                result = rec(i + 1, used)
                if result is not None:
                    return result
                continue
            classes[c] = merged
            if class_ok(merged):
                result = rec(i + 1, used + (1 if c == used else 0))
                if result is not None:
                    return result
            classes[c] = old
        return None

    return rec(0, 0)


def relative_secat(
    cospan,
    *,
    max_level=None,
    budget=DEFAULT_HOM_BUDGET,
    timeout=None,
    use_cohomology_bound=True,
    store=None,
):
    """The open sectional number of a cospan, exactly, with certificate."""
    deadline = time.monotonic() + timeout if timeout is not None else None
    checker = _checker(cospan, budget, deadline, store)
    lower = 0
    evidence_parts = []
    if use_cohomology_bound:
        try:
            lower = weighted_cup_length(cospan)
        except SizeLimit:
            lower = 0
        if lower > 0:
            evidence_parts.append(f"weighted cup length {lower}")
    value, payload = minimize_open_cover(
        cospan.base,
        checker.sectional,
        start_level=lower,
        max_level=max_level,
        deadline=deadline,
    )
    if value == INFINITE:
        return InvariantValue(
            INFINITE,
            None,
            f"minimal open set of {payload!r} admits no section up to homotopy",
            cospan,
        )
    if value > lower:
        evidence_parts.append(
            f"exhausted all colourings of maximal points with fewer than {value + 1} classes"
        )
    return InvariantValue(
        value,
        _certificate_from_masks(cospan, checker, payload, "open"),
        "; ".join(evidence_parts) or None,
        cospan,
    )


def _certificate_from_masks(cospan, checker, masks, mode):
    classes = []
    sections = []
    fences = []
    for mask in masks:
        classes.append(subset_from_mask(cospan.base, mask))
        section, fence = checker.witness(mask)
        sections.append(section)
        fences.append(fence)
    return CoverCertificate(mode, tuple(classes), tuple(sections), tuple(fences))


def generalized_relative_secat(
    cospan,
    *,
    max_size=GENERALIZED_SIZE_LIMIT,
    budget=DEFAULT_HOM_BUDGET,
    timeout=None,
    store=None,
):
    """The sectional number over covers by arbitrary subsets.

    Enumerates the whole (down-closed) family of sectional subsets with
    heredity pruning, keeps the maximal ones, and solves exact set cover
    over them; heredity lets any optimal cover be enlarged to one using
    maximal sets only.  Exponential in the base size, hence the cap.
    """
    K = cospan.base
    if K.n > max_size:
        raise SearchBudgetExceeded(
            f"generalized mode caps the base at {max_size} elements, got {K.n}",
            budget=max_size,
        )
    deadline = time.monotonic() + timeout if timeout is not None else None
    checker = _checker(cospan, budget, deadline, store)
    for i in range(K.n):
        if not checker.sectional(1 << i):
            return InvariantValue(
                INFINITE,
                None,
                f"singleton {K.elements[i]!r} admits no section up to homotopy",
                cospan,
            )
    full = K.full_mask
    flags = {0: True}
    by_popcount = sorted(range(1, full + 1), key=lambda m: (m.bit_count(), m))
    for mask in by_popcount:
        if deadline is not None and time.monotonic() > deadline:
            raise EngineTimeout("generalized enumeration hit the deadline")
        if any(not flags[mask & ~(1 << i)] for i in bits(mask)):
            flags[mask] = False
            continue
        flags[mask] = checker.sectional(mask)
    sectional_masks = [m for m in by_popcount if flags[m]]
    maximal_sets = [
        m
        for m in sectional_masks
        if all(flags.get(m | (1 << i), False) is False for i in range(K.n) if not (m >> i) & 1)
    ]
    cover = _exact_cover(full, maximal_sets, deadline)
    value = len(cover) - 1
    return InvariantValue(
        value,
        _certificate_from_masks(cospan, checker, cover, "generalized"),
        f"all covers by fewer than {value + 1} sectional subsets exhausted"
        if value > 0
        else None,
        cospan,
    )


def _exact_cover(universe, sets, deadline):
    """Minimum-size cover of ``universe`` by ``sets``, exact and deterministic."""
    containing = {}
    for i in bits(universe):
        containing[i] = sorted(
            (s for s in sets if (s >> i) & 1),
            key=lambda s: (-(s & universe).bit_count(), s),
        )

    best_cover = None

    def dfs(uncovered, chosen, depth_cap):
        nonlocal best_cover
        if deadline is not None and time.monotonic() > deadline:
            raise EngineTimeout("set cover search hit the wall-clock deadline")
        if uncovered == 0:
            best_cover = list(chosen)
            return True
        if len(chosen) >= depth_cap:
            return False
        biggest = max((s & uncovered).bit_count() for s in sets)
        need = -(-uncovered.bit_count() // biggest)
        if len(chosen) + need > depth_cap:
            return False
        e = (uncovered & -uncovered).bit_length() - 1
        for s in containing[e]:
            chosen.append(s)
            if dfs(uncovered & ~s, chosen, depth_cap):
                return True
            chosen.pop()
        return False

    for cap in range(1, universe.bit_count() + 1):
        if dfs(universe, [], cap):
            return tuple(best_cover)
    raise AssertionError("singleton sets alone always yield a cover")
