"""Homotopy of maps between finite spaces.

Two order-preserving maps f, g : P -> Q are homotopic exactly when they
lie in the same connected component of the poset of all order-preserving
maps P -> Q under the pointwise order.  A certificate is a fence

    f = h_0, h_1, ..., h_m = g

of order-preserving maps in which consecutive maps are pointwise
comparable.  Fences validate in linear time, independently of how they
were found.

The decision procedure is a breadth-first search whose elementary move
changes the value of a single point to a comparable value, subject to the
whole map staying order-preserving.  If f <= g pointwise, raising f to g
one point at a time (always at a point maximal among the remaining
differences) stays order-preserving, so elementary moves connect every
comparable pair and hence reach the entire component.  The search
therefore answers "no" only after exhausting the component.  As a guard
against an implementation gap rather than a mathematical one, a "no" is
re-checked against the full hom-poset decomposition whenever enumerating
all maps is affordable, and any disagreement is logged loudly before the
oracle's answer wins.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

from .errors import CertificateError, MismatchedSignature, SearchBudgetExceeded
from .limits import DEFAULT_HOM_BUDGET
from .posets import PosetMap, component_labels, is_monotone_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Fence:
    """A homotopy certificate: consecutive steps are pointwise comparable."""

    steps: tuple

    @property
    def length(self):
        return len(self.steps) - 1

    def reversed(self):
        return Fence(tuple(reversed(self.steps)))


def comparable(f, g):
    """Pointwise comparability of two maps with the same signature."""
    _require_same_signature(f, g)
    Q = f.codomain
    le = ge = True
    for u, v in zip(f.vector, g.vector):
        if not Q.leq_idx(u, v):
            le = False
        if not Q.leq_idx(v, u):
            ge = False
        if not (le or ge):
            return False
    return True


def validate_fence(fence, start, end):
    """Check a fence certificate from scratch; raises CertificateError."""
    if not fence.steps:
        raise CertificateError("fence has no steps")
    if fence.steps[0] != start or fence.steps[-1] != end:
        raise CertificateError("fence endpoints do not match the maps it certifies")
    for step in fence.steps:
        if step.domain != start.domain or step.codomain != start.codomain:
            raise CertificateError("fence step has the wrong signature")
        if not is_monotone_vector(step.domain, step.codomain, step.vector):
            raise CertificateError("fence step is not order-preserving")
    for a, b in zip(fence.steps, fence.steps[1:]):
        if not comparable(a, b):
            raise CertificateError("consecutive fence steps are not comparable")


def _require_same_signature(f, g):
    if f.domain != g.domain or g.codomain != f.codomain:
        raise MismatchedSignature("maps must share domain and codomain")


def _single_point_moves(P, Q, vec):
    """All vectors reachable from vec by one comparable single-point change."""
    out = []
    for i in range(P.n):
        cur = vec[i]
        candidates = (Q.down[cur] | Q.up[cur]) & ~(1 << cur)
        rest = candidates
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            ok = True
            for j in P.strict_down_lists[i]:
                if not Q.leq_idx(vec[j], v):
                    ok = False
                    break
            if ok:
                for j in P.strict_up_lists[i]:
                    if not Q.leq_idx(v, vec[j]):
                        ok = False
                        break
            if ok:
                out.append(vec[:i] + (v,) + vec[i + 1 :])
    return out


def _bfs(P, Q, start, goal_test, budget):
    """BFS over single-point moves.  Returns (hit vector or None, parents).

    Exhausts the component of ``start`` when no goal is found; raises
    SearchBudgetExceeded if the budget runs out first, so a plain None is
    always backed by a complete search.
    """
    parents = {start: None}
    queue = deque([start])
    while queue:
        vec = queue.popleft()
        if goal_test(vec):
            return vec, parents
        for nxt in _single_point_moves(P, Q, vec):
            if nxt not in parents:
                if len(parents) >= budget:
                    raise SearchBudgetExceeded(
                        f"homotopy search visited {budget} maps without a verdict",
                        budget=budget,
                    )
                parents[nxt] = vec
                queue.append(nxt)
    return None, parents


def _fence_from_parents(P, Q, parents, hit):
    chain = []
    cur = hit
    while cur is not None:
        chain.append(cur)
        cur = parents[cur]
    chain.reverse()
    return Fence(tuple(PosetMap.from_vector(P, Q, v) for v in chain))


def _component_precheck(Q, fvec, gvec):
    """Necessary condition: matched values lie in the same component of Q."""
    labels = component_labels(Q)
    return all(labels[u] == labels[v] for u, v in zip(fvec, gvec))


def enumerate_maps(P, Q, *, budget=DEFAULT_HOM_BUDGET):
    """All order-preserving maps P -> Q as vectors, in lexicographic order.

    Elements are assigned along a linear extension, so each partial
    assignment is pruned by its immediate predecessors only.
    """
    if P.n == 0:
        return [()]
    order = P.linext
    position = {e: k for k, e in enumerate(order)}
    preds = [
        [position[j] for j in P.strict_down_lists[e] if position[j] < k]
        for k, e in enumerate(order)
    ]
    full = Q.full_mask
    out = []
    assigned = [0] * P.n

    def rec(k):
        if k == P.n:
            vec = [0] * P.n
            for pos, e in enumerate(order):
                vec[e] = assigned[pos]
            out.append(tuple(vec))
            if len(out) > budget:
                raise SearchBudgetExceeded(
                    f"hom-poset has more than {budget} maps", budget=budget
                )
            return
        mask = full
        for p in preds[k]:
            mask &= Q.up[assigned[p]]
        rest = mask
        while rest:
            low = rest & -rest
            assigned[k] = low.bit_length() - 1
            rest ^= low
            rec(k + 1)

    rec(0)
    out.sort()
    return out


def hom_components(P, Q, *, budget=DEFAULT_HOM_BUDGET):
    """Partition of all order-preserving maps P -> Q into homotopy classes.

    Components are taken in the comparability graph of the pointwise
    order, which is the textbook characterisation; this is the oracle the
    search-based decision procedure is checked against, so it must not
    share the elementary-move shortcut.  Quadratic in the number of maps.
    """
    vecs = enumerate_maps(P, Q, budget=budget)
    m = len(vecs)
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for a in range(m):
        va = vecs[a]
        for b in range(a + 1, m):
            vb = vecs[b]
            le = ge = True
            for u, v in zip(va, vb):
                if le and not Q.leq_idx(u, v):
                    le = False
                if ge and not Q.leq_idx(v, u):
                    ge = False
                if not (le or ge):
                    break
            if le or ge:
                union(a, b)

    groups = {}
    for a in range(m):
        groups.setdefault(find(a), []).append(a)
    out = []
    for root in sorted(groups):
        out.append([PosetMap.from_vector(P, Q, vecs[a]) for a in groups[root]])
    return out


# A full hom-poset decomposition is quadratic in the number of maps, so
# the automatic recheck only fires on signatures at most this large.
RECHECK_CAP = 1024

_component_cache = {}


def clear_caches():
    _component_cache.clear()


def _enumeration_affordable(P, Q, budget):
    if P.n == 0:
        return True
    if Q.n == 0:
        return P.n == 0
    return Q.n**P.n <= budget


def _cached_component_sets(P, Q, budget):
    key = (P.key, Q.key)
    hit = _component_cache.get(key)
    if hit is None:
        hit = [
            frozenset(h.vector for h in group)
            for group in hom_components(P, Q, budget=budget)
        ]
        _component_cache[key] = hit
    return hit


def _oracle_recheck(f, g, found_by_search, budget):
    """Cross-check a completed search against hom_components when cheap."""
    P, Q = f.domain, f.codomain
    if not _enumeration_affordable(P, Q, min(budget, RECHECK_CAP)):
        return found_by_search
    for members in _cached_component_sets(P, Q, budget):
        if f.vector in members:
            oracle = g.vector in members
            if oracle != found_by_search:
                logger.warning(
                    "elementary-move search and hom-poset oracle disagree "
                    "(search %s, oracle %s); trusting the oracle",
                    found_by_search,
                    oracle,
                )
            return oracle
    return found_by_search


def homotopic(f, g, *, budget=DEFAULT_HOM_BUDGET, recheck=True):
    """Decide f ~ g.  Returns (decision, fence or None)."""
    _require_same_signature(f, g)
    P, Q = f.domain, f.codomain
    if f.vector == g.vector:
        return True, Fence((f,))
    if comparable(f, g):
        return True, Fence((f, g))
    if not _component_precheck(Q, f.vector, g.vector):
        return False, None
    hit, parents = _bfs(P, Q, f.vector, lambda v: v == g.vector, budget)
    if hit is not None:
        return True, _fence_from_parents(P, Q, parents, hit)
    if recheck and _oracle_recheck(f, g, False, budget):
        # Should be unreachable; the elementary moves span each component.
        return True, _fence_by_enumeration(f, g, budget)
    return False, None


def _fence_by_enumeration(f, g, budget):
    """Fence through comparability edges of the enumerated hom-poset."""
    P, Q = f.domain, f.codomain
    vecs = enumerate_maps(P, Q, budget=budget)
    adj = {v: [] for v in vecs}
    for a in range(len(vecs)):
        for b in range(a + 1, len(vecs)):
            fa, fb = PosetMap.from_vector(P, Q, vecs[a]), PosetMap.from_vector(P, Q, vecs[b])
            if comparable(fa, fb):
                adj[vecs[a]].append(vecs[b])
                adj[vecs[b]].append(vecs[a])
    parents = {f.vector: None}
    queue = deque([f.vector])
    while queue:
        vec = queue.popleft()
        if vec == g.vector:
            return _fence_from_parents(P, Q, parents, vec)
        for nxt in adj[vec]:
            if nxt not in parents:
                parents[nxt] = vec
                queue.append(nxt)
    raise AssertionError("oracle said homotopic but no comparability path exists")


def nullhomotopic(f, *, budget=DEFAULT_HOM_BUDGET, recheck=True):
    """Decide whether f is homotopic to a constant map.

    Returns (decision, fence or None, basepoint name or None); the fence
    runs from f to the constant found.
    """
    P, Q = f.domain, f.codomain
    if Q.n == 0:
        return (P.n == 0), (Fence((f,)) if P.n == 0 else None), None
    if P.n == 0:
        return True, Fence((f,)), Q.elements[0]
    labels = component_labels(Q)
    if len({labels[v] for v in f.vector}) > 1:
        return False, None, None
    hit, parents = _bfs(P, Q, f.vector, lambda v: len(set(v)) == 1, budget)
    if hit is not None:
        fence = _fence_from_parents(P, Q, parents, hit)
        return True, fence, Q.elements[hit[0]]
    if recheck and _enumeration_affordable(P, Q, min(budget, RECHECK_CAP)):
        for members in _cached_component_sets(P, Q, budget):
            if f.vector in members:
                for vec in members:
                    if len(set(vec)) == 1:
                        logger.warning(
                            "elementary-move search missed a constant the "
                            "hom-poset oracle found; trusting the oracle"
                        )
                        const = PosetMap.from_vector(P, Q, vec)
                        fence = _fence_by_enumeration(f, const, budget)
                        return True, fence, Q.elements[vec[0]]
                break
    return False, None, None
