"""Finite T0 spaces as finite posets.

A finite T0 space is the same thing as a finite poset.  We fix the
convention that open sets are down-sets, so the minimal open set of a
point x is U_x = {y : y <= x}, and continuous maps are exactly the
order-preserving ones.  Subsets of a space are carried around as bitmasks
over a fixed element order, which keeps the search code in the other
modules cheap and deterministic.

Spaces and maps are immutable once built.  Equality and hashing go
through a content fingerprint, so two independently constructed copies of
the same poset are interchangeable everywhere (this matters for product
spaces, which are rebuilt on demand).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import (
    CycleError,
    DuplicateElement,
    MismatchedSignature,
    NotMonotone,
    SizeLimit,
    UnknownElement,
)

DEFAULT_SIZE_LIMIT = 64


class FiniteSpace:
    """A finite poset with its order data precomputed.

    ``down[i]`` is the bitmask of ``{j : j <= i}`` (the minimal open set of
    element i) and ``up[i]`` the bitmask of ``{j : j >= i}``.  ``covers``
    holds the Hasse diagram, i.e. the transitive reduction of the input
    relation.  Do not call the constructor directly; use :func:`build_space`.
    """

    __slots__ = (
        "elements",
        "index",
        "n",
        "down",
        "up",
        "covers",
        "covers_idx",
        "maximal_idx",
        "linext",
        "strict_down_lists",
        "strict_up_lists",
        "key",
        "_hash",
    )

    def __init__(self, elements, down, up, covers_idx, linext):
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.n = len(self.elements)
        self.down = tuple(down)
        self.up = tuple(up)
        self.covers_idx = tuple(covers_idx)
        self.covers = tuple((self.elements[i], self.elements[j]) for i, j in covers_idx)
        self.maximal_idx = tuple(i for i in range(self.n) if self.up[i] == (1 << i))
        self.linext = tuple(linext)
        self.strict_down_lists = tuple(
            tuple(j for j in range(self.n) if j != i and (self.down[i] >> j) & 1)
            for i in range(self.n)
        )
        self.strict_up_lists = tuple(
            tuple(j for j in range(self.n) if j != i and (self.up[i] >> j) & 1)
            for i in range(self.n)
        )
        payload = repr(self.elements) + "|" + repr(sorted(self.covers))
        self.key = hashlib.sha1(payload.encode()).hexdigest()
        self._hash = hash(self.key)

    # -- order queries ------------------------------------------------

    def leq(self, x, y):
        """True iff x <= y."""
        return (self.down[self._idx(y)] >> self._idx(x)) & 1 == 1

    def leq_idx(self, i, j):
        return (self.down[j] >> i) & 1 == 1

    def _idx(self, x):
        try:
            return self.index[x]
        except KeyError:
            raise UnknownElement(f"{x!r} is not an element of this space") from None

    @property
    def maximal_points(self):
        return tuple(self.elements[i] for i in self.maximal_idx)

    def minimal_open(self, x):
        """The minimal open set U_x as a frozenset of element names."""
        m = self.down[self._idx(x)]
        return frozenset(self.elements[i] for i in bits(m))

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    def is_down_mask(self, mask):
        """True iff the bitmask is down-closed, i.e. names an open set."""
        rest = mask
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            if self.down[i] & ~mask:
                return False
            rest ^= low
        return True

    def mask_of(self, members):
        m = 0
        for x in members:
            m |= 1 << self._idx(x)
        return m

    def names_of(self, mask):
        return tuple(self.elements[i] for i in bits(mask))

    # -- identity -----------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, FiniteSpace) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FiniteSpace({self.n} elements, {len(self.covers)} covers)"


def bits(mask):
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def build_space(elements, covering_pairs=(), *, size_limit=DEFAULT_SIZE_LIMIT):
    """Build a finite space from element names and generating relation pairs.

    The order is the reflexive-transitive closure of the given pairs; the
    pairs themselves need not form a Hasse diagram, redundant pairs are
    absorbed.  Raises DuplicateElement, UnknownElement, CycleError or
    SizeLimit on bad input.
    """
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        seen = set()
        for x in elements:
            if x in seen:
                raise DuplicateElement(f"element {x!r} appears twice")
            seen.add(x)
    if len(elements) > size_limit:
        raise SizeLimit(f"{len(elements)} elements exceeds the size limit {size_limit}")
    index = {x: i for i, x in enumerate(elements)}
    n = len(elements)

    succ = [0] * n
    for lo, hi in covering_pairs:
        if lo not in index:
            raise UnknownElement(f"{lo!r} in a relation pair is not an element")
        if hi not in index:
            raise UnknownElement(f"{hi!r} in a relation pair is not an element")
        if lo == hi:
            raise CycleError((lo, hi))
        succ[index[lo]] |= 1 << index[hi]

    # Kahn's algorithm, smallest ready index first, for a deterministic
    # linear extension and cycle detection in one pass.
    indeg = [0] * n
    for i in range(n):
        for j in bits(succ[i]):
            indeg[j] += 1
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    linext = []
    while ready:
        i = ready.pop(0)
        linext.append(i)
        inserted = False
        for j in bits(succ[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
                inserted = True
        if inserted:
            ready.sort()
    if len(linext) != n:
        stuck = [i for i in range(n) if indeg[i] > 0]
        i = stuck[0]
        j = next(iter(bits(succ[i] & sum(1 << s for s in stuck))), i)
        raise CycleError((elements[i], elements[j]))

    up = [1 << i for i in range(n)]
    for i in reversed(linext):
        for j in bits(succ[i]):
            up[i] |= up[j]
    down = [1 << i for i in range(n)]
    for i in range(n):
        for j in bits(up[i]):
            if j != i:
                down[j] |= 1 << i

    covers_idx = []
    for i in range(n):
        strict_up_i = up[i] & ~(1 << i)
        for j in bits(strict_up_i):
            between = strict_up_i & (down[j] & ~(1 << j))
            if between == 0:
                covers_idx.append((i, j))
    covers_idx.sort()
    return FiniteSpace(elements, down, up, covers_idx, linext)


class PosetMap:
    """An order-preserving map between finite spaces.

    ``values`` maps element names; ``vector`` holds the same data as a tuple
    of codomain indices in domain element order, which is what the search
    code works with.  Use :func:`check_map` to build one from raw data (it
    validates monotonicity); internal constructions that are monotone by
    design go through :meth:`from_vector`.
    """

    __slots__ = ("domain", "codomain", "vector", "_hash")

    def __init__(self, domain, codomain, vector):
        self.domain = domain
        self.codomain = codomain
        self.vector = tuple(vector)
        self._hash = hash((domain.key, codomain.key, self.vector))

    @classmethod
    def from_vector(cls, domain, codomain, vector):
        return cls(domain, codomain, vector)

    @property
    def values(self):
        return {
            self.domain.elements[i]: self.codomain.elements[v]
            for i, v in enumerate(self.vector)
        }

    def __call__(self, x):
        return self.codomain.elements[self.vector[self.domain._idx(x)]]

    def __eq__(self, other):
        return (
            isinstance(other, PosetMap)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.vector == other.vector
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PosetMap({self.domain.n} -> {self.codomain.n} elements)"


def check_map(domain, codomain, values):
    """Validate a raw name-to-name assignment as an order-preserving map."""
    vector = []
    for x in domain.elements:
        if x not in values:
            raise UnknownElement(f"no value assigned to element {x!r}")
        y = values[x]
        if y not in codomain.index:
            raise UnknownElement(f"value {y!r} is not an element of the codomain")
        vector.append(codomain.index[y])
    extra = set(values) - set(domain.elements)
    if extra:
        raise UnknownElement(f"value assigned to unknown element {sorted(extra)[0]!r}")
    for i, j in domain.covers_idx:
        if not codomain.leq_idx(vector[i], vector[j]):
            raise NotMonotone(
                (domain.elements[i], domain.elements[j]),
                f"{values[domain.elements[i]]!r} is not below {values[domain.elements[j]]!r}",
            )
    return PosetMap(domain, codomain, vector)


def is_monotone_vector(domain, codomain, vector):
    """Fast monotonicity test on an index vector, no object construction."""
    for i, j in domain.covers_idx:
        if not codomain.leq_idx(vector[i], vector[j]):
            return False
    return True


def identity(space):
    return PosetMap(space, space, range(space.n))


def constant_map(domain, codomain, value):
    return PosetMap(domain, codomain, [codomain._idx(value)] * domain.n)


def compose(outer, inner):
    """outer o inner."""
    if inner.codomain != outer.domain:
        raise MismatchedSignature("codomain of the inner map must equal domain of the outer")
    return PosetMap(inner.domain, outer.codomain, (outer.vector[v] for v in inner.vector))


@dataclass(frozen=True)
class Subset:
    """A subset of a space, with its bitmask and openness precomputed."""

    space: FiniteSpace
    members: frozenset
    mask: int
    is_open: bool

    def __iter__(self):
        return iter(self.space.names_of(self.mask))

    def __len__(self):
        return self.mask.bit_count()


def subset(space, members):
    mask = space.mask_of(members)
    return Subset(space, frozenset(members), mask, space.is_down_mask(mask))


def subset_from_mask(space, mask):
    return Subset(
        space,
        frozenset(space.names_of(mask)),
        mask,
        space.is_down_mask(mask),
    )


def pair_label(x, y):
    return f"({x},{y})"


def product(left, right, *, size_limit=DEFAULT_SIZE_LIMIT):
    """Product space with the componentwise order.

    Returns (space, first projection, second projection).  Element names
    are formed with :func:`pair_label`; a name collision (only possible
    with adversarial input names) surfaces as DuplicateElement.
    """
    if left.n * right.n > size_limit:
        raise SizeLimit(
            f"product with {left.n * right.n} elements exceeds the size limit {size_limit}"
        )
    names = [pair_label(x, y) for x in left.elements for y in right.elements]
    pairs = []
    for xi, x in enumerate(left.elements):
        for yi, y in enumerate(right.elements):
            for _, xj in (c for c in left.covers_idx if c[0] == xi):
                pairs.append((pair_label(x, y), pair_label(left.elements[xj], y)))
            for _, yj in (c for c in right.covers_idx if c[0] == yi):
                pairs.append((pair_label(x, y), pair_label(x, right.elements[yj])))
    space = build_space(names, pairs, size_limit=size_limit)
    proj1 = PosetMap(space, left, (i // right.n for i in range(space.n)))
    proj2 = PosetMap(space, right, (i % right.n for i in range(space.n)))
    return space, proj1, proj2


def diagonal(space, *, size_limit=DEFAULT_SIZE_LIMIT):
    """The diagonal map x -> (x, x) into the self-product."""
    prod, _, _ = product(space, space, size_limit=size_limit)
    return PosetMap(space, prod, (i * space.n + i for i in range(space.n)))


def map_product(f, g, *, size_limit=DEFAULT_SIZE_LIMIT):
    """f x g between the corresponding products, row-major on both sides."""
    dom, _, _ = product(f.domain, g.domain, size_limit=size_limit)
    cod, _, _ = product(f.codomain, g.codomain, size_limit=size_limit)
    gn, gcn = g.domain.n, g.codomain.n
    return PosetMap(
        dom, cod, (f.vector[i // gn] * gcn + g.vector[i % gn] for i in range(dom.n))
    )


def pairing(f, g, *, size_limit=DEFAULT_SIZE_LIMIT):
    """The map x -> (f(x), g(x)) into the product of the codomains."""
    if f.domain != g.domain:
        raise MismatchedSignature("paired maps must share a domain")
    cod, _, _ = product(f.codomain, g.codomain, size_limit=size_limit)
    gcn = g.codomain.n
    return PosetMap(f.domain, cod, (f.vector[i] * gcn + g.vector[i] for i in range(f.domain.n)))


def subspace(space, members):
    """The induced subposet on ``members``.  Returns (space, inclusion)."""
    for x in members:
        space._idx(x)
    keep = [x for x in space.elements if x in set(members)]
    pairs = []
    for a in keep:
        for b in keep:
            if a != b and space.leq(a, b):
                pairs.append((a, b))
    sub = build_space(keep, pairs, size_limit=max(DEFAULT_SIZE_LIMIT, space.n))
    incl = PosetMap(sub, space, (space.index[x] for x in keep))
    return sub, incl


def subspace_from_mask(space, mask):
    return subspace(space, space.names_of(mask))


def singleton(label="*"):
    return build_space([label])


def components(space):
    """Connected components of the comparability graph.

    Returns a tuple of frozensets of element names, ordered by smallest
    element index, plus nothing else: order-connectivity coincides with
    topological path-connectedness for finite spaces.
    """
    seen = 0
    out = []
    for start in range(space.n):
        if (seen >> start) & 1:
            continue
        comp = 0
        frontier = 1 << start
        while frontier:
            comp |= frontier
            nxt = 0
            for i in bits(frontier):
                nxt |= space.down[i] | space.up[i]
            frontier = nxt & ~comp
        seen |= comp
        out.append(frozenset(space.names_of(comp)))
    return tuple(out)


def component_labels(space):
    """Element index -> component number, components ordered as in components()."""
    labels = [-1] * space.n
    for k, comp in enumerate(components(space)):
        for x in comp:
            labels[space.index[x]] = k
    return tuple(labels)


def _find_beat_point(space):
    """First beat point index with its replacement index, or None.

    x is a beat point when its strict down-set has a maximum or its strict
    up-set has a minimum; removing it is a strong deformation retract.
    """
    for i in range(space.n):
        sd = space.down[i] & ~(1 << i)
        if sd:
            for m in bits(sd):
                if sd & ~space.down[m] == 0:
                    return i, m
        su = space.up[i] & ~(1 << i)
        if su:
            for m in bits(su):
                if su & ~space.up[m] == 0:
                    return i, m
    return None


def core(space):
    """Iteratively strip beat points down to a core.

    Returns (core, retraction, section) where retraction o section is the
    identity of the core and section o retraction is homotopic to the
    identity (each removal step is pointwise comparable to the identity,
    so the composite is connected to it by a fence).
    """
    current = space
    retract_names = {x: x for x in space.elements}
    while True:
        hit = _find_beat_point(current)
        if hit is None:
            break
        b, m = hit
        b_name = current.elements[b]
        m_name = current.elements[m]
        current, _ = subspace(current, [x for x in current.elements if x != b_name])
        for x in retract_names:
            if retract_names[x] == b_name:
                retract_names[x] = m_name
    retraction = check_map(space, current, retract_names)
    section = PosetMap(current, space, (space.index[x] for x in current.elements))
    return current, retraction, section


def add_beat_point(space, at, label, *, size_limit=DEFAULT_SIZE_LIMIT):
    """Adjoin a new point covering only ``at``, a removable beat point.

    Returns (space, retraction, inclusion); the retraction collapses the
    new point onto ``at`` and is a homotopy equivalence.
    """
    space._idx(at)
    if label in space.index:
        raise DuplicateElement(f"label {label!r} already names an element")
    enlarged = build_space(
        space.elements + (label,),
        list(space.covers) + [(at, label)],
        size_limit=size_limit,
    )
    retraction = check_map(
        enlarged, space, {**{x: x for x in space.elements}, label: at}
    )
    inclusion = PosetMap(space, enlarged, (enlarged.index[x] for x in space.elements))
    return enlarged, retraction, inclusion
