"""Simplicial F2 cohomology of order complexes, with cup products.

The order complex of a finite space has one d-simplex for every chain of
d+1 distinct comparable elements.  Every simplex carries the canonical
vertex order inherited from the poset, so the front-face/back-face cup
product formula is well defined on the nose, and order-preserving maps
induce strict cochain-level ring maps (degenerate image chains count as
zero).

Rings are cached per space.  Coefficients are F2 only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gf2
from .errors import SizeLimit, ValidationError
from .limits import DEFAULT_COMPLEX_LIMIT
from .posets import bits, core


class OrderComplex:
    """All chains of a finite space, grouped by dimension.

    ``simplices[d]`` lists d-simplices as tuples of element indices in
    increasing poset order; ``index[d]`` inverts the list.
    """

    __slots__ = ("space", "simplices", "index", "dim")

    def __init__(self, space, simplices):
        self.space = space
        self.simplices = simplices
        self.index = [
            {s: i for i, s in enumerate(level)} for level in simplices
        ]
        self.dim = len(simplices) - 1

    def counts(self):
        return tuple(len(level) for level in self.simplices)


_complex_cache = {}
_ring_cache = {}


def clear_caches():
    _complex_cache.clear()
    _ring_cache.clear()


def order_complex(space, *, limit=DEFAULT_COMPLEX_LIMIT):
    """The order complex, memoized per space."""
    hit = _complex_cache.get(space.key)
    if hit is not None:
        return hit
    levels = []
    chains = [(i,) for i in range(space.n)]
    total = 0
    while chains:
        total += len(chains)
        if total > limit:
            raise SizeLimit(f"order complex exceeds {limit} simplices")
        chains.sort()
        levels.append(chains)
        longer = []
        for chain in chains:
            last = chain[-1]
            above = space.up[last] & ~(1 << last)
            for j in bits(above):
                longer.append(chain + (j,))
        chains = longer
    oc = OrderComplex(space, levels)
    _complex_cache[space.key] = oc
    return oc


def coboundary(oc, d):
    """Matrix of the coboundary C^d -> C^(d+1), shape (n_(d+1), n_d)."""
    if d < 0 or d + 1 > oc.dim:
        hi = len(oc.simplices[d + 1]) if 0 <= d + 1 <= oc.dim else 0
        lo = len(oc.simplices[d]) if 0 <= d <= oc.dim else 0
        return np.zeros((hi, lo), dtype=np.uint8)
    mat = np.zeros((len(oc.simplices[d + 1]), len(oc.simplices[d])), dtype=np.uint8)
    for row, simplex in enumerate(oc.simplices[d + 1]):
        for j in range(d + 2):
            face = simplex[:j] + simplex[j + 1 :]
            mat[row, oc.index[d][face]] ^= 1
    return mat


class CohomologyRing:
    """F2 cohomology of one space with a chosen basis in every degree.

    ``reps[d]`` stacks cocycle representatives of the basis of H^d as
    rows.  ``coords`` expresses any cocycle in that basis; together they
    let callers move between cochain and cohomology coordinates.
    """

    def __init__(self, space, *, limit=DEFAULT_COMPLEX_LIMIT):
        self.space = space
        self.complex = order_complex(space, limit=limit)
        oc = self.complex
        self._cob = [coboundary(oc, d) for d in range(-1, oc.dim + 1)]
        # d o d = 0 is a structural invariant of the complex.
        for lower, upper in zip(self._cob, self._cob[1:]):
            if lower.size and upper.size:
                if ((upper @ lower) % 2).any():
                    raise AssertionError("coboundary squared is nonzero")
        self.reps = []
        self._image_bases = []
        for d in range(0, oc.dim + 1):
            delta_d = self._cob[d + 1]
            delta_prev = self._cob[d]
            n_d = len(oc.simplices[d])
            if delta_d.shape[0] == 0:
                cocycles = np.eye(n_d, dtype=np.uint8)
            else:
                cocycles = gf2.nullspace(delta_d)
            image = delta_prev.T if delta_prev.size else np.zeros((0, n_d), dtype=np.uint8)
            image = image[gf2.independent_rows(image)] if image.shape[0] else image
            picked = []
            acc = image
            r = gf2.rank(acc)
            for z in cocycles:
                cand = np.vstack([acc, z.reshape(1, -1)])
                if gf2.rank(cand) > r:
                    acc = cand
                    r += 1
                    picked.append(z)
            self.reps.append(gf2.as_matrix(picked, n_d))
            self._image_bases.append(image)
        self.betti = tuple(r.shape[0] for r in self.reps)

    @property
    def top_degree(self):
        return self.complex.dim

    def dimension(self, d):
        return self.reps[d].shape[0] if 0 <= d <= self.top_degree else 0

    def cocycle_of(self, d, coords):
        """Cochain representative of a cohomology class given by coords."""
        reps = self.reps[d]
        return (np.asarray(coords, dtype=np.uint8) @ reps) % 2

    def coords(self, d, cochain):
        """Coordinates of a cocycle in the chosen basis of H^d."""
        if d < 0 or d > self.top_degree:
            if np.asarray(cochain).any():
                raise ValidationError("nonzero cochain outside the complex dimensions")
            return np.zeros(0, dtype=np.uint8)
        image = self._image_bases[d]
        reps = self.reps[d]
        basis = np.vstack([image, reps]) if image.shape[0] else reps
        if basis.shape[0] == 0:
            if np.asarray(cochain).any():
                raise ValidationError("cochain is not a coboundary in a zero group")
            return np.zeros(0, dtype=np.uint8)
        sol = gf2.solve(basis.T, np.asarray(cochain, dtype=np.uint8))
        if sol is None:
            raise ValidationError("cochain is not a cocycle of this complex")
        return sol[image.shape[0] :]

    def cup_cochain(self, d1, u, d2, v):
        """Front-face/back-face cup product of two cochains."""
        d = d1 + d2
        if d > self.top_degree:
            return np.zeros(0, dtype=np.uint8)
        oc = self.complex
        out = np.zeros(len(oc.simplices[d]), dtype=np.uint8)
        ix1, ix2 = oc.index[d1], oc.index[d2]
        for row, simplex in enumerate(oc.simplices[d]):
            front = simplex[: d1 + 1]
            back = simplex[d1:]
            out[row] = u[ix1[front]] & v[ix2[back]]
        return out

    def cup(self, d1, coords1, d2, coords2):
        """Cup product in basis coordinates; returns coords in H^(d1+d2)."""
        d = d1 + d2
        if d > self.top_degree:
            return np.zeros(0, dtype=np.uint8)
        w = self.cup_cochain(d1, self.cocycle_of(d1, coords1), d2, self.cocycle_of(d2, coords2))
        return self.coords(d, w)


def cohomology_ring(space, *, limit=DEFAULT_COMPLEX_LIMIT):
    hit = _ring_cache.get(space.key)
    if hit is None:
        hit = CohomologyRing(space, limit=limit)
        _ring_cache[space.key] = hit
    return hit


def betti_numbers(space, *, limit=DEFAULT_COMPLEX_LIMIT):
    """Mod-2 Betti numbers, reported up to the last nonzero degree."""
    full = cohomology_ring(space, limit=limit).betti
    keep = len(full)
    while keep > 1 and full[keep - 1] == 0:
        keep -= 1
    return full[:keep]


def pullback_cochain(f, d, cochain):
    """Cochain-level pullback along f of a degree-d cochain on the codomain.

    The image of a simplex with repeated vertices counts as zero.
    """
    ocP = order_complex(f.domain)
    ocQ = order_complex(f.codomain)
    n_d = len(ocP.simplices[d]) if d <= ocP.dim else 0
    out = np.zeros(n_d, dtype=np.uint8)
    if d > ocP.dim or d > ocQ.dim:
        return out
    for row, simplex in enumerate(ocP.simplices[d]):
        image = tuple(f.vector[v] for v in simplex)
        if len(set(image)) == d + 1:
            out[row] = cochain[ocQ.index[d][image]]
    return out


class InducedRingMap:
    """The map H^*(codomain) -> H^*(domain) induced by a map of spaces."""

    def __init__(self, f, source_ring, target_ring, matrices):
        self.map = f
        self.source = source_ring
        self.target = target_ring
        self._matrices = matrices

    def matrix(self, d):
        """Matrix sending H^d coords of the codomain to the domain."""
        if 0 <= d < len(self._matrices):
            return self._matrices[d]
        return np.zeros((self.target.dimension(d), self.source.dimension(d)), dtype=np.uint8)

    def apply(self, d, coords):
        return (self.matrix(d) @ np.asarray(coords, dtype=np.uint8)) % 2


def induced_map(f, *, limit=DEFAULT_COMPLEX_LIMIT):
    source = cohomology_ring(f.codomain, limit=limit)
    target = cohomology_ring(f.domain, limit=limit)
    matrices = []
    for d in range(0, source.top_degree + 1):
        b_src = source.dimension(d)
        b_tgt = target.dimension(d)
        mat = np.zeros((b_tgt, b_src), dtype=np.uint8)
        for col in range(b_src):
            pulled = pullback_cochain(f, d, source.reps[d][col])
            mat[:, col] = target.coords(d, pulled)
        matrices.append(mat)
    return InducedRingMap(f, source, target, matrices)


class _GradedSubspace:
    """A graded subspace of a ring, one row basis per positive degree."""

    def __init__(self, ring):
        self.ring = ring
        self.levels = {}

    def add(self, d, rows):
        if rows.shape[0] == 0:
            return
        current = self.levels.get(d)
        stacked = rows if current is None else np.vstack([current, rows])
        keep = gf2.independent_rows(stacked)
        if keep:
            self.levels[d] = stacked[keep]

    def is_zero(self):
        return not self.levels

    def product_with(self, other):
        out = _GradedSubspace(self.ring)
        for d1, rows1 in self.levels.items():
            for d2, rows2 in other.levels.items():
                d = d1 + d2
                if d > self.ring.top_degree:
                    continue
                prods = []
                for u in rows1:
                    for v in rows2:
                        prods.append(self.ring.cup(d1, u, d2, v))
                mat = gf2.as_matrix(prods, self.ring.dimension(d))
                nz = mat[mat.any(axis=1)] if mat.size else mat
                out.add(d, nz)
        return out


def weighted_cup_length(cospan, *, limit=DEFAULT_COMPLEX_LIMIT):
    """Largest k with a nonzero k-fold product inside the pulled-back kernel.

    The kernel of the projection's induced map is taken in positive
    degrees of the target's ring, pushed into the base's ring along the
    comparison map, and multiplied with itself until it dies.  This is a
    lower bound for the open-cover sectional number of the cospan.
    """
    ring_base = cohomology_ring(cospan.base, limit=limit)
    proj_star = induced_map(cospan.projection, limit=limit)
    base_star = induced_map(cospan.base_map, limit=limit)
    seed = _GradedSubspace(ring_base)
    for d in range(1, proj_star.source.top_degree + 1):
        mat = proj_star.matrix(d)
        if mat.shape[1] == 0:
            continue
        if mat.shape[0] == 0:
            kernel = np.eye(mat.shape[1], dtype=np.uint8)
        else:
            kernel = gf2.nullspace(mat)
        if kernel.shape[0] == 0:
            continue
        pushed = (kernel @ base_star.matrix(d).T) % 2
        pushed = pushed[pushed.any(axis=1)] if pushed.size else pushed
        seed.add(d, pushed)
    if seed.is_zero():
        return 0
    k = 1
    power = seed
    while True:
        power = seed.product_with(power)
        if power.is_zero():
            return k
        k += 1


@dataclass(frozen=True)
class AdvisoryBound:
    """A dimension-based upper bound that is not certified by a cover."""

    value: int
    r: int
    caveat: str


def dimension_bound(cospan, r=0, *, limit=DEFAULT_COMPLEX_LIMIT):
    """floor(dim of the core's order complex / (r+1)), advisory only."""
    if r < 0:
        raise ValidationError("the connectivity parameter r must be >= 0")
    reduced, _, _ = core(cospan.base)
    dim = order_complex(reduced, limit=limit).dim
    return AdvisoryBound(
        value=dim // (r + 1),
        r=r,
        caveat="dimension bound assumes hypotheses this engine does not verify; advisory only",
    )


@dataclass(frozen=True)
class ConnectivityEstimate:
    value: object
    certifying: bool
    note: str


def homological_connectivity_estimate(f, *, limit=DEFAULT_COMPLEX_LIMIT):
    """Largest r with F2 homology isos below degree r and a surjection at r.

    Homology over a field is dual to cohomology, so the homology matrices
    are the transposes of the induced cohomology matrices in dual bases.
    This never certifies actual connectivity of a map; the flag says so.
    """
    ind = induced_map(f, limit=limit)
    top = max(ind.source.top_degree, ind.target.top_degree, 0)
    iso = []
    surj = []
    for d in range(top + 1):
        mat = ind.matrix(d)
        b_dom, b_cod = ind.target.dimension(d), ind.source.dimension(d)
        rk = gf2.rank(mat)
        iso.append(b_dom == b_cod and rk == b_dom)
        # f_* surjective on H_d iff the cohomology matrix is injective.
        surj.append(rk == b_cod)
    note = "estimate from F2 homology ranks only; not a connectivity certificate"
    if all(iso):
        return ConnectivityEstimate(math.inf, False, note)
    best = 0
    for r in range(top + 1):
        if all(iso[:r]) and surj[r]:
            best = max(best, r)
    return ConnectivityEstimate(best, False, note)


@dataclass(frozen=True)
class PavesicReport:
    """Outcome of the arithmetic comparison criterion.

    When all three conditions hold, the cover number of the coarser
    problem bounds the finer one from above; this report only does the
    arithmetic, the caller supplies the hypotheses.
    """

    secat_value: object
    r: int
    s: int
    top_dim: int
    conditions: dict
    implies_bound: bool


def pavesic_check(secat_value, r, s, top_dim):
    if r < 0:
        raise ValidationError("r must be >= 0")
    if s < r:
        raise ValidationError("the comparison needs s >= r")
    inequality = (r + 1) * secat_value > top_dim - s + r
    conditions = {
        "r_nonnegative": True,
        "s_at_least_r": True,
        "strict_inequality": bool(inequality),
    }
    return PavesicReport(
        secat_value=secat_value,
        r=r,
        s=s,
        top_dim=top_dim,
        conditions=conditions,
        implies_bound=all(conditions.values()),
    )
