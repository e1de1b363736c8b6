"""Randomized cospans and the relation suite that exercises the engine.

The checks below are exact statements about sectional numbers, not
statistical tests: every instance is generated so that the hypotheses of
the statement hold by construction (retractions are built from beat-point
enlargements, contractible legs are built as cones, homotopies are
witnessed by fences before a check fires).  A failing check is therefore
always a bug, never bad luck.  Budget blowups skip the instance and are
counted separately.

The one exception is the product comparison, which is kept in an
observational mode: its classical hypothesis (normality) fails for finite
spaces, so violations are recorded as findings rather than failures.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .cohomology import weighted_cup_length
from .engine import (
    DEFAULT_HOM_BUDGET,
    INFINITE,
    Cospan,
    generalized_relative_secat,
    relative_secat,
)
from .errors import EngineTimeout, SearchBudgetExceeded, SizeLimit, ValidationError
from .homotopy import homotopic
from .invariants import cat_map, secat
from .limits import GENERALIZED_SIZE_LIMIT
from .posets import (
    PosetMap,
    add_beat_point,
    bits,
    build_space,
    components,
    compose,
    constant_map,
    core,
    identity,
    is_monotone_vector,
    map_product,
)

_BUDGET_ERRORS = (SearchBudgetExceeded, EngineTimeout, SizeLimit)

INEQUALITY_CHECKS = (
    "a_generalized_le_open",
    "b_cup_le_open",
    "c_le_plain_secat",
    "c_equality_with_section",
    "d_le_cat",
    "d_equality_contractible",
    "e_deeper_projection",
    "f_precomposed_base",
    "g_factored_base",
    "h_wedge_comparison",
)


@dataclass(frozen=True)
class GeneratorConfig:
    """Seeded recipe for a batch of random cospans."""

    seed: int = 0
    count: int = 100
    max_points: int = 6
    density: float = 0.35
    budget: int = DEFAULT_HOM_BUDGET
    timeout: float | None = None

    def __post_init__(self):
        if self.count < 0:
            raise ValidationError("instance count must be nonnegative")
        # Enlargement variants add up to two points on top of max_points,
        # and the generalized engine enumerates subsets of the base.
        if not 1 <= self.max_points <= GENERALIZED_SIZE_LIMIT - 4:
            raise ValidationError(
                f"max_points must lie in 1..{GENERALIZED_SIZE_LIMIT - 4}"
            )
        if not 0.0 <= self.density <= 1.0:
            raise ValidationError("density must lie in [0, 1]")
        if self.budget <= 0:
            raise ValidationError("budget must be positive")


def _rng(cfg, index, tag):
    # String seeding hashes the whole tag, so streams for different tags
    # and indices are independent and reproducible.
    return random.Random(f"{cfg.seed}:{index}:{tag}")


def random_space(rng, max_points, density, prefix="x"):
    """A random poset: random DAG on 1..max_points labelled points."""
    n = rng.randint(1, max_points)
    names = [f"{prefix}{i}" for i in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                pairs.append((names[i], names[j]))
    return build_space(names, pairs)


def _connected_space(rng, max_points, density, prefix):
    space = random_space(rng, max_points, density, prefix)
    for _ in range(8):
        if len(components(space)) == 1:
            return space
        space = random_space(rng, max_points, density, prefix)
    if len(components(space)) == 1:
        return space
    top = f"{prefix}t"
    pairs = list(space.covers)
    for part in components(space):
        pairs.append((min(part, key=space.index.__getitem__), top))
    return build_space(list(space.elements) + [top], pairs)


def random_map(rng, domain, codomain, tries=32):
    """A random order-preserving map, or a constant one as a last resort.

    Values are chosen along a linear extension; each point picks uniformly
    among the common upper bounds of the images of its lower covers, and a
    dead end restarts the whole attempt.
    """
    full = (1 << codomain.n) - 1
    below = [[] for _ in range(domain.n)]
    for lo, hi in domain.covers_idx:
        below[hi].append(lo)
    for _ in range(tries):
        vec = [0] * domain.n
        dead = False
        for x in domain.linext:
            allowed = full
            for lo in below[x]:
                allowed &= codomain.up[vec[lo]]
            if not allowed:
                dead = True
                break
            vec[x] = rng.choice(list(bits(allowed)))
        if not dead:
            return PosetMap(domain, codomain, vec)
    return constant_map(domain, codomain, codomain.elements[rng.randrange(codomain.n)])


def random_cospan(cfg, index=0):
    rng = _rng(cfg, index, "cospan")
    target = random_space(rng, cfg.max_points, cfg.density, "x")
    base = random_space(rng, cfg.max_points, cfg.density, "k")
    total = random_space(rng, cfg.max_points, cfg.density, "a")
    return Cospan(
        random_map(rng, base, target),
        random_map(rng, total, target),
        label=f"fuzz:{cfg.seed}:{index}",
    )


def _nudge(rng, mapping, attempts=8):
    """Move one point to a comparable value: a homotopic neighbour."""
    domain, codomain = mapping.domain, mapping.codomain
    vec = list(mapping.vector)
    for _ in range(attempts):
        i = rng.randrange(domain.n)
        near = [
            q
            for q in bits(codomain.up[vec[i]] | codomain.down[vec[i]])
            if q != vec[i]
        ]
        if not near:
            continue
        trial = list(vec)
        trial[i] = rng.choice(near)
        if is_monotone_vector(domain, codomain, trial):
            return PosetMap(domain, codomain, trial)
    return mapping


def _disjoint_union(first, second):
    # Caller guarantees disjoint element names.
    return build_space(
        list(first.elements) + list(second.elements),
        list(first.covers) + list(second.covers),
    )


def _enlarge(rng, space, labels):
    """Add beat points; returns (bigger, retraction, inclusion)."""
    bigger, retraction, inclusion = space, identity(space), identity(space)
    for label in labels:
        at = bigger.elements[rng.randrange(bigger.n)]
        bigger, step_r, step_i = add_beat_point(bigger, at, label)
        retraction = compose(retraction, step_r)
        inclusion = compose(step_i, inclusion)
    return bigger, retraction, inclusion


@dataclass(frozen=True)
class Extras:
    """Generated side data that makes the conditional checks fire."""

    pull: PosetMap
    pre: PosetMap
    factored: tuple
    section_case: Cospan
    cat_case: Cospan
    wedge_case: tuple


def make_extras(cfg, index, cospan):
    rng = _rng(cfg, index, "extras")
    base, target, total = cospan.base, cospan.target, cospan.total

    pull = random_map(rng, random_space(rng, cfg.max_points, cfg.density, "b"), total)
    pre = random_map(rng, random_space(rng, cfg.max_points, cfg.density, "l"), base)

    mid = random_space(rng, cfg.max_points, cfg.density, "m")
    lam = random_map(rng, base, mid)
    through = random_map(rng, mid, target)
    factored = (_nudge(rng, compose(through, lam)), lam, through)

    # Base map with a homotopy section: retract an enlargement of the
    # target, optionally padded with an unrelated component.
    padded, retraction, _ = _enlarge(rng, target, ("w0", "w1")[: rng.randint(1, 2)])
    if rng.random() < 0.5:
        blob = random_space(rng, max(1, cfg.max_points - 2), cfg.density, "r")
        union = _disjoint_union(padded, blob)
        onto_pad = {x: target.elements[retraction.vector[i]] for i, x in enumerate(padded.elements)}
        stray = random_map(rng, blob, target)
        onto_pad.update({x: target.elements[stray.vector[i]] for i, x in enumerate(blob.elements)})
        section_map = PosetMap(union, target, (target.index[onto_pad[x]] for x in union.elements))
        section_case = Cospan(section_map, cospan.projection, label="section case")
    else:
        section_case = Cospan(retraction, cospan.projection, label="section case")

    # Connected target and coned (hence contractible) total space.
    cat_target = _connected_space(rng, cfg.max_points, cfg.density, "y")
    cat_base = random_space(rng, cfg.max_points, cfg.density, "j")
    cone_body = random_space(rng, max(1, cfg.max_points - 1), cfg.density, "c")
    bottoms = [
        x
        for i, x in enumerate(cone_body.elements)
        if not cone_body.strict_down_lists[i]
    ]
    # A fresh global minimum makes the space contractible.
    cone = build_space(
        list(cone_body.elements) + ["c_apex"],
        list(cone_body.covers) + [("c_apex", x) for x in bottoms],
    )
    cat_case = Cospan(
        random_map(rng, cat_base, cat_target),
        random_map(rng, cone, cat_target),
        label="contractible leg case",
    )

    # Wedge data over a fresh target.
    side = random_space(rng, cfg.max_points, cfg.density, "s")
    beta = random_map(rng, target, side)
    bigger, rho, gamma = _enlarge(rng, total, ("w2", "w3")[: rng.randint(1, 2)])
    psi = _nudge(rng, compose(beta, cospan.base_map))
    wedge_q = _nudge(rng, compose(beta, compose(cospan.projection, rho)))
    wedge_case = (beta, gamma, Cospan(psi, wedge_q, label="wedge case"))

    return Extras(pull, pre, factored, section_case, cat_case, wedge_case)


@dataclass
class CheckReport:
    """Outcome counts plus enough data to re-run every failure."""

    passed: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    inapplicable: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    observations: list = field(default_factory=list)

    def ok(self, name):
        self.passed[name] = self.passed.get(name, 0) + 1

    def fail(self, name, context, detail):
        self.failed[name] = self.failed.get(name, 0) + 1
        self.failures.append({"check": name, "detail": detail, **context})

    def skip(self, name, context, reason):
        self.skipped[name] = self.skipped.get(name, 0) + 1
        self.observations.append({"check": name, "skipped": reason, **context})

    def not_applicable(self, name):
        self.inapplicable[name] = self.inapplicable.get(name, 0) + 1

    def observe(self, entry):
        self.observations.append(entry)

    def merge(self, other):
        merged = CheckReport()
        for mine, theirs, slot in (
            (self.passed, other.passed, merged.passed),
            (self.failed, other.failed, merged.failed),
            (self.skipped, other.skipped, merged.skipped),
            (self.inapplicable, other.inapplicable, merged.inapplicable),
        ):
            for source in (mine, theirs):
                for name, hits in source.items():
                    slot[name] = slot.get(name, 0) + hits
        merged.failures = sorted(
            self.failures + other.failures, key=_entry_order
        )
        merged.observations = sorted(
            self.observations + other.observations, key=_entry_order
        )
        return merged

    def totals(self):
        return {
            "passed": sum(self.passed.values()),
            "failed": sum(self.failed.values()),
            "skipped": sum(self.skipped.values()),
            "inapplicable": sum(self.inapplicable.values()),
        }

    def to_payload(self):
        return {
            "passed": dict(sorted(self.passed.items())),
            "failed": dict(sorted(self.failed.items())),
            "skipped": dict(sorted(self.skipped.items())),
            "inapplicable": dict(sorted(self.inapplicable.items())),
            "totals": self.totals(),
            "failures": sorted(self.failures, key=_entry_order),
            "observations": sorted(self.observations, key=_entry_order),
        }


def _entry_order(entry):
    ordered = json.dumps(entry, sort_keys=True, default=str)
    return (entry.get("label", ""), entry.get("check", ""), ordered)


def encode_cospan(cospan, kind="relative_secat"):
    """An instance-file payload that re-runs this cospan verbatim."""
    named = (("K", cospan.base), ("X", cospan.target), ("A", cospan.total))
    spaces = {
        name: {"elements": list(sp.elements), "covers": [list(c) for c in sp.covers]}
        for name, sp in named
    }
    def table(mapping):
        cod = mapping.codomain
        return {
            x: cod.elements[mapping.vector[i]]
            for i, x in enumerate(mapping.domain.elements)
        }
    maps = {
        "phi": {"from": "K", "to": "X", "values": table(cospan.base_map)},
        "p": {"from": "A", "to": "X", "values": table(cospan.projection)},
    }
    return {
        "version": 1,
        "spaces": spaces,
        "maps": maps,
        "problem": {"kind": kind, "base_map": "phi", "projection": "p"},
    }


def _value_summary(answer):
    out = {"value": "inf" if answer.value == INFINITE else answer.value}
    if answer.certificate is not None:
        out["classes"] = [sorted(cls) for cls in answer.certificate.classes]
    return out


def check_inequalities(cospan, extras, *, budget=DEFAULT_HOM_BUDGET, timeout=None):
    """Run relations (a) through (h) on one instance with its side data."""
    report = CheckReport()
    opts = {"budget": budget, "timeout": timeout}
    context = {"label": cospan.label, "instance": encode_cospan(cospan)}

    try:
        open_answer = relative_secat(cospan, **opts)
    except _BUDGET_ERRORS as exc:
        for name in INEQUALITY_CHECKS:
            report.skip(name, context, f"baseline value unavailable: {exc}")
        return report
    rs = open_answer.value

    def attempt(name, extra_ctx, fn):
        try:
            holds, detail = fn()
        except _BUDGET_ERRORS as exc:
            report.skip(name, {**context, **extra_ctx}, str(exc))
            return
        if holds is None:
            return  # already recorded as inapplicable
        if holds:
            report.ok(name)
        else:
            detail = {**detail, "open_value": _value_summary(open_answer)}
            report.fail(name, {**context, **extra_ctx}, detail)

    def compare(name, extra_ctx, lhs_fn, rhs_fn, *, equal=False):
        def body():
            lhs = lhs_fn()
            rhs = rhs_fn()
            holds = lhs == rhs if equal else lhs <= rhs
            return holds, _sides(lhs, rhs, "==" if equal else "<=")
        attempt(name, extra_ctx, body)

    compare(
        "a_generalized_le_open",
        {},
        lambda: generalized_relative_secat(cospan, budget=budget, timeout=timeout).value,
        lambda: rs,
    )
    compare("b_cup_le_open", {}, lambda: weighted_cup_length(cospan), lambda: rs)

    plain = secat(cospan.projection, **opts)
    compare("c_le_plain_secat", {}, lambda: rs, lambda: plain.value)
    compare(
        "c_equality_with_section",
        {"companion": encode_cospan(extras.section_case)},
        lambda: relative_secat(extras.section_case, **opts).value,
        lambda: plain.value,
        equal=True,
    )

    if len(components(cospan.target)) == 1:
        compare(
            "d_le_cat",
            {},
            lambda: rs,
            lambda: cat_map(cospan.base_map, **opts).value,
        )
    else:
        report.not_applicable("d_le_cat")
    compare(
        "d_equality_contractible",
        {"companion": encode_cospan(extras.cat_case)},
        lambda: relative_secat(extras.cat_case, **opts).value,
        lambda: cat_map(extras.cat_case.base_map, **opts).value,
        equal=True,
    )

    compare(
        "e_deeper_projection",
        {},
        lambda: rs,
        lambda: relative_secat(
            Cospan(cospan.base_map, compose(cospan.projection, extras.pull)), **opts
        ).value,
    )
    compare(
        "f_precomposed_base",
        {},
        lambda: relative_secat(
            Cospan(compose(cospan.base_map, extras.pre), cospan.projection), **opts
        ).value,
        lambda: rs,
    )

    nudged, lam, through = extras.factored

    def factor_body():
        # The check only fires once the factorization is fence-certified.
        certified, _ = homotopic(nudged, compose(through, lam), budget=budget)
        if not certified:
            report.not_applicable("g_factored_base")
            return None, None
        lhs = relative_secat(Cospan(nudged, cospan.projection), **opts).value
        rhs = relative_secat(Cospan(through, cospan.projection), **opts).value
        return lhs <= rhs, _sides(lhs, rhs)

    attempt(
        "g_factored_base",
        {"companion": encode_cospan(Cospan(nudged, cospan.projection))},
        factor_body,
    )

    beta, gamma, wedge = extras.wedge_case

    def wedge_body():
        certified, _ = homotopic(
            wedge.base_map, compose(beta, cospan.base_map), budget=budget
        )
        if certified:
            certified, _ = homotopic(
                compose(wedge.projection, gamma),
                compose(beta, cospan.projection),
                budget=budget,
            )
        if not certified:
            report.not_applicable("h_wedge_comparison")
            return None, None
        lhs = relative_secat(wedge, **opts).value
        return lhs <= rs, _sides(lhs, rs)

    attempt("h_wedge_comparison", {"companion": encode_cospan(wedge)}, wedge_body)

    return report


def _sides(lhs, rhs, relation="<="):
    return {
        "lhs": "inf" if lhs == INFINITE else lhs,
        "rhs": "inf" if rhs == INFINITE else rhs,
        "relation": relation,
    }


INVARIANCE_ROLES = (
    "core_base",
    "core_total",
    "core_target",
    "grown_base",
    "grown_total",
    "grown_target",
)
INVARIANCE_CHECKS = tuple(
    f"invariance_{role}_{mode}"
    for role in INVARIANCE_ROLES
    for mode in ("open", "generalized")
)


def _invariance_variants(rng, cospan):
    base_map, projection = cospan.base_map, cospan.projection
    base, target, total = cospan.base, cospan.target, cospan.total

    _, _, into_base = core(base)
    yield "core_base", Cospan(compose(base_map, into_base), projection)
    _, _, into_total = core(total)
    yield "core_total", Cospan(base_map, compose(projection, into_total))
    _, onto_core, _ = core(target)
    yield "core_target", Cospan(compose(onto_core, base_map), compose(onto_core, projection))

    grown, collapse, _ = _enlarge(rng, base, ("v0",))
    yield "grown_base", Cospan(compose(base_map, collapse), projection)
    grown, collapse, _ = _enlarge(rng, total, ("v1",))
    yield "grown_total", Cospan(base_map, compose(projection, collapse))
    grown, _, embed = _enlarge(rng, target, ("v2",))
    yield "grown_target", Cospan(compose(embed, base_map), compose(embed, projection))


def check_homotopy_invariance(
    cospan, rng=None, *, budget=DEFAULT_HOM_BUDGET, timeout=None
):
    """Replace each space by its core or an enlargement; values must hold.

    Every replacement is conjugated through the witnessing equivalence, so
    both the open and the generalized value of the conjugated cospan must
    equal the original ones exactly.
    """
    if rng is None:
        rng = random.Random(cospan.key)
    report = CheckReport()
    opts = {"budget": budget, "timeout": timeout}
    context = {"label": cospan.label, "instance": encode_cospan(cospan)}
    try:
        reference = {
            "open": relative_secat(cospan, **opts).value,
            "generalized": generalized_relative_secat(cospan, **opts).value,
        }
    except _BUDGET_ERRORS as exc:
        for name in INVARIANCE_CHECKS:
            report.skip(name, context, f"baseline value unavailable: {exc}")
        return report

    for role, variant in _invariance_variants(rng, cospan):
        for mode in ("open", "generalized"):
            name = f"invariance_{role}_{mode}"
            ctx = {**context, "companion": encode_cospan(variant)}
            try:
                if mode == "open":
                    value = relative_secat(variant, **opts).value
                else:
                    value = generalized_relative_secat(variant, **opts).value
            except _BUDGET_ERRORS as exc:
                report.skip(name, ctx, str(exc))
                continue
            if value == reference[mode]:
                report.ok(name)
            else:
                report.fail(name, ctx, _sides(value, reference[mode], "=="))
    return report


def check_product(first, second, *, budget=DEFAULT_HOM_BUDGET, timeout=None):
    """Compare the product cospan against the sum of the factors.

    Observational only: the classical inequality assumes normality, which
    finite spaces lack, so a violation is recorded as a finding and the
    counts are left untouched.
    """
    report = CheckReport()
    context = {
        "label": f"{first.label} * {second.label}",
        "first": encode_cospan(first),
        "second": encode_cospan(second),
    }
    opts = {"budget": budget, "timeout": timeout}
    try:
        both = Cospan(
            map_product(first.base_map, second.base_map),
            map_product(first.projection, second.projection),
            label="product",
        )
        lhs = relative_secat(both, **opts).value
        rhs = relative_secat(first, **opts).value + relative_secat(second, **opts).value
    except _BUDGET_ERRORS as exc:
        report.skip("product_observation", context, str(exc))
        return report
    report.observe(
        {
            "check": "product_observation",
            **context,
            **_sides(lhs, rhs),
            "holds": bool(lhs <= rhs),
        }
    )
    return report


def _product_partner(cfg, index):
    # Smaller partner keeps the product base inside colouring budgets.
    rng = _rng(cfg, index, "partner")
    points = max(1, cfg.max_points - 2)
    target = random_space(rng, points, cfg.density, "x")
    return Cospan(
        random_map(rng, random_space(rng, points, cfg.density, "k"), target),
        random_map(rng, random_space(rng, points, cfg.density, "a"), target),
        label=f"partner:{cfg.seed}:{index}",
    )


def _fuzz_one(job):
    cfg, index, suites = job
    cospan = random_cospan(cfg, index)
    report = CheckReport()
    if "inequalities" in suites:
        extras = make_extras(cfg, index, cospan)
        report = report.merge(
            check_inequalities(cospan, extras, budget=cfg.budget, timeout=cfg.timeout)
        )
    if "invariance" in suites:
        report = report.merge(
            check_homotopy_invariance(
                cospan,
                _rng(cfg, index, "invariance"),
                budget=cfg.budget,
                timeout=cfg.timeout,
            )
        )
    if "product" in suites:
        report = report.merge(
            check_product(
                cospan,
                _product_partner(cfg, index),
                budget=cfg.budget,
                timeout=cfg.timeout,
            )
        )
    return report


def run_fuzz(cfg, *, suites=("inequalities",), jobs=1):
    """Run the chosen suites on cfg.count seeded instances and merge.

    Instances are independent and merging is order-independent, so the
    result does not depend on ``jobs``.
    """
    jobs = max(1, int(jobs))
    work = [(cfg, index, tuple(suites)) for index in range(cfg.count)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_fuzz_one, work))
    else:
        parts = [_fuzz_one(item) for item in work]
    report = CheckReport()
    for part in parts:
        report = report.merge(part)
    return report
