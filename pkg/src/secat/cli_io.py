"""Instance files, result reports, the disk memo cache, and the CLI.

The file format is JSON with a mandatory ``version`` field: named spaces
(elements plus covering pairs), named maps (value tables), and one
problem stanza that references them by name.  Reports are JSON as well;
infinite values are spelled ``"inf"``.  A report directory additionally
receives a delimited summary and rendered figures.

Exit codes: 0 success, 2 invalid input, 3 budget or timeout, 4 failed
cross-check or certificate validation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import itertools
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .cohomology import dimension_bound, weighted_cup_length
from .engine import (
    DEFAULT_HOM_BUDGET,
    INFINITE,
    generalized_relative_secat,
    relative_secat,
)
from .errors import (
    CertificateError,
    CrossCheckMismatch,
    EngineTimeout,
    ParseError,
    SearchBudgetExceeded,
    SecatError,
    SizeLimit,
    ValidationError,
)
from .homotopy import Fence, validate_fence
from .invariants import (
    cat_map,
    homotopic_distance,
    mw_secat,
    problem_cospan,
    secat,
    subspace_tc,
    tc,
    tc_mixed,
    tc_mw,
    tc_pair,
    tc_scott,
)
from .posets import build_space, check_map, compose, pair_label, subspace_from_mask
from .propcheck import GeneratorConfig, run_fuzz

SCHEMA_VERSION = 1

PROBLEM_KINDS = (
    "relative_secat",
    "generalized",
    "secat",
    "cat",
    "tc",
    "subspace_tc",
    "tc_pair",
    "tc_scott",
    "tc_mixed",
    "mw_secat",
    "tc_mw",
    "distance",
    "bounds",
    "fuzz",
)

_OPTION_KEYS = frozenset(
    {
        "generalized",
        "max_level",
        "max_size",
        "budget",
        "timeout",
        "r",
        "seed",
        "count",
        "max_points",
        "density",
        "suites",
    }
)


@dataclass(frozen=True)
class InstanceFile:
    """A parsed instance: named spaces and maps plus one problem stanza."""

    version: int
    spaces: dict
    maps: dict
    map_refs: dict
    problem: dict


def parse_instance(text):
    """Parse and validate instance text; raises with location context."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ParseError("the top level of an instance must be an object")
    unknown = set(raw) - {"version", "spaces", "maps", "problem"}
    if unknown:
        raise ValidationError(f"unknown top-level keys: {sorted(unknown)}")
    if "version" not in raw:
        raise ValidationError("instance files must carry a version field")
    if raw["version"] != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported schema version {raw['version']!r}, expected {SCHEMA_VERSION}"
        )

    spaces = {}
    for name, body in _as_object(raw.get("spaces", {}), "spaces").items():
        body = _as_object(body, f"space {name!r}")
        elements = body.get("elements")
        if not isinstance(elements, list) or not all(isinstance(x, str) for x in elements):
            raise ValidationError(f"space {name!r} needs a list of element names")
        covers = body.get("covers", [])
        if not isinstance(covers, list):
            raise ValidationError(f"space {name!r}: covers must be a list of pairs")
        pairs = []
        for entry in covers:
            if not isinstance(entry, list) or len(entry) != 2:
                raise ValidationError(f"space {name!r}: cover entry {entry!r} is not a pair")
            pairs.append((entry[0], entry[1]))
        spaces[name] = build_space(elements, pairs)

    maps = {}
    map_refs = {}
    for name, body in _as_object(raw.get("maps", {}), "maps").items():
        body = _as_object(body, f"map {name!r}")
        src, dst = body.get("from"), body.get("to")
        for ref in (src, dst):
            if ref not in spaces:
                raise ValidationError(f"map {name!r} refers to unknown space {ref!r}")
        values = _as_object(body.get("values", {}), f"map {name!r} values")
        maps[name] = check_map(spaces[src], spaces[dst], values)
        map_refs[name] = (src, dst)

    problem = _as_object(raw.get("problem", {}), "problem")
    kind = problem.get("kind")
    if kind not in PROBLEM_KINDS:
        raise ValidationError(f"unknown problem kind {kind!r}")
    options = _as_object(problem.get("options", {}), "options")
    bad = set(options) - _OPTION_KEYS
    if bad:
        raise ValidationError(f"unknown option keys: {sorted(bad)}")

    instance = InstanceFile(SCHEMA_VERSION, spaces, maps, map_refs, dict(problem))
    _resolve_parts(instance)  # validates references eagerly
    return instance


def _as_object(value, what):
    if not isinstance(value, dict):
        raise ValidationError(f"{what} must be an object")
    return value


def load_instance(path):
    return parse_instance(Path(path).read_text())


def serialize_instance(instance):
    """Canonical text for an instance; parse o serialize is the identity."""
    spaces = {
        name: {
            "elements": list(sp.elements),
            "covers": [list(pair) for pair in sp.covers],
        }
        for name, sp in instance.spaces.items()
    }
    maps = {}
    for name, mapping in instance.maps.items():
        src, dst = instance.map_refs[name]
        cod = mapping.codomain
        maps[name] = {
            "from": src,
            "to": dst,
            "values": {
                x: cod.elements[mapping.vector[i]]
                for i, x in enumerate(mapping.domain.elements)
            },
        }
    payload = {
        "version": instance.version,
        "spaces": spaces,
        "maps": maps,
        "problem": instance.problem,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def _need_map(instance, field):
    name = instance.problem.get(field)
    if name not in instance.maps:
        raise ValidationError(f"problem references unknown map {name!r} (field {field!r})")
    return instance.maps[name]


def _need_space(instance, field):
    name = instance.problem.get(field)
    if name not in instance.spaces:
        raise ValidationError(f"problem references unknown space {name!r} (field {field!r})")
    return instance.spaces[name]


def _resolve_parts(instance):
    """The positional arguments handed to problem_cospan, per kind."""
    kind = instance.problem["kind"]
    if kind in ("relative_secat", "generalized", "bounds"):
        return (_need_map(instance, "base_map"), _need_map(instance, "projection"))
    if kind == "secat":
        return (_need_map(instance, "map"),)
    if kind in ("cat", "tc_scott", "tc_mixed", "tc_mw"):
        return (_need_map(instance, "map"),)
    if kind == "tc":
        return (_need_space(instance, "space"),)
    if kind == "subspace_tc":
        space = _need_space(instance, "space")
        pairs = instance.problem.get("pairs")
        if not isinstance(pairs, list) or not pairs:
            raise ValidationError("subspace_tc needs a nonempty list under 'pairs'")
        members = []
        for entry in pairs:
            if not isinstance(entry, list) or len(entry) != 2:
                raise ValidationError(f"pair entry {entry!r} is not a two-element list")
            space._idx(entry[0])
            space._idx(entry[1])
            members.append(pair_label(entry[0], entry[1]))
        return (space, members)
    if kind == "tc_pair":
        space = _need_space(instance, "space")
        members = instance.problem.get("members")
        if not isinstance(members, list) or not members:
            raise ValidationError("tc_pair needs a nonempty list under 'members'")
        return (space, members)
    if kind == "mw_secat":
        return (_need_map(instance, "p"), _need_map(instance, "f"))
    if kind == "distance":
        return (_need_map(instance, "phi"), _need_map(instance, "psi"))
    if kind == "fuzz":
        return ()
    raise AssertionError(kind)


# -- persistent memo cache -------------------------------------------------


def _body_hash(body):
    return hashlib.sha256(
        json.dumps(body, sort_keys=True).encode()
    ).hexdigest()


class DiskCache:
    """Content-keyed JSON store for sectional verdicts.

    Entries are keyed by the hash of (spaces, maps, subset) baked into the
    engine's store key.  A corrupt, truncated, or foreign file fails its
    internal hash comparison and reads as a miss.  Writes go through a
    temporary file and an atomic rename, so concurrent readers never see
    partial content.
    """

    _counter = itertools.count()

    def __init__(self, root=None):
        if root is None:
            root = os.environ.get("SECAT_CACHE_DIR")
        if root is None:
            root = os.path.join(os.path.expanduser("~"), ".cache", "secat")
        self.root = Path(root)

    def _path(self, key):
        digest = hashlib.sha256(repr(key).encode()).hexdigest()
        return self.root / digest[:2] / (digest[2:] + ".json")

    def get(self, key):
        path = self._path(key)
        try:
            wrapper = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if not isinstance(wrapper, dict):
            return None
        body = wrapper.get("body")
        if wrapper.get("key") != repr(key):
            return None
        if wrapper.get("body_hash") != _body_hash(body):
            return None
        return body

    def put(self, key, body):
        path = self._path(key)
        wrapper = {"key": repr(key), "body": body, "body_hash": _body_hash(body)}
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            stamp = f".{os.getpid()}.{next(self._counter)}.tmp"
            scratch = path.with_name(path.name + stamp)
            scratch.write_text(json.dumps(wrapper, sort_keys=True))
            os.replace(scratch, path)
        except OSError:
            pass  # caching is best-effort; the caller recomputes


# -- certificates ------------------------------------------------------------


def certificate_payload(certificate):
    """Certificate as plain tables: classes, sections, fence steps."""
    classes = [list(cls) for cls in certificate.classes]
    sections = []
    for section in certificate.sections:
        cod = section.codomain
        sections.append(
            {
                x: cod.elements[section.vector[i]]
                for i, x in enumerate(section.domain.elements)
            }
        )
    fences = []
    for fence in certificate.fences:
        steps = []
        for step in fence.steps:
            cod = step.codomain
            steps.append(
                {
                    x: cod.elements[step.vector[i]]
                    for i, x in enumerate(step.domain.elements)
                }
            )
        fences.append(steps)
    return {
        "mode": certificate.mode,
        "classes": classes,
        "sections": sections,
        "fences": fences,
    }


def validate_certificate(cospan, value, payload):
    """Re-check a certificate from its tables alone.

    Deliberately reuses nothing from the engine: subspaces, map checks and
    fence validation come straight from the space and homotopy layers, so
    a bug in the search cannot vouch for itself.
    """
    if not isinstance(value, int):
        raise CertificateError(f"certificates only accompany finite values, got {value!r}")
    mode = payload.get("mode")
    if mode not in ("open", "generalized"):
        raise CertificateError(f"unknown certificate mode {mode!r}")
    classes = payload.get("classes")
    sections = payload.get("sections")
    fences = payload.get("fences")
    if not isinstance(classes, list) or len(classes) != value + 1:
        raise CertificateError(
            f"expected {value + 1} cover classes, found {len(classes or [])}"
        )
    if not isinstance(sections, list) or len(sections) != len(classes):
        raise CertificateError("one section per class is required")
    if not isinstance(fences, list) or len(fences) != len(classes):
        raise CertificateError("one fence per class is required")

    base = cospan.base
    union = 0
    for position, names in enumerate(classes):
        if not names:
            raise CertificateError(f"class {position} is empty")
        mask = base.mask_of(names)
        union |= mask
        if mode == "open" and not base.is_down_mask(mask):
            raise CertificateError(f"class {position} is not open (not a down-set)")
        _validate_class(cospan, mask, sections[position], fences[position], position)
    if union != base.full_mask:
        raise CertificateError("the classes do not cover the base")


def _validate_class(cospan, mask, section_table, fence_tables, position):
    sub, incl = subspace_from_mask(cospan.base, mask)
    try:
        section = check_map(sub, cospan.total, section_table)
        steps = tuple(
            check_map(sub, cospan.target, table) for table in fence_tables
        )
    except SecatError as exc:
        raise CertificateError(f"class {position}: {exc}") from None
    start = compose(cospan.projection, section)
    end = compose(cospan.base_map, incl)
    try:
        validate_fence(Fence(steps), start, end)
    except CertificateError as exc:
        raise CertificateError(f"class {position}: {exc}") from None


def validate_report(instance, report):
    """Validate the certificate inside a report against its instance."""
    kind = report.get("kind", instance.problem.get("kind"))
    payload = report.get("certificate")
    if payload is None:
        raise ValidationError("the report carries no certificate to validate")
    value = report.get("value")
    cospan = problem_cospan(
        "relative_secat" if kind in ("bounds", "generalized") else kind,
        *_resolve_parts(instance),
    )
    validate_certificate(cospan, value, payload)


# -- solving and reporting ---------------------------------------------------


def _engine_kwargs(options, generalized, store):
    kw = {}
    if store is not None:
        kw["store"] = store
    if options.get("budget") is not None:
        kw["budget"] = int(options["budget"])
    if options.get("timeout") is not None:
        kw["timeout"] = float(options["timeout"])
    if generalized:
        if options.get("max_size") is not None:
            kw["max_size"] = int(options["max_size"])
    elif options.get("max_level") is not None:
        kw["max_level"] = int(options["max_level"])
    return kw


def _solve(kind, parts, generalized, engine_kw):
    if kind in ("relative_secat", "generalized"):
        cospan = problem_cospan(kind, *parts)
        if generalized:
            return generalized_relative_secat(cospan, **engine_kw)
        return relative_secat(cospan, **engine_kw)
    if kind == "distance":
        engine_kw.pop("max_size", None)
        return homotopic_distance(*parts, generalized=generalized, **engine_kw)
    runner = {
        "secat": secat,
        "cat": cat_map,
        "tc": tc,
        "subspace_tc": subspace_tc,
        "tc_pair": tc_pair,
        "tc_scott": tc_scott,
        "tc_mixed": tc_mixed,
        "mw_secat": mw_secat,
        "tc_mw": tc_mw,
    }[kind]
    return runner(*parts, generalized=generalized, **engine_kw)


def _bounds_payload(cospan, r):
    try:
        lower = weighted_cup_length(cospan)
    except SizeLimit as exc:
        lower = 0
        cup_note = str(exc)
    else:
        cup_note = None
    advisory = dimension_bound(cospan, r=r)
    payload = {
        "lower_cup": lower,
        "advisory_upper": {
            "value": advisory.value,
            "r": advisory.r,
            "caveat": advisory.caveat,
        },
    }
    if cup_note:
        payload["lower_note"] = cup_note
    return payload


def _json_value(value):
    return "inf" if value == INFINITE else value


def run_problem(instance, overrides=None, *, store=None, jobs=1):
    """Solve the instance's problem; returns (payload, figure context)."""
    options = dict(instance.problem.get("options", {}))
    for key, value in (overrides or {}).items():
        if value is not None:
            options[key] = value
    kind = instance.problem["kind"]

    if kind == "fuzz":
        cfg = GeneratorConfig(
            seed=int(options.get("seed", 0)),
            count=int(options.get("count", 100)),
            max_points=int(options.get("max_points", 6)),
            density=float(options.get("density", 0.35)),
            budget=int(options.get("budget", DEFAULT_HOM_BUDGET)),
            timeout=options.get("timeout"),
        )
        suites = options.get("suites", ["inequalities", "invariance"])
        if isinstance(suites, str):
            suites = [s for s in suites.split(",") if s]
        report = run_fuzz(cfg, suites=tuple(suites), jobs=jobs)
        payload = {
            "kind": "fuzz",
            "config": {
                "seed": cfg.seed,
                "count": cfg.count,
                "max_points": cfg.max_points,
                "density": cfg.density,
                "budget": cfg.budget,
                "timeout": cfg.timeout,
                "suites": list(suites),
            },
            "report": report.to_payload(),
        }
        return payload, ("fuzz", report)

    parts = _resolve_parts(instance)
    r = int(options.get("r", 0))

    if kind == "bounds":
        cospan = problem_cospan("relative_secat", *parts)
        started = time.perf_counter()
        payload = {
            "kind": "bounds",
            "bounds": _bounds_payload(cospan, r),
            "timing": {"seconds": round(time.perf_counter() - started, 6)},
        }
        return payload, ("cover", cospan, None)

    generalized = bool(options.get("generalized")) or kind == "generalized"
    engine_kw = _engine_kwargs(options, generalized, store)
    started = time.perf_counter()
    answer = _solve(kind, parts, generalized, engine_kw)
    elapsed = time.perf_counter() - started

    payload = {
        "kind": kind,
        "mode": "generalized" if generalized else "open",
        "value": _json_value(answer.value),
        "evidence": answer.lower_evidence,
        "certificate": certificate_payload(answer.certificate)
        if answer.certificate
        else None,
        "bounds": _bounds_payload(answer.cospan, r),
        "budget": {
            "homotopy_budget": engine_kw.get("budget", DEFAULT_HOM_BUDGET),
            "timeout": engine_kw.get("timeout"),
        },
        "timing": {"seconds": round(elapsed, 6)},
    }
    if generalized:
        payload["bounds"]["caveat"] = "bounds describe the open-cover value"
    return payload, ("cover", answer.cospan, answer.certificate)


# -- delimited summaries and figures ----------------------------------------


def _write_summary(path, payload):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        if payload["kind"] == "fuzz":
            writer.writerow(["check", "passed", "failed", "skipped", "inapplicable"])
            report = payload["report"]
            names = sorted(
                set(report["passed"])
                | set(report["failed"])
                | set(report["skipped"])
                | set(report["inapplicable"])
            )
            for name in names:
                writer.writerow(
                    [
                        name,
                        report["passed"].get(name, 0),
                        report["failed"].get(name, 0),
                        report["skipped"].get(name, 0),
                        report["inapplicable"].get(name, 0),
                    ]
                )
            return
        bounds = payload.get("bounds", {})
        writer.writerow(
            ["kind", "mode", "value", "lower_cup", "advisory_upper", "seconds"]
        )
        writer.writerow(
            [
                payload["kind"],
                payload.get("mode", ""),
                payload.get("value", ""),
                bounds.get("lower_cup", ""),
                bounds.get("advisory_upper", {}).get("value", ""),
                payload.get("timing", {}).get("seconds", ""),
            ]
        )


def _hasse_layout(space):
    height = [0] * space.n
    for i in space.linext:
        below = [lo for lo, hi in space.covers_idx if hi == i]
        height[i] = 1 + max((height[j] for j in below), default=0)
    rows = {}
    for i in range(space.n):
        rows.setdefault(height[i], []).append(i)
    positions = {}
    for level, row in sorted(rows.items()):
        for slot, i in enumerate(row):
            positions[i] = (slot - (len(row) - 1) / 2.0, level)
    return positions


def _render_cover_figure(path, cospan, certificate):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    base = cospan.base
    positions = _hasse_layout(base)
    classes = (
        [frozenset(base.index[x] for x in cls) for cls in certificate.classes]
        if certificate
        else [frozenset(range(base.n))]
    )
    count = len(classes)
    fig, axes = plt.subplots(1, count, figsize=(max(3, 2.2 * count), 3.2), squeeze=False)
    for slot, (axis, members) in enumerate(zip(axes[0], classes)):
        for lo, hi in base.covers_idx:
            x0, y0 = positions[lo]
            x1, y1 = positions[hi]
            axis.plot([x0, x1], [y0, y1], color="0.75", lw=1, zorder=1)
        xs = [positions[i][0] for i in range(base.n)]
        ys = [positions[i][1] for i in range(base.n)]
        colors = ["#d95f02" if i in members else "#cccccc" for i in range(base.n)]
        axis.scatter(xs, ys, c=colors, s=180, zorder=2, edgecolors="black", lw=0.5)
        for i in range(base.n):
            axis.annotate(
                base.elements[i],
                positions[i],
                ha="center",
                va="center",
                fontsize=7,
                zorder=3,
            )
        axis.set_title(
            f"class {slot}" if certificate else "base space", fontsize=9
        )
        axis.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_fuzz_figure(path, report):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    payload = report.to_payload()
    names = sorted(
        set(payload["passed"])
        | set(payload["failed"])
        | set(payload["skipped"])
        | set(payload["inapplicable"])
    )
    if not names:
        names = ["(no checks)"]
    series = [
        ("passed", "#1b9e77"),
        ("failed", "#d62728"),
        ("skipped", "#7570b3"),
        ("inapplicable", "#cccccc"),
    ]
    fig, axis = plt.subplots(figsize=(max(4, 0.45 * len(names) + 2), 4))
    bottoms = [0] * len(names)
    for label, color in series:
        heights = [payload[label].get(name, 0) for name in names]
        axis.bar(range(len(names)), heights, bottom=bottoms, color=color, label=label)
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    axis.set_xticks(range(len(names)))
    axis.set_xticklabels(names, rotation=90, fontsize=7)
    axis.legend(fontsize=8)
    axis.set_ylabel("instances")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report_files(directory, payload, figure_context):
    """report.json, summary.csv and a rendered figure, side by side."""
    outdir = Path(directory)
    outdir.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=2, sort_keys=True)
    (outdir / "report.json").write_text(text + "\n")
    _write_summary(outdir / "summary.csv", payload)
    if figure_context[0] == "fuzz":
        _render_fuzz_figure(outdir / "checks.png", figure_context[1])
    else:
        _, cospan, certificate = figure_context
        _render_cover_figure(outdir / "cover.png", cospan, certificate)


# -- command line ------------------------------------------------------------


def _common_flags(parser):
    parser.add_argument("--generalized", action="store_true", help="use arbitrary-subset covers")
    parser.add_argument("--max-level", type=int, default=None, help="cap the cover search depth")
    parser.add_argument("--budget", type=int, default=None, help="homotopy search node budget")
    parser.add_argument("--timeout", type=float, default=None, help="wall-clock limit in seconds")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized problems")
    parser.add_argument("--count", type=int, default=None, help="instance count for fuzz problems")
    parser.add_argument("--no-cache", action="store_true", help="skip the on-disk memo cache")
    parser.add_argument("--report-path", default=None, help="directory for report files and figures")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for fuzz problems")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="secat",
        description="Exact sectional-category style invariants of finite spaces.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    runner = commands.add_parser("run", help="solve the problem in an instance file")
    runner.add_argument("instance", help="path to a JSON instance file")
    _common_flags(runner)

    fuzzer = commands.add_parser("fuzz", help="run the randomized relation suite")
    _common_flags(fuzzer)
    fuzzer.add_argument("--max-points", type=int, default=6)
    fuzzer.add_argument("--density", type=float, default=0.35)
    fuzzer.add_argument(
        "--suites",
        default="inequalities,invariance",
        help="comma-separated subset of inequalities,invariance,product",
    )

    checker = commands.add_parser("validate", help="re-validate a report's certificate")
    checker.add_argument("instance", help="path to the instance file")
    checker.add_argument("report", help="path to the report JSON")
    return parser


def _overrides_from(args):
    return {
        "generalized": True if args.generalized else None,
        "max_level": args.max_level,
        "budget": args.budget,
        "timeout": args.timeout,
        "seed": args.seed,
        "count": args.count,
    }


def _cmd_run(args):
    instance = load_instance(args.instance)
    store = None if args.no_cache else DiskCache()
    payload, figure_context = run_problem(
        instance, _overrides_from(args), store=store, jobs=args.jobs
    )
    return payload, figure_context


def _cmd_fuzz(args):
    problem = {
        "kind": "fuzz",
        "options": {
            "seed": args.seed if args.seed is not None else 0,
            "count": args.count if args.count is not None else 100,
            "max_points": args.max_points,
            "density": args.density,
            "suites": [s for s in args.suites.split(",") if s],
        },
    }
    if args.budget is not None:
        problem["options"]["budget"] = args.budget
    if args.timeout is not None:
        problem["options"]["timeout"] = args.timeout
    instance = InstanceFile(SCHEMA_VERSION, {}, {}, {}, problem)
    return run_problem(instance, None, jobs=args.jobs)


def _cmd_validate(args):
    instance = load_instance(args.instance)
    try:
        report = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"report is not valid JSON: {exc.msg}") from None
    validate_report(instance, report)
    return {"validated": True, "kind": report.get("kind")}, None


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            payload, figure_context = _cmd_run(args)
        elif args.command == "fuzz":
            payload, figure_context = _cmd_fuzz(args)
        else:
            payload, figure_context = _cmd_validate(args)
        report_path = getattr(args, "report_path", None)
        if report_path and figure_context is not None:
            write_report_files(report_path, payload, figure_context)
    except (CertificateError, CrossCheckMismatch) as exc:
        return _fail(exc, 4)
    except (SearchBudgetExceeded, EngineTimeout) as exc:
        return _fail(exc, 3)
    except SecatError as exc:
        return _fail(exc, 2)
    except OSError as exc:
        return _fail(exc, 2)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _fail(exc, code):
    entry = {"error": type(exc).__name__, "message": str(exc)}
    bracket = getattr(exc, "bracket", None)
    if bracket is not None:
        entry["bracket"] = list(bracket)
    print(json.dumps(entry, indent=2, sort_keys=True), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
