"""Seeded generators, the inequality/invariance checkers, and reports."""

import pytest

from secat.cli_io import parse_instance
from secat.errors import ValidationError
from secat.posets import is_monotone_vector
from secat.propcheck import (
    INEQUALITY_CHECKS,
    INVARIANCE_CHECKS,
    CheckReport,
    GeneratorConfig,
    check_homotopy_invariance,
    check_inequalities,
    check_product,
    encode_cospan,
    make_extras,
    random_cospan,
    random_map,
    random_space,
    run_fuzz,
)

import json
import random


def test_config_rejects_bad_parameters():
    with pytest.raises(ValidationError):
        GeneratorConfig(count=-1)
    with pytest.raises(ValidationError):
        GeneratorConfig(max_points=0)
    with pytest.raises(ValidationError):
        GeneratorConfig(max_points=9)
    with pytest.raises(ValidationError):
        GeneratorConfig(density=1.5)
    with pytest.raises(ValidationError):
        GeneratorConfig(budget=0)


def test_random_space_is_deterministic_and_bounded():
    a = random_space(random.Random("seed"), 6, 0.35)
    b = random_space(random.Random("seed"), 6, 0.35)
    assert a.key == b.key
    assert 1 <= a.n <= 6


def test_random_map_is_monotone():
    rng = random.Random(3)
    for _ in range(50):
        P = random_space(rng, 6, 0.4, prefix="p")
        Q = random_space(rng, 6, 0.4, prefix="q")
        f = random_map(rng, P, Q)
        assert is_monotone_vector(P, Q, f.vector)


def test_random_cospan_is_reproducible():
    cfg = GeneratorConfig(seed=5, count=10)
    first = random_cospan(cfg, 3)
    second = random_cospan(cfg, 3)
    assert first.key == second.key
    assert first.label == "fuzz:5:3"
    assert random_cospan(cfg, 4).key != first.key


def test_inequalities_pass_on_seeded_instances():
    cfg = GeneratorConfig(seed=17, count=12)
    report = CheckReport()
    for index in range(cfg.count):
        cos = random_cospan(cfg, index)
        extras = make_extras(cfg, index, cos)
        report = report.merge(check_inequalities(cos, extras, budget=cfg.budget))
    totals = report.totals()
    assert totals["failed"] == 0, report.failures
    assert totals["passed"] > 0
    assert set(report.passed) <= set(INEQUALITY_CHECKS)


def test_invariance_passes_on_seeded_instances():
    cfg = GeneratorConfig(seed=23, count=6)
    report = CheckReport()
    for index in range(cfg.count):
        cos = random_cospan(cfg, index)
        report = report.merge(check_homotopy_invariance(cos, budget=cfg.budget))
    totals = report.totals()
    assert totals["failed"] == 0, report.failures
    assert set(report.passed) <= set(INVARIANCE_CHECKS)


def test_product_check_only_observes():
    cfg = GeneratorConfig(seed=29, count=2, max_points=4)
    first = random_cospan(cfg, 0)
    second = random_cospan(cfg, 1)
    report = check_product(first, second)
    assert report.totals()["passed"] == 0
    assert report.totals()["failed"] == 0
    assert report.observations
    entry = report.observations[0]
    assert "holds" in entry and "check" in entry


def test_report_merge_is_order_independent():
    cfg = GeneratorConfig(seed=31, count=4)
    parts = []
    for index in range(cfg.count):
        cos = random_cospan(cfg, index)
        extras = make_extras(cfg, index, cos)
        parts.append(check_inequalities(cos, extras, budget=cfg.budget))
    forward = CheckReport()
    for part in parts:
        forward = forward.merge(part)
    backward = CheckReport()
    for part in reversed(parts):
        backward = backward.merge(part)
    assert forward.to_payload() == backward.to_payload()


def test_report_payload_is_json_serializable():
    report = CheckReport()
    report.ok("x")
    report.skip("y", {"label": "l"}, "why")
    report.not_applicable("z")
    payload = report.to_payload()
    assert json.loads(json.dumps(payload)) == payload
    assert payload["totals"] == {
        "passed": 1,
        "failed": 0,
        "skipped": 1,
        "inapplicable": 1,
    }


def test_encoded_cospan_reruns_identically():
    from secat.cli_io import _resolve_parts
    from secat.invariants import problem_cospan

    cfg = GeneratorConfig(seed=37, count=3)
    cos = random_cospan(cfg, 1)
    instance = parse_instance(json.dumps(encode_cospan(cos)))
    rebuilt = problem_cospan(instance.problem["kind"], *_resolve_parts(instance))
    assert rebuilt.key == cos.key


def test_run_fuzz_matches_sequential_merge():
    cfg = GeneratorConfig(seed=41, count=6)
    merged = run_fuzz(cfg, suites=("inequalities",))
    manual = CheckReport()
    for index in range(cfg.count):
        cos = random_cospan(cfg, index)
        extras = make_extras(cfg, index, cos)
        manual = manual.merge(
            check_inequalities(cos, extras, budget=cfg.budget, timeout=cfg.timeout)
        )
    assert merged.to_payload() == manual.to_payload()


def test_run_fuzz_is_job_count_invariant():
    cfg = GeneratorConfig(seed=43, count=8, max_points=5)
    solo = run_fuzz(cfg, suites=("inequalities", "invariance"), jobs=1)
    duo = run_fuzz(cfg, suites=("inequalities", "invariance"), jobs=2)
    assert json.dumps(solo.to_payload(), sort_keys=True) == json.dumps(
        duo.to_payload(), sort_keys=True
    )
