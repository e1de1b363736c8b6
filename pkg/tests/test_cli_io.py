"""Instance files, the disk cache, certificate validation, CLI behaviour."""

import csv
import json
import os

import pytest

from secat.cli_io import (
    DiskCache,
    certificate_payload,
    main,
    parse_instance,
    run_problem,
    serialize_instance,
    validate_certificate,
    validate_report,
)
from secat.errors import CertificateError, ParseError, ValidationError
from secat.invariants import problem_cospan, tc
from secat.posets import build_space

PSEUDOCIRCLE_SPACE = {
    "elements": ["a", "b", "c", "d"],
    "covers": [["a", "c"], ["a", "d"], ["b", "c"], ["b", "d"]],
}


def cat_instance_dict():
    return {
        "version": 1,
        "spaces": {"S": dict(PSEUDOCIRCLE_SPACE)},
        "maps": {"id": {"from": "S", "to": "S", "values": {x: x for x in "abcd"}}},
        "problem": {"kind": "cat", "map": "id"},
    }


def tc_instance_dict(elements, covers):
    return {
        "version": 1,
        "spaces": {"S": {"elements": elements, "covers": covers}},
        "maps": {},
        "problem": {"kind": "tc", "space": "S"},
    }


def test_serialize_parse_round_trip():
    instance = parse_instance(json.dumps(cat_instance_dict()))
    text = serialize_instance(instance)
    again = parse_instance(text)
    assert serialize_instance(again) == text


def test_parse_rejects_malformed_json():
    with pytest.raises(ParseError) as exc:
        parse_instance("{nope")
    assert "line 1" in str(exc.value)


def test_parse_rejects_unknown_keys_and_versions():
    bad = dict(cat_instance_dict(), extra=1)
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(bad))
    bad = dict(cat_instance_dict(), version=99)
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(bad))
    bad = cat_instance_dict()
    del bad["version"]
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(bad))


def test_parse_rejects_dangling_references():
    bad = cat_instance_dict()
    bad["problem"]["map"] = "ghost"
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(bad))
    bad = cat_instance_dict()
    bad["maps"]["id"]["from"] = "ghost"
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(bad))


def test_parse_rejects_unknown_options():
    bad = cat_instance_dict()
    bad["problem"]["options"] = {"frobnicate": True}
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(bad))


def test_parse_rejects_non_monotone_maps():
    from secat.errors import NotMonotone

    bad = cat_instance_dict()
    bad["maps"]["id"]["values"] = {"a": "c", "b": "b", "c": "a", "d": "d"}
    with pytest.raises(NotMonotone):
        parse_instance(json.dumps(bad))


def test_run_problem_payload_shape():
    instance = parse_instance(json.dumps(cat_instance_dict()))
    payload, figure_context = run_problem(instance)
    assert payload["kind"] == "cat"
    assert payload["mode"] == "open"
    assert payload["value"] == 1
    assert payload["bounds"]["lower_cup"] == 1
    assert payload["bounds"]["advisory_upper"]["value"] >= 1
    assert payload["timing"]["seconds"] >= 0
    assert payload["certificate"] is not None
    assert figure_context[0] == "cover"
    validate_report(instance, payload)


def test_run_problem_serializes_infinity():
    instance = parse_instance(
        json.dumps(tc_instance_dict(["p", "q"], []))
    )
    payload, _ = run_problem(instance)
    assert payload["value"] == "inf"
    assert payload["certificate"] is None
    assert json.loads(json.dumps(payload))["value"] == "inf"


def test_run_problem_generalized_carries_caveat():
    instance = parse_instance(json.dumps(cat_instance_dict()))
    payload, _ = run_problem(instance, {"generalized": True})
    assert payload["mode"] == "generalized"
    assert "open-cover" in payload["bounds"]["caveat"]


def test_fuzz_reports_have_no_timing():
    instance_dict = {
        "version": 1,
        "spaces": {},
        "maps": {},
        "problem": {"kind": "fuzz", "options": {"seed": 3, "count": 4}},
    }
    instance = parse_instance(json.dumps(instance_dict))
    payload, figure_context = run_problem(instance)
    assert "timing" not in payload
    assert payload["report"]["totals"]["failed"] == 0
    assert figure_context[0] == "fuzz"
    second, _ = run_problem(instance, jobs=2)
    assert json.dumps(payload, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_disk_cache_round_trip(tmp_path):
    cache = DiskCache(tmp_path)
    key = ("sectional", "somekey", 5)
    assert cache.get(key) is None
    cache.put(key, {"sectional": True})
    assert cache.get(key) == {"sectional": True}


def test_disk_cache_treats_corruption_as_miss(tmp_path):
    cache = DiskCache(tmp_path)
    key = ("sectional", "k", 1)
    cache.put(key, {"sectional": False})
    path = cache._path(key)
    path.write_text("not json")
    assert cache.get(key) is None
    cache.put(key, {"sectional": False})
    wrapper = json.loads(path.read_text())
    wrapper["body"] = {"sectional": True}
    path.write_text(json.dumps(wrapper))
    assert cache.get(key) is None, "body hash must catch tampering"


def test_disk_cache_honours_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SECAT_CACHE_DIR", str(tmp_path / "envcache"))
    cache = DiskCache()
    assert str(cache.root).startswith(str(tmp_path))


def test_validate_certificate_accepts_engine_output():
    space = build_space("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
    answer = tc(space)
    payload = certificate_payload(answer.certificate)
    validate_certificate(answer.cospan, answer.value, payload)


def test_validate_certificate_rejects_tampering():
    space = build_space("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
    answer = tc(space)
    good = certificate_payload(answer.certificate)

    short = json.loads(json.dumps(good))
    short["classes"] = short["classes"][:-1]
    short["sections"] = short["sections"][:-1]
    short["fences"] = short["fences"][:-1]
    with pytest.raises(CertificateError):
        validate_certificate(answer.cospan, answer.value, short)

    holed = json.loads(json.dumps(good))
    holed["classes"][0] = holed["classes"][0][:-1]
    with pytest.raises(CertificateError):
        validate_certificate(answer.cospan, answer.value, holed)

    broken = json.loads(json.dumps(good))
    broken["fences"][0].append({"ghost": "(a,a)"})
    with pytest.raises(CertificateError):
        validate_certificate(answer.cospan, answer.value, broken)

    crossed = json.loads(json.dumps(good))
    crossed["sections"][0], crossed["sections"][1] = (
        crossed["sections"][1],
        crossed["sections"][0],
    )
    with pytest.raises(CertificateError):
        validate_certificate(answer.cospan, answer.value, crossed)


def test_validate_report_requires_certificate():
    instance = parse_instance(json.dumps(cat_instance_dict()))
    with pytest.raises(ValidationError):
        validate_report(instance, {"kind": "cat", "value": 1, "certificate": None})


def test_main_run_and_validate_exit_zero(tmp_path, capsys):
    instance_path = tmp_path / "cat.json"
    instance_path.write_text(json.dumps(cat_instance_dict()))
    assert main(["run", str(instance_path)]) == 0
    report = json.loads(capsys.readouterr().out)
    report_path = tmp_path / "report.json"
    report_path.write_text(json.dumps(report))
    assert main(["validate", str(instance_path), str(report_path)]) == 0
    assert json.loads(capsys.readouterr().out)["validated"] is True


def test_main_exit_codes(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    assert main(["run", str(missing)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "FileNotFoundError"

    garbled = tmp_path / "garbled.json"
    garbled.write_text("{nope")
    assert main(["run", str(garbled)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ParseError"

    instance_path = tmp_path / "cat.json"
    instance_path.write_text(json.dumps(cat_instance_dict()))
    assert main(["run", str(instance_path), "--max-level", "0", "--no-cache"]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "SearchBudgetExceeded"
    assert err["bracket"] == [1, 1]


def test_main_validate_rejects_forged_report(tmp_path, capsys):
    instance_path = tmp_path / "cat.json"
    instance_path.write_text(json.dumps(cat_instance_dict()))
    assert main(["run", str(instance_path)]) == 0
    report = json.loads(capsys.readouterr().out)
    report["value"] = 0
    report["certificate"]["classes"] = report["certificate"]["classes"][:1]
    report["certificate"]["sections"] = report["certificate"]["sections"][:1]
    report["certificate"]["fences"] = report["certificate"]["fences"][:1]
    forged = tmp_path / "forged.json"
    forged.write_text(json.dumps(report))
    assert main(["validate", str(instance_path), str(forged)]) == 4
    assert json.loads(capsys.readouterr().err)["error"] == "CertificateError"


def test_report_path_writes_files(tmp_path, capsys):
    instance_path = tmp_path / "cat.json"
    instance_path.write_text(json.dumps(cat_instance_dict()))
    outdir = tmp_path / "out"
    assert (
        main(["run", str(instance_path), "--report-path", str(outdir), "--no-cache"])
        == 0
    )
    capsys.readouterr()
    written = {p.name for p in outdir.iterdir()}
    assert written == {"report.json", "summary.csv", "cover.png"}
    assert (outdir / "cover.png").stat().st_size > 0
    with open(outdir / "summary.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0][:3] == ["kind", "mode", "value"]
    assert rows[1][2] == "1"


def test_report_path_for_fuzz_writes_checks_figure(tmp_path, capsys):
    outdir = tmp_path / "fuzzout"
    code = main(
        [
            "fuzz",
            "--seed",
            "9",
            "--count",
            "4",
            "--report-path",
            str(outdir),
        ]
    )
    assert code == 0
    capsys.readouterr()
    written = {p.name for p in outdir.iterdir()}
    assert written == {"report.json", "summary.csv", "checks.png"}
    saved = json.loads((outdir / "report.json").read_text())
    assert saved["report"]["totals"]["failed"] == 0


def test_cli_fuzz_is_deterministic_across_jobs(capsys):
    assert main(["fuzz", "--seed", "11", "--count", "6", "--jobs", "1"]) == 0
    one = capsys.readouterr().out
    assert main(["fuzz", "--seed", "11", "--count", "6", "--jobs", "3"]) == 0
    three = capsys.readouterr().out
    assert one == three
