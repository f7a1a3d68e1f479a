from pathlib import Path

import pytest

import algclosure

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def identity_of(group):
    trivial = algclosure.subgroups(group)[0]
    assert len(trivial) == 1
    return trivial[0]


def test_catalog_has_small_groups():
    names = algclosure.catalog_names()
    for n in ("C1", "C6", "S3", "Q8", "A4"):
        assert n in names


def test_closure_of_finite_subset_is_itself():
    assert algclosure.closure("C6", ["1", "2"]) == ["1", "2"]
    assert algclosure.closure("S3", []) == []


def test_word_values():
    e = identity_of("S3")
    a = algclosure.subgroups("S3")[1][1]
    assert algclosure.evaluate_mf("#1 #1^-1", "S3", [a]) == e
    assert algclosure.evaluate_mf("#1 #2^-1", "S3", [a, e]) == a
    assert algclosure.evaluate_mf("#1 #2^-1", "Z", ["7", "7"]) == "0"


def test_supernormal_abelian_and_oracle():
    for sub in algclosure.subgroups("C2xC4"):
        assert algclosure.is_supernormal("C2xC4", sub) == (True, True)
    for sub in algclosure.subgroups("S3"):
        brute, oracle = algclosure.is_supernormal("S3", sub)
        assert brute == oracle


def test_non_subgroup_is_rejected():
    a = algclosure.subgroups("S3")[1][1]
    with pytest.raises(ValueError):
        algclosure.is_supernormal("S3", [a])


def test_construct_first_stage_on_integers():
    code, report = algclosure.run("construct", SCENARIOS / "z_positives.toml", stages=1)
    assert code == 0
    assert report["result"]["stages"][0]["x"] == "5"


def test_refutation_and_recheck():
    code, report = algclosure.run("refute", SCENARIOS / "z_two_four.toml", recheck=True)
    assert code == 0
    assert report["result"]["verdict"] == "identity-outside-closure"
    assert report["recheck"]["ok"]


def test_reports_are_deterministic():
    first = algclosure.run("construct", SCENARIOS / "z_positives.toml", stages=2)
    second = algclosure.run("construct", SCENARIOS / "z_positives.toml", stages=2)
    assert first == second


def test_input_errors_map_to_exit_code_4(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("version = 1\n[construct]\nset = 'missing'\n")
    code, report = algclosure.run("construct", bad)
    assert code == 4
    assert report["outcome"] == "input-error"
