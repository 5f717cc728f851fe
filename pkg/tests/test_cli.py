from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

import naklab.rings as rings_mod
from naklab.cli import main

MODELS = Path(__file__).resolve().parents[1] / "models"


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


def test_validate_ok(run):
    for name in ("p2", "p1xp1", "f1", "bl2", "k0"):
        assert run("validate", MODELS / f"{name}.json").exit_code == 0


def test_validate_malformed(run, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    res = run("validate", bad)
    assert res.exit_code == 2


def test_validate_missing_file(run, tmp_path):
    assert run("validate", tmp_path / "nope.json").exit_code == 2


def test_validate_degenerate(run, tmp_path):
    doc = json.loads((MODELS / "p2.json").read_text())
    doc["counit"] = {}
    bad = tmp_path / "degenerate.json"
    bad.write_text(json.dumps(doc))
    res = run("validate", bad)
    assert res.exit_code == 1
    assert "DegeneratePairing" in res.output


def test_canonicalize_idempotent(run, tmp_path):
    once = tmp_path / "once.json"
    twice = tmp_path / "twice.json"
    assert run("canonicalize", MODELS / "p2.json", "--out", once).exit_code == 0
    assert run("canonicalize", once, "--out", twice).exit_code == 0
    assert once.read_bytes() == twice.read_bytes() == (MODELS / "p2.json").read_bytes()


def test_verify_vacuous(run):
    res = run("verify", "--suite", "heisenberg", "--max-n", 0)
    assert res.exit_code == 0
    doc = json.loads(res.stdout)
    assert doc["suites"][0]["checks"] == 0


def test_verify_passes(run, tmp_path):
    report = tmp_path / "r.json"
    res = run("verify", "--suite", "iso,pairing,psi", "--model", "p2", "--max-n", 2, "--report", report)
    assert res.exit_code == 0
    assert json.loads(report.read_text())["passed"] is True


def test_verify_mutation_fails(run):
    res = run("verify", "--suite", "iso", "--max-n", 2, "--mutate-gtilde", "(-2,2)")
    assert res.exit_code == 1
    doc = json.loads(res.stdout)
    assert doc["suites"][0]["failures"]


def test_verify_bad_suite(run):
    assert run("verify", "--suite", "nonsense").exit_code == 2


def test_tables_level_one(run):
    res = run("tables", "--side", "orbifold", "--n", 2, "--model", "p2")
    assert res.exit_code == 0
    lines = res.stdout.strip().splitlines()
    assert lines[0] == "degree,i,j,k,re,im"
    level1 = {tuple(line.split(",")[1:4]) for line in lines[1:] if int(line.split(",")[1]) < 3}
    assert ("1", "1", "2") in level1  # h * h = x
    assert ("0", "0", "0") in level1


def test_tables_generation_failure(run, monkeypatch):
    real = rings_mod.ok_operator
    monkeypatch.setattr(rings_mod, "ok_operator",
                        lambda alg, k, alpha: real(alg, 0, alg.one) if k else real(alg, k, alpha))
    res = run("tables", "--side", "orbifold", "--n", 2, "--model", "p2")
    assert res.exit_code == 3


def test_product_examples(run):
    res = run("product", "O[0](h)", "p[-2](1)|0>", "--side", "orbifold", "--n", 2)
    assert res.exit_code == 0
    assert res.stdout.strip() == "2*p[-2](h) |0>"
    res = run("product", "O[1](h)", "p[-2](1)|0>", "--side", "orbifold", "--n", 3)
    assert res.exit_code == 0
    assert "level" in res.stderr


def test_product_bad_operand(run):
    assert run("product", "Q[1](h)", "1", "--n", 2).exit_code == 2


def test_extract_f(run):
    res = run("extract-f", "--k", 1, "--lambda", "(-3)", "--models", "p2,f1", "--max-level", 4)
    assert res.exit_code == 0
    assert res.stdout.strip() == "3"
    res = run("extract-f", "--k", 1, "--lambda", "(-2)", "--eps", "K2", "--models", "p2")
    assert res.stdout.strip() == "empty"


def test_models_listing(run):
    res = run("models")
    assert res.exit_code == 0
    assert "p2" in res.stdout
