"""``naklab`` command line.

Exit codes: 0 pass, 1 verification failure or invalid model, 2 input
error, 3 generation-rank failure.
"""

from __future__ import annotations

import json
import logging
import re
import sys
from pathlib import Path

import click

from .fock import CentralSign, format_vector, parse_vector
from .frobenius import ModelError, ModelParseError, validate
from .linalg import Inconsistent
from .models import BUILTIN_MODELS, get_model
from .operators import RankDeficient, extract_universal_f, gtilde_class, ok_class, unit_class
from .rings import (
    GenerationFailure,
    NotReduced,
    build_ring,
    reduction_table_json,
    ring_product,
    structure_constants,
    structure_constants_csv,
    structure_constants_json,
)
from .scalars import format_scalar
from .suites import SUITES, run_suite, workers_from_env

log = logging.getLogger("naklab")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GENERATION = 0, 1, 2, 3


def _emit(doc):
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


def _input_error(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT)


def _load_model(spec):
    try:
        return get_model(spec)
    except FileNotFoundError:
        _input_error(f"no such model file or built-in model: {spec}")
    except (ModelParseError, OSError) as exc:
        _input_error(f"cannot read model {spec}: {exc}")
    except ModelError as exc:
        _emit({"model": spec, "ok": False, "problems": [exc.as_dict()]})
        sys.exit(EXIT_FAIL)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Exact Nakajima-operator computations on Hilbert-scheme and orbifold Fock spaces."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)


@main.command("validate")
@click.argument("model")
def cmd_validate(model):
    """Check every algebra invariant of MODEL (file or built-in name)."""
    alg = _load_model(model)
    problems = validate(alg)
    _emit({"model": alg.name, "ok": not problems, "problems": [p.as_dict() for p in problems]})
    sys.exit(EXIT_FAIL if problems else EXIT_OK)


@main.command("canonicalize")
@click.argument("model")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write here instead of stdout.")
def cmd_canonicalize(model, out_path):
    """Print MODEL in canonical JSON form (also exports built-in models)."""
    alg = _load_model(model)
    text = alg.to_json()
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _split_csv(values):
    out = []
    for v in values:
        out.extend(p for p in v.split(",") if p)
    return out


@main.command("verify")
@click.option("--suite", "suites", multiple=True, default=("all",),
              help="Suite name (repeatable or comma separated): " + ", ".join(SUITES) + ", all.")
@click.option("--model", "models", multiple=True, default=("p2",),
              help="Model file or built-in name (repeatable or comma separated).")
@click.option("--max-n", type=int, default=3, show_default=True)
@click.option("--max-k", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=40, show_default=True,
              help="Sampled mode-list pairs for the tau suite.")
@click.option("--mutate-gtilde", default=None,
              help="Flip the sign of one leading term of G~_k (negative control), e.g. '(-2,2)'.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the JSON report to this file.")
def cmd_verify(suites, models, max_n, max_k, seed, samples, mutate_gtilde, report_path):
    """Run verification suites and print a JSON report."""
    names = _split_csv(suites)
    if "all" in names:
        names = list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        _input_error(f"unknown suite(s): {', '.join(unknown)}")
    if max_n < 0 or max_k < 0:
        _input_error("--max-n and --max-k must be >= 0")
    model_specs = _split_csv(models)
    for spec in model_specs:
        alg = _load_model(spec)
        problems = validate(alg)
        if problems:
            _emit({"model": spec, "ok": False, "problems": [p.as_dict() for p in problems]})
            sys.exit(EXIT_FAIL)
    if mutate_gtilde is not None:
        try:
            from .partitions import GeneralizedPartition
            GeneralizedPartition.parse(mutate_gtilde)
        except ValueError as exc:
            _input_error(str(exc))
    log.info("seed=%d workers=%d", seed, workers_from_env())
    reports = []
    try:
        for name in names:
            log.info("suite %s", name)
            reports.append(run_suite(name, model_specs, max_n, max_k, seed=seed,
                                     mutate=mutate_gtilde, samples=samples))
    except GenerationFailure as exc:
        _emit({"error": "GenerationFailure", "degree": exc.degree, "corank": exc.corank,
               "message": str(exc)})
        sys.exit(EXIT_GENERATION)
    doc = {
        "models": model_specs,
        "max_n": max_n,
        "max_k": max_k,
        "seed": seed,
        "passed": all(r.passed for r in reports),
        "suites": [r.as_dict() for r in reports],
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if report_path:
        Path(report_path).write_text(text + "\n", encoding="utf-8")
    click.echo(text)
    for r in reports:
        click.echo(f"{r.suite}: {r.checks} checks, {len(r.failures)} failures", err=True)
    sys.exit(EXIT_OK if doc["passed"] else EXIT_FAIL)


def _side_option(f):
    return click.option("--side", type=click.Choice(["hilbert", "orbifold"]), default=None,
                        help="Hilbert (quantum-corrected) or orbifold side.")(f)


@main.command("tables")
@_side_option
@click.option("--n", "n", type=int, required=True)
@click.option("--model", default="p2", show_default=True)
@click.option("--out", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--dest", type=click.Path(dir_okay=False), default=None,
              help="Output file (default: stdout).")
@click.option("--reductions", type=click.Path(dir_okay=False), default=None,
              help="Also write the generator reduction table (JSON) here.")
def cmd_tables(side, n, model, fmt, dest, reductions):
    """Export ring structure constants for levels 1..N.

    Indices run over one global basis: the canonical basis of level 1, then
    level 2, and so on; products never mix levels.
    """
    alg = _load_model(model)
    sign = CentralSign.parse(side or "orbifold")
    if n < 1:
        _input_error("--n must be >= 1")
    try:
        rings = [build_ring(sign, alg, level) for level in range(1, n + 1)]
    except GenerationFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_GENERATION)
    tables = [structure_constants(R) for R in rings]
    text = structure_constants_csv(rings, tables) if fmt == "csv" else structure_constants_json(rings, tables)
    if dest:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    if reductions:
        Path(reductions).write_text(reduction_table_json(rings[-1]), encoding="utf-8")


_CLASS_RE = re.compile(r"^\s*(O|Gt|G~|G)\[\s*(\d+)\s*\]\(\s*([^)]*?)\s*\)\s*$")


def _parse_operand(alg, text):
    """``(side or None, vector or None, class spec or None)``."""
    m = _CLASS_RE.match(text)
    if m:
        letter, k, elem = m.group(1), int(m.group(2)), m.group(3)
        side = CentralSign.ORBIFOLD if letter == "O" else CentralSign.HILBERT
        return side, None, (k, elem)
    if text.strip() in ("1", "unit"):
        return None, None, "unit"
    v = parse_vector(alg, text)
    side = None
    if "p[" in text:
        side = CentralSign.ORBIFOLD
    elif "a[" in text:
        side = CentralSign.HILBERT
    return side, v, None


def _class_vector(alg, side, spec, n):
    if spec == "unit":
        return unit_class(alg, n)
    k, elem = spec
    alpha = alg.element(int(elem) if elem.isdigit() and elem not in alg.names else elem)
    if side == CentralSign.ORBIFOLD:
        return ok_class(alg, k, alpha, n)
    return gtilde_class(alg, k, alpha, n)


@main.command("product")
@click.argument("left")
@click.argument("right")
@_side_option
@click.option("--n", "n", type=int, default=None,
              help="Level; taken from an explicit state operand when one is given.")
@click.option("--model", default="p2", show_default=True)
def cmd_product(left, right, side, n, model):
    """Multiply two classes in the ring at level N.

    Operands are states such as ``"p[-2](1)|0>"`` or symbolic classes
    ``O[k](alpha)`` (orbifold) / ``Gt[k](alpha)`` (Hilbert) and ``1``.
    """
    alg = _load_model(model)
    try:
        parsed = [_parse_operand(alg, t) for t in (left, right)]
    except (ValueError, ModelParseError) as exc:
        _input_error(str(exc))
    sides = {s for s, _, _ in parsed if s is not None}
    if side is not None:
        sides.add(CentralSign.parse(side))
    if len(sides) > 1:
        _input_error("operands belong to different sides")
    sign = sides.pop() if sides else CentralSign.ORBIFOLD
    levels = {v.level for _, v, _ in parsed if v is not None}
    if None in levels or len(levels) > 1:
        _input_error("explicit operands must be level-homogeneous and of equal level")
    if levels:
        level = levels.pop()
        if n is not None and n != level:
            click.echo(f"warning: --n {n} ignored; the explicit operand has level {level}", err=True)
    elif n is None:
        _input_error("--n is required when both operands are symbolic")
    else:
        level = n
    if level < 1:
        _input_error("level must be >= 1")
    try:
        vecs = [v if v is not None else _class_vector(alg, sign, spec, level)
                for _, v, spec in parsed]
    except (ValueError, ModelParseError) as exc:
        _input_error(str(exc))
    try:
        R = build_ring(sign, alg, level)
        out = ring_product(R, vecs[0], vecs[1])
    except GenerationFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_GENERATION)
    except NotReduced as exc:
        _input_error(str(exc))
    click.echo(format_vector(out, sign))


@main.command("extract-f")
@click.option("--k", "k", type=int, required=True)
@click.option("--lambda", "lam", required=True, help="Generalized partition, e.g. '(-3)'.")
@click.option("--eps", type=click.Choice(["K", "K2"]), default="K", show_default=True)
@click.option("--models", "models", default="p2,f1,p1xp1", show_default=True,
              help="Comma separated model files or built-in names.")
@click.option("--max-level", type=int, default=6, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Print the full fit as JSON.")
def cmd_extract_f(k, lam, eps, models, max_level, as_json):
    """Fit one universal coefficient of the K-dependent derivative terms."""
    algs = [_load_model(m) for m in _split_csv([models])]
    try:
        fit = extract_universal_f(k, eps, lam, algs, max_level=max_level)
    except ValueError as exc:
        _input_error(str(exc))
    except RankDeficient as exc:
        click.echo(f"error: rank deficient: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    except Inconsistent as exc:
        click.echo(f"error: inconsistent: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    if as_json:
        _emit({
            "k": fit.k, "eps": fit.eps, "lambda": str(fit.lam),
            "value": None if fit.value is None else format_scalar(fit.value),
            "models": fit.models,
            "per_model": {m: format_scalar(v) for m, v in fit.per_model.items()},
            "rank": fit.rank, "unknowns": fit.unknowns,
            "all_values": {f"{e}{mu}": format_scalar(v) for (e, mu), v in sorted(fit.all_values.items())},
        })
    else:
        click.echo("empty" if fit.value is None else format_scalar(fit.value))


@main.command("models")
def cmd_models():
    """List the built-in models."""
    for name, factory in BUILTIN_MODELS.items():
        alg = factory()
        click.echo(f"{name}\t{alg.name}\tdim={alg.dim}")


if __name__ == "__main__":  # pragma: no cover
    main()
