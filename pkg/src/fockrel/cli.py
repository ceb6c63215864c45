"""Command-line front end: ``fockrel validate|check|sweep``.

Exit codes: 0 all results as expected, 1 check failure, 2 configuration
error, 3 numeric-overflow rejection.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import sampling
from .checks import CHECKS, DEFAULT_TOLERANCES, NEEDS_CONJUGATION, run_check
from .errors import InvalidConjugationError, InvalidSymbolError, TruncationOverflowError
from .symbols import ConjugationParams, SymbolTriple, conjugation_violations

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_OVERFLOW = 0, 1, 2, 3
DEFAULT_MAX_N = 80
MIN_N = 4

SWEEP_FAMILIES = {
    # family: (check, expected to pass)
    "c_selfadjoint": ("c_selfadjoint", True),
    "c_selfadjoint_perturbed": ("c_selfadjoint", False),
    "hermitian": ("hermitian", True),
    "hermitian_perturbed": ("hermitian", False),
    "unitary": ("unitary", True),
    "adjoint": ("adjoint", True),
}
PERTURBATION = 0.1


class ConfigError(Exception):
    """Raised for any invalid configuration; carries one message per bad record."""

    def __init__(self, messages):
        self.messages = [messages] if isinstance(messages, str) else list(messages)
        super().__init__("; ".join(self.messages))


def max_truncation() -> int:
    raw = os.environ.get("FOCKREL_MAX_N", str(DEFAULT_MAX_N))
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"FOCKREL_MAX_N must be an integer, got {raw!r}") from None


# ---------------------------------------------------------------- config


def parse_complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")


def encode_complex(z: complex) -> list:
    return [z.real, z.imag]


@dataclass
class TripleRecord:
    triple: SymbolTriple
    conjugation: Optional[int] = None
    expect_fail: tuple = ()


@dataclass
class RunConfig:
    truncation: int = 40
    degree_budget: Optional[int] = None
    tolerances: dict = field(default_factory=dict)
    conjugations: list = field(default_factory=list)
    triples: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    sweep: Optional[dict] = None

    @property
    def budget(self) -> int:
        return self.truncation // 2 if self.degree_budget is None else self.degree_budget


def _parse_conjugation(raw, i) -> tuple[Optional[ConjugationParams], list]:
    where = f"conjugations[{i}]"
    if not isinstance(raw, dict) or set(raw) != {"a", "b", "c"}:
        return None, [f"{where}: expected an object with keys a, b, c"]
    try:
        a, b, c = (parse_complex(raw[k], f"{where}.{k}") for k in "abc")
    except ConfigError as exc:
        return None, exc.messages
    violations = conjugation_violations(a, b, c)
    if violations:
        return None, [f"{where}: {v}" for v in violations]
    return ConjugationParams(a, b, c), []


def _parse_triple(raw, i, conjugations) -> tuple[Optional[TripleRecord], list]:
    where = f"triples[{i}]"
    if not isinstance(raw, dict):
        return None, [f"{where}: expected an object"]
    try:
        vals = {k: parse_complex(raw[k], f"{where}.{k}") for k in "CDAB" if k in raw}
        missing = [k for k in "CDAB" if k not in vals]
        if missing:
            return None, [f"{where}: missing {', '.join(missing)}"]
        m = raw.get("m", 0)
        if not isinstance(m, int) or isinstance(m, bool) or m < 0:
            return None, [f"{where}.m: must be a non-negative integer"]
        conj_index = raw.get("conjugation")
        if conj_index is not None:
            if not isinstance(conj_index, int) or not 0 <= conj_index < len(conjugations):
                return None, [f"{where}.conjugation: index {conj_index!r} out of range"]
        if "E" in raw and "F" in raw:
            E = parse_complex(raw["E"], f"{where}.E")
            F = parse_complex(raw["F"], f"{where}.F")
        elif conj_index is not None and conjugations[conj_index] is not None:
            p = conjugations[conj_index]
            E, F = p.a * vals["A"], p.a * vals["B"] + p.b
        elif m == 0:
            E, F = 1.0, 0.0
        else:
            return None, [f"{where}: E and F are required unless a conjugation is referenced"]
        expect_fail = raw.get("expect_fail", [])
        if not isinstance(expect_fail, list) or any(c not in CHECKS for c in expect_fail):
            return None, [f"{where}.expect_fail: must list known check names"]
        t = SymbolTriple(vals["C"], vals["D"], vals["A"], vals["B"], E, F, m)
    except ConfigError as exc:
        return None, exc.messages
    except InvalidSymbolError as exc:
        return None, [f"{where}: {exc}"]
    return TripleRecord(t, conj_index, tuple(expect_fail)), []


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    errors = []
    known = {"truncation", "degree_budget", "tolerances", "conjugations", "triples", "checks", "sweep"}
    unknown = set(raw) - known
    if unknown:
        errors.append(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig()
    N = raw.get("truncation", 40)
    if not isinstance(N, int) or isinstance(N, bool) or N < MIN_N:
        errors.append(f"truncation must be an integer >= {MIN_N}")
    else:
        cfg.truncation = N
    budget = raw.get("degree_budget")
    if budget is not None:
        if not isinstance(budget, int) or isinstance(budget, bool) or not 0 <= budget <= cfg.truncation:
            errors.append("degree_budget must be an integer in [0, truncation]")
        else:
            cfg.degree_budget = budget
    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        errors.append("tolerances must be an object")
    else:
        for name, value in tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                errors.append(f"tolerances: unknown name {name!r}")
            elif not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
                errors.append(f"tolerances.{name}: must be a positive number")
            else:
                cfg.tolerances[name] = float(value)
    conjugations = []
    for i, c in enumerate(raw.get("conjugations", [])):
        p, errs = _parse_conjugation(c, i)
        errors += errs
        conjugations.append(p)
    cfg.conjugations = conjugations
    for i, t in enumerate(raw.get("triples", [])):
        rec, errs = _parse_triple(t, i, conjugations)
        errors += errs
        if rec is not None:
            if rec.triple.m + cfg.budget > cfg.truncation:
                errors.append(f"triples[{i}]: m + degree_budget exceeds truncation")
            cfg.triples.append(rec)
    checks = raw.get("checks", [])
    if not isinstance(checks, list) or any(c not in CHECKS for c in checks):
        errors.append(f"checks must list names from: {', '.join(CHECKS)}")
    else:
        cfg.checks = list(checks)
    sweep = raw.get("sweep")
    if sweep is not None:
        errors += _validate_sweep(sweep)
        cfg.sweep = sweep
    if errors:
        raise ConfigError(errors)
    return cfg


def _validate_sweep(sweep) -> list:
    if not isinstance(sweep, dict):
        return ["sweep must be an object"]
    errors = []
    for key in ("count", "seed"):
        v = sweep.get(key, 0)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            errors.append(f"sweep.{key} must be a non-negative integer")
    cap = sweep.get("magnitude_cap", 1.0)
    if not isinstance(cap, (int, float)) or not 0 < cap <= sampling.MAX_CAP:
        errors.append(f"sweep.magnitude_cap must lie in (0, {sampling.MAX_CAP}]")
    families = sweep.get("families", list(SWEEP_FAMILIES))
    if not isinstance(families, list) or any(f not in SWEEP_FAMILIES for f in families):
        errors.append(f"sweep.families must list names from: {', '.join(SWEEP_FAMILIES)}")
    return errors


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_config(raw)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    errors = []
    if getattr(args, "truncation", None) is not None:
        cfg.truncation = args.truncation
    if getattr(args, "budget", None) is not None:
        cfg.degree_budget = args.budget
    for item in getattr(args, "tol", None) or []:
        name, sep, value = item.partition("=")
        if not sep or name not in DEFAULT_TOLERANCES:
            errors.append(f"--tol expects <name>=<value> with name in {sorted(DEFAULT_TOLERANCES)}")
            continue
        try:
            cfg.tolerances[name] = float(value)
        except ValueError:
            errors.append(f"--tol {name}: {value!r} is not a number")
    if cfg.truncation < MIN_N:
        errors.append(f"truncation must be >= {MIN_N}")
    if not 0 <= cfg.budget <= cfg.truncation:
        errors.append("degree budget must lie in [0, truncation]")
    for i, rec in enumerate(cfg.triples):
        if rec.triple.m + cfg.budget > cfg.truncation:
            errors.append(f"triples[{i}]: m + degree_budget exceeds truncation")
    if errors:
        raise ConfigError(errors)
    if cfg.truncation > max_truncation():
        raise TruncationOverflowError(
            f"truncation {cfg.truncation} exceeds FOCKREL_MAX_N={max_truncation()}"
        )
    return cfg


# ---------------------------------------------------------------- jobs


def _job(task):
    name, t, N, budget, p, tolerances = task
    return run_check(name, t, N, budget, p=p, tolerances=tolerances).to_dict()


def _run_tasks(tasks, jobs: int) -> list:
    if jobs <= 1:
        return [_job(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_job, tasks))


def _annotate(result: dict, expected_pass: bool, **extra) -> dict:
    return {**extra, **result, "expected": "pass" if expected_pass else "fail",
            "as_expected": result["passed"] == expected_pass}


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    if args.format == "json":
        sys.stdout.write(text)
    else:
        for r in report["results"]:
            label = "PASS" if r["passed"] else "FAIL"
            tag = "" if r["as_expected"] else "  (unexpected)"
            where = r.get("family", f"triple[{r.get('triple_index')}]")
            gated = ", ".join(f"{k}={r['metrics'][k]:.3g}" for k in r["gates"])
            print(f"{where} {r['check_name']}: {label} [{gated}]{tag}")
        s = report["summary"]
        print(f"passed {s['passed']}, failed {s['failed']}, unexpected {s['unexpected']}")


def _summary(results) -> dict:
    return {
        "passed": sum(r["passed"] for r in results),
        "failed": sum(not r["passed"] for r in results),
        "unexpected": sum(not r["as_expected"] for r in results),
    }


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    _apply_overrides(cfg, args)
    print(f"ok: {len(cfg.conjugations)} conjugation(s), {len(cfg.triples)} triple(s)")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    names = args.check or cfg.checks
    if not names:
        raise ConfigError("no checks selected (use --check or the config 'checks' list)")
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; available: {', '.join(CHECKS)}")
    tasks, meta = [], []
    for i, rec in enumerate(cfg.triples):
        p = None if rec.conjugation is None else cfg.conjugations[rec.conjugation]
        for name in names:
            if name in NEEDS_CONJUGATION and p is None:
                raise ConfigError(f"triples[{i}]: check {name!r} needs a 'conjugation' index")
            tasks.append((name, rec.triple, cfg.truncation, cfg.budget, p, cfg.tolerances))
            expect_fail = name in rec.expect_fail or name in (args.expect_fail or [])
            meta.append((i, not expect_fail))
    results = [
        _annotate(r, expected, triple_index=i)
        for r, (i, expected) in zip(_run_tasks(tasks, args.jobs), meta)
    ]
    report = {"run": {"N": cfg.truncation, "budget": cfg.budget, "seed": None},
              "results": results, "summary": _summary(results)}
    _emit(report, args)
    return EXIT_OK if report["summary"]["unexpected"] == 0 else EXIT_FAIL


def sample_family(family: str, rng, index: int, cap: float):
    """One (triple, conjugation) draw for a sweep family; m cycles through 0, 1, 2."""
    m = index % 3
    if family in ("c_selfadjoint", "c_selfadjoint_perturbed"):
        p = sampling.conjugation(rng, cap)
        t = sampling.c_selfadjoint_triple(rng, p, m, cap)
        if family.endswith("perturbed"):
            t = SymbolTriple(t.C, t.D + PERTURBATION, t.A, t.B, t.E, t.F, t.m)
        return t, p
    if family in ("hermitian", "hermitian_perturbed"):
        t = sampling.hermitian_triple(rng, m, cap)
        if family.endswith("perturbed"):
            t = SymbolTriple(t.C, t.D, t.A + 1j * PERTURBATION, t.B, t.E, t.F, t.m)
        return t, None
    if family == "unitary":
        return sampling.unitary_triple(rng, cap), None
    if family == "adjoint":
        p = sampling.conjugation(rng, cap)
        return sampling.adjoint_form_triple(rng, p, m, cap), p
    raise KeyError(family)


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    if cfg.sweep is None:
        raise ConfigError("config has no 'sweep' block")
    count = args.count if args.count is not None else cfg.sweep.get("count", 10)
    seed = args.seed if args.seed is not None else cfg.sweep.get("seed", 0)
    cap = float(cfg.sweep.get("magnitude_cap", 1.0))
    families = cfg.sweep.get("families", list(SWEEP_FAMILIES))
    rng = np.random.default_rng(seed)
    tasks, meta = [], []
    for family in families:
        check, expected = SWEEP_FAMILIES[family]
        for k in range(count):
            t, p = sample_family(family, rng, k, cap)
            tasks.append((check, t, cfg.truncation, cfg.budget, p, cfg.tolerances))
            meta.append((family, expected))
    results = [
        _annotate(r, expected, family=family)
        for r, (family, expected) in zip(_run_tasks(tasks, args.jobs), meta)
    ]
    per_family = {}
    for family in families:
        rs = [r for r in results if r["family"] == family]
        per_family[family] = {
            "count": len(rs),
            "expected": "pass" if SWEEP_FAMILIES[family][1] else "fail",
            "pass_rate": sum(r["passed"] for r in rs) / len(rs) if rs else None,
        }
    summary = _summary(results) | {"families": per_family}
    report = {"run": {"N": cfg.truncation, "budget": cfg.budget, "seed": seed,
                      "count": count, "magnitude_cap": cap},
              "results": results, "summary": summary}
    _emit(report, args)
    return EXIT_OK if summary["unexpected"] == 0 else EXIT_FAIL


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockrel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--truncation", type=int, help="override the truncation degree N")
        p.add_argument("--budget", type=int, help="override the degree budget")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override")

    def output(p):
        p.add_argument("--report", help="write the JSON report to this path")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    common(sub.add_parser("validate", help="validate a configuration file"))
    check = sub.add_parser("check", help="run checks on the configured triples")
    common(check)
    output(check)
    check.add_argument("--check", action="append", choices=sorted(CHECKS), help="check to run")
    check.add_argument("--expect-fail", action="append", choices=sorted(CHECKS), default=[],
                       help="check expected to fail for every triple")
    sweep = sub.add_parser("sweep", help="run seeded random families")
    common(sweep)
    output(sweep)
    sweep.add_argument("--count", type=int, help="samples per family")
    sweep.add_argument("--seed", type=int, help="random seed")
    return parser


COMMANDS = {"validate": cmd_validate, "check": cmd_check, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidConjugationError, InvalidSymbolError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationOverflowError as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
