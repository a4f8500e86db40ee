"""Batch front end: load pair files, run verifications and witness suites, emit reports.

Exit codes are stable across output formats:

* 0 -- everything requested was certified,
* 1 -- some check failed or stayed inconclusive (including witness rank
       shortfalls and degenerate sample sets),
* 2 -- usage or input errors (unparseable pair files, unknown suites,
       out-of-range sweep sizes).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import multiprocessing
import os
import sys
from dataclasses import asdict, dataclass

from . import __version__, presentations, verifier
from .presentations import (CommutationPair, PairValidationError, TooLarge,
                            enumerate_pairs, is_regular, load_pair,
                            pair_from_json_dict, regularize)
from .repmodels import DegenerateSamples, WitnessInvalid


@dataclass
class RunConfig:
    degree_bound: int = 2
    product_bound: int = 2
    step_limit: int = 100_000
    residual_tolerance: float = 1e-9
    svd_threshold: float = 1e-6
    seed: int = 0
    jobs: int = 0  # 0 means: use available parallelism
    output: str = ""
    format: str = "text"

    def __post_init__(self):
        for name in ("degree_bound", "product_bound", "step_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("residual_tolerance", "svd_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.product_bound < self.degree_bound:
            raise ValueError("product_bound must be at least degree_bound")
        if self.product_bound > 4:
            raise ValueError("product_bound is capped at 4")
        if self.format not in ("json", "text"):
            raise ValueError(f"unknown format {self.format!r}")

    def effective_jobs(self) -> int:
        if self.jobs > 0:
            return self.jobs
        env = os.environ.get("NCSTAR_JOBS")
        if env:
            return max(1, int(env))
        return max(1, os.cpu_count() or 1)

    def hash(self) -> str:
        body = {k: v for k, v in asdict(self).items() if k != "output"}
        body["version"] = __version__
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]

    def envelope(self) -> dict:
        return {
            "tool": "ncstar",
            "version": __version__,
            "config": {k: v for k, v in asdict(self).items() if k != "output"},
            "config_hash": self.hash(),
        }


def _emit(config: RunConfig, payload: dict, text_lines) -> None:
    if config.format == "json":
        body = json.dumps(payload, indent=2) + "\n"
    else:
        body = "\n".join(text_lines) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _report_lines(report) -> list:
    lines = [f"task: {report.task}"]
    for notice in report.notices:
        lines.append(f"  note: {notice}")
    width = max((len(c.name) for c in report.checks), default=0)
    for c in report.checks:
        mark = "ok " if c.passed else "FAIL"
        lines.append(f"  [{mark}] {c.name:<{width}}  {c.certificate.status}"
                     + (f"  ({c.certificate.detail})" if c.certificate.detail and not c.passed else ""))
    lines.append(f"overall: {report.overall}  passed: {report.passed}")
    return lines


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_regularize(args, config: RunConfig) -> int:
    pair = load_pair(args.input)
    before = is_regular(pair)
    fixed = regularize(pair)
    payload = config.envelope()
    payload["task"] = "regularize"
    payload["report"] = {
        "input_pair": pair.to_json_dict(),
        "was_regular": before.is_regular,
        "violations_convention_A": [list(v) for v in before.violations_convention_A],
        "violations_convention_B": list(before.violations_convention_B),
        "output_pair": fixed.to_json_dict(),
        "changed": fixed != pair,
    }
    if args.pair_output:
        presentations.save_pair(fixed, args.pair_output)
    lines = [
        f"regular: {str(before.is_regular).lower()}",
        f"violations A: {[list(v) for v in before.violations_convention_A]}",
        f"violations B: {list(before.violations_convention_B)}",
        f"changed: {fixed != pair}",
        f"output eta: {[list(r) for r in fixed.eta]}",
        f"output epsilon: {[list(r) for r in fixed.epsilon]}",
    ]
    _emit(config, payload, lines)
    return 0


def _run_verify_target(target: str, pair, config: RunConfig):
    if target == "hopf":
        return verifier.verify_comultiplication(pair, config.degree_bound)
    if target == "sphere-action":
        return verifier.verify_sphere_action(pair, "both", config.degree_bound)
    if target == "tuple-action":
        return verifier.verify_tuple_action(pair.epsilon, "both", config.degree_bound)
    if target == "noninjectivity":
        return verifier.verify_noninjectivity_example()
    raise KeyError(target)


def cmd_verify(args, config: RunConfig) -> int:
    if args.target != "noninjectivity" and not args.input:
        raise PairValidationError(f"target {args.target} requires --input PAIRFILE")
    pair = load_pair(args.input) if args.input else None
    report = _run_verify_target(args.target, pair, config)
    payload = config.envelope()
    payload["task"] = f"verify:{args.target}"
    payload["report"] = report.to_json_dict(include_timings=args.timings)
    _emit(config, payload, _report_lines(report))
    return 0 if report.passed else 1


def _sweep_worker(task):
    target, pair_dict, bound = task
    pair = pair_from_json_dict(pair_dict)
    if target == "hopf":
        report = verifier.verify_comultiplication(pair, bound)
    elif target == "sphere-action":
        report = verifier.verify_sphere_action(pair, "both", bound)
    elif target == "tuple-action":
        report = verifier.verify_tuple_action(pair.epsilon, "both", bound)
    else:
        raise KeyError(target)
    statuses = {}
    for c in report.checks:
        statuses[c.certificate.status] = statuses.get(c.certificate.status, 0) + 1
    return {
        "target": target,
        "pair": pair.compact(),
        "checks": len(report.checks),
        "statuses": dict(sorted(statuses.items())),
        "overall": report.overall,
        "passed": report.passed,
        "notices": list(report.notices),
    }


SWEEP_TARGETS = ("hopf", "sphere-action", "tuple-action")


def sweep_tasks(n: int, targets, config: RunConfig, sample: int = 0) -> list:
    """Deterministic task list for one sweep level."""
    pairs = enumerate_pairs(n)
    if sample:
        import random
        rng = random.Random(config.seed)
        pairs = sorted(rng.sample(pairs, min(sample, len(pairs))), key=lambda p: p.flat())
    tasks = []
    for target in targets:
        if target == "hopf":
            chosen = pairs
        elif target == "sphere-action":
            chosen = [p for p in pairs if is_regular(p).is_regular]
        elif target == "tuple-action":
            zero = tuple(tuple(0 for _ in range(n)) for _ in range(n))
            seen = set()
            chosen = []
            for p in pairs:
                if p.epsilon not in seen:
                    seen.add(p.epsilon)
                    chosen.append(CommutationPair(n, p.epsilon, zero))
        else:
            raise KeyError(f"unknown sweep target {target!r}")
        tasks.extend((target, p.to_json_dict(), config.degree_bound) for p in chosen)
    return tasks


def run_sweep(n: int, targets, config: RunConfig, sample: int = 0) -> dict:
    tasks = sweep_tasks(n, targets, config, sample)
    jobs = config.effective_jobs()
    if jobs > 1 and len(tasks) > 4:
        with multiprocessing.Pool(jobs) as pool:
            results = pool.map(_sweep_worker, tasks, chunksize=8)
    else:
        results = [_sweep_worker(t) for t in tasks]
    totals = {"tasks": len(results), "passed": sum(1 for r in results if r["passed"])}
    return {
        "n": n,
        "targets": list(targets),
        "sample": sample,
        "results": results,
        "totals": totals,
        "overall_passed": totals["passed"] == totals["tasks"],
    }


def cmd_sweep(args, config: RunConfig) -> int:
    targets = args.targets.split(",") if args.targets else list(SWEEP_TARGETS)
    for t in targets:
        if t not in SWEEP_TARGETS:
            raise KeyError(f"unknown sweep target {t!r}")
    if args.n > 4:
        raise TooLarge(f"sweeps are capped at n=4; got n={args.n}")
    if args.n == 4 and not args.sample:
        raise TooLarge("n=4 sweeps require --sample N")
    body = run_sweep(args.n, targets, config, args.sample)
    payload = config.envelope()
    payload["task"] = "sweep"
    payload.update(body)
    lines = [
        f"{r['target']:<14} {r['pair']:<40} {r['overall']:<12} "
        f"{'pass' if r['passed'] else 'FAIL'}"
        for r in body["results"]
    ]
    lines.append(f"total: {body['totals']['passed']}/{body['totals']['tasks']} passed")
    _emit(config, payload, lines)
    return 0 if body["overall_passed"] else 1


def _parse_phases(tokens):
    if not tokens:
        return None
    samples = []
    for tok in tokens:
        parts = tok.split(",")
        if len(parts) != 2:
            raise ValueError(f"phase sample {tok!r} must look like z1,z2")
        samples.append((complex(parts[0]), complex(parts[1])))
    return samples


def cmd_witness(args, config: RunConfig) -> int:
    if args.suite != "all" and args.suite not in verifier.INDEPENDENCE_SUITES:
        raise KeyError(f"unknown witness suite {args.suite!r}")
    report = verifier.verify_independence_suite(
        args.suite,
        svd_threshold=config.svd_threshold,
        residual_tolerance=config.residual_tolerance,
        seed=config.seed,
        dim=args.dim,
        torus_samples=_parse_phases(args.phases),
    )
    payload = config.envelope()
    payload["task"] = "witness"
    payload["report"] = report.to_json_dict(include_timings=args.timings)
    lines = []
    for c in report.checks:
        ev = c.certificate.nonzero_evidence or {}
        lines.append(f"[{'ok ' if c.passed else 'FAIL'}] {c.name}: rank "
                     f"{ev.get('rank')}/{ev.get('expected_rank')} "
                     f"min-sv {min(ev.get('singular_values') or [0]):.3e}")
    lines.append(f"overall passed: {report.passed}")
    _emit(config, payload, lines)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--bound", type=int, default=2, help="degree bound for quotient reduction")
    parser.add_argument("--product-bound", type=int, default=None,
                        help="bound for two-sided product spans (default: degree bound, max 4)")
    parser.add_argument("--steps", type=int, default=100_000, help="rewrite step limit")
    parser.add_argument("--tol", type=float, default=1e-9, help="residual tolerance for witnesses")
    parser.add_argument("--svd-threshold", type=float, default=1e-6, help="singular value threshold")
    parser.add_argument("--seed", type=int, default=0, help="seed for pseudo-random witnesses")
    parser.add_argument("--jobs", type=int, default=0,
                        help="parallel workers (default: NCSTAR_JOBS or all cores)")
    parser.add_argument("--format", choices=("json", "text"), default="text")
    parser.add_argument("--output", default="", help="write the report to this path instead of stdout")
    parser.add_argument("--timings", action="store_true",
                        help="include per-check timings in JSON reports "
                             "(off by default so identical runs emit identical bytes)")


def _config_from(args) -> RunConfig:
    return RunConfig(
        degree_bound=args.bound,
        product_bound=args.product_bound if args.product_bound else max(2, args.bound),
        step_limit=args.steps,
        residual_tolerance=args.tol,
        svd_threshold=args.svd_threshold,
        seed=args.seed,
        jobs=args.jobs,
        output=args.output,
        format=args.format,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncstar",
        description="certify relation preservation and nonvanishing witnesses for "
                    "partial-commutation *-algebras and their quantum symmetry groups")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regularize", help="validate a pair file and enforce the regularity conventions")
    p.add_argument("--input", required=True, help="pair JSON file")
    p.add_argument("--pair-output", default="", help="write the regularized pair here")
    _add_common(p)

    p = sub.add_parser("verify", help="run one verification target")
    p.add_argument("target", choices=("hopf", "sphere-action", "tuple-action", "noninjectivity"))
    p.add_argument("--input", default="", help="pair JSON file (not needed for noninjectivity)")
    _add_common(p)

    p = sub.add_parser("sweep", help="run targets over every pair of a given size")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--targets", default="", help="comma-separated subset of "
                                                 + ",".join(SWEEP_TARGETS))
    p.add_argument("--sample", type=int, default=0, help="sample size (required for n=4)")
    _add_common(p)

    p = sub.add_parser("witness", help="run independence witness suites")
    p.add_argument("suite", help="suite name or 'all': " + ", ".join(verifier.INDEPENDENCE_SUITES))
    p.add_argument("--dim", type=int, default=4, help="dimension for the seeded unitary witness")
    p.add_argument("--phases", nargs="*", default=None,
                   help="torus phase samples, each as z1,z2 (e.g. 1,1 1,1j)")
    _add_common(p)
    return parser


_COMMANDS = {
    "regularize": cmd_regularize,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "witness": cmd_witness,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = _config_from(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args, config)
    except (WitnessInvalid, DegenerateSamples) as exc:
        print(f"witness error: {exc}", file=sys.stderr)
        return 1
    except (PairValidationError, TooLarge, KeyError, FileNotFoundError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
