"""Batch command-line front end.

Subcommands: ``compute``, ``verify``, ``lab`` and ``rand``.  Exit codes are
0 on success, 1 on a usage or input error (or a failed check), 2 when an
iteration does not converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import kubo_ando as ka
from . import theorem_lab as tl
from ._parallel import pmap, resolve_threads
from ._witnesses import LOG_EUCLIDEAN_P4_A, LOG_EUCLIDEAN_P4_B, LOG_EUCLIDEAN_P4_WEIGHTS
from .log_mean import mean_family, verify_logmean_inequalities
from .matrix_io import MatrixFileError, format_float, read_tuple, tuple_to_json
from .multi_means import (
    PROPERTIES,
    ConvergenceError,
    MeanKind,
    SolverConfig,
    check_property,
    evaluate,
)
from .report import VerdictReport, dumps
from .spd_core import random_spd

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGENCE = 0, 1, 2

SUITES = tuple(p.lower() for p in PROPERTIES) + ("sandwich", "logmean", "all")
DEFAULT_VERIFY_KINDS = ("alm", "bmp", "karcher", "power:1", "power:0.5", "power:-0.5", "power:-1")
EXPERIMENTS = ("lemma2", "thm31", "converse", "limits", "extension", "y2013f1997", "p4search")


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=argparse.SUPPRESS,
                        help="worker cap (default: $OPMEANS_THREADS or all cores)")
    common.add_argument("--csv", action="store_true", default=argparse.SUPPRESS,
                        help="emit CSV instead of JSON where the output is tabular")
    common.add_argument("--dump-config", action="store_true", default=argparse.SUPPRESS,
                        help="print the parsed configuration as canonical JSON and exit")
    common.add_argument("--output", "-o", default=argparse.SUPPRESS, help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="opmeans", parents=[common],
                                     description="Operator means on SPD matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="compute a mean of a matrix tuple")
    p.add_argument("--input", "-i", required=True, help="matrix-tuple JSON file ('-' for stdin)")
    p.add_argument("--kind", required=True, help="alm, bmp, power, karcher, log-euclidean, arithmetic, harmonic")
    p.add_argument("--t", type=float, default=None, help="power-mean exponent")
    p.add_argument("--weights", type=_float_list, default=None, help="overrides weights in the file")
    p.add_argument("--tol", type=float, default=SolverConfig.tol)
    p.add_argument("--max-iter", type=int, default=SolverConfig.max_iter)
    p.add_argument("--karcher-step", type=float, default=SolverConfig.karcher_step)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--kind", action="append", default=None, help="restrict to these kinds (repeatable)")
    p.add_argument("--count", type=_positive_int, default=5, help="random tuples per kind")
    p.add_argument("--tol", type=float, default=1e-8, help="slack tolerance")

    p = sub.add_parser("lab", parents=[common], help="run a theorem-lab experiment")
    p.add_argument("experiment")
    p.add_argument("--f", default="power:0.5", help="representing function of the perturbation")
    p.add_argument("--sigma", default="geometric", help="representing function of the mean")
    p.add_argument("--phi", default="power:0.5", help="functional for the extension experiment")
    p.add_argument("--w", type=float, default=None, help="weight")
    p.add_argument("--dim", type=_positive_int, default=3)
    p.add_argument("--n", type=_positive_int, default=3)
    p.add_argument("--trials", type=_positive_int, default=None)
    p.add_argument("--commuting", action="store_true")

    p = sub.add_parser("rand", parents=[common], help="write a random SPD tuple")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--cond", type=float, default=10.0)
    p.add_argument("--out", default=None, help="alias of --output")
    return parser


def parse_config(argv=None) -> dict:
    """Parse ``argv`` into a plain dict with every default filled in."""
    ns = build_parser().parse_args(argv)
    cfg = vars(ns)
    cfg.setdefault("threads", None)
    cfg.setdefault("csv", False)
    cfg.setdefault("dump_config", False)
    cfg.setdefault("output", None)
    cfg.setdefault("seed", 0)
    if cfg["command"] == "rand" and cfg.get("out"):
        cfg["output"] = cfg["out"]
    cfg.pop("out", None)
    if cfg["threads"] is None and os.environ.get("OPMEANS_THREADS"):
        cfg["threads"] = resolve_threads(None)
    return cfg


def canonical_config(cfg: dict) -> str:
    echo = {k: v for k, v in cfg.items() if k != "dump_config"}
    return json.dumps(echo, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: format_float(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def _report_text(report: VerdictReport, as_csv: bool) -> str:
    if as_csv:
        return _csv_text([r for r in report.to_dict()["grid_data"] if isinstance(r, dict)])
    return report.to_json()


def aggregate(test: str, reports: list[VerdictReport]) -> VerdictReport:
    """Combine sub-reports: one direction per sub-report (inconclusive counts as ok)."""
    directions = {}
    for k, r in enumerate(reports):
        key = r.test if r.test not in directions else f"{r.test} #{k}"
        directions[key] = r.ok
    worst = min((r.worst_slack for r in reports), default=np.inf)
    return VerdictReport(test=test, directions=directions, worst_slack=float(worst),
                         grid_data=[r.to_dict() for r in reports])


# ---------------------------------------------------------------------------
# compute


def cmd_compute(cfg) -> int:
    try:
        mats, file_w = read_tuple(cfg["input"]) if cfg["input"] != "-" else _stdin_tuple()
        solver = SolverConfig(cfg["tol"], cfg["max_iter"], cfg["karcher_step"])
        label = cfg["kind"]
        if cfg["t"] is not None and ":" not in label:
            label = f"{label}:{cfg['t']!r}"
        kind = MeanKind.parse(label, solver)
        w = cfg["weights"] if cfg["weights"] is not None else file_w
        if kind.uniform_only and w is not None and not np.allclose(w, 1.0 / len(mats), atol=1e-12):
            raise ValueError("the alm mean takes uniform weights only")
        X, info = evaluate(kind, None if kind.uniform_only else w, mats, return_info=True)
    except (MatrixFileError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    if cfg["csv"]:
        text = "".join(",".join(format_float(x) for x in row) + "\n" for row in X)
    else:
        text = dumps({
            "mean": {"dim": X.shape[0], "rows": X},
            "kind": kind.label,
            "iterations": info.iterations,
            "residual": info.residual,
        })
    _emit(text, cfg["output"])
    return EXIT_OK


def _stdin_tuple():
    from .matrix_io import loads_tuple

    return loads_tuple(sys.stdin.read(), "<stdin>")


# ---------------------------------------------------------------------------
# verify


def _suite_tuple(seed, k):
    rng = np.random.default_rng([seed, k])
    dim = int(rng.integers(2, 4))
    n = int(rng.integers(2, 4))
    cond = float(np.exp(rng.uniform(0, np.log(100))))
    mats = [random_spd(dim, cond, rng) for _ in range(n)]
    w = rng.dirichlet(np.ones(n))
    return mats, w, int(rng.integers(2 ** 31))


def property_suite(prop: str, kinds, count: int, seed: int, tol: float, threads=None) -> VerdictReport:
    prop = prop.upper()
    jobs = [(MeanKind.parse(k), i) for k in kinds for i in range(count)]

    def run(job):
        kind, i = job
        if kind.tag == "log-euclidean" and prop == "P4":
            r = check_property("P4", kind, LOG_EUCLIDEAN_P4_WEIGHTS, LOG_EUCLIDEAN_P4_A,
                               B=LOG_EUCLIDEAN_P4_B, tol=tol)
            r.test += " stored witness"
            r.notes.append("expected failure: the log-Euclidean mean is not Loewner monotone")
            r.directions = {"stored witness fails (expected)": not r.directions["P4"]}
            return r
        mats, w, s = _suite_tuple(seed, i)
        return check_property(prop, kind, None if kind.uniform_only else w, mats, seed=s, tol=tol)

    if any(MeanKind.parse(k).tag == "log-euclidean" for k in kinds) and prop == "P4":
        jobs = [(k, i) for k, i in jobs if k.tag != "log-euclidean" or i == 0]
    reports = pmap(run, jobs, threads)
    return aggregate(f"suite {prop.lower()}", reports)


def sandwich_suite() -> VerdictReport:
    reports = [tl.verify_lemma2(f) for w in (0.25, 0.5, 0.75) for f in ka.builtins(w)]
    return aggregate("suite sandwich", reports)


def logmean_suite(count: int, seed: int, threads=None) -> VerdictReport:
    reports = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        mats = [random_spd(2, float(np.exp(rng.uniform(0, np.log(100)))), rng) for _ in range(3)]
        for fam in ("karcher", "bmp"):
            reports.append(verify_logmean_inequalities(mean_family(fam), mats, threads=threads))
    return aggregate("suite logmean", reports)


def run_suite(suite: str, kinds=None, count=5, seed=0, tol=1e-8, threads=None) -> VerdictReport:
    suite = suite.lower()
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    kinds = list(kinds or DEFAULT_VERIFY_KINDS)
    if suite == "sandwich":
        return sandwich_suite()
    if suite == "logmean":
        return logmean_suite(count, seed, threads)
    if suite == "all":
        reports = [property_suite(p, kinds, count, seed, tol, threads) for p in PROPERTIES]
        reports += [sandwich_suite(), logmean_suite(count, seed, threads)]
        return aggregate("suite all", reports)
    return property_suite(suite, kinds, count, seed, tol, threads)


def cmd_verify(cfg) -> int:
    try:
        report = run_suite(cfg["suite"], cfg["kind"], cfg["count"], cfg["seed"], cfg["tol"], cfg["threads"])
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    _emit(_report_text(report, cfg["csv"]), cfg["output"])
    return EXIT_OK if report.ok else EXIT_INPUT


# ---------------------------------------------------------------------------
# lab


def _limits_instance(dim, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((dim, dim))
    A = (A + A.T) / 2
    A *= rng.uniform(0.2, 1.0) / max(np.linalg.norm(A, 2), 1e-12)
    B = random_spd(dim, float(rng.uniform(1, 4)), rng)
    C = random_spd(dim, float(rng.uniform(1, 4)), rng)
    return A, B, C


def run_experiment(name: str, cfg: dict) -> VerdictReport:
    seed, dim, n = cfg.get("seed", 0), cfg.get("dim", 3), cfg.get("n", 3)
    f = ka.parse_repr(cfg.get("f") or "power:0.5")
    if name == "lemma2":
        return tl.verify_lemma2(f, cfg.get("w"))
    if name == "thm31":
        sigma = ka.parse_repr(cfg.get("sigma") or "geometric")
        w = ka.repr_derivative_at_one(sigma)
        reports = []
        for satisfy in (True, False):
            A, B = tl.random_thm31_pair(w, dim, [seed, int(satisfy)], satisfy)
            reports.append(tl.verify_theorem31(f, sigma, A, B))
        return aggregate(f"lab thm31 [f={f.name}, sigma={sigma.name}]", reports)
    if name == "converse":
        sigma = ka.parse_repr(cfg.get("sigma") or "geometric")
        w = cfg.get("w")
        return tl.verify_prop_converse(sigma, 0.3 if w is None else w, seed=seed)
    if name == "limits":
        w = cfg.get("w")
        A, B, C = _limits_instance(dim, seed)
        return tl.verify_limit_formulas(f, A, B, C, 0.5 if w is None else w)
    if name == "extension":
        phi = tl.Functional.parse(cfg.get("phi") or "power:0.5")
        rng = np.random.default_rng(seed)
        w = None if phi.uniform_only else rng.dirichlet(np.ones(n))
        reports = [
            tl.verify_extension_theorem(phi, f, tl.random_hermitian_tuple(n, dim, w, [seed, k], mode), w, seed=seed)
            for k, mode in enumerate(("negative", "boundary", "positive"))
        ]
        return aggregate(f"lab extension [{phi.label}, f={f.name}]", reports)
    if name == "y2013f1997":
        return tl.verify_y2013_and_f1997(cfg.get("trials") or 100, seed, dim, n)
    if name == "p4search":
        return tl.search_p4_violation_log_euclidean(cfg.get("trials") or 10 ** 6, seed, dim, n,
                                                    commuting=cfg.get("commuting", False))
    raise UsageError(f"unknown experiment {name!r}; expected one of {', '.join(EXPERIMENTS)}")


def cmd_lab(cfg) -> int:
    try:
        report = run_experiment(cfg["experiment"], cfg)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    _emit(_report_text(report, cfg["csv"]), cfg["output"])
    return EXIT_OK if report.ok else EXIT_INPUT


# ---------------------------------------------------------------------------
# rand


def cmd_rand(cfg) -> int:
    try:
        rng = np.random.default_rng(cfg["seed"])
        mats = [random_spd(cfg["dim"], cfg["cond"], rng) for _ in range(cfg["n"])]
        _emit(tuple_to_json(mats), cfg["output"])
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "lab": cmd_lab, "rand": cmd_rand}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if cfg["dump_config"]:
        sys.stdout.write(canonical_config(cfg))
        return EXIT_OK
    return COMMANDS[cfg["command"]](cfg)


if __name__ == "__main__":
    sys.exit(main())
