"""``winner``: batch front-end producing JSON or CSV reports.

One job = one command. A job is either read from ``--job FILE`` (a job file
or a previous report, whose echoed job is re-run) or assembled from flags::

    winner exact --weights 1,2,3 --alpha 1
    winner compare --weights 1,2,3 --alpha 1 --seed 42 --draws 1000000
    winner rho --weights-rule power:1 --n-max 100000
    winner bernoulli --p 0.3 --n 5 --draws 1000000 --seed 42

Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .asympt import (alpha_weights, approximation_error, b_from_log_weights, classify_limit,
                     empirical_limit_cdf, empirical_limit_cdf_log, estimate_rho,
                     triangular_limit)
from .exact import (InversionConfig, NumericalError, QuadratureConfig, winner_probs_exact)
from .model import BUILTIN_G, FamilyError, TriangularFamily, family_from_spec, rule_log_weights
from .sim import bernoulli_max_membership, bernoulli_membership_exact, estimate_winner_probs

SCHEMA = "winner-report/1"
COMMANDS = ("exact", "approx", "simulate", "compare", "rho", "limit-cdf", "triangular",
            "bernoulli")
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class JobError(ValueError):
    """Invalid or incomplete job specification."""


# ---------------------------------------------------------------------------
# job assembly

def _parse_weights(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise JobError(f"cannot parse weights {text!r}") from None


def _parse_rule(text: str) -> dict:
    kind, _, param = text.partition(":")
    rule = {"kind": kind}
    if param:
        rule["param"] = float(param)
    return rule


def job_from_args(ns: argparse.Namespace) -> dict:
    if ns.job:
        with open(ns.job) as fh:
            loaded = json.load(fh)
        job = loaded["job"] if loaded.get("schema") == SCHEMA else loaded
        job = dict(job)
        job.setdefault("command", ns.command)
        if job["command"] != ns.command:
            raise JobError(f"job file is for {job['command']!r}, not {ns.command!r}")
    else:
        job = {"command": ns.command}
        family = None
        if ns.family_file:
            with open(ns.family_file) as fh:
                family = json.load(fh)
        elif ns.weights or ns.weights_rule:
            family = {"variant": ns.variant or "weibull", "alpha": ns.alpha}
            if ns.weights:
                family["weights"] = _parse_weights(ns.weights)
            else:
                family["weights_rule"] = _parse_rule(ns.weights_rule)
                if ns.n is not None:
                    family["weights_rule"]["n"] = ns.n
        elif ns.g:
            family = {"variant": "triangular", "g": ns.g, "n": ns.n}
        if family is not None:
            job["family"] = family
        for key in ("draws", "seed", "grid_points", "n_max", "p", "n"):
            val = getattr(ns, key)
            if val is not None:
                job[key] = val
        if ns.b_rule:
            kind, _, val = ns.b_rule.partition(":")
            job["b_rule"] = {"kind": kind}
            if val:
                job["b_rule"]["c" if kind == "exp-sqrt" else "rho"] = float(val)
    if ns.out is not None or ns.format is not None:
        out = dict(job.get("output", {}))
        if ns.out is not None:
            out["path"] = ns.out
        if ns.format is not None:
            out["format"] = ns.format
        job["output"] = out
    return normalize_job(job)


def normalize_job(job: dict) -> dict:
    """Fill defaults and check command-specific required fields."""
    job = json.loads(json.dumps(job))
    cmd = job.get("command")
    if cmd not in COMMANDS:
        raise JobError(f"unknown command {cmd!r}")
    out = job.setdefault("output", {})
    out.setdefault("format", "json")
    if out["format"] not in ("json", "csv"):
        raise JobError("output format must be json or csv")
    needs_family = cmd in ("exact", "approx", "simulate", "compare", "limit-cdf")
    if needs_family and "family" not in job:
        raise JobError(f"{cmd} needs a family")
    if cmd in ("exact", "approx", "compare"):
        job.setdefault("inversion", {})
        job.setdefault("quadrature", {})
    if cmd in ("simulate", "compare", "bernoulli"):
        if "seed" not in job:
            raise JobError(f"{cmd} needs a seed")
        job.setdefault("draws", 100000)
    if cmd in ("limit-cdf", "triangular"):
        job.setdefault("grid_points", 101)
    if cmd == "rho":
        if "family" not in job and "b_rule" not in job:
            raise JobError("rho needs a family with weights or a b_rule")
        job.setdefault("n_max", 100000)
    if cmd == "triangular":
        fam = job.get("family", {})
        if fam.get("variant", "triangular") != "triangular":
            raise JobError("triangular needs a triangular family")
        if "g" not in fam:
            raise JobError("triangular needs a builtin g")
        fam.setdefault("variant", "triangular")
        fam.setdefault("n", 10000)
        job["family"] = fam
    if cmd == "bernoulli":
        for key in ("p", "n"):
            if key not in job:
                raise JobError(f"bernoulli needs {key!r}")
    return job


# ---------------------------------------------------------------------------
# running

def _num(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_num(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    return v


def _grid(job):
    return np.linspace(0.0, 1.0, int(job["grid_points"]))


def _rule_of(family_spec):
    rule = family_spec.get("weights_rule") if family_spec else None
    if rule is None:
        return None
    return rule["kind"], rule.get("param", 0.0)


def _run_exact(job, fam):
    d = winner_probs_exact(fam, InversionConfig(**job["inversion"]),
                           QuadratureConfig(**job["quadrature"]))
    d.check()
    return {"method": d.method, "probs": d.probs,
            "tolerance_estimate": d.tolerance_estimate, "sum": d.probs.sum()}


def _run_simulate(job, fam):
    r = estimate_winner_probs(fam, int(job["draws"]), int(job["seed"]))
    return {"method": "monte-carlo", "counts": r.counts, "draws": r.draws,
            "probs_hat": r.probs_hat, "ci_radius": r.ci_radius, "seed": r.seed,
            "rng": r.rng_label, "ties": r.ties}


def run_job(job: dict) -> dict:
    """Execute a normalized job and return the results section of the report."""
    cmd = job["command"]
    stage = "family"
    try:
        fam = None
        if cmd in ("exact", "approx", "simulate", "compare", "limit-cdf", "triangular") \
                and not (cmd == "limit-cdf" and _rule_of(job["family"])):
            fam = family_from_spec(job["family"])
        if cmd == "exact":
            stage = "winner_probs_exact"
            return _run_exact(job, fam)
        if cmd == "approx":
            stage = "alpha_weights"
            res = {"method": "asymptotic", "alpha": alpha_weights(fam)}
            stage = "approximation_error"
            if np.all(fam.weights > 0):
                res["max_rel_error"] = approximation_error(
                    fam, InversionConfig(**job["inversion"]), QuadratureConfig(**job["quadrature"]))
            return res
        if cmd == "simulate":
            stage = "estimate_winner_probs"
            return _run_simulate(job, fam)
        if cmd == "compare":
            stage = "winner_probs_exact"
            ex = _run_exact(job, fam)
            stage = "estimate_winner_probs"
            sm = _run_simulate(job, fam)
            diff = np.abs(sm["probs_hat"] - ex["probs"])
            ok = diff <= sm["ci_radius"]
            return {"exact": ex, "simulate": sm, "abs_diff": diff,
                    "max_abs_diff": diff.max(), "ci_pass": ok, "all_pass": bool(ok.all())}
        if cmd == "limit-cdf":
            stage = "empirical_limit_cdf"
            grid = _grid(job)
            rule = _rule_of(job["family"])
            if rule is not None:
                n = int(job["family"]["weights_rule"].get("n", job.get("n", 0)))
                if n < 1:
                    raise JobError("weights_rule needs 'n' for limit-cdf")
                cdf = empirical_limit_cdf_log(rule_log_weights(rule[0], rule[1], n), grid)
            else:
                cdf = empirical_limit_cdf(fam, grid)
            return {"grid": grid, "cdf": cdf}
        if cmd == "triangular":
            stage = "triangular_limit"
            lim = triangular_limit(BUILTIN_G[job["family"]["g"]])
            grid = _grid(job)
            if not isinstance(fam, TriangularFamily):
                raise JobError("triangular needs a triangular family")
            emp = empirical_limit_cdf(fam, grid)
            ref = lim.cdf(grid)
            return {"grid": grid, "empirical_cdf": emp, "limit_cdf": ref,
                    "max_deviation": np.abs(emp - ref).max(), "g_integral": lim.g_integral,
                    "b_n_over_n": fam.weights.sum() / fam.n, "n": fam.n}
        if cmd == "rho":
            stage = "estimate_rho"
            n_max = int(job["n_max"])
            if "b_rule" in job:
                est = estimate_rho(_b_rule(job["b_rule"]), n_max)
            else:
                spec = job["family"]
                rule = _rule_of(spec)
                if rule is not None:
                    lw = rule_log_weights(rule[0], rule[1], 2 * n_max + 2)
                else:
                    w = np.asarray(spec.get("weights", []), dtype=float)
                    if w.size < 2 * n_max + 1 or np.any(w <= 0):
                        raise JobError("explicit weights must be positive and cover 2*n_max+1 players")
                    lw = np.log(w)
                est = estimate_rho(log_b=b_from_log_weights(lw), n_max=n_max)
            stage = "classify_limit"
            lim = classify_limit(est)
            return {"rho_hat": est.rho_hat,
                    "ratios": [{"n": n, "ratio": r} for n, r in est.sequence_of_ratios],
                    "ratio_condition_holds": est.ratio_condition_holds,
                    "ratio_witness": [{"n": n, "ratio": r} for n, r in est.ratio_witness],
                    "limit": {"kind": lim.kind, "rho": lim.rho,
                              "outside_hypotheses": lim.outside_hypotheses}}
        if cmd == "bernoulli":
            stage = "bernoulli_max_membership"
            p, n, draws = float(job["p"]), int(job["n"]), int(job["draws"])
            est = bernoulli_max_membership(p, n, draws, int(job["seed"]))
            exp = bernoulli_membership_exact(p, n)
            sigma = math.sqrt(exp * (1 - exp) / draws)
            return {"estimate": est, "expected": exp, "sigma": sigma,
                    "within_3sigma": abs(est - exp) <= 3 * sigma}
    except (NumericalError, ArithmeticError) as exc:
        raise NumericalError(f"{stage}: {exc}") from exc
    except ValueError as exc:
        raise JobError(f"{stage}: {exc}") from exc
    raise JobError(f"unknown command {cmd!r}")


def _b_rule(rule: dict):
    kind = rule.get("kind")
    if kind == "exp-sqrt":
        c = float(rule.get("c", 1.0))
        return lambda n: math.exp(c * math.sqrt(n))
    if kind == "power":
        rho = float(rule.get("rho", 1.0))
        return lambda n: float(n) ** rho
    if kind == "power-log":
        rho = float(rule.get("rho", 1.0))
        return lambda n: float(n) ** rho * math.log(n + 1)
    if kind == "geometric-sum":
        return lambda n: 2 ** (int(n) + 1) - 2
    raise JobError(f"unknown b_rule {kind!r}")


def build_report(job: dict) -> dict:
    t0 = time.perf_counter()
    results = run_job(job)
    # output paths are not part of the computation; keep echoed jobs portable
    echo = json.loads(json.dumps(job))
    echo["output"].pop("path", None)
    return {
        "schema": SCHEMA,
        "command": job["command"],
        "job": echo,
        "results": _num(results),
        "version": __version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "wall_time_s": time.perf_counter() - t0,
    }


def report_json(report: dict) -> str:
    # repr-based floats round-trip exactly (at most 17 significant digits)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


def _table(report: dict):
    r = report["results"]
    cmd = report["command"]
    if cmd == "exact":
        return ["index", "prob"], [[i + 1, p] for i, p in enumerate(r["probs"])]
    if cmd == "approx":
        return ["index", "alpha"], [[i + 1, a] for i, a in enumerate(r["alpha"])]
    if cmd == "simulate":
        return (["index", "count", "prob_hat", "ci_radius"],
                [[i + 1, c, p, e] for i, (c, p, e) in
                 enumerate(zip(r["counts"], r["probs_hat"], r["ci_radius"]))])
    if cmd == "compare":
        ex, sm = r["exact"], r["simulate"]
        return (["index", "exact", "prob_hat", "ci_radius", "ci_pass"],
                [[i + 1, a, b, c, d] for i, (a, b, c, d) in
                 enumerate(zip(ex["probs"], sm["probs_hat"], sm["ci_radius"], r["ci_pass"]))])
    if cmd == "limit-cdf":
        return ["x", "cdf"], [list(t) for t in zip(r["grid"], r["cdf"])]
    if cmd == "triangular":
        return (["x", "empirical_cdf", "limit_cdf"],
                [list(t) for t in zip(r["grid"], r["empirical_cdf"], r["limit_cdf"])])
    if cmd == "rho":
        return ["n", "ratio"], [[d["n"], d["ratio"]] for d in r["ratios"]]
    return ["key", "value"], [[k, v] for k, v in sorted(r.items())]


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={report['schema']} command={report['command']}\n")
    for k, v in sorted(report["results"].items()):
        if not isinstance(v, (list, dict)):
            buf.write(f"# {k}={_fmt(v)}\n")
    header, rows = _table(report)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="winner", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--job", help="job file, or a previous report to re-run")
    p.add_argument("--family-file", help="family specification (JSON)")
    p.add_argument("--weights", help="comma separated weights c_i")
    p.add_argument("--weights-rule", help="power:s, geometric:q or harmonic")
    p.add_argument("--variant", help="family variant for --weights (default weibull)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--g", choices=sorted(BUILTIN_G), help="builtin g for triangular arrays")
    p.add_argument("--b-rule", help="b_n rule for rho: exp-sqrt:c, power:rho, power-log:rho, geometric-sum")
    p.add_argument("--draws", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--n", type=int, help="player count for rules / bernoulli")
    p.add_argument("--p", type=float, help="Bernoulli success probability")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    return p


def main(argv=None) -> int:
    ns = _make_parser().parse_args(argv)
    try:
        job = job_from_args(ns)
        report = build_report(job)
    except NumericalError as exc:
        print(f"winner: numerical failure in {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (JobError, FamilyError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"winner: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    fmt = job["output"]["format"]
    text = report_json(report) if fmt == "json" else report_csv(report)
    path = job["output"].get("path")
    if path:
        Path(path).write_text(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); not an error
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
