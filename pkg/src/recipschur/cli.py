"""Command-line interface: eval, classify, bounds, bspline, mc and suite.

Every command writes one JSON object {command, inputs, results, diagnostics}
(or CSV with a header row) to stdout.  Exit codes: 0 success, 1 property
failure, 2 input validation error, 3 internal disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .bspline import DEFAULT_TOL, bspline_eval, bspline_integral, bspline_mean, peano_divdiff
from .core import ScalarPolicy, SignLabel, make_node_set, parse_function
from .divdiff import DEFAULT_METHODS, divdiff_report
from .errors import DegenerateOrder, VerificationError
from .inequalities import bound_comparison, classify_reciprocal_schur
from .sampling import derive_seed, random_rationals
from .serialize import decode_scalar, encode
from .stochastic import chs_monte_carlo, laplace_identity_mc
from .suite import MODULES, run_suite

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2, 3

COMMANDS = ("eval", "classify", "bounds", "bspline", "mc", "suite")

CLASSIFY_COLUMNS = ("kind", "n", "s", "set", "nodes", "mode", "value", "error_bound",
                    "predicted", "computed", "agree", "rows", "uncertain")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    nodes: list = field(default_factory=list)
    function: str | None = None
    policy: str | None = None
    seed: int = 0
    trials: int | None = None
    output: str = "json"
    tol: float | None = None
    params: dict = field(default_factory=dict)
    only: list = field(default_factory=list)
    workers: int = 1

    def to_dict(self, runtime: bool = True) -> dict:
        """Plain serializable form; ``runtime=False`` drops settings that must not affect results."""
        d = asdict(self)
        d["nodes"] = [encode(v) for v in self.nodes]
        d["params"] = encode(self.params)
        d["tol"] = encode(self.tol)
        if not runtime:
            del d["workers"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        d["nodes"] = [decode_scalar(v) for v in d.get("nodes", [])]
        tol = d.get("tol")
        d["tol"] = None if tol is None else float(tol)
        return cls(**d)


def parse_scalar(text: str, exact: bool = False):
    """Integers and p/q give Fractions; decimals give floats unless ``exact`` reads them as exact decimals."""
    text = text.strip()
    if not text:
        raise InputError("empty number")
    try:
        if not exact and any(c in text for c in ".eE") and "/" not in text:
            return float(text)
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number {text!r}") from exc


def parse_list(text: str | None, exact: bool = False) -> list:
    if not text:
        return []
    return [parse_scalar(t, exact) for t in text.split(",")]


def _policy(name: str | None) -> ScalarPolicy | None:
    if name is None:
        return None
    return ScalarPolicy.exact() if name == "exact" else ScalarPolicy.floating()


def _function(text: str | None):
    if not text:
        raise InputError("--f is required")
    try:
        return parse_function(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad function {text!r}: {exc}") from exc


def envelope(cfg: RunConfig, results, diagnostics=None) -> dict:
    return {
        "command": cfg.command,
        "inputs": cfg.to_dict(runtime=False),
        "results": encode(results),
        "diagnostics": encode(diagnostics or {}),
    }


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


def _flatten(prefix: str, v, out: list) -> None:
    if isinstance(v, dict):
        for k, x in v.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), x, out)
    elif isinstance(v, list):
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, out)
    else:
        out.append((prefix, "" if v is None else v))


def dump_key_value_csv(obj: dict) -> str:
    rows: list = []
    _flatten("", {"results": obj["results"], "diagnostics": obj["diagnostics"]}, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("key", "value"))
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_eval(cfg: RunConfig):
    f = _function(cfg.function)
    policy = _policy(cfg.policy)
    ns = make_node_set(cfg.nodes, f.domain, policy)
    methods = tuple(cfg.params.get("methods") or DEFAULT_METHODS)
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    report = divdiff_report(f, ns, policy, methods=methods, tol=tol,
                            mc_trials=cfg.trials or 10 ** 4, seed=cfg.seed)
    diag = {"methods_run": sorted(report.per_method), "exact": report.exact}
    return envelope(cfg, report.as_dict(), diag), EXIT_OK


def _s_values(cfg: RunConfig) -> list:
    p = cfg.params
    if p.get("s") is not None:
        return [p["s"]]
    lo, hi, step = p.get("s_min"), p.get("s_max"), p.get("s_step")
    if lo is None or hi is None:
        raise InputError("give --s or both --s-min and --s-max")
    step = step if step is not None else Fraction(1, 2)
    if step <= 0:
        raise InputError("--s-step must be positive")
    out, s = [], Fraction(lo)
    while s <= hi:
        out.append(s)
        s += Fraction(step)
    return out


def classify_rows(cfg: RunConfig):
    """Yield one dict per (n, s, node set), then a summary dict."""
    p = cfg.params
    ns_list = p.get("n") or []
    sets = int(p.get("sets") or 20)
    lo = Fraction(p.get("lo") if p.get("lo") is not None else Fraction(1, 10))
    hi = Fraction(p.get("hi") if p.get("hi") is not None else 10)
    if lo <= 0 or hi <= lo:
        raise InputError("node range must satisfy 0 < lo < hi")
    policy = _policy(cfg.policy)
    rows, uncertain, classified, agreeing, exact_disagree = 0, 0, 0, 0, 0
    fixed = cfg.nodes
    if fixed:
        ns_list = [len(fixed)]
        sets = 1
    if not ns_list:
        raise InputError("give --n or --nodes")
    for n in ns_list:
        if n < 2:
            raise InputError("n must be at least 2")
        for s in _s_values(cfg):
            rng = random.Random(derive_seed(cfg.seed, f"classify:{n}:{s}"))
            for k in range(sets):
                nodes = make_node_set(fixed if fixed else random_rationals(rng, n, lo, hi))
                computed, pred, agree = classify_reciprocal_schur(nodes, s, policy)
                exact = computed.error_bound == 0 and isinstance(computed.value, Fraction)
                rows += 1
                if computed.label is SignLabel.UNCERTAIN:
                    uncertain += 1
                else:
                    classified += 1
                    agreeing += agree
                    if exact and not agree:
                        exact_disagree += 1
                yield {
                    "kind": "row", "n": n, "s": encode(pred.s), "set": k,
                    "nodes": ";".join(str(encode(v)) for v in nodes.values),
                    "mode": "exact" if exact else "float",
                    "value": encode(computed.value), "error_bound": encode(computed.error_bound),
                    "predicted": pred.predicted.value, "computed": computed.label.value,
                    "agree": agree,
                }
    rate = Fraction(agreeing, classified) if classified else Fraction(1)
    yield {"kind": "summary", "agree": format(float(rate), ".17g"), "rows": rows,
           "uncertain": uncertain, "exact_disagreements": exact_disagree}


def run_classify(cfg: RunConfig):
    rows = list(classify_rows(cfg))
    summary = rows.pop()
    code = EXIT_DISAGREE if summary["exact_disagreements"] else EXIT_OK
    if cfg.output == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CLASSIFY_COLUMNS, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows + [summary]:
            w.writerow({k: ("true" if v is True else "false" if v is False else v) for k, v in r.items()})
        return buf.getvalue(), code
    results = {"rows": [{k: v for k, v in r.items() if k != "kind"} for r in rows],
               "summary": {k: v for k, v in summary.items() if k != "kind"}}
    return envelope(cfg, results), code


def run_bounds(cfg: RunConfig):
    p = int(cfg.params.get("p", 2))
    if p < 0:
        raise InputError("--p must be nonnegative")
    ns = make_node_set(cfg.nodes, policy=_policy(cfg.policy))
    bc = bound_comparison(p, ns)
    results = {"p": p, "function": f"monomial:{2 * p + ns.n - 1}", "divdiff": bc.divdiff,
               "hunter": bc.hunter, "farwig_zwick": bc.farwig_zwick, "larger": bc.larger, "holds": bc.holds}
    return envelope(cfg, results), EXIT_PROPERTY if not bc.holds else EXIT_OK


def run_bspline(cfg: RunConfig):
    ns = make_node_set(cfg.nodes, policy=_policy(cfg.policy))
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    results = {
        "integral": bspline_integral(ns, tol),
        "mean": bspline_mean(ns, tol),
        "node_mean": sum(ns.values) / ns.n,
    }
    points = cfg.params.get("t") or []
    evals = []
    for t in points:
        try:
            evals.append({"t": t, "value": bspline_eval(t, ns)})
        except DegenerateOrder as exc:
            evals.append({"t": t, "value": None, "error": str(exc)})
    results["density"] = evals
    if cfg.function:
        f = _function(cfg.function)
        results["peano"] = {"function": f.label(), "value": peano_divdiff(f, make_node_set(cfg.nodes, f.domain), tol)}
    return envelope(cfg, results), EXIT_OK


def run_mc(cfg: RunConfig):
    trials = cfg.trials or 10 ** 5
    g = cfg.params.get("g") or "power"
    if g == "exp_decay":
        est = laplace_identity_mc("exp_decay", make_node_set(cfg.nodes), trials, cfg.seed, cfg.workers)
    else:
        q = cfg.params.get("q")
        if q is None:
            raise InputError("--q is required for the power variant")
        if q < 0:
            raise InputError("--q must be nonnegative")
        est = chs_monte_carlo(int(q), cfg.nodes, trials, cfg.seed, cfg.workers)
    results = {"mean": est.mean, "stderr": est.stderr, "target": est.target, "z_score": est.z_score,
               "trials": est.trials, "seed": est.seed}
    return envelope(cfg, results), EXIT_OK


def run_suite_command(cfg: RunConfig):
    results = run_suite(cfg.seed, cfg.trials, cfg.only or None, cfg.workers)
    failing = [r.name for r in results if not r.passed]
    body = {
        "properties": [r.as_dict() for r in results],
        "total": len(results),
        "passed": len(results) - len(failing),
        "failed": len(failing),
        "all_passed": not failing,
    }
    return envelope(cfg, body, {"failing": failing}), EXIT_PROPERTY if failing else EXIT_OK


RUNNERS = {"eval": run_eval, "classify": run_classify, "bounds": run_bounds,
           "bspline": run_bspline, "mc": run_mc, "suite": run_suite_command}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recipschur", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nodes=True, policy=True, output_default="json"):
        if nodes:
            p.add_argument("--nodes", help="comma-separated nodes: integers, p/q or decimals")
        if policy:
            p.add_argument("--policy", choices=("exact", "float"), help="default: exact when eligible")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--output", choices=("json", "csv"), default=output_default)

    p = sub.add_parser("eval", help="divided difference by every applicable method")
    common(p)
    p.add_argument("--f", required=True, help="catalog function, e.g. monomial:4, recip:2, exp:e")
    p.add_argument("--methods", help=f"comma list from {','.join(DEFAULT_METHODS)},montecarlo")

    p = sub.add_parser("classify", help="reciprocal Schur sign sweep over (n, s)")
    common(p, output_default="csv")
    p.add_argument("--n", help="comma-separated node counts")
    p.add_argument("--s", help="single exponent")
    p.add_argument("--s-min")
    p.add_argument("--s-max")
    p.add_argument("--s-step", default="1/2")
    p.add_argument("--sets", type=int, default=20, help="random node sets per (n, s)")
    p.add_argument("--lo", default="1/10", help="lower end of the node range")
    p.add_argument("--hi", default="10", help="upper end of the node range")

    p = sub.add_parser("bounds", help="Hunter and Farwig-Zwick bounds for t^(2p+n-1)")
    common(p)
    p.add_argument("--p", type=int, default=2)

    p = sub.add_parser("bspline", help="B-spline density moments, point values, Peano quadrature")
    common(p)
    p.add_argument("--t", help="comma-separated evaluation points")
    p.add_argument("--f", help="also integrate this function by Peano's formula")

    p = sub.add_parser("mc", help="Monte Carlo check of the exponential-mixture identities")
    common(p, nodes=False, policy=False)
    p.add_argument("--x", "--nodes", dest="nodes", required=True, help="comma-separated coefficients")
    p.add_argument("--q", type=int)
    p.add_argument("--g", choices=("power", "exp_decay"), default="power")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("suite", help="run the registered property checks")
    common(p, nodes=False, policy=False)
    p.add_argument("--only", action="append", default=[],
                   help=f"module ({', '.join(MODULES)}) or property name; repeatable or comma-separated")
    p.add_argument("--workers", type=int, default=1)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    exact = getattr(args, "policy", None) == "exact"
    cfg = RunConfig(
        command=args.command,
        nodes=parse_list(getattr(args, "nodes", None), exact),
        function=getattr(args, "f", None),
        policy=getattr(args, "policy", None),
        seed=args.seed,
        trials=args.trials,
        output=args.output,
        tol=args.tol,
        workers=getattr(args, "workers", 1),
    )
    if args.trials is not None and args.trials < 1:
        raise InputError("--trials must be positive")
    if cfg.workers < 1:
        raise InputError("--workers must be positive")
    c = args.command
    if c == "eval":
        if args.methods:
            cfg.params["methods"] = [m.strip() for m in args.methods.split(",")]
    elif c == "classify":
        cfg.params.update(
            n=[int(v) for v in args.n.split(",")] if args.n else [],
            s=parse_scalar(args.s, True) if args.s else None,
            s_min=parse_scalar(args.s_min, True) if args.s_min else None,
            s_max=parse_scalar(args.s_max, True) if args.s_max else None,
            s_step=parse_scalar(args.s_step, True),
            sets=args.sets,
            lo=parse_scalar(args.lo, True),
            hi=parse_scalar(args.hi, True),
        )
    elif c == "bounds":
        cfg.params["p"] = args.p
    elif c == "bspline":
        cfg.params["t"] = parse_list(args.t, exact)
    elif c == "mc":
        cfg.params.update(q=args.q, g=args.g)
    elif c == "suite":
        cfg.only = sorted({o.strip() for item in args.only for o in item.split(",") if o.strip()})
    if c in ("eval", "bounds", "bspline", "mc") and not cfg.nodes:
        raise InputError("--nodes is required")
    return cfg


def _fail(code: int, exc: BaseException) -> int:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        out, code = RUNNERS[cfg.command](cfg)
    except (InputError, ValueError, TypeError, ZeroDivisionError) as exc:
        # catalog and node validation errors are ValueError subclasses
        return _fail(EXIT_INPUT, exc)
    except VerificationError as exc:
        # MethodDisagreement, QuadratureFailure and other internal inconsistencies
        return _fail(EXIT_DISAGREE, exc)
    if isinstance(out, dict):
        text = dump_key_value_csv(out) if cfg.output == "csv" else dump_json(out)
        failing = out["diagnostics"].get("failing") if cfg.command == "suite" else None
    else:
        text, failing = out, None
    sys.stdout.write(text)
    if failing:
        print("failing properties: " + ", ".join(failing), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
