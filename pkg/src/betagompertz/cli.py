"""Command-line front end: ``betagompertz {eval,sample,fit,compare,simstudy,shape}``.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 convergence failure.
Every JSON report starts with an ``input`` block echoing the parameters, seed
and tolerances that produced it. Floats are written with 10 significant
digits; non-finite values become ``null``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import analytic, core, datasets, inference, simulation
from .core import BGParams
from .errors import ConvergenceError, DomainError
from .specfun import SeriesControl
from .submodels import FAMILIES, PARAM_ORDER, get_family

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_CONVERGENCE = 0, 2, 3, 4
SUBCOMMANDS = ("eval", "sample", "fit", "compare", "simstudy", "shape")


class _Invalid(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    params: BGParams | None = None
    family: str = "BG"
    seed: int = 0
    replications: int = 1000
    sample_size: int = 100
    output_format: str = "json"
    series_budget: SeriesControl = field(default_factory=SeriesControl)


# ---------------------------------------------------------------------------
# formatting


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    if not math.isfinite(v):
        return None
    return float(f"{v:.10g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (float, int, np.floating, np.integer, np.bool_)):
        return _num(obj)
    return obj


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _table(header, rows):
    cells = [[_fmt(c) for c in header]] + [[_fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _emit(report, fmt, table_text, out):
    if fmt == "json":
        out.write(json.dumps(_clean(report), indent=2) + "\n")
    else:
        out.write(table_text() + "\n")


# ---------------------------------------------------------------------------
# argument parsing


def _floats(text, what):
    try:
        vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise _Invalid(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise _Invalid(f"{what}: no values given")
    return vals


def _bg_params(text):
    vals = _floats(text, "--params")
    if len(vals) != 4:
        raise _Invalid("--params takes four values: theta,gamma,alpha,beta")
    return BGParams.from_sequence(vals)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--series-max-terms", type=int, default=SeriesControl.max_terms)
    common.add_argument("--series-tol", type=float, default=SeriesControl.abs_tol)
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="betagompertz", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate pdf/cdf/sf/hrf/quantile")
    ev.add_argument("--params", required=True, help="theta,gamma,alpha,beta")
    ev.add_argument("--x", help="comma-separated probe points")
    ev.add_argument("--probes", help="file of probe points, one per line")
    ev.add_argument("--u", help="comma-separated probability levels for the quantile")
    ev.add_argument("--curve", type=int, help="emit N equally spaced points up to Q(0.999)")
    ev.add_argument("--series", action="store_true",
                    help="also evaluate the mixture and hypergeometric cdf series")

    sa = sub.add_parser("sample", parents=[common], help="draw a random sample")
    sa.add_argument("--params", required=True, help="theta,gamma,alpha,beta")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--out", help="output file (default: stdout)")
    sa.add_argument("--with-ecdf", action="store_true",
                    help="write 'value ecdf model_cdf' triples instead of bare values")

    for name, helptext in (("fit", "fit one family"), ("compare", "fit and compare all families")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--data", help="data file (default: bundled Aarset sample)")
        if name == "fit":
            p.add_argument("--family", default="BG", help="/".join(FAMILIES))
        p.add_argument("--max-starts", type=int, default=inference.FitOptions.max_starts)

    ss = sub.add_parser("simstudy", parents=[common], help="Monte Carlo study of the MLE")
    ss.add_argument("--scenarios", help="'alpha,beta,theta,gamma;...' (default: the two desk designs)")
    ss.add_argument("--n", default="30,100", help="comma-separated sample sizes")
    ss.add_argument("--reps", type=int, default=1000)
    ss.add_argument("--start", choices=("truth", "grid"), default="truth")
    ss.add_argument("--workers", type=int, default=1)

    sh = sub.add_parser("shape", parents=[common], help="Bowley skewness and Moors kurtosis grids")
    sh.add_argument("--params", default="0.5,0.5,1,1", help="base theta,gamma,alpha,beta")
    sh.add_argument("--vary", choices=("gamma", "theta"), default="gamma")
    sh.add_argument("--grid", default="0.1,0.25,0.5,1,2,4", help="values of the varied parameter")
    sh.add_argument("--alphas", default="0.5,1,2,5", help="alpha values (one column each)")
    return ap


def _series(args):
    try:
        return SeriesControl(args.series_max_terms, args.series_tol)
    except DomainError as exc:
        raise _Invalid(str(exc)) from None


def _echo(args, **extra):
    d = {k: v for k, v in vars(args).items() if v is not None}
    d.update(extra)
    return d


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args, out):
    p = _bg_params(args.params)
    ctl = _series(args)
    if args.curve is not None:
        if args.curve < 2:
            raise _Invalid("--curve needs at least 2 points")
        xs = np.linspace(0.0, core.quantile(0.999, p), args.curve)
    else:
        xs = []
        if args.x:
            xs += _floats(args.x, "--x")
        if args.probes:
            with open(args.probes, encoding="utf-8") as fh:
                xs += [float(line) for line in fh if line.strip() and not line.startswith("#")]
        xs = np.array(xs, dtype=float)
    if np.any(xs < 0):
        raise _Invalid("probe points must be >= 0")
    if xs.size == 0 and not args.u:
        raise _Invalid("give probe points (--x, --probes or --curve) or --u levels")

    points = []
    for x in xs:
        row = {"x": x, "pdf": core.pdf(x, p), "cdf": core.cdf(x, p), "sf": core.sf(x, p)}
        try:
            row["hrf"] = core.hrf(x, p)
        except DomainError:
            row["hrf"] = None
        if args.series:
            for name, fn in (("cdf_series", analytic.cdf_series),
                             ("cdf_hypergeometric", analytic.cdf_hypergeometric)):
                try:
                    row[name] = fn(x, p, ctl)
                except ConvergenceError:
                    row[name] = None
        points.append(row)
    quantiles = []
    if args.u:
        for u in _floats(args.u, "--u"):
            quantiles.append({"u": u, "x": core.quantile(u, p)})
    report = {"input": _echo(args, params=dict(zip(("theta", "gamma", "alpha", "beta"),
                                                    p.as_tuple()))),
              "points": points, "quantiles": quantiles}

    def table():
        cols = list(points[0]) if points else []
        parts = []
        if points:
            parts.append(_table(cols, [[r[c] for c in cols] for r in points]))
        if quantiles:
            parts.append(_table(["u", "quantile"], [[q["u"], q["x"]] for q in quantiles]))
        return "\n\n".join(parts)

    _emit(report, args.format, table, out)
    return EXIT_OK


def cmd_sample(args, out):
    p = _bg_params(args.params)
    if args.n < 1:
        raise _Invalid("--n must be a positive integer")
    x = core.sample(args.n, p, args.seed)
    if args.with_ecdf:
        xs = np.sort(x)
        ecdf = np.arange(1, xs.size + 1) / xs.size
        lines = [f"{v:.17g} {e:.17g} {c:.17g}" for v, e, c in zip(xs, ecdf, core.cdf(xs, p))]
    else:
        lines = [f"{v:.17g}" for v in x]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _load(args):
    return datasets.read_values(args.data) if args.data else datasets.aarset()


def _fit_record(f, gof):
    return {
        "family": f.family.tag,
        "estimate": f.estimate,
        "std_errors": f.std_errors,
        "loglik": f.loglik,
        "neg_loglik": -f.loglik,
        "converged": f.converged,
        "message": f.message,
        "n_starts": f.n_restarts_used,
        "grad_norm": f.grad_norm,
        "gof": None if gof is None else {
            "ks_stat": gof.ks_stat, "ks_pvalue": gof.ks_pvalue,
            "aic": gof.aic, "aicc": gof.aicc, "bic": gof.bic,
        },
    }


def cmd_fit(args, out):
    x = _load(args)
    fam = get_family(args.family)
    f = inference.fit_mle(x, fam, inference.FitOptions(max_starts=args.max_starts))
    gof = inference.gof_report(x, f) if f.estimate else None
    report = {"input": _echo(args, data=args.data or "bundled:aarset", n=len(x)),
              **_fit_record(f, gof)}

    def table():
        rows = [[k, f.estimate.get(k), (f.std_errors or {}).get(k)] for k in fam.free_params]
        lines = [_table(["parameter", "estimate", "std.err"], rows), "",
                 f"-loglik {-f.loglik:.6f}   converged {f.converged}"]
        if gof:
            lines.append(f"K-S {gof.ks_stat:.4f} (p {gof.ks_pvalue:.4f})   AIC {gof.aic:.4f}"
                         f"   AICc {gof.aicc:.4f}   BIC {gof.bic:.4f}")
        return "\n".join(lines)

    _emit(report, args.format, table, out)
    return EXIT_OK if f.converged else EXIT_CONVERGENCE


def cmd_compare(args, out):
    x = _load(args)
    t0 = time.perf_counter()
    rows = inference.compare_families(x, opts=inference.FitOptions(max_starts=args.max_starts))
    elapsed = time.perf_counter() - t0
    records = []
    for tag, row in rows.items():
        rec = _fit_record(row.fit, row.gof)
        rec["lrt_vs_bg"] = None if row.lrt is None else dict(zip(("stat", "pvalue", "df"), row.lrt))
        records.append(rec)
    report = {"input": _echo(args, data=args.data or "bundled:aarset", n=len(x)),
              "elapsed_seconds": elapsed, "families": records}

    def table():
        header = ["", *rows]
        lines = []
        for k in PARAM_ORDER:
            lines.append([k, *[r.fit.estimate.get(k) for r in rows.values()]])
            lines.append(["  (std)", *[(r.fit.std_errors or {}).get(k) if k in r.fit.estimate
                                       else None for r in rows.values()]])
        lines.append(["-logL", *[-r.fit.loglik for r in rows.values()]])
        for key in ("ks_stat", "ks_pvalue", "aic", "aicc", "bic"):
            lines.append([key, *[getattr(r.gof, key) if r.gof else None for r in rows.values()]])
        lines.append(["LRT", *[r.lrt[0] if r.lrt else None for r in rows.values()]])
        lines.append(["LRT p", *[r.lrt[1] if r.lrt else None for r in rows.values()]])
        lines.append(["converged", *[r.fit.converged for r in rows.values()]])
        return _table(header, lines)

    _emit(report, args.format, table, out)
    return EXIT_OK


def _scenarios(args):
    sizes = [int(v) for v in _floats(args.n, "--n")]
    if args.scenarios:
        quads = []
        for chunk in args.scenarios.split(";"):
            vals = _floats(chunk, "--scenarios")
            if len(vals) != 4:
                raise _Invalid("each scenario needs alpha,beta,theta,gamma")
            quads.append(vals)
    else:
        quads = simulation.DESK_SCENARIOS
    return [simulation.Scenario(*q, n) for n in sizes for q in quads]


def cmd_simstudy(args, out):
    scen = _scenarios(args)
    t0 = time.perf_counter()
    res = simulation.run_study(scen, args.reps, seed=args.seed, start=args.start,
                               workers=args.workers)
    elapsed = time.perf_counter() - t0
    records = [{
        "scenario": s.scenario.truth(), "n": s.scenario.n, "reps": s.reps, "n_ok": s.n_ok,
        "failure_fraction": s.failure_fraction, "flagged": s.flagged,
        "mean_estimate": s.mean_estimate, "median_estimate": s.median_estimate,
        "empirical_sd": s.empirical_sd, "mean_info_se": s.mean_info_se, "mc_se": s.mc_se(),
    } for s in res]
    report = {"input": _echo(args), "elapsed_seconds": elapsed, "scenarios": records}

    def table():
        header = ["n", *[f"{k}" for k in PARAM_ORDER],
                  *[f"mean {k}" for k in PARAM_ORDER], *[f"sd {k}" for k in PARAM_ORDER],
                  *[f"se {k}" for k in PARAM_ORDER], "fail", "flag"]
        rows = [[s.scenario.n, *s.scenario.truth().values(), *s.mean_estimate.values(),
                 *s.empirical_sd.values(), *s.mean_info_se.values(),
                 s.failure_fraction, "*" if s.flagged else ""] for s in res]
        return _table(header, rows)

    _emit(report, args.format, table, out)
    return EXIT_OK


def cmd_shape(args, out):
    base = _bg_params(args.params)
    grid = _floats(args.grid, "--grid")
    alphas = _floats(args.alphas, "--alphas")
    rows = []
    for v in grid:
        for a in alphas:
            kw = dict(theta=base.theta, gamma=base.gamma, alpha=a, beta=base.beta)
            kw[args.vary] = v
            p = BGParams(**kw)
            rows.append({args.vary: v, "alpha": a, "bowley": analytic.bowley_skewness(p),
                         "moors": analytic.moors_kurtosis(p)})
    report = {"input": _echo(args), "rows": rows}

    def table():
        parts = []
        for measure in ("bowley", "moors"):
            header = [args.vary, *[f"alpha={a:g}" for a in alphas]]
            body = [[v, *[r[measure] for r in rows if r[args.vary] == v]] for v in grid]
            parts.append(f"{measure}\n" + _table(header, body))
        return "\n\n".join(parts)

    _emit(report, args.format, table, out)
    return EXIT_OK


def config_from_args(args):
    """Validate the subcommand's required fields into a :class:`RunConfig`.

    Runs before any computation so that bad flags fail fast with exit code 2.
    """
    cfg = RunConfig(args.subcommand, seed=args.seed, output_format=args.format,
                    series_budget=_series(args))
    if args.subcommand in ("eval", "sample", "shape"):
        cfg.params = _bg_params(args.params)
    if args.subcommand in ("fit", "compare"):
        cfg.input_path = args.data
        if args.max_starts < 1:
            raise _Invalid("--max-starts must be a positive integer")
    if args.subcommand == "fit":
        cfg.family = get_family(args.family).tag
    if args.subcommand == "sample":
        if args.n < 1:
            raise _Invalid("--n must be a positive integer")
        cfg.sample_size = args.n
    if args.subcommand == "simstudy":
        if args.reps < 1:
            raise _Invalid("--reps must be a positive integer")
        if args.workers < 1:
            raise _Invalid("--workers must be a positive integer")
        cfg.replications = args.reps
    return cfg


COMMANDS = {"eval": cmd_eval, "sample": cmd_sample, "fit": cmd_fit, "compare": cmd_compare,
            "simstudy": cmd_simstudy, "shape": cmd_shape}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config_from_args(args)
        return COMMANDS[args.subcommand](args, out)
    except (_Invalid, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
