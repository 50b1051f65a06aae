"""Command-line interface: ``ggn sample|fit|gof|study|plotdata|moments``.

Every command emits a JSON envelope (``schema_version``, ``tool_version``,
``command``, ``seed``, ``inputs`` with SHA-256 digests, ``payload``).  The
envelope carries no timestamps, so rerunning the recorded command on the
recorded inputs reproduces it byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from importlib import metadata

import numpy as np

from .errors import DomainError, GGNError, PoleError, SeriesConvergenceError
from .estimation import FitOptions
from .ggn import GgnParams
from .gof import empirical_density, gof_report
from .models import MODEL_NAMES, FittedModel, ecdf_model, fit_model
from .sample import Sample
from .sampling import GENERATOR_NAME, StreamSpec, ggn_sample
from .series import SeriesConfig, ggn_moment, ggn_moment_quadrature
from .study import load_plan, plan_from_dict, run_plan, shipped_config

__all__ = ["main", "build_parser", "read_data", "ParseError", "SCHEMA_VERSION", "EXIT_CODES"]

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4, 5, 6
EXIT_CODES = {
    EXIT_OK: "success",
    EXIT_PARSE: "usage or input parse error",
    EXIT_DOMAIN: "invalid parameter or data outside a model's support",
    EXIT_CONVERGENCE: "fit or series did not converge (report still written)",
    EXIT_IO: "file could not be read or written",
    EXIT_INTERNAL: "other library error",
}


class ParseError(GGNError, ValueError):
    """Malformed input file or argument."""


class _ConvergenceExit(Exception):
    pass


def _tool_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# --------------------------------------------------------------------------
# I/O helpers


def _read_bytes(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def _digest(raw: bytes):
    return hashlib.sha256(raw).hexdigest()


def read_data(path):
    """Read one number per line or a single-column CSV with optional header.

    Returns ``(values, line_numbers, digest)``; blank lines are skipped.
    """
    raw = _read_bytes(path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text") from exc
    values, lines = [], []
    seen_content = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        cell = line.strip()
        if not cell:
            continue
        if "," in cell:
            cells = [c.strip() for c in cell.split(",")]
            if len([c for c in cells if c]) != 1:
                raise ParseError(f"{path}:{lineno}: expected a single column, got {cell!r}")
            cell = next(c for c in cells if c)
        try:
            v = float(cell)
        except ValueError:
            if not seen_content:
                seen_content = True
                continue  # header
            raise ParseError(f"{path}:{lineno}: cannot parse {cell!r} as a number") from None
        seen_content = True
        if not math.isfinite(v):
            raise ParseError(f"{path}:{lineno}: non-finite value {cell!r}")
        values.append(v)
        lines.append(lineno)
    if not values:
        raise ParseError(f"{path}: no numeric values")
    return Sample(np.array(values), source=str(path)), lines, _digest(raw)


def _envelope(command, argv, payload, *, seed=None, inputs=None):
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": _tool_version(),
        "command": command,
        "argv": list(argv),
        "seed": seed,
        "inputs": inputs or {},
        "payload": payload,
    }


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _load_report(path):
    raw = _read_bytes(path)
    try:
        return json.loads(raw), _digest(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc


def _pick_model(report, path, name=None):
    try:
        models = report["payload"]["models"]
    except (KeyError, TypeError):
        raise ParseError(f"{path}: not a fit report (missing payload.models)") from None
    for m in models:
        fm = FittedModel.from_dict(m["model"])
        if name is None or fm.name.lower() == name.lower():
            return fm
    raise DomainError(f"{path}: no fitted model named {name!r}")


def _emit(args, envelope, table=None, csv_text=None):
    if getattr(args, "report", None):
        _write_text(args.report, _dumps(envelope))
    if args.format == "json":
        sys.stdout.write(_dumps(envelope))
    elif args.format == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    elif table is not None:
        sys.stdout.write(table.rstrip("\n") + "\n")
    else:
        sys.stdout.write(_dumps(envelope))


def _params(args):
    return GgnParams(args.mu, args.sigma, args.s, args.a)


# --------------------------------------------------------------------------
# Commands


def cmd_sample(args, argv):
    p = _params(args)
    stream = StreamSpec(args.seed, args.stream)
    sample = ggn_sample(p, args.count, stream)
    text = "".join(f"{v!r}\n" for v in sample.values.tolist())
    _write_text(args.out, text)
    payload = {
        "params": dict(zip(("mu", "sigma", "s", "a"), p.as_tuple())),
        "count": args.count,
        "generator": GENERATOR_NAME,
        "stream": stream.as_dict(),
        "output": {"path": args.out, "sha256": _digest(text.encode("utf-8"))},
    }
    env = _envelope("sample", argv, payload, seed=stream.as_dict())
    _write_text(args.out + ".json", _dumps(env))
    _emit(args, env, table=f"wrote {args.count} values to {args.out} (envelope {args.out}.json)")
    return EXIT_OK


def _support_check(model, sample, lines, path):
    x = sample.values
    if model == "gamma":
        bad = np.flatnonzero(~(x > 0))
        want = "> 0"
    elif model == "beta":
        bad = np.flatnonzero(~((x > 0) & (x < 1)))
        want = "in (0, 1)"
    else:
        return
    if bad.size:
        i = int(bad[0])
        raise DomainError(
            f"{path}:{lines[i]}: value {float(x[i])!r} outside the {model} support ({want}); "
            "use --support auto to shift or rescale"
        )


def _fmt(v, w=12):
    return f"{v:>{w}.6g}" if math.isfinite(v) else f"{'nan':>{w}}"


def _fit_table(entries, with_gof):
    out = []
    for e in entries:
        fit = e["model"]["fit"]
        cells = [f"{n}={est:.6g} ({se:.3g})" for n, est, se in
                 zip(fit["param_names"], fit["estimates"], fit["std_errors"])]
        head = f"{fit['model_tag']:<6} loglik={fit['loglik']:.6f} converged={fit['converged']}"
        tmap = e["model"]["transform"]
        if tmap["reason"] != "identity":
            head += f" [{tmap['reason']}: loc={tmap['loc']:.6g} scale={tmap['scale']:.6g}]"
        out.append(head)
        out.append("    " + "  ".join(cells))
    if with_gof:
        cols = ("d_kl", "d_chi2", "d_ks", "w_star", "a_star", "aic", "aicc", "bic")
        out.append("")
        out.append(f"{'model':<7}" + "".join(f"{c:>12}" for c in cols))
        for e in entries:
            g = e["gof"]
            out.append(f"{g['model']:<7}" + "".join(_fmt(g[c]) for c in cols))
    return "\n".join(out)


def cmd_fit(args, argv):
    sample, lines, digest = read_data(args.data)
    models = list(MODEL_NAMES) if args.model == "all" else [args.model]
    opts = FitOptions(fix_a=args.fix_a, starts=args.starts)
    entries, skipped = [], []
    for name in models:
        try:
            if args.support == "none":
                _support_check(name, sample, lines, args.data)
            fm = fit_model(name, sample, support=args.support, options=opts)
        except DomainError as exc:
            if args.model != "all":
                raise
            skipped.append({"model": name, "reason": str(exc)})
            continue
        entry = {"model": fm.to_dict()}
        if args.gof:
            entry["gof"] = gof_report(sample, fm, _bins(args.bins)).to_dict()
        entries.append(entry)
    if args.gof:
        entries.sort(key=lambda e: e["gof"]["aic"])
    payload = {"models": entries, "skipped": skipped, "n_obs": len(sample)}
    if args.gof:
        payload["ordering"] = "ascending AIC"
    env = _envelope("fit", argv, payload, inputs={args.data: digest})
    table = _fit_table(entries, args.gof)
    for s in skipped:
        table += f"\nnote: {s['model']} skipped: {s['reason']}"
    _emit(args, env, table=table)
    if any(not e["model"]["fit"]["converged"] for e in entries):
        raise _ConvergenceExit
    return EXIT_OK


def _bins(value):
    return "auto" if value in (None, "auto") else int(value)


def cmd_gof(args, argv):
    sample, _, digest = read_data(args.data)
    inputs = {args.data: digest}
    if args.self_test:
        model = ecdf_model(sample, _bins(args.bins))
    else:
        if not args.model_report:
            raise ParseError("gof needs --model-report or --self-test")
        rep, rdig = _load_report(args.model_report)
        inputs[args.model_report] = rdig
        model = _pick_model(rep, args.model_report, args.model)
    report = gof_report(sample, model, _bins(args.bins))
    env = _envelope("gof", argv, report.to_dict(), inputs=inputs)
    cols = ("d_kl", "d_chi2", "d_ks", "w_star", "a_star", "aic", "aicc", "bic")
    table = "\n".join(f"{c:<8}{getattr(report, c):.10g}" for c in cols)
    _emit(args, env, table=f"model {report.model}, n={report.n_obs}\n{table}")
    return EXIT_OK


def cmd_study(args, argv):
    if args.shipped:
        plan = shipped_config(args.shipped)
        digest = _digest(json.dumps(plan, sort_keys=True).encode("utf-8"))
        inputs = {f"shipped:{args.shipped}": digest}
        if args.replications:
            plan["replications"] = args.replications
        if args.seed is not None:
            plan["base_seed"] = args.seed
        configs = plan_from_dict(plan)
    else:
        if not args.config:
            raise ParseError("study needs a config path or --shipped NAME")
        raw = _read_bytes(args.config)
        inputs = {args.config: _digest(raw)}
        configs = load_plan(args.config)
        if args.replications or args.seed is not None:
            plan = json.loads(raw)
            if args.replications:
                plan["replications"] = args.replications
            if args.seed is not None:
                plan["base_seed"] = args.seed
            configs = plan_from_dict(plan)
    result = run_plan(configs, workers=args.workers)
    seed = configs[0].base_seed if configs else None
    env = _envelope("study", argv, result.to_dict(), seed={"base_seed": seed}, inputs=inputs)
    csv_text = result.to_csv()
    if args.csv:
        _write_text(args.csv, csv_text)
    _emit(args, env, table=result.to_table(), csv_text=csv_text)
    return EXIT_OK


def cmd_plotdata(args, argv):
    sample, _, digest = read_data(args.data)
    rep, rdig = _load_report(args.model_report)
    model = _pick_model(rep, args.model_report, args.model)
    if not (0 < args.lower < args.upper < 1):
        raise DomainError("quantile bounds must satisfy 0 < lower < upper < 1")
    lo, hi = (float(v) for v in model.quantile(np.array([args.lower, args.upper])))
    grid = np.linspace(lo, hi, args.points)
    fitted = np.asarray(model.pdf(grid), dtype=float)
    hist = empirical_density(sample, _bins(args.bins))
    idx = np.searchsorted(hist.edges, grid, side="right") - 1
    idx[grid == hist.edges[-1]] = hist.bins - 1
    inside = (idx >= 0) & (idx < hist.bins)
    emp = np.zeros_like(grid)
    emp[inside] = hist.density[idx[inside]]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "empirical_density", "fitted_density"])
    for row in zip(grid.tolist(), emp.tolist(), fitted.tolist()):
        w.writerow([repr(v) for v in row])
    text = buf.getvalue()
    payload = {
        "model": model.name,
        "points": args.points,
        "quantile_bounds": [args.lower, args.upper],
        "grid_bounds": [lo, hi],
        "binning": hist.descriptor(),
    }
    if args.out:
        _write_text(args.out, text)
        payload["output"] = {"path": args.out, "sha256": _digest(text.encode("utf-8"))}
    env = _envelope("plotdata", argv, payload, inputs={args.data: digest, args.model_report: rdig})
    if args.out:
        _emit(args, env, table=f"wrote {args.points} grid rows to {args.out}")
    else:
        _emit(args, env, table=text, csv_text=text)
    return EXIT_OK


def cmd_moments(args, argv):
    p = _params(args)
    cfg = SeriesConfig(args.tolerance, args.max_terms)
    rows = []
    all_ok = True
    for n in range(1, args.order + 1):
        quad = ggn_moment_quadrature(n, p)
        row = {"order": n, "quadrature": quad.value, "quadrature_abs_error": quad.residual,
               "quadrature_converged": quad.converged}
        if not args.no_series:
            try:
                ser = ggn_moment(n, p, cfg, inner=args.inner)
            except PoleError as exc:
                row["series_error"] = str(exc)
                all_ok = False
                rows.append(row)
                continue
            rel = abs(ser.value - quad.value) / max(abs(quad.value), 1e-300)
            row.update(series=ser.value, series_terms=ser.terms, series_converged=ser.converged,
                       series_residual=ser.residual, relative_difference=rel,
                       series_diagnostics=ser.diagnostics)
            all_ok = all_ok and ser.converged
        all_ok = all_ok and quad.converged
        rows.append(row)
    payload = {"params": dict(zip(("mu", "sigma", "s", "a"), p.as_tuple())),
               "series_config": {"tolerance": cfg.tolerance, "max_terms": cfg.max_terms},
               "moments": rows}
    env = _envelope("moments", argv, payload)
    lines = [f"{'n':>2} {'quadrature':>22} {'series':>22} {'terms':>6} {'conv':>5} {'rel.diff':>10}"]
    for r in rows:
        if "series" in r:
            lines.append(f"{r['order']:>2} {r['quadrature']:>22.15g} {r['series']:>22.15g} "
                         f"{r['series_terms']:>6} {str(r['series_converged']):>5} {r['relative_difference']:>10.3g}")
        else:
            note = f"  series unavailable: {r['series_error']}" if "series_error" in r else ""
            lines.append(f"{r['order']:>2} {r['quadrature']:>22.15g}{note}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(dict.fromkeys(k for r in rows for k in r if k != "series_diagnostics")),
                       extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(args, env, table="\n".join(lines), csv_text=buf.getvalue())
    if not all_ok:
        raise _ConvergenceExit
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _param_args(p, defaults=(0.0, 1.0, 2.0, 1.0)):
    for flag, d, help_ in zip(("--mu", "--sigma", "--s", "--a"), defaults,
                              ("location", "scale > 0", "tail exponent > 0", "gamma shape > 0")):
        p.add_argument(flag, type=float, default=d, help=f"{help_} (default {d})")


def build_parser():
    epilog = "exit status:\n" + "\n".join(f"  {k}  {v}" for k, v in EXIT_CODES.items())
    parser = argparse.ArgumentParser(
        prog="ggn",
        description="Gamma generalized normal distribution toolkit.",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_tool_version()}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="table",
                        help="standard output format (default table)")
    common.add_argument("--report", metavar="PATH", help="also write the JSON envelope to PATH")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", parents=[common], help="draw a GGN sample to a file",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    _param_args(sp)
    sp.add_argument("--count", type=_positive_int, required=True)
    sp.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    sp.add_argument("--stream", type=int, default=0, help="stream index (default 0)")
    sp.add_argument("--out", required=True, help="output path; the envelope goes to OUT.json")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("fit", parents=[common], help="fit ggn, gamma or beta models",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("data", help="one value per line, or single-column CSV with optional header")
    sp.add_argument("--model", choices=MODEL_NAMES + ("all",), default="ggn")
    sp.add_argument("--support", choices=("none", "auto"), default="none",
                    help="auto: shift (gamma) or rescale (beta) data onto the model support")
    sp.add_argument("--gof", action="store_true", help="add goodness-of-fit statistics; orders by AIC")
    sp.add_argument("--bins", default="auto", help="histogram bins for --gof (integer or auto)")
    sp.add_argument("--starts", type=_positive_int, default=1, help="GGN optimizer starts")
    sp.add_argument("--fix-a", type=float, default=None, help="hold the GGN shape a fixed")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("gof", parents=[common], help="goodness-of-fit report for a fitted model",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("data")
    sp.add_argument("--model-report", help="fit envelope written by `ggn fit --report`")
    sp.add_argument("--model", choices=MODEL_NAMES, default=None, help="model to take from the report")
    sp.add_argument("--self-test", action="store_true", help="compare the sample with its own histogram/ecdf")
    sp.add_argument("--bins", default="auto")
    sp.set_defaults(func=cmd_gof)

    sp = sub.add_parser("study", parents=[common], help="Monte Carlo study of the GGN estimator",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("config", nargs="?", help="study plan JSON")
    sp.add_argument("--shipped", metavar="NAME", help="bundled plan, e.g. shape_grid_m200.json")
    sp.add_argument("--replications", type=_positive_int, default=None, help="override replications")
    sp.add_argument("--seed", type=int, default=None, help="override base seed")
    sp.add_argument("--workers", type=_positive_int, default=1)
    sp.add_argument("--csv", metavar="PATH", help="write the summary CSV to PATH")
    sp.set_defaults(func=cmd_study)

    sp = sub.add_parser("plotdata", parents=[common], help="empirical and fitted densities on a grid",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("data")
    sp.add_argument("--model-report", required=True)
    sp.add_argument("--model", choices=MODEL_NAMES, default=None)
    sp.add_argument("--points", type=_positive_int, default=200)
    sp.add_argument("--lower", type=float, default=0.001, help="lower grid quantile")
    sp.add_argument("--upper", type=float, default=0.999, help="upper grid quantile")
    sp.add_argument("--bins", default="auto")
    sp.add_argument("--out", help="CSV path (default: standard output)")
    sp.set_defaults(func=cmd_plotdata)

    sp = sub.add_parser("moments", parents=[common], help="raw moments by series and by quadrature",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    _param_args(sp, (0.0, 1.0, 2.0, 1.5))
    sp.add_argument("--order", type=_positive_int, default=3, help="highest moment order")
    sp.add_argument("--max-terms", type=int, default=200)
    sp.add_argument("--tolerance", type=float, default=1e-8)
    sp.add_argument("--inner", choices=("quadrature", "pwm"), default="quadrature")
    sp.add_argument("--no-series", action="store_true", help="quadrature only")
    sp.set_defaults(func=cmd_moments)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE
    if getattr(args, "bins", None) not in (None, "auto"):
        try:
            if int(args.bins) < 1:
                raise ValueError
        except ValueError:
            print(f"ggn: error: --bins must be a positive integer or 'auto', got {args.bins!r}", file=sys.stderr)
            return EXIT_PARSE
    try:
        return args.func(args, [args.command] + argv[argv.index(args.command) + 1:])
    except _ConvergenceExit:
        print("ggn: warning: convergence not achieved; see report", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ParseError as exc:
        print(f"ggn: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SeriesConvergenceError as exc:
        print(f"ggn: convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        print(f"ggn: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"ggn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GGNError as exc:
        print(f"ggn: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
