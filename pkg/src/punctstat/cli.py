"""Command-line interface: ``punctstat <command> ...``.

Exit status is 0 on success, 1 for invalid input or configuration and 2 when
an analysis step fails on valid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .corpus import load_document
from .errors import AnalysisError, PunctstatError, ValidationError
from .mfdfa import run_mfdfa
from .pipeline import AnalysisConfig, run_pipeline, validate, write_report
from .plots import emit_plots
from .series import DistanceSeries, extract_distances, read_series, trim_outliers
from .tokenizer import PunctPolicy, load_lexicon, tokenize
from .weibull import dweibull_eval, fit_discrete_weibull
from .zipf import detect_crossover, fit_power_law, rank_frequency


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(obj, out: str | None = None):
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _tokens(args):
    doc = load_document(args.input, forced_script=args.script, threshold=args.cjk_threshold)
    lexicon = load_lexicon(args.lexicon) if args.lexicon else None
    policy = PunctPolicy.for_script(doc.script)
    return doc, tokenize(doc, lexicon, policy), policy


def _series(args) -> DistanceSeries:
    """A series CSV is read as-is; anything else is treated as a text document."""
    if args.input.endswith(".csv"):
        series = read_series(args.input)
    else:
        _, toks, policy = _tokens(args)
        series = extract_distances(toks, args.unit, args.scope, policy.newline_is_terminal)
    return trim_outliers(series, args.drop_largest)


def cmd_analyze(args):
    config = AnalysisConfig.load(args.config)
    if args.workers:
        config.workers = args.workers
    prepared = validate(config)
    bundle = run_pipeline(config, prepared)
    out = config.resolve(config.output_dir) if not args.output_dir else Path(args.output_dir)
    written = write_report(bundle, out)
    if args.plots != "none":
        written += emit_plots(bundle, out, args.plots)
    print(f"wrote {len(written)} files to {out}")
    for e in bundle.errors:
        where = f"{e['document']}" + (f" [{e['scope']}/{e['unit']}]" if "unit" in e else "")
        print(f"warning: {where} {e['stage']}: {e['error']}: {e['message']}", file=sys.stderr)
    return 0


def cmd_tokenize(args):
    _, toks, _ = _tokens(args)
    if args.output:
        toks.write_jsonl(args.output)
    else:
        sys.stdout.write(toks.to_jsonl())
    return 0


def cmd_series(args):
    series = _series(args)
    if args.output:
        series.write(args.output)
    else:
        sys.stdout.write(series.to_csv())
    return 0


def cmd_zipf(args):
    _, toks, _ = _tokens(args)
    table = rank_frequency(toks, args.include_punct, not args.no_case_fold)
    result = {"types": len(table), "total_tokens": table.total_tokens,
              "fit": fit_power_law(table, args.fit_range or "auto").to_dict()}
    if args.crossover:
        result["crossover"] = detect_crossover(table).to_dict()
    if args.table:
        Path(args.table).write_text(table.to_csv(), encoding="utf-8")
    _emit(result, args.output)
    return 0


def cmd_weibull(args):
    series = _series(args)
    fit = fit_discrete_weibull(series, args.min_n)
    result = {"series": series.metadata(), "fit": fit.to_dict()}
    if args.eval:
        result["eval"] = {str(k): dweibull_eval(k, fit.params) for k in args.eval}
    _emit(result, args.output)
    return 0


def _scale_mode(text: str):
    if text in ("auto", "two"):
        return text
    try:
        lo, hi = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected auto, two or LO,HI") from None
    return lo, hi


def cmd_mfdfa(args):
    from .mfdfa import default_qs
    series = _series(args)
    result = run_mfdfa(series, order=args.detrend_order,
                       qs=default_qs(args.q_min, args.q_max, args.q_step),
                       scale_mode=args.scale_mode, s_min=args.s_min, n_scales=args.n_scales)
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "fq.csv").write_text(result.matrix.to_csv(), encoding="utf-8")
        for i, rr in enumerate(result.ranges):
            (out / f"hq_{i}.csv").write_text(rr.hq.to_csv(), encoding="utf-8")
            (out / f"spectrum_{i}.csv").write_text(rr.spectrum.to_csv(), encoding="utf-8")
    summary = {"series": series.metadata(), "warnings": list(result.warnings),
               "ranges": [{k: v for k, v in r.to_dict().items()
                           if k in ("s_lo", "s_hi", "H", "delta_alpha", "label")} for r in result.ranges]}
    _emit(summary, args.output)
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_plot(args):
    try:
        report = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{args.report} is not a report JSON: {exc}") from exc
    written = emit_plots(report, args.output_dir, args.format)
    print(f"wrote {len(written)} files to {args.output_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="punctstat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="run the full pipeline from a JSON config")
    a.add_argument("--config", required=True)
    a.add_argument("--output-dir", help="overrides the config's output_dir")
    a.add_argument("--plots", choices=["svg", "csv", "none"], default="svg")
    a.add_argument("--workers", type=int)
    a.set_defaults(func=cmd_analyze)

    def doc_args(sp):
        sp.add_argument("input", help="UTF-8 text file")
        sp.add_argument("--script", choices=["cjk", "latin"], help="skip script detection")
        sp.add_argument("--lexicon", help="word<TAB or space>frequency file (needed for CJK)")
        sp.add_argument("--cjk-threshold", type=float, default=0.5)

    def series_args(sp):
        doc_args(sp)
        sp.add_argument("--unit", choices=["words", "chars"], default="words")
        sp.add_argument("--scope", choices=["all", "terminal"], default="all")
        sp.add_argument("--drop-largest", type=int, metavar="N")

    t = sub.add_parser("tokenize", help="write tokens as JSON lines")
    doc_args(t)
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_tokenize)

    s = sub.add_parser("series", help="extract a distance series as CSV")
    series_args(s)
    s.add_argument("-o", "--output", help="CSV path; a JSON metadata sidecar is written next to it")
    s.set_defaults(func=cmd_series)

    z = sub.add_parser("zipf", help="rank-frequency power-law fit")
    doc_args(z)
    z.add_argument("--include-punct", action="store_true")
    z.add_argument("--no-case-fold", action="store_true")
    z.add_argument("--fit-range", nargs=2, type=int, metavar=("LO", "HI"))
    z.add_argument("--crossover", action="store_true", help="also fit two regimes")
    z.add_argument("--table", help="write the rank table CSV here")
    z.add_argument("-o", "--output")
    z.set_defaults(func=cmd_zipf)

    w = sub.add_parser("weibull", help="discrete Weibull fit of a series (text or series CSV)")
    series_args(w)
    w.add_argument("--min-n", type=int, default=30)
    w.add_argument("--eval", type=int, nargs="+", metavar="K", help="report pmf/cmf/hazard at these k")
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_weibull)

    m = sub.add_parser("mfdfa", help="multifractal DFA of a series (text or series CSV)")
    series_args(m)
    m.add_argument("--q-min", type=float, default=-4.0)
    m.add_argument("--q-max", type=float, default=4.0)
    m.add_argument("--q-step", type=float, default=0.25)
    m.add_argument("--detrend-order", type=int, default=2)
    m.add_argument("--scale-mode", type=_scale_mode, default="auto", help="auto, two or LO,HI")
    m.add_argument("--s-min", type=int, default=16)
    m.add_argument("--n-scales", type=int, default=24)
    m.add_argument("--output-dir", help="write fq/hq/spectrum CSVs here")
    m.add_argument("-o", "--output")
    m.set_defaults(func=cmd_mfdfa)

    pl = sub.add_parser("plot", help="render figures from a report.json")
    pl.add_argument("report")
    pl.add_argument("--format", choices=["svg", "csv"], default="svg")
    pl.add_argument("--output-dir", default="plots")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AnalysisError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return 2
    except PunctstatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
