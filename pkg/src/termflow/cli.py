"""Batch command-line front end.

Subcommands compose through files (or stdin/stdout with ``-``): synthesize
a corpus, ingest it, rank terms, compute hardness reports, trace trends,
fit diffusion curves, build migration reports, and render SVG charts. All
outputs are deterministic for fixed inputs and seed, and every artifact
embeds the resolved run configuration.

Term syntax: tokens of a phrase separated by spaces, required co-occurring
terms appended with '+', e.g. ``"cold fusion"`` or ``"add+attention"``.
The plot subcommand additionally accepts ``term@discipline`` series specs.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from typing import Optional

from . import corpus, diffusion, measure, migration, plotting, rank, synth, trend
from .errors import TermflowError


def _parse_query(text: str) -> corpus.TermQuery:
    parts = text.split("+")
    return corpus.TermQuery.parse(parts[0], coterms=parts[1:])


def _read_corpus(path: str, csv_format: bool, bin_width: int, anchor: Optional[int]):
    reader = corpus.read_csv_records if csv_format else corpus.read_jsonl_records
    return corpus.ingest(reader(path), bin_width=bin_width, anchor_year=anchor)


def _resolve_seed(args: argparse.Namespace, fallback: int = 0) -> int:
    env = os.environ.get("TERMFLOW_SEED")
    if env is not None:
        return int(env)
    if getattr(args, "seed", None) is not None:
        return args.seed
    return fallback


def _config_dict(args: argparse.Namespace, **extra) -> dict:
    skip = {"func", "out"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg.update(extra)
    return cfg


def _config_line(cfg: dict) -> str:
    return "config " + json.dumps(cfg, sort_keys=True)


def _write_output(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _json_artifact(payload: dict, cfg: dict) -> str:
    return json.dumps({"config": cfg, **payload}, sort_keys=True, indent=2) + "\n"


def _add_corpus_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="JSONL corpus path or - for stdin")
    p.add_argument("--csv", action="store_true", help="corpus is CSV, not JSONL")
    p.add_argument("--bin-width", type=int, default=2)
    p.add_argument("--anchor-year", type=int, default=None)


def _add_trend_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--smoothing-window", type=int, default=trend.DEFAULT_SMOOTHING_WINDOW)
    p.add_argument("--support-threshold", type=int, default=trend.DEFAULT_SUPPORT_THRESHOLD)


def cmd_ingest(args: argparse.Namespace) -> int:
    index = _read_corpus(args.corpus, args.csv, args.bin_width, args.anchor_year)
    cfg = _config_dict(args)
    if args.format == "json":
        payload = {
            "documents": index.n_documents,
            "disciplines": {
                d: index.discipline_totals[d] for d in index.disciplines
            },
            "bins": [
                {
                    "start_year": b.start_year,
                    "counts": {
                        d: index.doc_counts.get((d, b.start_year), 0)
                        for d in index.disciplines
                        if (d, b.start_year) in index.doc_counts
                    },
                }
                for b in index.bins
            ],
        }
        _write_output(_json_artifact(payload, cfg), args.out)
    else:
        buf = io.StringIO()
        buf.write(f"# {_config_line(cfg)}\n")
        buf.write("discipline,bin_start,documents\n")
        for d in index.disciplines:
            for b in index.bins:
                buf.write(f"{d},{b.start_year},{index.doc_counts.get((d, b.start_year), 0)}\n")
        _write_output(buf.getvalue(), args.out)
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    index = _read_corpus(args.corpus, args.csv, args.bin_width, args.anchor_year)
    dictionary = (
        rank.load_dictionary(args.dictionary, args.discipline)
        if args.dictionary
        else None
    )
    ranking = rank.rank_terms(
        index, args.discipline, dictionary, normal_switch=args.normal_threshold
    )
    cfg = _config_dict(args)
    buf = io.StringIO()
    rank.write_ranking_csv(ranking, buf, config_line=_config_line(cfg))
    _write_output(buf.getvalue(), args.out)
    return 0


def cmd_mdelta(args: argparse.Namespace) -> int:
    index = _read_corpus(args.corpus, args.csv, args.bin_width, args.anchor_year)
    annotations = measure.load_annotations(args.annotations)
    disciplines = args.discipline or list(index.disciplines)
    dictionaries: dict[str, rank.Dictionary] = {}
    for spec in args.dictionary or []:
        if "=" in spec:
            disc, path = spec.split("=", 1)
        elif len(disciplines) == 1:
            disc, path = disciplines[0], spec
        else:
            raise TermflowError("use --dictionary DISCIPLINE=PATH with several disciplines")
        dictionaries[disc] = rank.load_dictionary(path, disc)

    reports = []
    for disc in disciplines:
        ranking = rank.rank_terms(index, disc, dictionaries.get(disc))
        top = rank.top_terms(ranking, args.list_length)
        bottom = rank.bottom_terms(ranking, args.list_length)
        reports.append(
            measure.m_delta(top, bottom, disc, annotations, smoothing=args.smooth)
        )
    ordered = measure.hardness_ranking(reports)
    cfg = _config_dict(args)
    buf = io.StringIO()
    measure.write_reports_csv(ordered, buf, config_line=_config_line(cfg))
    _write_output(buf.getvalue(), args.out)
    return 0


def cmd_trend(args: argparse.Namespace) -> int:
    index = _read_corpus(args.corpus, args.csv, args.bin_width, args.anchor_year)
    query = _parse_query(args.term)
    growth = trend.growth_pipeline(
        index,
        query,
        args.discipline,
        smoothing_window=args.smoothing_window,
        support_threshold=args.support_threshold,
    )
    cfg = _config_dict(args)
    buf = io.StringIO()
    trend.write_series_csv(growth, buf, config_line=_config_line(cfg))
    _write_output(buf.getvalue(), args.out)
    if args.plot:
        svg = plotting.growth_chart_svg(
            [growth], title=f"{query.label()} in {args.discipline}", config=cfg
        )
        _write_output(svg, args.plot)
    return 0


def cmd_migrate(args: argparse.Namespace) -> int:
    index = _read_corpus(args.corpus, args.csv, args.bin_width, args.anchor_year)
    query = _parse_query(args.term)
    disciplines = args.disciplines or list(index.disciplines)
    series = {
        d: trend.growth_pipeline(
            index,
            query,
            d,
            smoothing_window=args.smoothing_window,
            support_threshold=args.support_threshold,
        )
        for d in disciplines
    }
    report = migration.classify_roles(
        series, strong_threshold=args.strong_threshold, query_label=query.label()
    )
    cfg = _config_dict(args)
    _write_output(_json_artifact(report.to_dict(), cfg), args.out)
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    index = _read_corpus(args.corpus, args.csv, args.bin_width, args.anchor_year)
    query = _parse_query(args.term)
    series = diffusion.adoption_series(index, query, args.discipline)
    result = diffusion.fit(series)
    cfg = _config_dict(args)
    _write_output(_json_artifact(result.to_dict(), cfg), args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    params = diffusion.DiffusionParams(c=args.c, p_m=args.pm, p_0=args.p0)
    if args.euler:
        traj = diffusion.trajectory_euler(params, args.t_end, args.dt)
    else:
        times = [i * args.dt for i in range(int(round(args.t_end / args.dt)) + 1)]
        traj = diffusion.trajectory_closed_form(params, times)
    cfg = _config_dict(args)
    buf = io.StringIO()
    buf.write(f"# {_config_line(cfg)}\n")
    buf.write("t,p\n")
    for t, p in zip(traj.times, traj.p):
        buf.write(f"{t:.12g},{p:.12g}\n")
    _write_output(buf.getvalue(), args.out)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    with open(args.spec, "r", encoding="utf-8") as handle:
        spec = synth.scenario_from_json(handle.read())
    seed = _resolve_seed(args, fallback=spec.seed)
    if seed != spec.seed:
        spec = synth.ScenarioSpec(
            disciplines=spec.disciplines,
            year_range=spec.year_range,
            bin_width=spec.bin_width,
            injected_query=spec.injected_query,
            background=spec.background,
            seed=seed,
        )
    records, truth = synth.generate(spec)
    buf = io.StringIO()
    corpus.write_jsonl_records(records, buf)
    _write_output(buf.getvalue(), args.out)
    if args.truth:
        cfg = _config_dict(args, seed=seed)
        _write_output(_json_artifact(truth.to_dict(), cfg), args.truth)
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    index = _read_corpus(args.corpus, args.csv, args.bin_width, args.anchor_year)
    series = []
    labels = []
    for spec in args.series:
        if "@" in spec:
            term_text, disc = spec.rsplit("@", 1)
        elif len(index.disciplines) == 1:
            term_text, disc = spec, index.disciplines[0]
        else:
            raise TermflowError(f"series {spec!r} needs an @discipline suffix")
        query = _parse_query(term_text)
        series.append(
            trend.growth_pipeline(
                index,
                query,
                disc,
                smoothing_window=args.smoothing_window,
                support_threshold=args.support_threshold,
            )
        )
        labels.append(f"{query.label()} / {disc}")
    cfg = _config_dict(args)
    svg = plotting.growth_chart_svg(series, labels, title=args.title, config=cfg)
    _write_output(svg, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termflow",
        description="Term-trend analytics over discipline-tagged corpora.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="validate a corpus and report cell counts")
    _add_corpus_options(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("rank", help="rank target-discipline terms by Poisson percentile")
    _add_corpus_options(p)
    p.add_argument("--discipline", required=True)
    p.add_argument("--dictionary", default=None, help="term list used as a filter")
    p.add_argument("--normal-threshold", type=float, default=rank.NORMAL_SWITCH_LAMBDA)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("mdelta", help="technical-sense hardness report per discipline")
    _add_corpus_options(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--discipline", action="append", default=None)
    p.add_argument("--dictionary", action="append", default=None, metavar="DISC=PATH")
    p.add_argument("--list-length", type=int, default=10)
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_mdelta)

    p = sub.add_parser("trend", help="frequency and growth series for one query")
    _add_corpus_options(p)
    _add_trend_options(p)
    p.add_argument("--term", required=True)
    p.add_argument("--discipline", required=True)
    p.add_argument("--plot", default=None, help="also write an SVG chart here")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("migrate", help="donor/borrower report for one query")
    _add_corpus_options(p)
    _add_trend_options(p)
    p.add_argument("--term", required=True)
    p.add_argument("--disciplines", nargs="*", default=None)
    p.add_argument("--strong-threshold", type=float, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_migrate)

    p = sub.add_parser("fit", help="fit diffusion parameters to a query's adoption")
    _add_corpus_options(p)
    p.add_argument("--term", required=True)
    p.add_argument("--discipline", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="evaluate a diffusion trajectory")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--pm", type=float, required=True)
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--euler", action="store_true", help="integrate instead of closed form")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth", help="generate a synthetic corpus from a scenario file")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--truth", default=None, help="write ground truth JSON here")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plot", help="SVG chart of smoothed growth series")
    _add_corpus_options(p)
    _add_trend_options(p)
    p.add_argument("--series", action="append", required=True, metavar="TERM@DISC")
    p.add_argument("--title", default="term growth rates")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TermflowError as exc:
        print(f"error code={exc.code} msg={json.dumps(str(exc))}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error code=io.{type(exc).__name__} msg={json.dumps(str(exc))}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
