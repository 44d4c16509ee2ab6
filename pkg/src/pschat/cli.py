"""Command-line entry point: ``pschat analyze | concordance | validate | lexicon print``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from pschat import __version__
from pschat.errors import PschatError
from pschat.ingest import Corpus, exclude_authors, parse_export, read_id_list, redact_users
from pschat.lexicon import (
    Lexicon,
    concordance,
    concordance_jsonl,
    concordance_text,
    default_lexicon,
    dump_lexicon,
    load_lexicon,
)
from pschat.metrics import GAP_MODES
from pschat.report import build_team_report, compare_teams, render
from pschat.survey import (
    DEFAULT_REVERSE_ITEMS,
    load_survey_csv,
    plot_csv,
    score_all,
    scores_csv,
    scores_json,
    select_extreme_teams,
)

log = logging.getLogger("pschat")

_EXT = {"json": "json", "csv": "csv", "markdown": "md"}


@dataclass
class RunConfig:
    exports: list[Path]
    out_dir: Path = Path("reports")
    redact: Path | None = None
    lexicon: Path | None = None
    survey: Path | None = None
    n_emoji: int = 10
    formats: tuple[str, ...] = ("json", "csv")
    gap_mode: str = "pooled"
    duration_cap: Fraction | None = None
    reverse_items: frozenset[int] = DEFAULT_REVERSE_ITEMS
    exclude_authors: frozenset[str] = field(default_factory=frozenset)
    custom_emoji: frozenset[str] | None = None
    generated_at: str | None = None


def _reverse_items(text: str) -> frozenset[int]:
    if text.strip().lower() in ("", "none"):
        return frozenset()
    try:
        return frozenset(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated item numbers, got {text!r}")


def _formats(text: str) -> tuple[str, ...]:
    out = []
    for f in text.split(","):
        f = {"md": "markdown"}.get(f.strip(), f.strip())
        if f not in _EXT:
            raise argparse.ArgumentTypeError(f"unknown format {f!r} (choose from json, csv, markdown)")
        out.append(f)
    return tuple(dict.fromkeys(out))


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lexicon", type=Path, help="lexicon config (YAML/JSON); default is the built-in lexicon")
    p.add_argument("--redact", type=Path, help="file of user ids (one per line) whose data must be removed")
    p.add_argument("--exclude-authors", type=Path, help="file of author ids whose messages are left out of totals")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pschat", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pschat {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="write per-team reports and, with survey data, a comparison")
    a.add_argument("exports", nargs="+", type=Path, help="export directories or zips; team id = file stem")
    _add_common(a)
    a.add_argument("--survey", type=Path, help="survey CSV: team_id,period,respondent,q1..q7")
    a.add_argument("--out-dir", type=Path, default=Path("reports"))
    a.add_argument("--format", type=_formats, default=("json", "csv"), help="comma list of json,csv,markdown")
    a.add_argument("--top-emoji", type=_positive, default=10, metavar="N")
    a.add_argument("--reverse-items", type=_reverse_items, default=DEFAULT_REVERSE_ITEMS,
                   help="reverse-coded survey items, e.g. 1,3,5 or 'none'")
    a.add_argument("--gap-mode", choices=GAP_MODES, default="pooled")
    a.add_argument("--duration-cap", type=Fraction, metavar="SECONDS", help="cap each latency/gap before averaging")
    a.add_argument("--custom-emoji", type=Path, help="file of custom emoji names; default uses the standard list")
    a.add_argument("--generated-at", help="fixed report timestamp for reproducible output")

    c = sub.add_parser("concordance", help="keyword-in-context listing for one sub-category")
    c.add_argument("export", type=Path)
    c.add_argument("sub_category")
    _add_common(c)
    c.add_argument("--context", type=int, default=2)
    c.add_argument("--format", choices=("text", "jsonl"), default="text")

    v = sub.add_parser("validate", help="check exports, lexicon and survey input")
    v.add_argument("exports", nargs="*", type=Path)
    _add_common(v)
    v.add_argument("--survey", type=Path)

    lx = sub.add_parser("lexicon", help="lexicon utilities")
    lsub = lx.add_subparsers(dest="lexicon_command", required=True)
    lp = lsub.add_parser("print", help="print the effective lexicon as YAML")
    lp.add_argument("--lexicon", type=Path)
    return parser


def _lexicon(path: Path | None) -> Lexicon:
    return load_lexicon(path) if path else default_lexicon()


def _load_corpus(path: Path, redact: set[str], excluded: set[str]) -> Corpus:
    corpus = redact_users(parse_export(path), redact)
    return exclude_authors(corpus, excluded)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        exports=list(args.exports),
        out_dir=args.out_dir,
        redact=args.redact,
        lexicon=args.lexicon,
        survey=args.survey,
        n_emoji=args.top_emoji,
        formats=args.format,
        gap_mode=args.gap_mode,
        duration_cap=args.duration_cap,
        reverse_items=args.reverse_items,
        exclude_authors=frozenset(read_id_list(args.exclude_authors)) if args.exclude_authors else frozenset(),
        custom_emoji=frozenset(read_id_list(args.custom_emoji)) if args.custom_emoji else None,
        generated_at=args.generated_at,
    )


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def cmd_analyze(cfg: RunConfig) -> int:
    lexicon = _lexicon(cfg.lexicon)
    redact = read_id_list(cfg.redact) if cfg.redact else set()
    responses = load_survey_csv(cfg.survey) if cfg.survey else None
    cfg.out_dir.mkdir(parents=True, exist_ok=True)

    reports = {}
    for path in cfg.exports:
        corpus = _load_corpus(path, redact, set(cfg.exclude_authors))
        if corpus.team_id in reports:
            raise PschatError(f"two exports resolve to team id {corpus.team_id!r}")
        rep = build_team_report(
            corpus, lexicon, cfg.n_emoji,
            gap_mode=cfg.gap_mode, duration_cap=cfg.duration_cap,
            custom_emoji=cfg.custom_emoji, generated_at=cfg.generated_at,
        )
        reports[corpus.team_id] = rep
        for fmt in cfg.formats:
            _write(cfg.out_dir / f"{corpus.team_id}.report.{_EXT[fmt]}", render(rep, fmt))

    if responses is not None:
        scores = score_all(responses, cfg.reverse_items)
        selection = select_extreme_teams(scores) if len({s.team_id for s in scores}) >= 2 else None
        _write(cfg.out_dir / "survey_scores.csv", scores_csv(scores))
        _write(cfg.out_dir / "survey_scores.json", scores_json(scores, selection))
        _write(cfg.out_dir / "survey_plot.csv", plot_csv(scores))
        if selection is not None and len(reports) >= 2:
            missing = [t for t in (selection.high_team, selection.low_team) if t not in reports]
            if missing:
                raise PschatError(
                    f"survey selected team(s) {', '.join(missing)} with no matching export "
                    f"(exports: {', '.join(sorted(reports))})"
                )
            comparison = compare_teams(reports[selection.high_team], reports[selection.low_team], selection.rationale)
            _write(cfg.out_dir / "comparison.md", render(comparison, "markdown"))
            _write(cfg.out_dir / "comparison.json", render(comparison, "json"))
            print(f"high team: {selection.high_team}  low team: {selection.low_team}")
    print(f"wrote {len(reports)} team report(s) to {cfg.out_dir}")
    return 0


def cmd_concordance(args: argparse.Namespace) -> int:
    lexicon = _lexicon(args.lexicon)
    lexicon.entry(args.sub_category)
    redact = read_id_list(args.redact) if args.redact else set()
    excluded = read_id_list(args.exclude_authors) if args.exclude_authors else set()
    corpus = _load_corpus(args.export, redact, excluded)
    entries = concordance(corpus, lexicon, args.sub_category, args.context)
    if args.format == "jsonl":
        sys.stdout.write(concordance_jsonl(corpus, entries, args.sub_category))
    else:
        sys.stdout.write(concordance_text(corpus, entries, args.sub_category))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    lexicon = _lexicon(args.lexicon)
    print(f"lexicon: {len(lexicon.categories)} categories, {len(lexicon.sub_categories)} sub-categories "
          f"(hash {lexicon.digest()})")
    redact = read_id_list(args.redact) if args.redact else set()
    excluded = read_id_list(args.exclude_authors) if args.exclude_authors else set()
    for path in args.exports:
        corpus = _load_corpus(path, redact, excluded)
        n = sum(1 for _ in corpus.iter_messages(analytic_only=True))
        print(f"export {path}: team {corpus.team_id}, {len(corpus.channels)} channels, "
              f"{len(corpus.users)} users, {n} analytic messages")
        if n == 0:
            print(f"warning: export {path} has zero messages", file=sys.stderr)
    if args.survey:
        responses = load_survey_csv(args.survey)
        teams = sorted({r.team_id for r in responses})
        periods = sorted({r.period for r in responses})
        print(f"survey {args.survey}: {len(responses)} responses, teams {teams}, periods {periods}")
    print("OK")
    return 0


def cmd_lexicon_print(args: argparse.Namespace) -> int:
    sys.stdout.write(dump_lexicon(_lexicon(args.lexicon)))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "analyze":
            return cmd_analyze(_config_from_args(args))
        if args.command == "concordance":
            return cmd_concordance(args)
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_lexicon_print(args)
    except PschatError as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
