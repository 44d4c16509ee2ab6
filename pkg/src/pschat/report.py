"""Team reports and high/low team comparisons in Markdown, CSV and JSON."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Iterable

from pschat import __version__
from pschat.errors import ReportError
from pschat.fmt import UNDEFINED, exact, format_duration, format_pct, from_exact
from pschat.ingest import Corpus
from pschat.lexicon import KeywordRow, KeywordTabulation, Lexicon, tabulate_keywords
from pschat.metrics import EmojiEntry, EmojiRanking, UsageMetrics, compute_usage_metrics, rank_emoji_reactions

TEAM_FORMAT = "pschat.team_report/1"
COMPARISON_FORMAT = "pschat.comparison/1"
FORMATS = ("markdown", "csv", "json")


@dataclass(frozen=True)
class TeamReport:
    team_id: str
    usage: UsageMetrics
    keywords: KeywordTabulation
    emoji: EmojiRanking
    generated_at: str
    tool_version: str
    lexicon_hash: str
    n_emoji: int


@dataclass(frozen=True)
class UsageRow:
    """One rendered line of the usage table.

    ``kind`` is ``count``, ``count_pct``, ``pct``, ``duration`` or ``real``.
    """

    key: str
    label: str
    kind: str
    count: int | None = None
    pct: Fraction | None = None
    seconds: Fraction | None = None
    real: float | None = None

    def rendered(self) -> str:
        if self.kind == "count":
            return str(self.count)
        if self.kind == "count_pct":
            return f"{self.count} ({format_pct(self.pct)})"
        if self.kind == "pct":
            return format_pct(self.pct)
        if self.kind == "duration":
            return format_duration(self.seconds)
        return UNDEFINED if self.real is None else f"{self.real:.3f}"


def usage_rows(u: UsageMetrics) -> list[UsageRow]:
    """Usage metrics in canonical table order."""
    return [
        UsageRow("total_messages", "Total Number of Messages", "count", count=u.total_messages),
        UsageRow("reply_count", "Number of Replies", "count", count=u.reply_count),
        UsageRow("pct_messages_with_reply", "% of Messages With at Least One Reply", "pct",
                 count=u.replied_root_count, pct=u.pct_messages_with_reply),
        UsageRow("avg_time_to_first_reply", "Average Time to Reply", "duration", seconds=u.avg_time_to_first_reply),
        UsageRow("avg_gap_between_channel_messages", "Average Time Between Messages in a Channel", "duration",
                 seconds=u.avg_gap_between_channel_messages),
        UsageRow("file_share_count", "Number of File Shares", "count_pct", count=u.file_share_count, pct=u.pct_file_share),
        UsageRow("edit_count", "Number of Edits", "count_pct", count=u.edit_count, pct=u.pct_edit),
        UsageRow("reaction_instance_count", "Number of Emoji Reactions", "count", count=u.reaction_instance_count),
        UsageRow("pct_messages_with_reaction", "% of Messages With at Least One Emoji Reaction", "pct",
                 count=u.messages_with_reaction_count, pct=u.pct_messages_with_reaction),
        UsageRow("contribution_share_stddev", "Standard Deviation of % Contribution to Total Messages", "real",
                 real=u.contribution_share_stddev),
        UsageRow("channel_mention_count", "Number of @Channel Mentions", "count_pct",
                 count=u.channel_mention_count, pct=u.pct_channel_mention),
        UsageRow("user_mention_count", "Number of @User Mentions", "count_pct",
                 count=u.user_mention_count, pct=u.pct_user_mention),
    ]


def build_team_report(
    corpus: Corpus,
    lexicon: Lexicon,
    n_emoji: int = 10,
    *,
    gap_mode: str = "pooled",
    duration_cap: Fraction | float | None = None,
    custom_emoji: Iterable[str] | None = None,
    generated_at: str | None = None,
) -> TeamReport:
    if generated_at is None:
        generated_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return TeamReport(
        team_id=corpus.team_id,
        usage=compute_usage_metrics(corpus, gap_mode=gap_mode, duration_cap=duration_cap),
        keywords=tabulate_keywords(corpus, lexicon),
        emoji=rank_emoji_reactions(corpus, n_emoji, custom_emoji),
        generated_at=generated_at,
        tool_version=__version__,
        lexicon_hash=lexicon.digest(),
        n_emoji=n_emoji,
    )


# -- comparison ---------------------------------------------------------------


@dataclass(frozen=True)
class Delta:
    """Signed difference ``high - low`` for one numeric field.

    ``unit`` is ``count``, ``pct_points``, ``seconds`` or ``real``.
    """

    metric: str
    unit: str
    high: Any
    low: Any
    delta: Any
    ratio: Any


def _delta(metric: str, unit: str, high: Any, low: Any) -> Delta:
    if high is None or low is None:
        return Delta(metric, unit, high, low, None, None)
    if unit == "real":
        return Delta(metric, unit, high, low, high - low, (high / low) if low else None)
    ratio = Fraction(high) / Fraction(low) if low else None
    return Delta(metric, unit, high, low, high - low, ratio)


def _pp(p: Fraction | None) -> Fraction | None:
    return None if p is None else p * 100


def _deltas(high: TeamReport, low: TeamReport) -> tuple[Delta, ...]:
    out = []
    for h, lo in zip(usage_rows(high.usage), usage_rows(low.usage)):
        if h.kind in ("count", "count_pct"):
            out.append(_delta(h.key, "count", h.count, lo.count))
        if h.kind in ("count_pct", "pct"):
            out.append(_delta(f"{h.key}:pct", "pct_points", _pp(h.pct), _pp(lo.pct)))
        if h.kind == "duration":
            out.append(_delta(h.key, "seconds", h.seconds, lo.seconds))
        if h.kind == "real":
            out.append(_delta(h.key, "real", h.real, lo.real))
    for h, lo in zip(high.keywords.rows, low.keywords.rows):
        key = f"keywords:{h.category}/{h.sub_category}"
        out.append(_delta(key, "count", h.message_count, lo.message_count))
        out.append(_delta(f"{key}:pct", "pct_points", _pp(high.keywords.pct(h)), _pp(low.keywords.pct(lo))))
    return tuple(out)


@dataclass(frozen=True)
class ComparisonReport:
    high: TeamReport
    low: TeamReport
    deltas: tuple[Delta, ...]
    rationale: dict[str, tuple[float, float]] | None = field(default=None)

    def delta(self, metric: str) -> Delta:
        for d in self.deltas:
            if d.metric == metric:
                return d
        raise KeyError(metric)


def compare_teams(
    a: TeamReport, b: TeamReport, rationale: dict[str, tuple[float, float]] | None = None
) -> ComparisonReport:
    """Compare ``a`` (high role) against ``b`` (low role); roles come from the caller."""
    if a.lexicon_hash != b.lexicon_hash:
        raise ReportError(f"reports use different lexicons ({a.lexicon_hash} vs {b.lexicon_hash})")
    if a.n_emoji != b.n_emoji:
        raise ReportError(f"reports use different emoji list lengths ({a.n_emoji} vs {b.n_emoji})")
    return ComparisonReport(a, b, _deltas(a, b), rationale)


# -- JSON ---------------------------------------------------------------------


def _usage_to_dict(u: UsageMetrics) -> dict:
    return {
        "total_messages": u.total_messages,
        "reply_count": u.reply_count,
        "replied_root_count": u.replied_root_count,
        "pct_messages_with_reply": exact(u.pct_messages_with_reply),
        "avg_time_to_first_reply": exact(u.avg_time_to_first_reply),
        "avg_gap_between_channel_messages": exact(u.avg_gap_between_channel_messages),
        "file_share_count": u.file_share_count,
        "pct_file_share": exact(u.pct_file_share),
        "edit_count": u.edit_count,
        "pct_edit": exact(u.pct_edit),
        "reaction_instance_count": u.reaction_instance_count,
        "messages_with_reaction_count": u.messages_with_reaction_count,
        "pct_messages_with_reaction": exact(u.pct_messages_with_reaction),
        "contribution_share_variance": exact(u.contribution_share_variance),
        "contribution_share_stddev": u.contribution_share_stddev,
        "channel_mention_count": u.channel_mention_count,
        "pct_channel_mention": exact(u.pct_channel_mention),
        "user_mention_count": u.user_mention_count,
        "pct_user_mention": exact(u.pct_user_mention),
        "gap_mode": u.gap_mode,
        "duration_cap": exact(u.duration_cap),
        "rendered": {r.key: r.rendered() for r in usage_rows(u)},
    }


def _usage_from_dict(d: dict) -> UsageMetrics:
    return UsageMetrics(
        total_messages=d["total_messages"],
        reply_count=d["reply_count"],
        replied_root_count=d["replied_root_count"],
        avg_time_to_first_reply=from_exact(d["avg_time_to_first_reply"]),
        avg_gap_between_channel_messages=from_exact(d["avg_gap_between_channel_messages"]),
        file_share_count=d["file_share_count"],
        edit_count=d["edit_count"],
        reaction_instance_count=d["reaction_instance_count"],
        messages_with_reaction_count=d["messages_with_reaction_count"],
        contribution_share_variance=from_exact(d["contribution_share_variance"]),
        channel_mention_count=d["channel_mention_count"],
        user_mention_count=d["user_mention_count"],
        gap_mode=d["gap_mode"],
        duration_cap=from_exact(d["duration_cap"]),
    )


def team_report_to_dict(r: TeamReport) -> dict:
    return {
        "format": TEAM_FORMAT,
        "team_id": r.team_id,
        "generated_at": r.generated_at,
        "tool_version": r.tool_version,
        "lexicon_hash": r.lexicon_hash,
        "n_emoji": r.n_emoji,
        "usage": _usage_to_dict(r.usage),
        "keywords": {
            "total_messages": r.keywords.total_messages,
            "rows": [
                {
                    "category": row.category,
                    "sub_category": row.sub_category,
                    "message_count": row.message_count,
                    "pct": exact(r.keywords.pct(row)),
                    "rendered": format_pct(r.keywords.pct(row)),
                }
                for row in r.keywords.rows
            ],
        },
        "emoji": {
            "total_reaction_instances": r.emoji.total_reaction_instances,
            "entries": [
                {
                    "rank": i,
                    "name": e.name,
                    "instance_count": e.instance_count,
                    "pct": exact(e.pct),
                    "rendered": format_pct(e.pct),
                    "is_custom": e.is_custom,
                }
                for i, e in enumerate(r.emoji.entries, 1)
            ],
        },
    }


def team_report_from_dict(d: dict) -> TeamReport:
    if d.get("format") != TEAM_FORMAT:
        raise ReportError(f"not a team report document (format={d.get('format')!r})")
    kw = d["keywords"]
    em = d["emoji"]
    return TeamReport(
        team_id=d["team_id"],
        usage=_usage_from_dict(d["usage"]),
        keywords=KeywordTabulation(
            tuple(KeywordRow(x["category"], x["sub_category"], x["message_count"]) for x in kw["rows"]),
            kw["total_messages"],
        ),
        emoji=EmojiRanking(
            tuple(EmojiEntry(x["name"], x["instance_count"], from_exact(x["pct"]), x["is_custom"]) for x in em["entries"]),
            em["total_reaction_instances"],
        ),
        generated_at=d["generated_at"],
        tool_version=d["tool_version"],
        lexicon_hash=d["lexicon_hash"],
        n_emoji=d["n_emoji"],
    )


def _json_value(unit: str, v: Any) -> Any:
    if v is None or unit == "count" and isinstance(v, int) or unit == "real":
        return v
    return exact(v)


def comparison_to_dict(c: ComparisonReport) -> dict:
    return {
        "format": COMPARISON_FORMAT,
        "high_team": c.high.team_id,
        "low_team": c.low.team_id,
        "selection": None
        if c.rationale is None
        else {t: {"mean": m, "stddev": s} for t, (m, s) in sorted(c.rationale.items())},
        "deltas": [
            {
                "metric": d.metric,
                "unit": d.unit,
                "high": _json_value(d.unit, d.high),
                "low": _json_value(d.unit, d.low),
                "delta": _json_value(d.unit, d.delta),
                "ratio": d.ratio if d.unit == "real" else exact(d.ratio),
            }
            for d in c.deltas
        ],
        "high": team_report_to_dict(c.high),
        "low": team_report_to_dict(c.low),
    }


def comparison_from_dict(d: dict) -> ComparisonReport:
    if d.get("format") != COMPARISON_FORMAT:
        raise ReportError(f"not a comparison document (format={d.get('format')!r})")
    sel = d.get("selection")
    rationale = None if sel is None else {t: (v["mean"], v["stddev"]) for t, v in sel.items()}
    return compare_teams(team_report_from_dict(d["high"]), team_report_from_dict(d["low"]), rationale)


def parse_report(text: str) -> TeamReport | ComparisonReport:
    d = json.loads(text)
    if d.get("format") == COMPARISON_FORMAT:
        return comparison_from_dict(d)
    return team_report_from_dict(d)


# -- text renderers -----------------------------------------------------------


def _md_table(header: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return lines


def _emoji_label(e: EmojiEntry) -> str:
    return f":{e.name}:{' †' if e.is_custom else ''} ({e.instance_count}, {format_pct(e.pct)})"


def _team_markdown(r: TeamReport) -> str:
    out = [
        f"# Team report: {r.team_id}",
        "",
        f"tool {r.tool_version} · lexicon {r.lexicon_hash} · generated {r.generated_at}",
        "",
        "## Usage",
        "",
    ]
    out += _md_table(["Behaviour", "Value"], [[row.label, row.rendered()] for row in usage_rows(r.usage)])
    out += ["", "## Keywords", ""]
    out += _md_table(
        ["Category", "Sub-category", "Messages"],
        [[row.category, row.sub_category, f"{row.message_count} ({format_pct(r.keywords.pct(row))})"] for row in r.keywords.rows],
    )
    out += ["", f"## Top {r.n_emoji} emoji reactions", ""]
    out += _md_table(["Rank", "Emoji"], [[str(i), _emoji_label(e)] for i, e in enumerate(r.emoji.entries, 1)])
    out += ["", f"† custom emoji; percentages of {r.emoji.total_reaction_instances} reaction instances", ""]
    return "\n".join(out)


def _comparison_markdown(c: ComparisonReport) -> str:
    h, lo = c.high, c.low
    out = [
        f"# Comparison: {h.team_id} (high) vs {lo.team_id} (low)",
        "",
        f"High team: **{h.team_id}** · Low team: **{lo.team_id}**",
        "",
    ]
    if c.rationale:
        out += ["## Survey selection", ""]
        out += _md_table(
            ["Team", "Mean across periods", "Std. dev. across periods", "Role"],
            [
                [t, f"{m:.3f}", f"{s:.3f}", "high" if t == h.team_id else "low" if t == lo.team_id else ""]
                for t, (m, s) in sorted(c.rationale.items())
            ],
        )
        out.append("")
    out += ["## Usage", ""]
    out += _md_table(
        ["Behaviour", "High Value", "Low Value"],
        [[a.label, a.rendered(), b.rendered()] for a, b in zip(usage_rows(h.usage), usage_rows(lo.usage))],
    )
    out += ["", "## Keywords", ""]
    out += _md_table(
        ["Category", "Sub-category", "High Team", "Low Team"],
        [
            [a.category, a.sub_category,
             f"{a.message_count} ({format_pct(h.keywords.pct(a))})",
             f"{b.message_count} ({format_pct(lo.keywords.pct(b))})"]
            for a, b in zip(h.keywords.rows, lo.keywords.rows)
        ],
    )
    out += ["", f"## Top {h.n_emoji} emoji reactions", ""]
    n = max(len(h.emoji.entries), len(lo.emoji.entries))
    out += _md_table(
        ["Rank", "High Team", "Low Team"],
        [
            [str(i + 1),
             _emoji_label(h.emoji.entries[i]) if i < len(h.emoji.entries) else "",
             _emoji_label(lo.emoji.entries[i]) if i < len(lo.emoji.entries) else ""]
            for i in range(n)
        ],
    )
    out += ["", "† custom emoji", ""]
    return "\n".join(out)


def _csv_text(rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _fraction_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return exact(v)["value"]
    return str(v)


def _team_csv(r: TeamReport) -> str:
    rows: list[list[Any]] = [["section", "key", "label", "count", "total", "exact", "rendered"]]
    total = r.usage.total_messages
    for row in usage_rows(r.usage):
        value = {"pct": row.pct, "count_pct": row.pct, "duration": row.seconds, "real": row.real}.get(row.kind)
        rows.append(["usage", row.key, row.label, "" if row.count is None else row.count,
                     total if row.kind in ("pct", "count_pct") else "", _fraction_cell(value), row.rendered()])
    for kr in r.keywords.rows:
        rows.append(["keywords", f"{kr.category}/{kr.sub_category}", kr.sub_category, kr.message_count,
                     r.keywords.total_messages, _fraction_cell(r.keywords.pct(kr)), format_pct(r.keywords.pct(kr))])
    for i, e in enumerate(r.emoji.entries, 1):
        rows.append(["emoji", str(i), e.name + (" (custom)" if e.is_custom else ""), e.instance_count,
                     r.emoji.total_reaction_instances, _fraction_cell(e.pct), format_pct(e.pct)])
    return _csv_text(rows)


def _comparison_csv(c: ComparisonReport) -> str:
    rows: list[list[Any]] = [["metric", "unit", "high", "low", "delta", "ratio"]]
    for d in c.deltas:
        rows.append([d.metric, d.unit] + [_fraction_cell(v) for v in (d.high, d.low, d.delta, d.ratio)])
    return _csv_text(rows)


def render(report: TeamReport | ComparisonReport, fmt: str) -> str:
    """Render a team or comparison report as ``markdown``, ``csv`` or ``json``."""
    fmt = {"md": "markdown", "markdown-table": "markdown"}.get(fmt, fmt)
    if fmt not in FORMATS:
        raise ReportError(f"unknown format {fmt!r} (expected one of {', '.join(FORMATS)})")
    is_team = isinstance(report, TeamReport)
    if fmt == "json":
        doc = team_report_to_dict(report) if is_team else comparison_to_dict(report)
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt == "markdown":
        return _team_markdown(report) if is_team else _comparison_markdown(report)
    return _team_csv(report) if is_team else _comparison_csv(report)
