import csv
import io
import json
from dataclasses import replace
from fractions import Fraction

import pytest

from conftest import FIXTURE_EXPORTS
from helpers import make_export, msg
from pschat.errors import ReportError
from pschat.fmt import format_pct
from pschat.ingest import parse_export
from pschat.lexicon import Lexicon, LexiconEntry, PatternSpec, default_lexicon, tabulate_keywords
from pschat.metrics import compute_usage_metrics, rank_emoji_reactions
from pschat.report import (
    TeamReport,
    build_team_report,
    compare_teams,
    parse_report,
    render,
    usage_rows,
)

STAMP = "2026-01-01T00:00:00+00:00"
TABLE_ORDER = [
    "Total Number of Messages",
    "Number of Replies",
    "% of Messages With at Least One Reply",
    "Average Time to Reply",
    "Average Time Between Messages in a Channel",
    "Number of File Shares",
    "Number of Edits",
    "Number of Emoji Reactions",
    "% of Messages With at Least One Emoji Reaction",
    "Standard Deviation of % Contribution to Total Messages",
    "Number of @Channel Mentions",
    "Number of @User Mentions",
]


@pytest.fixture(scope="module")
def reports():
    lex = default_lexicon()
    return [build_team_report(parse_export(p), lex, 10, generated_at=STAMP) for p in FIXTURE_EXPORTS]


def test_empty_report(tmp_path):
    rep = build_team_report(parse_export(make_export(tmp_path / "t", {"g": []})), default_lexicon(), 10)
    assert rep.usage.total_messages == 0 and rep.keywords.total_messages == 0
    md = render(rep, "markdown")
    assert "| Number of File Shares | 0 (—) |" in md
    assert "| Average Time to Reply | — |" in md


def test_report_is_composition(reports):
    corpus = parse_export(FIXTURE_EXPORTS[1])
    rep = reports[1]
    assert rep.usage == compute_usage_metrics(corpus)
    assert rep.keywords == tabulate_keywords(corpus, default_lexicon())
    assert rep.emoji == rank_emoji_reactions(corpus, 10)
    assert rep.usage.total_messages == rep.keywords.total_messages
    assert rep.lexicon_hash == default_lexicon().digest()


def test_deterministic_apart_from_timestamp():
    lex = default_lexicon()
    a = build_team_report(parse_export(FIXTURE_EXPORTS[2]), lex, 10)
    b = build_team_report(parse_export(FIXTURE_EXPORTS[2]), lex, 10)
    for fmt in ("json", "csv", "markdown"):
        assert render(replace(a, generated_at=STAMP), fmt) == render(replace(b, generated_at=STAMP), fmt)


@pytest.mark.parametrize("i", range(3))
def test_json_round_trip(reports, i):
    text = render(reports[i], "json")
    back = parse_report(text)
    assert back == reports[i]
    assert render(back, "json") == text


def test_json_carries_exact_values(reports):
    doc = json.loads(render(reports[0], "json"))
    u = reports[0].usage
    pct = doc["usage"]["pct_file_share"]
    assert Fraction(pct["num"], pct["den"]) == u.pct_file_share
    assert doc["usage"]["rendered"]["file_share_count"].startswith(f"{u.file_share_count} (")


def test_markdown_row_order(reports):
    md = render(reports[0], "markdown")
    labels = [line.split("|")[1].strip() for line in md.splitlines() if line.startswith("| ")]
    assert labels[1 : 1 + len(TABLE_ORDER)] == TABLE_ORDER
    cmp = render(compare_teams(reports[1], reports[0]), "markdown")
    labels = [line.split("|")[1].strip() for line in cmp.splitlines() if line.startswith("| ")]
    assert labels[1 : 1 + len(TABLE_ORDER)] == TABLE_ORDER


def test_csv(reports):
    rows = list(csv.DictReader(io.StringIO(render(reports[0], "csv"))))
    assert [r["label"] for r in rows[:12]] == TABLE_ORDER
    kw = [r for r in rows if r["section"] == "keywords"]
    assert len(kw) == 11
    for r in kw:
        c, t = int(r["count"]), int(r["total"])
        assert r["rendered"] == format_pct(Fraction(c, t))


def test_unknown_format(reports):
    with pytest.raises(ReportError, match="pdf"):
        render(reports[0], "pdf")


def test_compare_identity(reports):
    c = compare_teams(reports[0], reports[0])
    assert all(d.delta == 0 for d in c.deltas if d.delta is not None)


def test_compare_reply_delta(tmp_path):
    lex = default_lexicon()

    def team(name, n_replies):
        recs = [msg("1.0", thread_ts="1.0")] + [msg(f"{i + 2}.0", thread_ts="1.0") for i in range(n_replies)]
        return build_team_report(parse_export(make_export(tmp_path / name, {"g": recs})), lex, 10)

    c = compare_teams(team("a", 10), team("b", 4))
    assert c.delta("reply_count").delta == 6
    assert c.delta("total_messages").delta == 6
    assert c.delta("reply_count").ratio == Fraction(10, 4)


def test_compare_antisymmetric(reports):
    ab = compare_teams(reports[1], reports[2])
    ba = compare_teams(reports[2], reports[1])
    for x, y in zip(ab.deltas, ba.deltas):
        assert x.metric == y.metric
        if x.delta is not None:
            assert x.delta == -y.delta


def test_compare_pct_points(reports):
    c = compare_teams(reports[1], reports[0])
    d = c.delta("file_share_count:pct")
    assert d.unit == "pct_points"
    assert d.delta == (reports[1].usage.pct_file_share - reports[0].usage.pct_file_share) * 100


def test_compare_recomputable_and_round_trip(reports):
    c = compare_teams(reports[1], reports[0], {"beta": (6.1, 0.0), "alpha": (4.4, 0.0)})
    text = render(c, "json")
    back = parse_report(text)
    assert back == c
    assert render(back, "json") == text
    assert "beta (high)" in render(c, "markdown")
    assert render(c, "csv").startswith("metric,unit,high,low,delta,ratio")


def test_lexicon_mismatch(reports):
    lex = default_lexicon()
    extra = Lexicon(lex.entries + (LexiconEntry("Learning", "Vulnerability", (PatternSpec("word", "edits"),)),))
    other = build_team_report(parse_export(FIXTURE_EXPORTS[0]), extra, 10)
    with pytest.raises(ReportError, match="lexicon"):
        compare_teams(reports[0], other)
    with pytest.raises(ReportError, match="emoji"):
        compare_teams(reports[0], replace(reports[1], n_emoji=5))


def test_rows_cover_usage(reports):
    assert [r.label for r in usage_rows(reports[0].usage)] == TABLE_ORDER
    assert isinstance(reports[0], TeamReport)
