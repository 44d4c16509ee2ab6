from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURE_EXPORTS
from helpers import make_export, msg
from pschat.errors import MetricsError
from pschat.ingest import Corpus, Message, Reaction, User, parse_export
from pschat.metrics import compute_usage_metrics, is_standard, rank_emoji_reactions, standard_emoji


def _thread_fixture(tmp_path):
    """20 messages: 5 roots each answered once after 60 s, 10 plain messages."""
    recs, t = [], 1000
    for i in range(5):
        recs.append(msg(f"{t}.0", user="U1", text="q?", thread_ts=f"{t}.0"))
        recs.append(msg(f"{t + 60}.0", user="U2", text="a", thread_ts=f"{t}.0"))
        recs.append(msg(f"{t + 100}.0", user="U3", text="plain"))
        recs.append(msg(f"{t + 200}.0", user="U1", text="plain"))
        t += 1000
    return parse_export(make_export(tmp_path / "t", {"g": recs}))


def test_thread_metrics(tmp_path):
    corpus = _thread_fixture(tmp_path)
    # brute force straight from the records
    msgs = list(corpus.iter_messages())
    replies = [m for m in msgs if m.thread_parent and m.thread_parent != m.ts]
    roots = {m.ts for m in msgs if m.thread_parent == m.ts}
    assert (len(msgs), len(replies), len(roots)) == (20, 5, 5)

    u = compute_usage_metrics(corpus)
    assert u.total_messages == 20
    assert u.reply_count == 5
    assert u.pct_messages_with_reply == Fraction(1, 4)
    assert u.avg_time_to_first_reply == 60


def test_first_reply_only(tmp_path):
    recs = [msg("100.0", thread_ts="100.0"), msg("130.0", thread_ts="100.0"), msg("500.0", thread_ts="100.0")]
    u = compute_usage_metrics(parse_export(make_export(tmp_path / "t", {"g": recs})))
    assert u.reply_count == 2 and u.replied_root_count == 1
    assert u.avg_time_to_first_reply == 30


def test_orphan_reply_counted_but_no_latency(tmp_path):
    recs = [msg("100.0"), msg("130.0", thread_ts="50.0")]
    u = compute_usage_metrics(parse_export(make_export(tmp_path / "t", {"g": recs})))
    assert u.reply_count == 1
    assert u.replied_root_count == 0
    assert u.avg_time_to_first_reply is None


def test_single_author_stddev_zero(tmp_path):
    recs = [msg(f"{i + 1}.0", user="U1") for i in range(5)]
    u = compute_usage_metrics(parse_export(make_export(tmp_path / "t", {"g": recs})))
    assert u.contribution_share_stddev == 0


def test_two_author_stddev(tmp_path):
    recs = [msg(f"{i + 1}.0", user="U1" if i < 6 else "U2") for i in range(10)]
    u = compute_usage_metrics(parse_export(make_export(tmp_path / "t", {"g": recs})))
    # shares 0.6 and 0.4 around mean 0.5: population variance 0.01
    assert u.contribution_share_variance == Fraction(1, 100)
    assert u.contribution_share_stddev == pytest.approx(0.1, abs=1e-15)


def test_counts(tmp_path):
    recs = [
        msg("1.0", text="<!channel> look <https://x.example>", files=[{}]),
        msg("2.0", text="<@U2> and <@U3> <!here>", edited={"ts": "3.0"}),
        msg("3.0", text="plain", reactions=[{"name": "heart", "users": ["U1", "U2"], "count": 2}]),
        msg("4.0", text="joined <!channel>", subtype="channel_join"),
    ]
    u = compute_usage_metrics(parse_export(make_export(tmp_path / "t", {"g": recs})))
    assert u.total_messages == 3
    assert (u.file_share_count, u.edit_count) == (1, 1)
    assert (u.channel_mention_count, u.user_mention_count) == (2, 1)
    assert (u.reaction_instance_count, u.messages_with_reaction_count) == (2, 1)
    assert u.pct_channel_mention == Fraction(2, 3)
    assert u.avg_gap_between_channel_messages == 1


def test_empty_corpus_is_undefined(tmp_path):
    u = compute_usage_metrics(parse_export(make_export(tmp_path / "t", {"g": []})))
    assert u.total_messages == 0
    assert u.pct_file_share is None and u.pct_messages_with_reply is None
    assert u.avg_time_to_first_reply is None and u.avg_gap_between_channel_messages is None
    assert u.contribution_share_stddev is None


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10**9), st.integers(2, 30), st.integers(0, 10**6))
def test_equal_spacing_gap(delta_us, n, start):
    msgs = tuple(Message("C0", f"{(start * 10**6 + i * delta_us) // 10**6}.{(start * 10**6 + i * delta_us) % 10**6:06d}", "U1", "x") for i in range(n))
    corpus = Corpus("t", {"U1": User("u")}, {"C0": "g"}, {"C0": msgs})
    for mode in ("pooled", "per-channel"):
        assert compute_usage_metrics(corpus, gap_mode=mode).avg_gap_between_channel_messages == Fraction(delta_us, 10**6)


def test_gap_modes_differ(tmp_path):
    channels = {
        "busy": [msg(f"{i * 10}.0") for i in range(1, 6)],  # 4 gaps of 10
        "quiet": [msg("0.5"), msg("100.5")],  # 1 gap of 100
    }
    corpus = parse_export(make_export(tmp_path / "t", channels))
    assert compute_usage_metrics(corpus).avg_gap_between_channel_messages == Fraction(140, 5)
    assert compute_usage_metrics(corpus, gap_mode="per-channel").avg_gap_between_channel_messages == 55


def test_duration_cap(tmp_path):
    recs = [msg("0.0", thread_ts="0.0"), msg("1000.0", thread_ts="0.0"), msg("1010.0")]
    corpus = parse_export(make_export(tmp_path / "t", {"g": recs}))
    u = compute_usage_metrics(corpus, duration_cap=100)
    assert u.avg_time_to_first_reply == 100
    assert u.avg_gap_between_channel_messages == Fraction(110, 2)


def test_bad_options():
    corpus = Corpus("t")
    with pytest.raises(MetricsError):
        compute_usage_metrics(corpus, gap_mode="median")
    with pytest.raises(MetricsError):
        rank_emoji_reactions(corpus, 0)


@pytest.mark.parametrize("path", FIXTURE_EXPORTS, ids=lambda p: p.name)
def test_channel_order_invariance(path):
    corpus = parse_export(path)
    flipped = replace(corpus, channels=dict(reversed(list(corpus.channels.items()))),
                      messages=dict(reversed(list(corpus.messages.items()))))
    assert compute_usage_metrics(flipped) == compute_usage_metrics(corpus)
    assert rank_emoji_reactions(flipped, None) == rank_emoji_reactions(corpus, None)


@pytest.mark.parametrize("path", FIXTURE_EXPORTS, ids=lambda p: p.name)
def test_ranking_sums_to_reaction_total(path):
    corpus = parse_export(path)
    ranking = rank_emoji_reactions(corpus, None)
    assert sum(e.instance_count for e in ranking.entries) == compute_usage_metrics(corpus).reaction_instance_count
    assert sum(e.pct for e in ranking.entries) == 1


@pytest.mark.parametrize("path", FIXTURE_EXPORTS, ids=lambda p: p.name)
def test_fixture_invariants(path):
    u = compute_usage_metrics(parse_export(path))
    assert 0 <= u.contribution_share_stddev <= 0.5
    for p in (u.pct_messages_with_reply, u.pct_file_share, u.pct_edit, u.pct_messages_with_reaction,
              u.pct_channel_mention, u.pct_user_mention):
        assert 0 <= p <= 1
    assert u.avg_time_to_first_reply >= 0 and u.avg_gap_between_channel_messages >= 0


# -- emoji ---------------------------------------------------------------------


def _emoji_corpus():
    def m(ts, *reactions):
        return Message("C0", ts, "U1", "x", reactions=tuple(reactions))

    msgs = (
        m("1.000000", Reaction("heart", ("U1", "U2"), 2), Reaction("thumbsup", ("U1",), 1)),
        m("2.000000", Reaction("heart", ("U3",), 1), Reaction("blob_dance", ("U2",), 1)),
        m("3.000000", Reaction("thumbsup", ("U3",), 1)),
    )
    return Corpus("t", {"U1": User("a")}, {"C0": "g"}, {"C0": msgs})


def test_emoji_ranking():
    r = rank_emoji_reactions(_emoji_corpus(), 10, custom_set={"blob_dance"})
    got = [(e.name, e.instance_count, e.pct, e.is_custom) for e in r.entries]
    assert got == [
        ("heart", 3, Fraction(1, 2), False),
        ("thumbsup", 2, Fraction(1, 3), False),
        ("blob_dance", 1, Fraction(1, 6), True),
    ]
    assert r.total_reaction_instances == 6
    assert [round(float(e.pct) * 100, 1) for e in r.entries] == [50.0, 33.3, 16.7]


def test_emoji_top1():
    r = rank_emoji_reactions(_emoji_corpus(), 1, custom_set={"blob_dance"})
    assert [(e.name, e.instance_count) for e in r.entries] == [("heart", 3)]
    assert r.total_reaction_instances == 6


def test_emoji_ties_by_name():
    msgs = (Message("C0", "1.000000", "U1", "x", reactions=(Reaction("zzz", ("U1",), 1), Reaction("aaa", ("U1",), 1))),)
    r = rank_emoji_reactions(Corpus("t", {}, {"C0": "g"}, {"C0": msgs}), 5)
    assert [e.name for e in r.entries] == ["aaa", "zzz"]


def test_standard_list():
    assert len(standard_emoji()) > 1000
    assert is_standard("heart") and is_standard("+1") and is_standard("+1::skin-tone-3")
    assert not is_standard("blob_dance")
    r = rank_emoji_reactions(_emoji_corpus(), 10)
    assert {e.name: e.is_custom for e in r.entries} == {"heart": False, "thumbsup": False, "blob_dance": True}


def test_emoji_empty():
    r = rank_emoji_reactions(Corpus("t"), 10)
    assert r.entries == () and r.total_reaction_instances == 0

