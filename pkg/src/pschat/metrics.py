"""Platform-usage metrics and emoji-reaction rankings for one corpus."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable

from pschat.errors import MetricsError
from pschat.fmt import pct_of
from pschat.ingest import BROADCAST_RE, USER_MENTION_RE, Corpus

GAP_MODES = ("pooled", "per-channel")

_MICRO = 1_000_000


@dataclass(frozen=True)
class UsageMetrics:
    """Counts are integers; every ``pct_*`` is ``count / total_messages`` as an exact fraction.

    Undefined values (empty denominators) are ``None``. Durations are exact
    seconds.
    """

    total_messages: int
    reply_count: int
    replied_root_count: int
    avg_time_to_first_reply: Fraction | None
    avg_gap_between_channel_messages: Fraction | None
    file_share_count: int
    edit_count: int
    reaction_instance_count: int
    messages_with_reaction_count: int
    contribution_share_variance: Fraction | None
    channel_mention_count: int
    user_mention_count: int
    gap_mode: str = "pooled"
    duration_cap: Fraction | None = None

    def _pct(self, count: int) -> Fraction | None:
        return pct_of(count, self.total_messages)

    @property
    def pct_messages_with_reply(self) -> Fraction | None:
        return self._pct(self.replied_root_count)

    @property
    def pct_file_share(self) -> Fraction | None:
        return self._pct(self.file_share_count)

    @property
    def pct_edit(self) -> Fraction | None:
        return self._pct(self.edit_count)

    @property
    def pct_messages_with_reaction(self) -> Fraction | None:
        return self._pct(self.messages_with_reaction_count)

    @property
    def pct_channel_mention(self) -> Fraction | None:
        return self._pct(self.channel_mention_count)

    @property
    def pct_user_mention(self) -> Fraction | None:
        return self._pct(self.user_mention_count)

    @property
    def contribution_share_stddev(self) -> float | None:
        if self.contribution_share_variance is None:
            return None
        return math.sqrt(self.contribution_share_variance)


def _cap(d: Fraction, cap: Fraction | None) -> Fraction:
    return d if cap is None or d <= cap else cap


def _mean(values: list[Fraction]) -> Fraction | None:
    return sum(values, Fraction(0)) / len(values) if values else None


def compute_usage_metrics(
    corpus: Corpus,
    *,
    gap_mode: str = "pooled",
    duration_cap: Fraction | float | None = None,
) -> UsageMetrics:
    """Compute the usage metrics over the corpus's analytic (non-system) messages.

    Args:
        corpus: parsed and, where needed, redacted corpus.
        gap_mode: ``"pooled"`` averages every consecutive-message gap across
            all channels; ``"per-channel"`` averages the per-channel means.
        duration_cap: optional ceiling in seconds applied to each reply
            latency and each gap before averaging.
    """
    if gap_mode not in GAP_MODES:
        raise MetricsError(f"unknown gap mode {gap_mode!r} (expected one of {', '.join(GAP_MODES)})")
    cap = None if duration_cap is None else Fraction(duration_cap)
    if cap is not None and cap < 0:
        raise MetricsError("duration cap must be non-negative")

    total = replies = files = edits = reactions = reacted = ch_mentions = u_mentions = 0
    roots_replied = 0
    latencies: list[Fraction] = []
    pooled_gaps: list[Fraction] = []
    channel_means: list[Fraction] = []
    authored: Counter[str] = Counter()
    non_consenting = corpus.non_consenting()

    for cid in corpus.channel_order():
        msgs = corpus.channel_messages(cid, analytic_only=True)
        roots = {m.ts: m.micros for m in msgs if m.is_thread_root}
        first_reply: dict[str, int] = {}
        gaps = []
        prev = None
        for m in msgs:
            us = m.micros
            total += 1
            if prev is not None:
                gaps.append(_cap(Fraction(us - prev, _MICRO), cap))
            prev = us
            if m.is_reply:
                replies += 1
                if m.thread_parent in roots and us > roots[m.thread_parent]:
                    first_reply.setdefault(m.thread_parent, us)
            if m.file_count + m.url_count >= 1:
                files += 1
            if m.edited:
                edits += 1
            n_react = sum(r.count for r in m.reactions)
            reactions += n_react
            if n_react:
                reacted += 1
            if BROADCAST_RE.search(m.text):
                ch_mentions += 1
            if USER_MENTION_RE.search(m.text):
                u_mentions += 1
            if m.author is not None and m.author not in non_consenting:
                authored[m.author] += 1
        roots_replied += len(first_reply)
        latencies.extend(_cap(Fraction(t - roots[root], _MICRO), cap) for root, t in first_reply.items())
        pooled_gaps.extend(gaps)
        if gaps:
            channel_means.append(_mean(gaps))

    avg_gap = _mean(pooled_gaps) if gap_mode == "pooled" else _mean(channel_means)

    variance = None
    n_authors = len(authored)
    if n_authors:
        counted = sum(authored.values())
        shares = [Fraction(c, counted) for c in authored.values()]
        mu = Fraction(1, n_authors)
        variance = sum(((s - mu) ** 2 for s in shares), Fraction(0)) / n_authors

    return UsageMetrics(
        total_messages=total,
        reply_count=replies,
        replied_root_count=roots_replied,
        avg_time_to_first_reply=_mean(latencies),
        avg_gap_between_channel_messages=avg_gap,
        file_share_count=files,
        edit_count=edits,
        reaction_instance_count=reactions,
        messages_with_reaction_count=reacted,
        contribution_share_variance=variance,
        channel_mention_count=ch_mentions,
        user_mention_count=u_mentions,
        gap_mode=gap_mode,
        duration_cap=cap,
    )


# -- emoji --------------------------------------------------------------------


@lru_cache(maxsize=1)
def standard_emoji() -> frozenset[str]:
    """Names from the bundled standard shortcode list (one per line)."""
    text = resources.files("pschat").joinpath("data/standard_emoji.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#"))


def base_name(name: str) -> str:
    """Strip a ``::skin-tone-N`` modifier."""
    return name.split("::", 1)[0]


def is_standard(name: str) -> bool:
    return base_name(name) in standard_emoji()


@dataclass(frozen=True)
class EmojiEntry:
    name: str
    instance_count: int
    pct: Fraction
    is_custom: bool


@dataclass(frozen=True)
class EmojiRanking:
    entries: tuple[EmojiEntry, ...]
    total_reaction_instances: int


def rank_emoji_reactions(
    corpus: Corpus, n: int | None = 10, custom_set: Iterable[str] | None = None
) -> EmojiRanking:
    """Top-``n`` reaction emoji by instance count (ties by name); ``n=None`` keeps all.

    An emoji is custom when it is in ``custom_set``, or, without a set, when
    it is absent from the bundled standard list.
    """
    if n is not None and n < 1:
        raise MetricsError(f"n must be a positive integer, got {n}")
    custom = None if custom_set is None else frozenset(custom_set)
    counts: Counter[str] = Counter()
    for m in corpus.iter_messages(analytic_only=True):
        for r in m.reactions:
            counts[r.name] += r.count
    total = sum(counts.values())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if n is not None:
        ranked = ranked[:n]
    entries = tuple(
        EmojiEntry(
            name=name,
            instance_count=c,
            pct=Fraction(c, total),
            is_custom=(name in custom) if custom is not None else not is_standard(name),
        )
        for name, c in ranked
    )
    return EmojiRanking(entries, total)
