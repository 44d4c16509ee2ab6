"""Psychological-safety keyword lexicon: representation, config loading, matching.

Pattern kinds:

``word``
    whole-word literal, anchored at both ends (``ya`` does not fire in "yard").
``prefix``
    stem anchored at its start, any suffix allowed (``agree`` fires in
    "agreed" but not in "disagree").
``phrase``
    whitespace-separated words, anchored at both ends; any run of whitespace
    matches between words.
``raw``
    a verbatim regular expression.

Matching always runs on :func:`pschat.ingest.normalize_for_matching` output,
so mentions and links never produce keyword hits.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from pschat.errors import LexiconError
from pschat.ingest import Corpus, Message, normalize_for_matching

CATEGORIES = ("Voice", "Supportive", "Unsupportive", "Learning", "Familiarity")
PATTERN_KINDS = ("word", "prefix", "phrase", "raw")

EMOJI_SHORTCODE = r":[a-z0-9_+'-]+:"

_META = set(".^$*+?{}[]\\|()")


@dataclass(frozen=True)
class PatternSpec:
    kind: str
    body: str

    def __post_init__(self) -> None:
        if self.kind not in PATTERN_KINDS:
            raise LexiconError(f"unknown pattern kind {self.kind!r} (expected one of {', '.join(PATTERN_KINDS)})")
        if not self.body or not self.body.strip():
            raise LexiconError(f"empty {self.kind} pattern")
        if self.kind != "raw":
            bad = sorted(set(self.body) & _META)
            if bad:
                raise LexiconError(
                    f"{self.kind} pattern {self.body!r} contains regex metacharacters {''.join(bad)!r}; "
                    "use kind 'prefix' for stems or 'raw' for expressions"
                )
            if self.kind != "phrase" and any(c.isspace() for c in self.body):
                raise LexiconError(f"{self.kind} pattern {self.body!r} contains whitespace; use kind 'phrase'")

    def regex(self) -> str:
        if self.kind == "raw":
            return self.body
        if self.kind == "word":
            return rf"(?<!\w){re.escape(self.body.lower())}(?!\w)"
        if self.kind == "prefix":
            return rf"(?<!\w){re.escape(self.body.lower())}\w*"
        words = self.body.lower().split()
        return r"(?<!\w)" + r"\s+".join(re.escape(w) for w in words) + r"(?!\w)"

    def to_config(self) -> dict[str, str]:
        return {self.kind: self.body}


@dataclass(frozen=True)
class LexiconEntry:
    category: str
    sub_category: str
    patterns: tuple[PatternSpec, ...]
    compiled: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise LexiconError(f"unknown category {self.category!r} (expected one of {', '.join(CATEGORIES)})")
        if not self.patterns:
            raise LexiconError(f"{self.category}/{self.sub_category}: pattern list is empty")
        for p in self.patterns:
            try:
                re.compile(p.regex())
            except re.error as exc:
                raise LexiconError(f"{self.category}/{self.sub_category}: pattern {p.body!r} does not compile: {exc}") from exc
        combined = "|".join(f"(?:{p.regex()})" for p in self.patterns)
        object.__setattr__(self, "compiled", re.compile(combined, re.IGNORECASE))

    @property
    def key(self) -> tuple[str, str]:
        return (self.category, self.sub_category)


@dataclass(frozen=True)
class Lexicon:
    entries: tuple[LexiconEntry, ...]

    def __post_init__(self) -> None:
        seen: dict[str, str] = {}
        for e in self.entries:
            if e.sub_category in seen:
                raise LexiconError(
                    f"sub-category {e.sub_category!r} appears under both {seen[e.sub_category]} and {e.category}"
                )
            seen[e.sub_category] = e.category

    @property
    def categories(self) -> list[str]:
        return list(dict.fromkeys(e.category for e in self.entries))

    @property
    def sub_categories(self) -> list[str]:
        return [e.sub_category for e in self.entries]

    def entry(self, sub_category: str) -> LexiconEntry:
        for e in self.entries:
            if e.sub_category == sub_category:
                return e
        raise LexiconError(
            f"unknown sub-category {sub_category!r}; valid names: {', '.join(self.sub_categories)}"
        )

    def to_config(self) -> dict[str, dict[str, list[dict[str, str]]]]:
        out: dict[str, dict[str, list[dict[str, str]]]] = {}
        for e in self.entries:
            out.setdefault(e.category, {})[e.sub_category] = [p.to_config() for p in e.patterns]
        return out

    def digest(self) -> str:
        """Short content hash identifying this lexicon revision in reports."""
        blob = json.dumps(self.to_config(), sort_keys=False, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _words(kind: str, *bodies: str) -> list[PatternSpec]:
    return [PatternSpec(kind, b) for b in bodies]


def default_lexicon() -> Lexicon:
    """The eleven-sub-category lexicon over five behaviour categories."""
    W, P, PH = "word", "prefix", "phrase"
    rows = [
        ("Voice", "Mistakes", _words(W, "sorry", "mistake") + _words(P, "apolog")),
        ("Voice", "Critiques", _words(W, "incorrect", "disagree", "wrong", "impossible", "unlikely") + _words(PH, "don't think")),
        ("Voice", "Asking for Help", _words(PH, "don't know") + _words(W, "unsure", "help")),
        ("Voice", "Questions", _words(W, "who", "what", "where", "why", "how") + [PatternSpec("raw", r"\?")]),
        ("Supportive", "Agreement", _words(W, "yes", "yeah", "ya", "yea") + _words(P, "agree")),
        ("Supportive", "Appreciative", _words(P, "congrat") + _words(W, "amazing", "amaze", "wonderful", "wow") + _words(P, "thank")),
        ("Unsupportive", "Unappreciative", _words(PH, "not needed") + _words(W, "stop", "waste")),
        ("Learning", "Suggestions", _words(P, "improv") + _words(W, "better", "instead") + _words(P, "actual") + _words(PH, "what if")),
        ("Learning", "Asking for Input", _words(W, "feedback", "share", "thoughts") + _words(P, "idea")),
        ("Familiarity", "Emojis", [PatternSpec("raw", EMOJI_SHORTCODE)]),
        ("Familiarity", "Jokes", _words(P, "hah", "aha", "lol", "lmao", "jok")),
    ]
    return Lexicon(tuple(LexiconEntry(c, s, tuple(p)) for c, s, p in rows))


# -- config documents ---------------------------------------------------------


def _parse_pattern(item: Any, where: str) -> PatternSpec:
    if isinstance(item, dict) and len(item) == 1:
        ((kind, body),) = item.items()
        if not isinstance(body, str):
            raise LexiconError(f"{where}: pattern body must be a string, got {body!r}")
        try:
            return PatternSpec(str(kind), body)
        except LexiconError as exc:
            raise LexiconError(f"{where}: {exc}") from exc
    raise LexiconError(f"{where}: each pattern must be a one-key mapping like {{word: sorry}}, got {item!r}")


def lexicon_from_config(doc: Any) -> Lexicon:
    """Build a lexicon from a parsed config document.

    Schema (YAML shown, JSON is equivalent)::

        Voice:
          Mistakes:
            - word: sorry
            - prefix: apolog
        Familiarity:
          Emojis:
            - raw: ":[a-z0-9_+'-]+:"

    An optional top-level ``lexicon:`` key may wrap the mapping.
    """
    if isinstance(doc, dict) and set(doc) == {"lexicon"}:
        doc = doc["lexicon"]
    if not isinstance(doc, dict) or not doc:
        raise LexiconError("lexicon config must be a non-empty mapping of category -> sub-category -> patterns")
    entries = []
    for category, subs in doc.items():
        if category not in CATEGORIES:
            raise LexiconError(f"unknown category {category!r} (expected one of {', '.join(CATEGORIES)})")
        if not isinstance(subs, dict) or not subs:
            raise LexiconError(f"{category}: expected a non-empty mapping of sub-categories")
        for sub, patterns in subs.items():
            where = f"{category}/{sub}"
            if not isinstance(patterns, list):
                raise LexiconError(f"{where}: patterns must be a list")
            if not patterns:
                raise LexiconError(f"{where}: pattern list is empty")
            specs = tuple(_parse_pattern(p, f"{where}[{i}]") for i, p in enumerate(patterns))
            entries.append(LexiconEntry(category, str(sub), specs))
    return Lexicon(tuple(entries))


def load_lexicon(config_path: str | Path) -> Lexicon:
    """Load a YAML or JSON lexicon config file."""
    path = Path(config_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon config {path}: {exc}") from exc
    try:
        doc = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise LexiconError(f"cannot parse lexicon config {path}: {exc}") from exc
    return lexicon_from_config(doc)


def dump_lexicon(lexicon: Lexicon) -> str:
    return yaml.safe_dump(lexicon.to_config(), sort_keys=False, allow_unicode=True)


# -- matching -----------------------------------------------------------------


@dataclass(frozen=True)
class MatchResult:
    channel_id: str | None
    ts: str | None
    hits: frozenset[tuple[str, str]]
    spans: dict[tuple[str, str], tuple[tuple[int, int], ...]]
    text: str = ""

    def hit_names(self) -> set[str]:
        return {sub for _, sub in self.hits}


def match_text(lexicon: Lexicon, text: str) -> MatchResult:
    matchable = normalize_for_matching(text)
    spans = {}
    for e in lexicon.entries:
        found = tuple((m.start(), m.end()) for m in e.compiled.finditer(matchable) if m.end() > m.start())
        if found:
            spans[e.key] = found
    return MatchResult(None, None, frozenset(spans), spans, matchable)


def match_message(lexicon: Lexicon, message: Message) -> MatchResult:
    """Sub-category hits for one message; each sub-category hits at most once."""
    r = match_text(lexicon, message.text)
    return MatchResult(message.channel_id, message.ts, r.hits, r.spans, r.text)


# -- tabulation ---------------------------------------------------------------


@dataclass(frozen=True)
class KeywordRow:
    category: str
    sub_category: str
    message_count: int


@dataclass(frozen=True)
class KeywordTabulation:
    rows: tuple[KeywordRow, ...]
    total_messages: int

    def pct(self, row: KeywordRow) -> Fraction | None:
        if self.total_messages == 0:
            return None
        return Fraction(row.message_count, self.total_messages)

    def count(self, sub_category: str) -> int:
        for r in self.rows:
            if r.sub_category == sub_category:
                return r.message_count
        raise KeyError(sub_category)


def tabulate_keywords(corpus: Corpus, lexicon: Lexicon) -> KeywordTabulation:
    """Count analytic messages with at least one hit, per sub-category."""
    counts = {e.key: 0 for e in lexicon.entries}
    total = 0
    for m in corpus.iter_messages(analytic_only=True):
        total += 1
        for key in match_message(lexicon, m).hits:
            counts[key] += 1
    rows = tuple(KeywordRow(c, s, counts[(c, s)]) for c, s in (e.key for e in lexicon.entries))
    return KeywordTabulation(rows, total)


# -- concordance --------------------------------------------------------------


@dataclass(frozen=True)
class ConcordanceEntry:
    message: Message
    before: tuple[Message, ...]
    after: tuple[Message, ...]
    spans: tuple[tuple[int, int], ...]
    matchable: str


def concordance(corpus: Corpus, lexicon: Lexicon, sub_category: str, context: int = 0) -> list[ConcordanceEntry]:
    """Messages hitting ``sub_category`` with up to ``context`` channel neighbours on each side."""
    if context < 0:
        raise LexiconError("context must be non-negative")
    entry = lexicon.entry(sub_category)
    single = Lexicon((entry,))
    out = []
    for cid in corpus.channel_order():
        msgs = corpus.channel_messages(cid, analytic_only=True)
        for i, m in enumerate(msgs):
            r = match_message(single, m)
            if not r.hits:
                continue
            out.append(
                ConcordanceEntry(
                    message=m,
                    before=msgs[max(0, i - context) : i],
                    after=msgs[i + 1 : i + 1 + context],
                    spans=r.spans[entry.key],
                    matchable=r.text,
                )
            )
    return out


def highlight(text: str, spans: Iterable[tuple[int, int]]) -> str:
    out, pos = [], 0
    for start, end in sorted(spans):
        out.append(text[pos:start])
        out.append(f"«{text[start:end]}»")
        pos = end
    out.append(text[pos:])
    return "".join(out)


def _brief(m: Message) -> dict:
    return {"channel_id": m.channel_id, "ts": m.ts, "author": m.author, "text": m.text}


def concordance_jsonl(corpus: Corpus, entries: list[ConcordanceEntry], sub_category: str) -> str:
    lines = []
    for e in entries:
        rec = {
            "sub_category": sub_category,
            "channel": corpus.channels.get(e.message.channel_id, e.message.channel_id),
            **_brief(e.message),
            "matchable": e.matchable,
            "spans": [list(s) for s in e.spans],
            "before": [_brief(m) for m in e.before],
            "after": [_brief(m) for m in e.after],
        }
        lines.append(json.dumps(rec, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def concordance_text(corpus: Corpus, entries: list[ConcordanceEntry], sub_category: str) -> str:
    lines = [f"# {sub_category}: {len(entries)} messages"]
    for e in entries:
        m = e.message
        lines.append("")
        lines.append(f"#{corpus.channels.get(m.channel_id, m.channel_id)} {m.ts}")
        for c in e.before:
            lines.append(f"    {c.author or '?'}: {c.text}")
        lines.append(f">>> {m.author or '?'}: {highlight(e.matchable, e.spans)}")
        for c in e.after:
            lines.append(f"    {c.author or '?'}: {c.text}")
    return "\n".join(lines) + "\n"
