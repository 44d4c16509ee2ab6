"""Slack export ingestion, consent redaction and text normalization.

A standard workspace export looks like::

    export/
        channels.json
        users.json
        general/
            2023-01-09.json
            2023-01-10.json
        design/
            ...

and may also arrive zipped, optionally with everything nested under one
top-level folder. Only public channels listed in ``channels.json`` are read.
"""

from __future__ import annotations

import json
import logging
import re
import zipfile
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field, replace
from pathlib import Path, PurePosixPath
from typing import Any

from pschat.errors import ExportError

logger = logging.getLogger(__name__)

CORPUS_FORMAT = "pschat.corpus/1"

# Subtypes that still carry a human-authored message.
HUMAN_SUBTYPES = frozenset({"file_share", "thread_broadcast", "me_message", "bot_message", "file_comment"})

_TS_RE = re.compile(r"^(\d+)(?:\.(\d{1,6}))?$")
_LINK_RE = re.compile(r"<https?:[^>]*>")
USER_MENTION_RE = re.compile(r"<@([A-Za-z0-9]+)(?:\|[^>]*)?>")
BROADCAST_RE = re.compile(r"<!(?:channel|here)(?:\|[^>]*)?>")
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'"})

REDACTED_MENTION = "<@REDACTED>"


# -- timestamps ---------------------------------------------------------------


def ts_to_micros(ts: str) -> int:
    """Exact integer microseconds for a Slack ``"<seconds>.<fraction>"`` string."""
    m = _TS_RE.match(ts)
    if m is None:
        raise ValueError(f"malformed timestamp {ts!r}")
    frac = (m.group(2) or "").ljust(6, "0")
    return int(m.group(1)) * 1_000_000 + int(frac)


def micros_to_ts(micros: int) -> str:
    return f"{micros // 1_000_000}.{micros % 1_000_000:06d}"


def canonical_ts(ts: Any) -> str:
    """Normalise a timestamp to six fractional digits so string equality is numeric equality."""
    if not isinstance(ts, str):
        raise ValueError(f"timestamp must be a string, got {type(ts).__name__}")
    return micros_to_ts(ts_to_micros(ts))


# -- domain types -------------------------------------------------------------


@dataclass(frozen=True)
class Reaction:
    name: str
    user_ids: tuple[str, ...] = ()
    count: int = 0

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("reaction name must be non-empty")
        if self.count < 0:
            raise ValueError("reaction count must be non-negative")
        if self.user_ids and self.count != len(self.user_ids):
            raise ValueError(f"reaction {self.name!r}: count {self.count} != {len(self.user_ids)} users")


@dataclass(frozen=True)
class Message:
    channel_id: str
    ts: str
    author: str | None
    text: str
    thread_parent: str | None = None
    reactions: tuple[Reaction, ...] = ()
    file_count: int = 0
    url_count: int = 0
    edited: bool = False
    subtype: str | None = None

    @property
    def micros(self) -> int:
        return ts_to_micros(self.ts)

    @property
    def is_system(self) -> bool:
        return self.subtype is not None

    @property
    def is_thread_root(self) -> bool:
        return self.thread_parent == self.ts

    @property
    def is_reply(self) -> bool:
        return self.thread_parent is not None and self.thread_parent != self.ts


@dataclass(frozen=True)
class User:
    name: str
    consent: bool = True
    known: bool = True


@dataclass(frozen=True)
class Corpus:
    """Read-only view of one team's export.

    ``messages`` maps channel id to a tuple sorted strictly by timestamp.
    Mappings are never mutated after construction; every transformation
    returns a new corpus.
    """

    team_id: str
    users: dict[str, User] = field(default_factory=dict)
    channels: dict[str, str] = field(default_factory=dict)
    messages: dict[str, tuple[Message, ...]] = field(default_factory=dict)

    def channel_order(self) -> list[str]:
        return sorted(self.channels, key=lambda cid: (self.channels[cid], cid))

    def iter_messages(self, *, analytic_only: bool = False) -> Iterator[Message]:
        """Every message in (channel name, timestamp) order."""
        for cid in self.channel_order():
            for msg in self.messages.get(cid, ()):
                if analytic_only and msg.is_system:
                    continue
                yield msg

    def analytic_messages(self) -> list[Message]:
        return list(self.iter_messages(analytic_only=True))

    def channel_messages(self, channel_id: str, *, analytic_only: bool = False) -> tuple[Message, ...]:
        msgs = self.messages.get(channel_id, ())
        if analytic_only:
            return tuple(m for m in msgs if not m.is_system)
        return msgs

    @property
    def message_count(self) -> int:
        return sum(len(v) for v in self.messages.values())

    def non_consenting(self) -> frozenset[str]:
        return frozenset(uid for uid, u in self.users.items() if not u.consent)


# -- text normalisation -------------------------------------------------------


def unescape_text(text: str) -> str:
    text = text.replace("&lt;", "<").replace("&gt;", ">")
    return text.replace("&amp;", "&").translate(_APOSTROPHES)


def normalize_for_matching(text: str) -> str:
    """Replace mention and link tokens with placeholders and lower-case the result.

    >>> normalize_for_matching("ping <@U123> please")
    'ping @user please'
    """
    text = text.translate(_APOSTROPHES)
    text = USER_MENTION_RE.sub("@user", text)
    text = BROADCAST_RE.sub("@channel", text)
    text = _LINK_RE.sub("URL", text)
    return text.lower()


def count_links(raw_text: str) -> int:
    return len(_LINK_RE.findall(raw_text))


# -- archive access -----------------------------------------------------------


class _Archive:
    """Uniform read access to an export directory or zip file."""

    def __init__(self, path: Path):
        self.path = path
        self._zip: zipfile.ZipFile | None = None
        self._prefix = PurePosixPath()
        if path.is_dir():
            self._names = None
        elif zipfile.is_zipfile(path):
            self._zip = zipfile.ZipFile(path)
            self._names = {n for n in self._zip.namelist() if not n.endswith("/")}
            roots = sorted(
                (PurePosixPath(n).parent for n in self._names if PurePosixPath(n).name == "channels.json"),
                key=lambda p: len(p.parts),
            )
            if roots:
                self._prefix = roots[0]
        else:
            raise ExportError(f"export not found or not a directory/zip: {path}")

    def close(self) -> None:
        if self._zip is not None:
            self._zip.close()

    def exists(self, rel: str) -> bool:
        if self._zip is None:
            return (self.path / rel).is_file()
        return str(self._prefix / rel) in self._names

    def read_json(self, rel: str) -> Any:
        where = f"{self.path}:{rel}" if self._zip is not None else str(self.path / rel)
        try:
            if self._zip is None:
                raw = (self.path / rel).read_bytes()
            else:
                raw = self._zip.read(str(self._prefix / rel))
        except (OSError, KeyError) as exc:
            raise ExportError(f"cannot read {where}: {exc}") from exc
        try:
            return json.loads(raw.decode("utf-8-sig"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ExportError(f"invalid JSON in {where}: {exc}") from exc

    def day_files(self, folder: str) -> list[str]:
        """Relative paths of the per-day JSON files in a channel folder, sorted by name."""
        if self._zip is None:
            d = self.path / folder
            if not d.is_dir():
                return []
            return sorted(f"{folder}/{p.name}" for p in d.iterdir() if p.suffix == ".json" and p.is_file())
        base = self._prefix / folder
        out = []
        for n in self._names:
            p = PurePosixPath(n)
            if p.parent == base and p.suffix == ".json":
                out.append(f"{folder}/{p.name}")
        return sorted(out)


# -- parsing ------------------------------------------------------------------


def _parse_reactions(raw: Any) -> tuple[Reaction, ...]:
    out = []
    for r in raw or ():
        if not isinstance(r, dict) or not r.get("name"):
            continue
        users = tuple(str(u) for u in r.get("users") or ())
        count = r.get("count")
        if users:
            if isinstance(count, int) and count != len(users):
                logger.warning("reaction %s: count %s disagrees with %d listed users; using users", r["name"], count, len(users))
            count = len(users)
        elif not isinstance(count, int) or count < 0:
            count = 0
        if count == 0:
            continue
        out.append(Reaction(name=str(r["name"]), user_ids=users, count=count))
    return tuple(out)


def _parse_record(rec: dict, channel_id: str) -> Message:
    raw_text = rec.get("text") or ""
    if not isinstance(raw_text, str):
        raw_text = str(raw_text)
    subtype = rec.get("subtype")
    if subtype in HUMAN_SUBTYPES:
        subtype = None
    files = rec.get("files")
    file_count = len(files) if isinstance(files, list) else 0
    if not file_count and isinstance(rec.get("file"), dict):
        file_count = 1
    thread = rec.get("thread_ts")
    author = rec.get("user") or rec.get("bot_id")
    return Message(
        channel_id=channel_id,
        ts=canonical_ts(rec["ts"]),
        author=str(author) if author else None,
        text=unescape_text(raw_text),
        thread_parent=canonical_ts(thread) if thread is not None else None,
        reactions=_parse_reactions(rec.get("reactions")),
        file_count=file_count,
        url_count=count_links(raw_text),
        edited=bool(rec.get("edited")),
        subtype=str(subtype) if subtype else None,
    )


def _parse_users(raw: Any) -> dict[str, User]:
    if not isinstance(raw, list):
        raise ExportError("users.json: expected a JSON list")
    users = {}
    for u in raw:
        if not isinstance(u, dict) or "id" not in u:
            continue
        profile = u.get("profile") or {}
        name = profile.get("display_name") or u.get("real_name") or profile.get("real_name") or u.get("name") or u["id"]
        users[str(u["id"])] = User(name=str(name))
    return users


def parse_export(archive_path: str | Path, *, team_id: str | None = None) -> Corpus:
    """Parse a Slack workspace export directory or zip into a :class:`Corpus`.

    The team id defaults to the export's file or directory stem. Messages are
    sorted by timestamp per channel; a record repeating a timestamp already
    seen in its channel is dropped.

    Raises:
        ExportError: a manifest file is missing or unreadable, or a record
            carries a malformed timestamp (the message names the channel and
            the record index).
    """
    path = Path(archive_path)
    if not path.exists():
        raise ExportError(f"export path does not exist: {path}")
    archive = _Archive(path)
    try:
        for manifest in ("channels.json", "users.json"):
            if not archive.exists(manifest):
                raise ExportError(f"missing manifest file {manifest} in export {path}")
        users = _parse_users(archive.read_json("users.json"))
        raw_channels = archive.read_json("channels.json")
        if not isinstance(raw_channels, list):
            raise ExportError("channels.json: expected a JSON list")

        channels: dict[str, str] = {}
        messages: dict[str, tuple[Message, ...]] = {}
        for ch in raw_channels:
            if not isinstance(ch, dict) or "id" not in ch:
                continue
            cid = str(ch["id"])
            cname = str(ch.get("name") or cid)
            channels[cid] = cname
            by_ts: dict[str, Message] = {}
            index = 0
            for rel in archive.day_files(cname):
                records = archive.read_json(rel)
                if not isinstance(records, list):
                    raise ExportError(f"{rel}: expected a JSON list of messages")
                for rec in records:
                    if not isinstance(rec, dict) or rec.get("type", "message") != "message":
                        index += 1
                        continue
                    try:
                        msg = _parse_record(rec, cid)
                    except (KeyError, ValueError) as exc:
                        raise ExportError(
                            f"malformed timestamp in channel {cname!r} ({cid}), record {index} of {rel}: {exc}"
                        ) from exc
                    if msg.ts in by_ts:
                        logger.debug("duplicate ts %s in channel %s dropped", msg.ts, cname)
                    else:
                        by_ts[msg.ts] = msg
                    index += 1
            messages[cid] = tuple(sorted(by_ts.values(), key=lambda m: m.micros))
    finally:
        archive.close()

    for msgs in messages.values():
        for m in msgs:
            if m.author is not None and m.author not in users:
                users[m.author] = User(name=m.author, known=False)

    return Corpus(
        team_id=team_id or path.stem,
        users=dict(sorted(users.items())),
        channels=channels,
        messages=messages,
    )


# -- redaction ----------------------------------------------------------------


def _redact_mentions(text: str, ids: frozenset[str]) -> str:
    if "<@" not in text:
        return text
    return USER_MENTION_RE.sub(lambda m: REDACTED_MENTION if m.group(1) in ids else m.group(0), text)


def _redact_reactions(reactions: tuple[Reaction, ...], ids: frozenset[str]) -> tuple[Reaction, ...]:
    out = []
    for r in reactions:
        kept = tuple(u for u in r.user_ids if u not in ids)
        if len(kept) == len(r.user_ids):
            out.append(r)
        elif kept:
            out.append(Reaction(r.name, kept, len(kept)))
    return tuple(out)


def redact_users(corpus: Corpus, user_ids: Iterable[str]) -> Corpus:
    """Remove every trace of the listed users.

    Authored messages (thread replies included) are dropped, their reaction
    entries are removed with the matching count share, mentions of them are
    replaced by ``<@REDACTED>``, and roster entries are marked
    non-consenting. Unknown ids are ignored and the operation is idempotent.
    """
    ids = frozenset(user_ids)
    if not ids:
        return corpus
    messages = {}
    for cid, msgs in corpus.messages.items():
        kept = []
        for m in msgs:
            if m.author in ids:
                continue
            reactions = _redact_reactions(m.reactions, ids)
            text = _redact_mentions(m.text, ids)
            if reactions != m.reactions or text != m.text:
                m = replace(m, reactions=reactions, text=text)
            kept.append(m)
        messages[cid] = tuple(kept)
    users = {uid: (replace(u, consent=False) if uid in ids else u) for uid, u in corpus.users.items()}
    return replace(corpus, users=users, messages=messages)


def exclude_authors(corpus: Corpus, author_ids: Iterable[str]) -> Corpus:
    """Drop messages by the given authors without touching reactions or consent flags."""
    ids = frozenset(author_ids)
    if not ids:
        return corpus
    messages = {cid: tuple(m for m in msgs if m.author not in ids) for cid, msgs in corpus.messages.items()}
    return replace(corpus, messages=messages)


def read_id_list(path: str | Path) -> set[str]:
    """Read a plain-text id list: one id per line, ``#`` starts a comment."""
    p = Path(path)
    try:
        lines = p.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ExportError(f"cannot read id list {p}: {exc}") from exc
    return {line.split("#", 1)[0].strip() for line in lines} - {""}


# -- normalised corpus dump ---------------------------------------------------


def _message_to_dict(m: Message) -> dict:
    return {
        "ts": m.ts,
        "author": m.author,
        "text": m.text,
        "thread_parent": m.thread_parent,
        "reactions": [{"name": r.name, "users": list(r.user_ids), "count": r.count} for r in m.reactions],
        "file_count": m.file_count,
        "url_count": m.url_count,
        "edited": m.edited,
        "subtype": m.subtype,
    }


def corpus_to_dict(corpus: Corpus) -> dict:
    return {
        "format": CORPUS_FORMAT,
        "team_id": corpus.team_id,
        "users": {
            uid: {"name": u.name, "consent": u.consent, "known": u.known} for uid, u in sorted(corpus.users.items())
        },
        "channels": dict(sorted(corpus.channels.items())),
        "messages": {cid: [_message_to_dict(m) for m in msgs] for cid, msgs in sorted(corpus.messages.items())},
    }


def corpus_from_dict(data: dict) -> Corpus:
    if data.get("format") != CORPUS_FORMAT:
        raise ExportError(f"not a normalized corpus document (format={data.get('format')!r})")
    messages = {}
    for cid, msgs in data["messages"].items():
        messages[cid] = tuple(
            Message(
                channel_id=cid,
                ts=m["ts"],
                author=m["author"],
                text=m["text"],
                thread_parent=m["thread_parent"],
                reactions=tuple(Reaction(r["name"], tuple(r["users"]), r["count"]) for r in m["reactions"]),
                file_count=m["file_count"],
                url_count=m["url_count"],
                edited=m["edited"],
                subtype=m["subtype"],
            )
            for m in msgs
        )
    users = {uid: User(u["name"], u["consent"], u["known"]) for uid, u in data["users"].items()}
    return Corpus(team_id=data["team_id"], users=users, channels=dict(data["channels"]), messages=messages)


def dump_corpus(corpus: Corpus) -> str:
    """Serialise to the normalised single-document JSON form (stable key order)."""
    return json.dumps(corpus_to_dict(corpus), indent=2, ensure_ascii=False) + "\n"


def load_corpus(text: str) -> Corpus:
    return corpus_from_dict(json.loads(text))
