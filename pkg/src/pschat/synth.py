"""Seeded synthetic Slack exports for fixtures, scale tests and benchmarks.

The generator deliberately exercises every parsing path: HTML escapes,
curly apostrophes, mention and link tokens (including links containing
keywords), threads with orphan replies, reactions with user lists, file
attachments, edits, join/leave system messages and out-of-order records
inside day files.
"""

from __future__ import annotations

import json
import random
import zipfile
from datetime import datetime, timezone
from pathlib import Path

WORDS = (
    "the we should build a prototype for motor frame test today tomorrow meeting lab budget order parts "
    "design review cad print laser cut solder wire sensor board team report slides deadline yard yarn "
    "disagreement shared sharing thoughtful ideal hello whole showhow somewhat helpful stopwatch yahoo "
    "agreeable jokester lollipop amazement thankful actually improvement ideas joking hahaha lmaooo"
).split()

PHRASES = (
    "sorry", "my mistake", "apologies all", "that is incorrect", "I disagree", "this is wrong", "seems impossible",
    "unlikely to ship", "I don't think so", "I don’t know", "unsure here", "can someone help", "who has it?",
    "what is next", "where is the drill", "why though", "how do we", "yes", "yeah", "ya", "yea", "agreed",
    "congrats team", "amazing work", "wonderful", "wow", "thanks!", "thank you", "not needed", "please stop",
    "a waste of time", "we could improve", "better", "instead", "actually", "what if we", "any feedback",
    "share it", "thoughts?", "idea", ":smile:", ":tada:", ":sob:", "hahah", "lol", "lmao", "just a joke",
    "at 10:30:45", "a &amp; b", "x &lt; y &gt; z",
)

REACTIONS = ("heart", "+1", "joy", "eyes", "tada", "white_check_mark", "raised_hands", "blob_dance", "team_parrot", "+1::skin-tone-2")
SYSTEM_SUBTYPES = ("channel_join", "channel_leave", "channel_topic")


def _ts(micros: int) -> str:
    return f"{micros // 1_000_000}.{micros % 1_000_000:06d}"


def _text(rng: random.Random, user_ids: list[str]) -> str:
    parts = []
    for _ in range(rng.randint(1, 4)):
        roll = rng.random()
        if roll < 0.45:
            parts.append(rng.choice(PHRASES))
        elif roll < 0.55:
            parts.append(f"<@{rng.choice(user_ids)}>")
        elif roll < 0.58:
            parts.append(rng.choice(("<!channel>", "<!here>")))
        elif roll < 0.64:
            parts.append(rng.choice(("<https://docs.example.com/help?what=1>", "<https://x.example/share|thoughts doc>")))
        else:
            parts.append(" ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 6))))
    return " ".join(parts)


def generate_records(
    n_messages: int, n_channels: int = 3, n_users: int = 6, seed: int = 0
) -> tuple[list[dict], list[dict], dict[str, list[dict]]]:
    """Build ``(channels, users, records_by_channel_name)`` in memory."""
    rng = random.Random(seed)
    users = [
        {"id": f"U{seed:02d}{i:03d}", "name": f"user{i}", "real_name": f"User {i}", "profile": {"display_name": f"u{i}"}}
        for i in range(n_users)
    ]
    user_ids = [u["id"] for u in users]
    weights = [rng.uniform(0.5, 3.0) for _ in user_ids]
    channels = [{"id": f"C{seed:02d}{i:03d}", "name": f"chan-{i}", "created": 1672531200} for i in range(n_channels)]
    records: dict[str, list[dict]] = {c["name"]: [] for c in channels}
    clock = {c["name"]: 1_673_000_000 * 1_000_000 + rng.randint(0, 3_600_000_000) for c in channels}
    roots: dict[str, list[dict]] = {c["name"]: [] for c in channels}

    for _ in range(n_messages):
        cname = rng.choice(channels)["name"]
        clock[cname] += rng.randint(1, 7_200) * 1_000_000 + rng.randint(0, 999_999)
        ts = _ts(clock[cname])
        author = rng.choices(user_ids, weights)[0]
        rec: dict = {"type": "message", "ts": ts, "user": author, "text": _text(rng, user_ids)}
        roll = rng.random()
        if roll < 0.05:
            rec["subtype"] = rng.choice(SYSTEM_SUBTYPES)
            rec["text"] = f"<@{author}> has joined the channel"
        elif roll < 0.30 and roots[cname]:
            root = rng.choice(roots[cname][-5:])
            rec["thread_ts"] = root["ts"]
            rec["parent_user_id"] = root["user"]
            root["reply_count"] = root.get("reply_count", 0) + 1
        elif roll < 0.32:
            rec["thread_ts"] = _ts(clock[cname] - 10_000_000_000)  # orphan: parent not exported
        elif roll < 0.50:
            rec["thread_ts"] = ts
            roots[cname].append(rec)
        if "subtype" not in rec:
            if rng.random() < 0.3:
                picked = rng.sample(REACTIONS, rng.randint(1, 3))
                rec["reactions"] = []
                for name in picked:
                    who = rng.sample(user_ids, rng.randint(1, min(4, len(user_ids))))
                    rec["reactions"].append({"name": name, "users": who, "count": len(who)})
            if rng.random() < 0.1:
                rec["files"] = [{"id": f"F{rng.randint(0, 10**6)}", "name": "cad.step"} for _ in range(rng.randint(1, 2))]
            if rng.random() < 0.07:
                rec["edited"] = {"user": author, "ts": _ts(clock[cname] + 5_000_000)}
        if rng.random() < 0.02:
            rec["unknown_field"] = {"ignored": True}
        records[cname].append(rec)

    # Root without thread_ts once nobody replied: Slack only marks roots that have replies.
    for cname, rs in roots.items():
        for r in rs:
            if not r.get("reply_count") and rng.random() < 0.5:
                del r["thread_ts"]
    return channels, users, records


def _day(ts: str) -> str:
    return datetime.fromtimestamp(int(ts.split(".")[0]), tz=timezone.utc).strftime("%Y-%m-%d")


def export_files(channels: list[dict], users: list[dict], records: dict[str, list[dict]], seed: int = 0) -> dict[str, str]:
    """Lay records out as export-relative file names with JSON content."""
    rng = random.Random(seed + 1)
    files = {"channels.json": json.dumps(channels, indent=1), "users.json": json.dumps(users, indent=1)}
    for cname, recs in records.items():
        by_day: dict[str, list[dict]] = {}
        for r in recs:
            by_day.setdefault(_day(r["ts"]), []).append(r)
        for day, rs in by_day.items():
            rs = list(rs)
            if len(rs) > 2 and rng.random() < 0.5:
                rng.shuffle(rs)
            files[f"{cname}/{day}.json"] = json.dumps(rs, indent=1, ensure_ascii=False)
    return files


def write_export(
    dest: str | Path, n_messages: int, n_channels: int = 3, n_users: int = 6, seed: int = 0, *, as_zip: bool = False
) -> Path:
    """Write a synthetic export to ``dest`` (a directory, or a ``.zip`` file when ``as_zip``)."""
    dest = Path(dest)
    files = export_files(*generate_records(n_messages, n_channels, n_users, seed), seed=seed)
    if as_zip:
        dest.parent.mkdir(parents=True, exist_ok=True)
        with zipfile.ZipFile(dest, "w", zipfile.ZIP_DEFLATED) as zf:
            for rel, content in sorted(files.items()):
                zf.writestr(rel, content)
        return dest
    for rel, content in files.items():
        p = dest / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(content, encoding="utf-8")
    return dest
