"""Small hand-built exports for example-level tests."""

from __future__ import annotations

import json
from pathlib import Path


def msg(ts: str, user: str | None = "U1", text: str = "hi", **extra) -> dict:
    rec = {"type": "message", "ts": ts, "text": text}
    if user is not None:
        rec["user"] = user
    rec.update(extra)
    return rec


def make_export(root: Path, channels: dict[str, list[dict]], users: list[str] = ("U1", "U2", "U3")) -> Path:
    """Write ``channels`` (name -> records) as an export; each channel's records go in one day file."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "users.json").write_text(json.dumps([{"id": u, "name": u.lower()} for u in users]))
    chans = [{"id": f"C{i}", "name": name} for i, name in enumerate(channels)]
    (root / "channels.json").write_text(json.dumps(chans))
    for name, recs in channels.items():
        d = root / name
        d.mkdir(exist_ok=True)
        (d / "2023-01-01.json").write_text(json.dumps(recs))
    return root
