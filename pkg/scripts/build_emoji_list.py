"""Regenerate src/pschat/data/standard_emoji.txt from the ``emoji`` package.

Run once when refreshing the list; the package itself only reads the text file.

    pip install emoji && python scripts/build_emoji_list.py
"""

from pathlib import Path

import emoji

# Slack names missing from the alias tables.
SLACK_EXTRAS = {"simple_smile", "white_check_mark", "heavy_check_mark", "thumbsup", "thumbsdown", "+1", "-1"}

names = set(SLACK_EXTRAS)
for data in emoji.EMOJI_DATA.values():
    for alias in [data.get("en"), *data.get("alias", [])]:
        if alias:
            names.add(alias.strip(":").lower())

out = Path(__file__).resolve().parents[1] / "src" / "pschat" / "data" / "standard_emoji.txt"
out.write_text("".join(f"{n}\n" for n in sorted(names)), encoding="utf-8")
print(f"wrote {len(names)} names to {out}")
