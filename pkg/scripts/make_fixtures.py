"""Regenerate the bundled test fixtures under tests/fixtures/."""

from pathlib import Path

from pschat.synth import write_export

ROOT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

write_export(ROOT / "alpha", 60, n_channels=2, n_users=4, seed=11)
write_export(ROOT / "beta", 150, n_channels=3, n_users=6, seed=22)
write_export(ROOT / "gamma.zip", 195, n_channels=4, n_users=7, seed=33, as_zip=True)

# alpha is consistently low, beta consistently high, gamma high on average but erratic.
rows = ["team_id,period,respondent,q1,q2,q3,q4,q5,q6,q7"]
plan = {
    "alpha": [(4, 5, 4, 5, 4, 5, 5), (5, 5, 5, 4, 4, 5, 5)],
    "beta": [(2, 6, 2, 6, 2, 6, 6), (1, 6, 2, 7, 2, 6, 6)],
    "gamma": [(1, 7, 1, 7, 1, 7, 7), (4, 5, 4, 5, 4, 5, 4)],
}
for period in (1, 2, 3):
    for team, responses in plan.items():
        for i, items in enumerate(responses):
            if team == "gamma" and period == 2:
                items = (4, 5, 4, 5, 4, 4, 4)
            rows.append(",".join([team, str(period), f"{team}-r{i}"] + [str(v) for v in items]))
(ROOT / "survey.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
(ROOT / "redact.txt").write_text("# users who withheld consent\nU22001\nU33004\n", encoding="utf-8")
print("fixtures written to", ROOT)
