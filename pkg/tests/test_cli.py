import json

import pytest
import yaml

from conftest import FIXTURE_EXPORTS, FIXTURES
from helpers import make_export
from pschat.cli import main
from pschat.lexicon import default_lexicon, lexicon_from_config


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_single_team(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", FIXTURE_EXPORTS[0], "--out-dir", tmp_path)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["alpha.report.csv", "alpha.report.json"]
    assert json.loads((tmp_path / "alpha.report.json").read_text())["team_id"] == "alpha"


def test_analyze_with_survey(tmp_path, capsys):
    code, out, _ = run(
        capsys, "analyze", *FIXTURE_EXPORTS, "--survey", FIXTURES / "survey.csv", "--redact", FIXTURES / "redact.txt",
        "--out-dir", tmp_path, "--format", "json,csv,markdown", "--generated-at", "2026-01-01T00:00:00+00:00",
    )
    assert code == 0
    assert "high team: beta  low team: alpha" in out
    md = (tmp_path / "comparison.md").read_text()
    assert md.startswith("# Comparison: beta (high) vs alpha (low)")
    for name in ("gamma.report.md", "survey_scores.csv", "survey_scores.json", "survey_plot.csv", "comparison.json"):
        assert (tmp_path / name).exists()
    beta = json.loads((tmp_path / "beta.report.json").read_text())
    assert beta["usage"]["total_messages"] == 131  # U22001 redacted


def test_analyze_missing_export(tmp_path, capsys):
    missing = tmp_path / "no-such-export"
    code, _, err = run(capsys, "analyze", missing, "--out-dir", tmp_path / "out")
    assert code != 0
    assert str(missing) in err and "[ingest]" in err


def test_analyze_options(tmp_path, capsys):
    ids = tmp_path / "custom.txt"
    ids.write_text("heart\n")
    code, _, _ = run(
        capsys, "analyze", FIXTURE_EXPORTS[1], "--out-dir", tmp_path, "--top-emoji", "3", "--gap-mode", "per-channel",
        "--duration-cap", "3600", "--custom-emoji", ids, "--reverse-items", "none", "--format", "json",
    )
    assert code == 0
    doc = json.loads((tmp_path / "beta.report.json").read_text())
    assert len(doc["emoji"]["entries"]) == 3
    assert doc["usage"]["gap_mode"] == "per-channel"
    assert doc["usage"]["duration_cap"]["num"] == 3600
    assert {e["name"]: e["is_custom"] for e in doc["emoji"]["entries"]}.get("heart", True) is True


def test_analyze_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        assert run(capsys, "analyze", *FIXTURE_EXPORTS, "--survey", FIXTURES / "survey.csv", "--out-dir", d,
                   "--format", "json,csv,markdown")[0] == 0
        outs.append(d)
    for p in outs[0].iterdir():
        a, b = p.read_text(), (outs[1] / p.name).read_text()
        if p.suffix == ".json" and "report" in p.name:
            a, b = json.loads(a), json.loads(b)
            a.pop("generated_at"), b.pop("generated_at")
        elif p.name.startswith("comparison"):
            a = "\n".join(x for x in a.splitlines() if "generated" not in x)
            b = "\n".join(x for x in b.splitlines() if "generated" not in x)
        elif p.suffix == ".md":
            a, b = a.splitlines()[3:], b.splitlines()[3:]
        assert a == b, p.name


def test_concordance_text(capsys):
    code, out, _ = run(capsys, "concordance", FIXTURE_EXPORTS[0], "Mistakes", "--context", "1")
    assert code == 0
    assert out.startswith("# Mistakes: ")
    assert "«sorry»" in out or "«mistake»" in out or "«apolog" in out


def test_concordance_jsonl_matches_count(capsys):
    code, out, _ = run(capsys, "concordance", FIXTURE_EXPORTS[1], "Questions", "--context", "0", "--format", "jsonl")
    assert code == 0
    from pschat.ingest import parse_export
    from pschat.lexicon import tabulate_keywords

    expected = tabulate_keywords(parse_export(FIXTURE_EXPORTS[1]), default_lexicon()).count("Questions")
    assert len(out.splitlines()) == expected


def test_concordance_unknown(capsys):
    code, _, err = run(capsys, "concordance", FIXTURE_EXPORTS[0], "Bravery")
    assert code != 0 and "Asking for Input" in err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", *FIXTURE_EXPORTS, "--survey", FIXTURES / "survey.csv")
    assert code == 0 and out.rstrip().endswith("OK")
    assert "11 sub-categories" in out


def test_validate_corrupt_lexicon(tmp_path, capsys):
    bad = tmp_path / "lex.yaml"
    bad.write_text("Voice:\n  Mistakes:\n    - word: sorry\n  Critiques: []\n")
    code, _, err = run(capsys, "validate", "--lexicon", bad)
    assert code != 0 and "Voice/Critiques" in err


def test_validate_empty_export(tmp_path, capsys):
    code, out, err = run(capsys, "validate", make_export(tmp_path / "empty", {"general": []}))
    assert code == 0
    assert "zero messages" in err


def test_lexicon_print(capsys):
    code, out, _ = run(capsys, "lexicon", "print")
    assert code == 0
    assert lexicon_from_config(yaml.safe_load(out)) == default_lexicon()


def test_bad_format_arg(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", str(FIXTURE_EXPORTS[0]), "--format", "pdf"])
    assert exc.value.code != 0
