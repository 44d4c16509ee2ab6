"""Seven-item psychological-safety survey scoring and comparison-team selection."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from pschat.errors import SurveyError

N_ITEMS = 7
SCALE = (1, 7)
# Negatively worded items of the standard seven-item instrument (1-based).
DEFAULT_REVERSE_ITEMS = frozenset({1, 3, 5})

CSV_HEADER = ["team_id", "period", "respondent"] + [f"q{i}" for i in range(1, N_ITEMS + 1)]


@dataclass(frozen=True)
class SurveyResponse:
    team_id: str
    period: int
    respondent: str
    items: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.period < 1:
            raise SurveyError(f"period must be >= 1, got {self.period}")
        if len(self.items) != N_ITEMS:
            raise SurveyError(f"respondent {self.respondent!r}: expected {N_ITEMS} items, got {len(self.items)}")
        lo, hi = SCALE
        for i, v in enumerate(self.items, 1):
            if not isinstance(v, int) or not lo <= v <= hi:
                raise SurveyError(f"respondent {self.respondent!r}: item q{i}={v!r} outside {lo}..{hi}")


@dataclass(frozen=True)
class PsScore:
    team_id: str
    period: int
    mean: float
    stddev: float
    n_respondents: int


@dataclass(frozen=True)
class TeamSelection:
    low_team: str
    high_team: str
    rationale: dict[str, tuple[float, float]]  # team -> (all-period mean, across-period stddev)


def _check_reverse(reverse_items: Iterable[int]) -> frozenset[int]:
    rev = frozenset(reverse_items)
    bad = sorted(i for i in rev if not 1 <= i <= N_ITEMS)
    if bad:
        raise SurveyError(f"reverse item indices must be in 1..{N_ITEMS}, got {bad}")
    return rev


def reverse_response(response: SurveyResponse, reverse_items: Iterable[int]) -> SurveyResponse:
    """Apply ``8 - v`` to the listed (1-based) items."""
    rev = _check_reverse(reverse_items)
    lo, hi = SCALE
    items = tuple(lo + hi - v if i in rev else v for i, v in enumerate(response.items, 1))
    return SurveyResponse(response.team_id, response.period, response.respondent, items)


def response_score(response: SurveyResponse, reverse_items: Iterable[int] = DEFAULT_REVERSE_ITEMS) -> Fraction:
    return Fraction(sum(reverse_response(response, reverse_items).items), N_ITEMS)


def score_period(
    responses: Sequence[SurveyResponse], reverse_items: Iterable[int] = DEFAULT_REVERSE_ITEMS
) -> PsScore:
    """Aggregate one team's responses for one period.

    Each respondent's score is the mean of their seven (reverse-coded) items;
    the period score is the mean of respondent scores with their population
    standard deviation.
    """
    if not responses:
        raise SurveyError("no responses")
    keys = {(r.team_id, r.period) for r in responses}
    if len(keys) > 1:
        raise SurveyError(f"responses mix several team/period groups: {sorted(keys)}")
    rev = _check_reverse(reverse_items)
    scores = [response_score(r, rev) for r in responses]
    n = len(scores)
    mean = sum(scores, Fraction(0)) / n
    var = sum(((s - mean) ** 2 for s in scores), Fraction(0)) / n
    team, period = keys.pop()
    return PsScore(team, period, float(mean), math.sqrt(var), n)


def score_all(responses: Iterable[SurveyResponse], reverse_items: Iterable[int] = DEFAULT_REVERSE_ITEMS) -> list[PsScore]:
    groups: dict[tuple[str, int], list[SurveyResponse]] = defaultdict(list)
    for r in responses:
        groups[(r.team_id, r.period)].append(r)
    return [score_period(groups[k], reverse_items) for k in sorted(groups)]


def select_extreme_teams(scores: Sequence[PsScore]) -> TeamSelection:
    """Pick the consistently lowest team and the consistently high team.

    For every team, M is the mean of its period means and S their population
    standard deviation. The low team minimises M (ties: larger S, then id).
    The high team is drawn from teams with M at or above the median M and
    minimises S (ties: larger M, then id), skipping the low team.
    """
    by_team: dict[str, dict[int, float]] = defaultdict(dict)
    for s in scores:
        if s.period in by_team[s.team_id]:
            raise SurveyError(f"duplicate score for team {s.team_id!r} period {s.period}")
        by_team[s.team_id][s.period] = s.mean
    if len(by_team) < 2:
        raise SurveyError(f"need scores for at least 2 teams, got {len(by_team)}")
    periods = sorted({p for ps in by_team.values() for p in ps})
    gaps = [f"{t}: period {p}" for t in sorted(by_team) for p in periods if p not in by_team[t]]
    if gaps:
        raise SurveyError("missing period coverage: " + ", ".join(gaps))

    stats = {}
    for team, ps in by_team.items():
        means = [ps[p] for p in periods]
        stats[team] = (statistics.fmean(means), statistics.pstdev(means))

    low = min(stats, key=lambda t: (stats[t][0], -stats[t][1], t))
    median = statistics.median(m for m, _ in stats.values())
    candidates = sorted(
        (t for t, (m, _) in stats.items() if m >= median),
        key=lambda t: (stats[t][1], -stats[t][0], t),
    )
    high = next((t for t in candidates if t != low), None)
    if high is None:
        raise SurveyError("no high-team candidate distinct from the low team")
    return TeamSelection(low, high, dict(sorted(stats.items())))


# -- I/O ----------------------------------------------------------------------


def parse_survey_csv(text: str, source: str = "<survey>") -> list[SurveyResponse]:
    """Parse ``team_id,period,respondent,q1..q7`` rows."""
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or [])]
    if missing:
        raise SurveyError(f"{source}: missing columns {', '.join(missing)}")
    out = []
    for lineno, row in enumerate(reader, 2):
        try:
            items = tuple(int(row[f"q{i}"]) for i in range(1, N_ITEMS + 1))
            period = int(row["period"])
        except (TypeError, ValueError) as exc:
            raise SurveyError(f"{source}, line {lineno}: non-integer value ({exc})") from exc
        try:
            out.append(SurveyResponse(row["team_id"].strip(), period, row["respondent"].strip(), items))
        except SurveyError as exc:
            raise SurveyError(f"{source}, line {lineno}: {exc}") from exc
    return out


def load_survey_csv(path: str | Path) -> list[SurveyResponse]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise SurveyError(f"cannot read survey file {p}: {exc}") from exc
    return parse_survey_csv(text, str(p))


def scores_csv(scores: Iterable[PsScore]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["team_id", "period", "mean", "stddev", "n_respondents"])
    for s in scores:
        w.writerow([s.team_id, s.period, repr(s.mean), repr(s.stddev), s.n_respondents])
    return buf.getvalue()


def scores_json(scores: Iterable[PsScore], selection: TeamSelection | None = None) -> str:
    doc: dict = {
        "scores": [
            {"team_id": s.team_id, "period": s.period, "mean": s.mean, "stddev": s.stddev, "n_respondents": s.n_respondents}
            for s in scores
        ]
    }
    if selection is not None:
        doc["selection"] = {
            "low_team": selection.low_team,
            "high_team": selection.high_team,
            "teams": {t: {"mean": m, "stddev": sd} for t, (m, sd) in selection.rationale.items()},
        }
    return json.dumps(doc, indent=2) + "\n"


def plot_csv(scores: Iterable[PsScore]) -> str:
    """Plot-ready ``period,team,mean`` rows, one point per team and period."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["period", "team", "mean"])
    for s in sorted(scores, key=lambda s: (s.period, s.team_id)):
        w.writerow([s.period, s.team_id, repr(s.mean)])
    return buf.getvalue()
