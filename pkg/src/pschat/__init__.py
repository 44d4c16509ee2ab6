"""Psychological-safety signals from Slack-style team chat exports."""

__version__ = "0.1.0"


from pschat.errors import PschatError
from pschat.ingest import Corpus, Message, Reaction, User, parse_export, redact_users
from pschat.lexicon import Lexicon, default_lexicon, load_lexicon, match_message, tabulate_keywords
from pschat.metrics import compute_usage_metrics, rank_emoji_reactions
from pschat.report import build_team_report, compare_teams, render
from pschat.survey import score_period, select_extreme_teams

__all__ = [
    "Corpus",
    "Lexicon",
    "Message",
    "PschatError",
    "Reaction",
    "User",
    "build_team_report",
    "compare_teams",
    "compute_usage_metrics",
    "default_lexicon",
    "load_lexicon",
    "match_message",
    "parse_export",
    "rank_emoji_reactions",
    "redact_users",
    "render",
    "score_period",
    "select_extreme_teams",
    "tabulate_keywords",
]
