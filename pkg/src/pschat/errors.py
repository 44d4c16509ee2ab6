"""Exception hierarchy shared by every pipeline stage."""


class PschatError(Exception):
    """Base class for every error raised by this package.

    ``module`` names the pipeline stage that failed so the CLI can report it.
    """

    module = "pschat"


class ExportError(PschatError):
    module = "ingest"


class LexiconError(PschatError):
    module = "lexicon"


class MetricsError(PschatError):
    module = "metrics"


class SurveyError(PschatError):
    module = "survey"


class ReportError(PschatError):
    module = "report"
