"""Exception types shared across the pipeline.

The CLI maps these onto its exit codes: InputError -> 2,
EmptyResultError -> 3, DataFormatError -> 4.
"""


class PipelineError(Exception):
    """Base class for all contextner errors."""


class InputError(PipelineError):
    """Bad user input: missing files, invalid options, unusable arguments."""


class EmptyResultError(PipelineError):
    """A run produced nothing to report (e.g. no contexts extracted)."""


class DataFormatError(PipelineError):
    """A stored file (manifest, model, TSV) is malformed."""
