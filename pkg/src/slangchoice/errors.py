"""Exception hierarchy shared across the package.

Exit codes mirror the CLI contract: 1 usage/config, 2 data, 3 numerical.
"""


class SlangChoiceError(Exception):
    exit_code = 1


class ConfigError(SlangChoiceError):
    """Bad configuration: unknown field, missing value, invalid setting."""

    exit_code = 1


class DataError(SlangChoiceError):
    """Bad or missing input data: records, vectors, artifacts."""

    exit_code = 2


class UnembeddableDefinition(DataError):
    """A definition yielded no content word present in the vector store."""


class NumericalError(SlangChoiceError):
    """Numerical failure: NaN losses, unnormalizable posteriors."""

    exit_code = 3
