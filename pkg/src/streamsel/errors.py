class StreamselError(Exception):
    pass


class DataError(StreamselError, ValueError):
    """Malformed input data: parse failures, ragged rows, degenerate labels."""


class ConfigError(StreamselError, ValueError):
    """Invalid parameters or incompatible options."""
