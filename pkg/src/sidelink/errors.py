"""Exception types raised across the package."""


class SidelinkError(Exception):
    """Base class for all package errors."""


class BadParam(SidelinkError, ValueError):
    """A constructor or evaluator was called outside its parameter range."""


class UnknownY(SidelinkError, KeyError):
    """Conditioning on a receiver symbol with zero marginal probability."""


class DomainOverflow(SidelinkError, IndexError):
    """A hash query addressed a symbol outside the oracle's domain."""


class NotInSupport(SidelinkError, ValueError):
    """A protocol input lies outside the support of the distribution."""


class NonTermination(SidelinkError, RuntimeError):
    """A protocol run exceeded its message cap."""


class ProtocolError(SidelinkError, RuntimeError):
    """The two party strategies disagreed about whose turn it is."""


class NoSeedFound(SidelinkError, RuntimeError):
    """No candidate seed met the requested error budget."""


class IncompatibleSupports(SidelinkError, ValueError):
    """A one-round protocol does not cover the input distribution."""


class ConfigError(SidelinkError, ValueError):
    """An experiment configuration failed validation.

    ``fields`` maps each offending field name to a diagnostic message.
    """

    def __init__(self, fields):
        self.fields = dict(fields)
        detail = "; ".join(f"{k}: {v}" for k, v in self.fields.items())
        super().__init__(f"invalid experiment config ({detail})")
