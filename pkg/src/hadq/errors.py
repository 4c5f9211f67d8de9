"""Exception hierarchy shared by every hadq module."""


class HadqError(Exception):
    """Base class for all errors raised by hadq."""


class InvalidConfiguration(HadqError, ValueError):
    pass


class EmptyConfiguration(HadqError):
    pass


class NoLeftParticle(HadqError):
    pass


class NoRightParticle(HadqError):
    pass


class PositionCollision(HadqError):
    """Two events or particles share an exact position (a null event under
    continuous sampling, so it is treated as a bug rather than tie-broken)."""


class UnstableQueue(HadqError):
    pass


class NotNested(HadqError):
    pass


class NotDisjoint(HadqError):
    pass


class TooFewSamples(HadqError):
    pass


class EmptyClass(HadqError):
    pass


class NoOriginParticle(HadqError):
    pass


class UnknownExperiment(HadqError):
    pass


class InvalidParameters(HadqError, ValueError):
    pass
