class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its stated accuracy."""


class QuadratureError(NumericalError):
    pass


class MissingOffsetError(KeyError):
    """A correlator offset was requested outside the materialised range."""
