"""Exception hierarchy for cvm2d."""


class CVMError(Exception):
    """Base class for all errors raised by cvm2d."""


class InvalidGeometryError(CVMError, ValueError):
    """Grid dimensions or state vector are inconsistent with the lattice."""


class InvalidSwapError(CVMError, ValueError):
    """A swap was requested between cells that are not an A/B pair."""


class GridFormatError(CVMError, ValueError):
    """A grid file could not be parsed."""


class DegenerateCompositionError(CVMError, ValueError):
    """The grid holds only one state, so no composition-preserving swap exists."""


class ConfigError(CVMError, ValueError):
    """An experiment configuration value is out of range."""
