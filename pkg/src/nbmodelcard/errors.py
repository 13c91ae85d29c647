"""Exception types shared across the package."""


class NbModelCardError(Exception):
    """Base class for every error raised by this package."""


class MalformedJson(NbModelCardError):
    """Input bytes are not a readable notebook document (encoding, JSON, or shape)."""


class UnsupportedFormat(NbModelCardError):
    """Notebook major format version is not 4."""


class MissingCellsArray(NbModelCardError):
    """Notebook JSON has no top-level cells list."""


class UnknownCellId(NbModelCardError):
    """No cell with the requested id exists in the notebook."""


class IndexOutOfBounds(NbModelCardError):
    """Cell index outside the valid range for the operation."""


class NotACodeCell(NbModelCardError):
    """Operation requires a code cell but the target is markdown or raw."""


class ConfigSchemaError(NbModelCardError):
    """Template configuration violates the expected schema."""


class UnknownSection(NbModelCardError):
    """Section id is not part of the active template."""


class UnknownStage(NbModelCardError):
    """Stage name is not one of the six pipeline stages."""
