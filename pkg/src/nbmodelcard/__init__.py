"""Model-card documentation engine for Jupyter notebooks."""

from .errors import (
    ConfigSchemaError,
    IndexOutOfBounds,
    MalformedJson,
    MissingCellsArray,
    NbModelCardError,
    NotACodeCell,
    UnknownCellId,
    UnknownSection,
    UnknownStage,
    UnsupportedFormat,
)
from .notebook import (
    Cell,
    Notebook,
    delete_cell,
    find_cell,
    insert_cell_at,
    load_notebook,
    make_code_cell,
    make_markdown_cell,
    parse_notebook,
    replace_cell,
    serialize_notebook,
    store_notebook,
)

__version__ = "0.1.0"
