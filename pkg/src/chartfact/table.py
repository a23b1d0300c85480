"""Chart data tables and their linearized wire format.

A table is a rectangular grid of text cells under a single header row.
For exchange with model backends the grid is flattened to one string:
cells joined by a tab, rows joined by the three-character sequence
``&&&``, header first, no trailing row delimiter.  The chart title never
travels inside the linearized text; it rides alongside as a separate
field wherever tables are exchanged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

ROW_DELIMITER = "&&&"
CELL_DELIMITER = "\t"

CURRENCY_SYMBOLS = "$€£"

SCALE_WORDS = {
    "thousand": 1e3,
    "million": 1e6,
    "billion": 1e9,
    "trillion": 1e12,
}

# Signed decimal, optionally with strict comma grouping in the integer part.
_NUMBER_RE = re.compile(r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|[+-]?\.\d+")
_SCALE_RE = re.compile(r"\s*(thousand|million|billion|trillion)\s*$", re.IGNORECASE)

# Four-digit integers in this range are treated as calendar years when they
# appear in header names or as bare cell values.
_YEAR_MIN, _YEAR_MAX = 1000, 2999


class TableError(ValueError):
    """Base class for table construction and serialization failures."""


class EmptyInputError(TableError):
    """Raised when parsing an empty linearized table string."""


class RaggedRowError(TableError):
    """Raised when a data row's cell count differs from the header's."""

    def __init__(self, row_index: int, expected: int, actual: int):
        self.row_index = row_index
        super().__init__(
            f"row {row_index} has {actual} cells, header has {expected}"
        )


class UnencodableCellError(TableError):
    """Raised when a cell's raw text contains a reserved delimiter."""

    def __init__(self, row_index: int, col_index: int):
        self.row_index = row_index
        self.col_index = col_index
        super().__init__(
            f"cell at row {row_index}, column {col_index} contains a reserved "
            f"delimiter ({CELL_DELIMITER!r} or {ROW_DELIMITER!r})"
        )


class UnknownColumnError(TableError):
    """Raised when a column lookup names a column the table does not have."""


@dataclass(frozen=True)
class NumericValue:
    """A number recovered from cell text, kept as written.

    ``value`` stores the digits as they appear: ``"20.4%"`` keeps 20.4 with
    the percent flag set, ``"3.5 million"`` keeps 3.5 with a scale word.
    ``effective_value`` applies the scale word for magnitude comparisons.
    """

    value: float
    is_percent: bool = False
    scale_word: str | None = None

    @property
    def effective_value(self) -> float:
        if self.scale_word is not None:
            return self.value * SCALE_WORDS[self.scale_word]
        return self.value

    def render(self, group_digits: bool = False) -> str:
        """Render the canonical text form, optionally with comma grouping."""
        v = self.value
        if v == int(v) and abs(v) < 1e15:
            text = format(int(v), ",d") if group_digits else str(int(v))
        else:
            text = repr(v)
            if group_digits:
                sign = "-" if text.startswith("-") else ""
                digits = text.lstrip("-")
                whole, _, frac = digits.partition(".")
                whole = format(int(whole), ",d")
                text = f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"
        if self.is_percent:
            text += "%"
        if self.scale_word is not None:
            text += f" {self.scale_word}"
        return text

    @property
    def is_year_like(self) -> bool:
        v = self.value
        return (
            not self.is_percent
            and self.scale_word is None
            and v == int(v)
            and _YEAR_MIN <= v <= _YEAR_MAX
        )


def parse_cell_number(text: str) -> NumericValue | None:
    """Parse cell text to a number, or return None if it is not numeric.

    The closed rule set: surrounding whitespace is stripped, then one
    leading currency symbol ($, the euro sign, or the pound sign), comma
    thousands separators, one trailing ``%``, and one trailing scale word
    (thousand/million/billion/trillion, any case).  What remains must be a
    signed decimal.  Anything else is not a number.
    """
    s = text.strip()
    if not s:
        return None
    if s[0] in CURRENCY_SYMBOLS:
        s = s[1:].lstrip()
    is_percent = False
    if s.endswith("%"):
        s = s[:-1].rstrip()
        is_percent = True
    scale_word = None
    m = _SCALE_RE.search(s)
    if m:
        scale_word = m.group(1).lower()
        s = s[: m.start()]
    if not _NUMBER_RE.fullmatch(s):
        return None
    return NumericValue(float(s.replace(",", "")), is_percent, scale_word)


@dataclass(frozen=True)
class Cell:
    """One table cell: raw text plus its numeric reading when it has one."""

    raw: str

    @cached_property
    def numeric(self) -> NumericValue | None:
        return parse_cell_number(self.raw)


@dataclass(frozen=True)
class Table:
    """An immutable rectangular table: header names plus rows of cells.

    Header names are trimmed at construction and must be non-empty after
    trimming.  Data cells are never trimmed; their raw text is significant.
    """

    header: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]
    title: str | None = None

    def __init__(
        self,
        header: Sequence[str],
        rows: Iterable[Sequence[Cell | str]] = (),
        title: str | None = None,
    ):
        names = tuple(str(h).strip() for h in header)
        if not names:
            raise TableError("table must have at least one header name")
        for i, name in enumerate(names):
            if not name:
                raise TableError(f"header name at column {i} is empty after trimming")
        built = []
        for r, row in enumerate(rows, start=1):
            cells = tuple(c if isinstance(c, Cell) else Cell(str(c)) for c in row)
            if len(cells) != len(names):
                raise RaggedRowError(r, len(names), len(cells))
            built.append(cells)
        object.__setattr__(self, "header", names)
        object.__setattr__(self, "rows", tuple(built))
        object.__setattr__(self, "title", title)

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def column_count(self) -> int:
        return len(self.header)

    def column(self, name_or_index: str | int) -> tuple[Cell, ...]:
        """Return one column's cells, addressed by header name or index."""
        if isinstance(name_or_index, str):
            try:
                idx = self.header.index(name_or_index)
            except ValueError:
                raise UnknownColumnError(
                    f"no column named {name_or_index!r}"
                ) from None
        else:
            idx = name_or_index
            if not 0 <= idx < len(self.header):
                raise UnknownColumnError(f"column index {idx} out of range")
        return tuple(row[idx] for row in self.rows)

    def cells(self) -> Iterable[tuple[int, int, Cell]]:
        """Yield (row_index, col_index, cell) over all data cells."""
        for r, row in enumerate(self.rows):
            for c, cell in enumerate(row):
                yield r, c, cell


@dataclass(frozen=True)
class ChartRef:
    """A reference to one chart: stable id, optional image, optional table.

    The gold table is carried where a ground-truth table is known (for
    oracle backends and table-sourced pipelines); image-only charts carry
    just the uri.
    """

    id: str
    image_uri: str | None = None
    gold_table: Table | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("chart id must be non-empty")


def parse_linearized(text: str, title: str | None = None) -> Table:
    """Parse linearized table text into a Table.

    The first row is the header.  ``title`` is accepted out-of-band since
    the format itself never carries it.
    """
    if not text:
        raise EmptyInputError("linearized table text is empty")
    raw_rows = text.split(ROW_DELIMITER)
    header = raw_rows[0].split(CELL_DELIMITER)
    rows = []
    for i, raw_row in enumerate(raw_rows[1:], start=1):
        cells = raw_row.split(CELL_DELIMITER)
        if len(cells) != len(header):
            raise RaggedRowError(i, len(header), len(cells))
        rows.append([Cell(c) for c in cells])
    return Table(header, rows, title=title)


def serialize_linearized(table: Table) -> str:
    """Serialize a Table to linearized text, the exact inverse of parsing.

    Every header name and cell must be free of the reserved delimiters.
    The title is not serialized; transport it in a separate field.
    """
    for c, name in enumerate(table.header):
        if CELL_DELIMITER in name or ROW_DELIMITER in name:
            raise UnencodableCellError(0, c)
    for r, row in enumerate(table.rows, start=1):
        for c, cell in enumerate(row):
            if CELL_DELIMITER in cell.raw or ROW_DELIMITER in cell.raw:
                raise UnencodableCellError(r, c)
    lines = [CELL_DELIMITER.join(table.header)]
    for row in table.rows:
        lines.append(CELL_DELIMITER.join(cell.raw for cell in row))
    return ROW_DELIMITER.join(lines)


def numeric_column_indices(table: Table) -> list[int]:
    """Indices of columns whose every cell is numeric, year columns excluded.

    A column of nothing but year-like integers reads as an axis of time
    labels, not a measured series, so it does not count.  Used by trend
    checks that need "the" numeric column of a table.
    """
    out = []
    for idx in range(table.column_count):
        cells = table.column(idx)
        if not cells:
            continue
        numerics = [c.numeric for c in cells]
        if any(n is None for n in numerics):
            continue
        if all(n.is_year_like for n in numerics):
            continue
        out.append(idx)
    return out


def single_numeric_column(table: Table) -> int | None:
    """The index of the table's only numeric column, or None."""
    idxs = numeric_column_indices(table)
    return idxs[0] if len(idxs) == 1 else None
