from __future__ import annotations

import csv
import io
import logging
import math
import os
import tempfile
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Union

from ._common import SimulationError, SimulationErrorType

logger = logging.getLogger(__name__)

Cell = Union[float, int, str, None]


@dataclass(frozen=True)
class Table:
    """
    Rows of output data with named columns, in the order they will be written.
    """

    columns: Sequence[str]
    """Column names."""

    rows: Sequence[Sequence[Cell]]
    """One sequence of cells per row; each row has one cell per column."""

    def __post_init__(self) -> None:
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise SimulationError(
                    f"row {i} has {len(row)} cells but the table has {width} columns",
                    type=SimulationErrorType.INVALID_ARGUMENT,
                )

    def column(self, name: str) -> list[Cell]:
        index = list(self.columns).index(name)
        return [row[index] for row in self.rows]


@dataclass(frozen=True)
class Content:
    """
    A container for a map of headers and a byte array of data.

    It is what a :py:class:`Serializer` produces and what gets written to disk.
    """

    headers: Mapping[str, str] = field(default_factory=dict)
    """
    Metadata written ahead of the data, in insertion order.
    """

    data: bytes = b""
    """Serialized table body."""


class Serializer(Protocol):
    """
    Serializer turns a :py:class:`Table` into :py:class:`Content`.
    """

    def serialize(self, table: Table, headers: Mapping[str, str]) -> Content:
        """Serialize encodes a table, with header metadata, into a Content."""
        ...


def format_cell(value: Cell) -> str:
    """
    Shortest round-trip text for a cell: ``repr`` for floats, ``nan``/``inf`` spelled out,
    the empty string for ``None``.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


class CsvSerializer:
    """
    Writes ``#``-prefixed ``key: value`` header lines followed by a CSV body with LF line
    endings. Equal tables and headers always give equal bytes.
    """

    def serialize(self, table: Table, headers: Mapping[str, str]) -> Content:
        buffer = io.StringIO()
        for key, value in headers.items():
            buffer.write(f"# {key}: {value}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_cell(cell) for cell in row])
        return Content(headers=dict(headers), data=buffer.getvalue().encode("utf-8"))


def write_atomic(path: Union[str, Path], content: Content) -> Path:
    """
    Write ``content.data`` to ``path`` through a temporary file in the same directory and
    an atomic rename. The temporary file is removed if anything fails.
    """
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(
            dir=target.parent, prefix=f".{target.name}.", suffix=".tmp"
        )
    except OSError as err:
        raise SimulationError(
            f"cannot create output in {target.parent}: {err}",
            type=SimulationErrorType.IO,
        ) from err
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(content.data)
        os.replace(tmp_name, target)
    except OSError as err:
        Path(tmp_name).unlink(missing_ok=True)
        raise SimulationError(
            f"cannot write {target}: {err}", type=SimulationErrorType.IO
        ) from err
    logger.debug("wrote %d bytes to %s", len(content.data), target)
    return target
