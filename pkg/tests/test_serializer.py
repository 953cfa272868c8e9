import math
from pathlib import Path

import pytest

from dickemetrology import Content, CsvSerializer, SimulationError, SimulationErrorType, Table, write_atomic
from dickemetrology._serializer import format_cell


@pytest.mark.parametrize(
    "value, text",
    [
        (0.1, "0.1"),
        (1e-300, "1e-300"),
        (1 / 3, "0.3333333333333333"),
        (3, "3"),
        (math.nan, "nan"),
        (-math.inf, "-inf"),
        (None, ""),
        ("NUMERICAL: boom", "NUMERICAL: boom"),
        (True, "1"),
    ],
)
def test_format_cell(value, text):
    assert format_cell(value) == text


def test_float_cells_round_trip():
    for value in (0.1 + 0.2, 2.0 / 3.0, 1.2345678901234567e-12):
        assert float(format_cell(value)) == value


def test_csv_layout():
    table = Table(columns=["x", "y"], rows=[[1, 0.5], [2, math.nan]])
    content = CsvSerializer().serialize(table, {"command": "gap", "config": "{}"})
    assert content.data.decode() == (
        "# command: gap\n# config: {}\nx,y\n1,0.5\n2,nan\n"
    )
    assert b"\r" not in content.data


def test_serialization_is_deterministic():
    table = Table(columns=["a"], rows=[[0.1], [0.2]])
    first = CsvSerializer().serialize(table, {"k": "v"})
    second = CsvSerializer().serialize(table, {"k": "v"})
    assert first.data == second.data


def test_row_width_must_match_columns():
    with pytest.raises(SimulationError) as exc_info:
        Table(columns=["a", "b"], rows=[[1.0]])
    assert exc_info.value.type is SimulationErrorType.INVALID_ARGUMENT


def test_table_column():
    table = Table(columns=["a", "b"], rows=[[1, 2], [3, 4]])
    assert table.column("b") == [2, 4]


def test_write_atomic(tmp_path: Path):
    target = tmp_path / "nested" / "out.csv"
    write_atomic(target, Content(data=b"x\n1\n"))
    assert target.read_bytes() == b"x\n1\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.csv"]


def test_write_atomic_into_a_file_is_an_io_error(tmp_path: Path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    with pytest.raises(SimulationError) as exc_info:
        write_atomic(blocker / "out.csv", Content(data=b""))
    assert exc_info.value.type is SimulationErrorType.IO
    assert exc_info.value.exit_code == 2
