import io

import pytest

from frontier_evt.core import Dataset
from frontier_evt.csvio import load_csv, parse_csv, parse_csv_text, read_dataset, write_dataset
from frontier_evt.errors import CsvParseError


def test_single_row():
    ds = parse_csv_text("x1,y\n1,2\n")
    assert ds.n == 1 and ds.input_dim == 1 and ds.y[0] == 2


def test_two_inputs_and_free_header_names():
    ds, header = read_dataset(io.StringIO("labour,capital,mail\n1,2,3\n4,5,6\n\n"))
    assert ds.input_dim == 2 and ds.n == 2
    assert header == ["labour", "capital", "mail"]


def test_ragged_row_reports_line():
    with pytest.raises(CsvParseError) as err:
        parse_csv_text("x1,y\n1,2\n3\n")
    assert err.value.line == 3


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("x1,y\n1,abc\n", 2, 2),
        ("x1,y\n1,2\n-1,2\n", 3, 1),
        ("x1,y\n1,inf\n", 2, 2),
        ("x1,y\n ,2\n", 2, 1),
    ],
)
def test_bad_cells(text, line, col):
    with pytest.raises(CsvParseError) as err:
        parse_csv_text(text)
    assert (err.value.line, err.value.column) == (line, col)


@pytest.mark.parametrize("text", ["", "x1,y\n", "y\n1\n"])
def test_empty_or_headless(text):
    with pytest.raises(CsvParseError):
        parse_csv_text(text)


def test_round_trip_is_exact(tmp_path):
    ds = Dataset([[0.1, 1 / 3], [2.0, 1e-17]], [0.7, 123456.789])
    path = tmp_path / "d.csv"
    with open(path, "w", newline="") as fh:
        write_dataset(ds, fh)
    assert parse_csv(path) == ds
    assert load_csv(path)[1] == ["x1", "x2", "y"]


def test_byte_order_mark(tmp_path):
    path = tmp_path / "bom.csv"
    path.write_bytes("\ufeffx1,y\n1,2\n".encode("utf-8"))
    assert load_csv(path)[1] == ["x1", "y"]
