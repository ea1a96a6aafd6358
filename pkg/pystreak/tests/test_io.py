"""
Tests for table rendering and reading
"""
import io
import json

import numpy as np
import pandas as pd
import pytest

from pystreak.errors import InputFormatError, ParameterError
from pystreak.io import read_table, render_table, write_table

FRAME = pd.DataFrame({"n": [3, 4], "expected": [5 / 12, np.nan], "label": ["a", "b"]})


def test_render_csv():
    text = render_table(FRAME, precision=3)
    assert text.splitlines() == ["n,expected,label", "3,0.417,a", "4,,b"]


def test_render_json():
    meta = {"n": np.int64(3), "p": [0.5]}
    payload = json.loads(render_table(FRAME, fmt="json", meta=meta, precision=4))
    assert payload["meta"] == {"n": 3, "p": [0.5]}
    assert payload["rows"][0] == {"n": 3, "expected": 0.4167, "label": "a"}
    assert payload["rows"][1]["expected"] is None


def test_render_unknown_format():
    with pytest.raises(ParameterError):
        render_table(FRAME, fmt="xml")


def test_write_to_stream_and_path(temp_path):
    stream = io.StringIO()
    write_table(FRAME, stream)
    assert stream.getvalue().startswith("n,expected,label\n")
    write_table(FRAME, temp_path)
    assert pd.read_csv(temp_path)["n"].tolist() == [3, 4]


def test_read_table_strips_header():
    frame = read_table(io.StringIO(" player , outcomes\na,HHT\n"), ("player", "outcomes"))
    assert list(frame.columns) == ["player", "outcomes"]
    assert frame["outcomes"].iloc[0] == "HHT"


def test_read_table_missing_column():
    with pytest.raises(InputFormatError, match="outcomes"):
        read_table(io.StringIO("player\na\n"), ("player", "outcomes"))


def test_read_table_missing_file():
    with pytest.raises(InputFormatError):
        read_table("no_such_table.csv", ("player",))
