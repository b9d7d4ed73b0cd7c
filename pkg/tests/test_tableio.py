from spintop import tableio


def test_format_float_zero():
    assert tableio.format_float(0.0) == "0"
    assert tableio.format_float(-0.0) == "0"


def test_format_float_midrange_uses_general():
    assert tableio.format_float(0.094) == "0.094"
    assert tableio.format_float(1234.5) == "1234.5"
    assert tableio.format_float(-0.001) == "-0.001"


def test_format_float_extremes_use_scientific():
    assert tableio.format_float(4.44e-14) == "4.440000000000e-14"
    assert tableio.format_float(2.6e9) == "2.600000000000e+09"
    assert tableio.format_float(1e6) == "1.000000000000e+06"
    assert tableio.format_float(9.99e-4) == "9.990000000000e-04"


def test_format_cell_types():
    assert tableio.format_cell(True) == "true"
    assert tableio.format_cell(False) == "false"
    assert tableio.format_cell(7) == "7"
    assert tableio.format_cell("label") == "label"


def test_write_rows_layout(tmp_path):
    path = tmp_path / "t.csv"
    tableio.write_rows(path, ("a", "b"), [(1, 0.5), ("x", 2.6e9)])
    text = path.read_text()
    assert text == "a,b\n1,0.5\nx,2.600000000000e+09\n"


def test_write_rows_creates_parent_dirs(tmp_path):
    path = tmp_path / "sub" / "dir" / "t.csv"
    tableio.write_rows(path, ("a",), [(1,)])
    assert path.read_text() == "a\n1\n"
