import json

import pandas as pd
import pytest

from utils.export_helper import add_total_row, render_text_table, write_table, write_workbook


@pytest.fixture
def results():
    return pd.DataFrame({
        'claim': ["número de invariantes", "Z_mu verificadas"],
        'target': ["T(4)", "T(4)"],
        'checks': [3, 4],
        'passed': [True, False],
    })


def test_total_row(results):
    total = add_total_row(results)
    assert len(total) == 3
    last = total.iloc[-1]
    assert last['claim'] == "TOTAL"
    assert last['passed'] == "1/2"
    assert last['checks'] == 7


def test_total_row_excludes_columns(results):
    total = add_total_row(results, exclude_columns=['checks'])
    assert total.iloc[-1]['checks'] == ""


def test_total_row_on_empty_frame():
    empty = pd.DataFrame(columns=['claim', 'passed'])
    assert add_total_row(empty).empty


def test_text_table(results):
    text = render_text_table(results)
    assert "número de invariantes" in text
    assert render_text_table(pd.DataFrame()) == "(sin filas)"


def test_write_csv(tmp_path, results):
    path = tmp_path / "salida" / "tabla.csv"
    write_table(results, str(path))
    assert pd.read_csv(path)['checks'].tolist() == [3, 4]


def test_write_json_keeps_accents(tmp_path, results):
    path = tmp_path / "tabla.json"
    write_table(results, str(path))
    text = path.read_text(encoding='utf-8')
    assert "número" in text
    assert json.loads(text)[1]['passed'] is False


def test_write_xlsx(tmp_path, results):
    pytest.importorskip('openpyxl')
    path = tmp_path / "tabla.xlsx"
    write_table(results, str(path), sheet_name="certificación/T(4)")
    sheets = pd.read_excel(path, sheet_name=None)
    assert list(sheets) == ["certificación_T(4)"]


def test_workbook(tmp_path, results):
    pytest.importorskip('openpyxl')
    path = tmp_path / "libro.xlsx"
    write_workbook({'uno': results, 'vacía': results.iloc[0:0]}, str(path))
    assert list(pd.read_excel(path, sheet_name=None)) == ['uno']


def test_unsupported_extension(tmp_path, results):
    with pytest.raises(ValueError):
        write_table(results, str(tmp_path / "tabla.txt"))
    with pytest.raises(ValueError):
        write_workbook({'uno': results}, str(tmp_path / "libro.csv"))
