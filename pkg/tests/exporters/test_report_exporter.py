import json

import numpy as np
import pandas as pd

from src.quorumlab.core.values import Value
from src.quorumlab.exporters.report_exporter import ReportExporter, to_jsonable


class TestToJsonable:
    def test_values_become_wire_pairs(self):
        assert to_jsonable({"read": Value(2, 1)}) == {"read": [2, 1]}
        assert to_jsonable([Value.initial()]) == [[0, None]]

    def test_value_keys_become_strings(self):
        data = {Value(1, 0): frozenset({3, 1}), Value.initial(): set()}
        assert to_jsonable(data) == {"(1,w0)": [1, 3], "(0,⊥)": []}

    def test_sets_of_values_are_sorted(self):
        assert to_jsonable({Value(2, 0), Value(1, 1)}) == [[1, 1], [2, 0]]

    def test_numpy_scalars(self):
        converted = to_jsonable({"rows": np.int64(4), "share": np.float64(0.5)})
        assert converted == {"rows": 4, "share": 0.5}
        assert type(converted["rows"]) is int


class TestReportExporter:
    def test_json_report(self, tmp_path):
        exporter = ReportExporter(tmp_path)
        path = exporter.export_dict_json({"returns": {Value(1, 1): (4, 5)}, "b": 1}, "report")
        text = path.read_text(encoding="utf-8")
        assert path == tmp_path / "report.json"
        assert json.loads(text) == {"b": 1, "returns": {"(1,w1)": [4, 5]}}
        assert text.index('"b"') < text.index('"returns"')

    def test_machine_and_text_formats(self, tmp_path):
        exporter = ReportExporter(tmp_path)
        assert exporter.export_report({"ok": True}, ["ok"], "r", "machine").suffix == ".json"
        text = exporter.export_report({"ok": True}, ["line one", "line two"], "r", "text")
        assert text.read_text(encoding="utf-8") == "line one\nline two\n"

    def test_table_cells_use_value_form(self, tmp_path):
        table = pd.DataFrame({"op": [0, 1], "returned": [Value(1, 0), Value.initial()], "note": ["a", None]})
        path = ReportExporter(tmp_path).export_table_csv(table, "reads")
        loaded = pd.read_csv(path)
        assert list(loaded["returned"]) == ["(1,w0)", "(0,⊥)"]
        assert list(loaded["op"]) == [0, 1]
        assert isinstance(table.loc[0, "returned"], Value)

    def test_creates_the_output_directory(self, tmp_path):
        target = tmp_path / "nested" / "out"
        ReportExporter(target)
        assert target.is_dir()
