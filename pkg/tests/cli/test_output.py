import json
import math

from cli.output import OutputDir, round_sig, sha256_of, to_csv, to_json


class TestRounding:
    def test_twelve_significant_digits(self):
        assert round_sig(0.123456789012345) == 0.123456789012
        assert round_sig(1234567.891234567) == 1234567.89123

    def test_nested(self):
        data = {"a": [1.0 / 3.0, {"b": 2.0 / 3.0}], "c": 7, "d": None}
        assert round_sig(data) == {
            "a": [0.333333333333, {"b": 0.666666666667}],
            "c": 7,
            "d": None,
        }

    def test_non_finite_becomes_null(self):
        assert round_sig(math.inf) is None
        assert json.loads(to_json({"x": math.nan})) == {"x": None}

    def test_bools_untouched(self):
        assert round_sig(True) is True


class TestCsv:
    def test_header_and_cells(self):
        text = to_csv([{"eps": 0.1, "ok": True, "n": None}], ["eps", "ok", "n"])
        assert text == "eps,ok,n\n0.1,true,\n"

    def test_columns_from_first_row(self):
        assert to_csv([{"y": 1, "r1": 0.5}]).splitlines()[0] == "y,r1"

    def test_empty(self):
        assert to_csv([], ["a"]) == "a\n"


class TestOutputDir:
    def test_digests(self, tmp_path):
        out = OutputDir(tmp_path / "results")
        path = out.json("report.json", {"eps_star": 0.5})
        assert out.digests == {str(path): sha256_of(path)}

    def test_jsonl(self, tmp_path):
        out = OutputDir(tmp_path)
        path = out.jsonl("trace.jsonl", [{"round": 0}, {"round": 1}])
        lines = path.read_text().splitlines()
        assert [json.loads(line)["round"] for line in lines] == [0, 1]
