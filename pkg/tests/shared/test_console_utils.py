from shared.console_utils import ConsoleFormatter


class TestConsoleFormatter:
    def test_format_value(self):
        assert ConsoleFormatter.format_value(0.429438123) == "0.429438"
        assert ConsoleFormatter.format_value(True) == "True"
        assert ConsoleFormatter.format_value(7) == "7"

    def test_check_table(self):
        """The last line counts passing checks"""
        rows = [
            {
                "name": "eps_star",
                "value": 0.4294,
                "expected": 0.4294,
                "tolerance": 1e-6,
                "passed": True,
            },
            {
                "name": "alpha",
                "value": 0.6,
                "expected": 0.56,
                "tolerance": 1e-3,
                "passed": False,
            },
        ]
        table = ConsoleFormatter.format_check_table(rows, title="checks")
        assert table.splitlines()[-1] == "1/2 checks passed"
        assert "PASS" in table and "FAIL" in table

    def test_informational_rows_not_graded(self):
        """A row with passed = None is shown as INFO and left out of the count"""
        rows = [
            {
                "name": "eps_star",
                "value": 0.42944,
                "expected": 0.42944,
                "tolerance": 1e-5,
                "passed": True,
            },
            {
                "name": "reference",
                "value": 0.893,
                "expected": 0.8496,
                "tolerance": "reference",
                "passed": None,
            },
        ]
        table = ConsoleFormatter.format_check_table(rows)
        assert table.splitlines()[-1] == "1/1 checks passed"
        assert "INFO" in table
        assert "FAIL" not in table
