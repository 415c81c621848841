"""Console output formatting utilities."""

import sys
from typing import Any, Dict, List, Optional, Sequence


class ConsoleFormatter:
    """Utilities for formatting console output."""

    @staticmethod
    def section_separator(char: str = "=", width: int = 80) -> str:
        """Create a section separator line."""
        return char * width

    @staticmethod
    def section_header(title: str, char: str = "=", width: int = 80) -> str:
        """Create a centered section header."""
        separator = char * width
        return f"\n{separator}\n{title.center(width)}\n{separator}"

    @staticmethod
    def success_message(message: str) -> str:
        """Format a success message with green color if supported."""
        if sys.stdout.isatty():
            return f"\033[92m✓ {message}\033[0m"
        return f"✓ {message}"

    @staticmethod
    def error_message(message: str) -> str:
        """Format an error message with red color if supported."""
        if sys.stdout.isatty():
            return f"\033[91m✗ {message}\033[0m"
        return f"✗ {message}"

    @staticmethod
    def format_value(value: Any) -> str:
        """Floats with 6 significant digits, everything else via str()."""
        if isinstance(value, bool):
            return str(value)
        if isinstance(value, float):
            return f"{value:.6g}"
        return str(value)

    @staticmethod
    def _verdict(passed: Optional[bool]) -> str:
        if passed is None:
            return "INFO"
        return "PASS" if passed else "FAIL"

    @staticmethod
    def format_check_table(
        rows: Sequence[Dict[str, Any]], title: Optional[str] = None, width: int = 88
    ) -> str:
        """
        Format anchor checks as an aligned PASS/FAIL table.

        Args:
            rows: Dicts with "name", "value", "expected", "tolerance" and "passed";
                a "passed" of None marks an informational row that is not graded
            title: Optional title for the table
            width: Width of the separators

        Returns:
            Formatted table string ending with a pass count
        """
        headers = ["check", "value", "expected", "tolerance", "result"]
        body: List[List[str]] = [
            [
                str(row["name"]),
                ConsoleFormatter.format_value(row["value"]),
                ConsoleFormatter.format_value(row["expected"]),
                str(row["tolerance"]),
                ConsoleFormatter._verdict(row["passed"]),
            ]
            for row in rows
        ]
        widths = [
            max([len(h), *(len(r[i]) for r in body)]) for i, h in enumerate(headers)
        ]

        def line(cells: List[str]) -> str:
            return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

        lines = []
        if title:
            lines.append(ConsoleFormatter.section_header(title, "=", width))
        lines.append(line(headers))
        lines.append(ConsoleFormatter.section_separator("-", width))
        for cells in body:
            text = line(cells)
            if cells[-1] == "PASS":
                lines.append(ConsoleFormatter.success_message(text))
            elif cells[-1] == "FAIL":
                lines.append(ConsoleFormatter.error_message(text))
            else:
                lines.append(f"  {text}")
        graded = [row for row in rows if row["passed"] is not None]
        passed = sum(1 for row in graded if row["passed"])
        lines.append(ConsoleFormatter.section_separator("-", width))
        lines.append(f"{passed}/{len(graded)} checks passed")
        return "\n".join(lines)
