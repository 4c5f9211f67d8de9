"""Collects one line per acceptance criterion for the terminal summary."""

LINES: list[str] = []


def record(number: int, title: str, passed: bool, detail: str) -> None:
    mark = "PASS" if passed else "FAIL"
    LINES.append(f"[{mark}] criterion {number:>2}: {title} -- {detail}")
