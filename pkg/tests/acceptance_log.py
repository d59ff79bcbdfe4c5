"""Collects one line per acceptance criterion for the terminal summary."""

RESULTS = {}


def record(number, title, passed, detail):
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    RESULTS[number] = line
    print(line)
    return passed
