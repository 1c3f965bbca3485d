"""Deterministic number rendering shared by reports and exports."""


def format_float(x):
    """Up to 9 significant digits, trailing zeros trimmed; stable across runs."""
    return f"{x:.9g}"
