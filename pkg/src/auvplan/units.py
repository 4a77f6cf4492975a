"""Unit helpers. Everything inside the package is SI."""

KNOT = 0.514444  # m/s


def knots(value: float) -> float:
    """Convert knots to m/s."""
    return value * KNOT


def parse_speed(value) -> float:
    """Read a speed given as a number (m/s) or a string such as ``"5.5 kt"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text.endswith("kt"):
            return float(text[:-2]) * KNOT
        if text.endswith("m/s"):
            return float(text[:-3])
        return float(text)
    return float(value)
