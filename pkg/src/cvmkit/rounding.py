"""The single rounding policy behind every reported number.

All displayed percentages and ratings in this package round halves away from
zero (the spreadsheet convention): 96.5 -> 97, -2.5 -> -3.  Python's built-in
``round`` rounds halves to even, which would disagree with published tables on
boundary cells, so nothing in the reporting path may call it.  Internal
computation always keeps full precision; rounding happens exactly once, at the
formatting edge, through the helpers below.
"""

from __future__ import annotations

import math

__all__ = [
    "round_half_away",
    "format_rating",
    "format_percent",
    "format_score",
]


def round_half_away(value: float, decimals: int = 0) -> float | int:
    """Round ``value`` to ``decimals`` places, halves away from zero.

    Returns an ``int`` when ``decimals`` is 0, otherwise a ``float``.  Ties are
    decided on the binary value actually passed in; a value that prints as
    ``x.5`` but is stored slightly below it rounds down, like every other
    binary float.
    """
    scale = 10.0**decimals
    scaled = value * scale
    magnitude = math.floor(abs(scaled) + 0.5)
    rounded = math.copysign(magnitude, scaled)
    if decimals == 0:
        return int(rounded)
    return rounded / scale


def format_rating(value: float) -> str:
    """One-decimal rating display, e.g. 7.35 -> ``'7.4'``."""
    return f"{round_half_away(value, 1):.1f}"


def format_percent(value: float) -> str:
    """Integer percent display of an already-scaled value, e.g. 96.1 -> ``'96'``."""
    return str(round_half_away(value))


def format_score(value: float, decimals: int = 1) -> str:
    """Fixed-decimal display for scores such as NPS (one decimal by default)."""
    rounded = round_half_away(value, decimals)
    return f"{rounded:.{decimals}f}"
