"""Independent brute-force reference implementations.

These deliberately avoid the package's evaluation machinery (no prefix sums,
no pruning heuristics, no vertex enumeration) so they can serve as oracles
for it.  They are unoptimized and only suitable for small inputs.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor

from maxvar.core import DiscreteFunction, Rounding, StepFunction

ZERO = Fraction(0)


def naive_budget(alpha: Fraction, radius: int, rounding: Rounding) -> int:
    if rounding is Rounding.CEIL:
        return ceil(alpha * radius)
    return floor(alpha * radius)


def naive_maximal_discrete(f: DiscreteFunction, x: int, alpha: Fraction,
                           rounding: Rounding = Rounding.CEIL) -> Fraction:
    """Double loop over (radius, center) with direct sums; zero tails only."""
    assert f.is_zero_tails
    values = {f.support_start + i: v for i, v in enumerate(f.values)}
    total = sum(values.values(), ZERO)
    if total == 0:
        return ZERO

    def window_average(y: int, r: int) -> Fraction:
        s = sum(values.get(i, ZERO) for i in range(y - r, y + r + 1))
        return Fraction(s, 2 * r + 1)

    lo = f.support_start
    hi = f.support_end - 1
    cover_radius = max(abs(x - lo), abs(x - hi))
    best = max(values.get(x, ZERO), window_average(x, cover_radius))
    # beyond this radius every average falls below the seed
    radius_cap = 0
    while Fraction(total, 2 * radius_cap + 1) >= best:
        radius_cap += 1
    for r in range(radius_cap + 1):
        b = naive_budget(alpha, r, rounding)
        for y in range(x - b, x + b + 1):
            best = max(best, window_average(y, r))
    return best


def naive_centered_discrete(f: DiscreteFunction, x: int) -> Fraction:
    """Direct centered supremum: sup over r of the centered window average."""
    assert f.is_zero_tails
    values = {f.support_start + i: v for i, v in enumerate(f.values)}
    total = sum(values.values(), ZERO)
    if total == 0:
        return ZERO
    lo, hi = f.support_start, f.support_end - 1
    best = ZERO
    r = 0
    while True:
        s = sum(values.get(i, ZERO) for i in range(x - r, x + r + 1))
        best = max(best, Fraction(s, 2 * r + 1))
        if r > max(abs(x - lo), abs(x - hi)) and Fraction(total, 2 * r + 1) < best:
            return best
        r += 1


def single_piece_closed_form(a: Fraction, b: Fraction, h: Fraction,
                             x: Fraction, alpha: Fraction) -> Fraction:
    """Operator value of ``h`` on ``[a, b)`` at x outside the support.

    The optimum fully covers the support, so the value is the support mass
    divided by the width of the narrowest admissible window containing
    ``[a, b]``; that window either is the support itself, extends toward x on
    the near cone boundary, or (aperture above one) extends away from x.
    """
    if a <= x < b:
        raise ValueError("closed form needs x outside the support")
    if x < a:
        return single_piece_closed_form(-b, -a, h, -x, alpha)
    if (1 - alpha) * a + (1 + alpha) * b >= 2 * x:
        return h
    widths = [max(b, (2 * x - (1 - alpha) * a) / (1 + alpha)) - a]
    if alpha > 1:
        widths.append(b - (2 * x - (1 + alpha) * b) / (1 - alpha))
    return h * (b - a) / min(widths)


def grid_search_step_lower_bound(f: StepFunction, x: Fraction, alpha: Fraction,
                                 levels: int = 5) -> list[Fraction]:
    """Best admissible window average per dyadic grid refinement level.

    Each level's value is a true window average, so the list is a chain of
    lower bounds for the operator value, nondecreasing by grid nesting.
    """
    t_lo, t_hi = f.hull
    span_lo = min(t_lo, x) - (t_hi - t_lo) - 1
    span_hi = max(t_hi, x) + (t_hi - t_lo) + 1
    out = []
    for level in range(levels):
        cells = 8 * 2 ** level
        step = (span_hi - span_lo) / cells
        points = [span_lo + k * step for k in range(cells + 1)]
        best = ZERO
        for i, l in enumerate(points):
            for r in points[i + 1:]:
                if (1 + alpha) * l + (1 - alpha) * r <= 2 * x <= (1 - alpha) * l + (1 + alpha) * r:
                    best = max(best, f.integral_over(l, r) / (r - l))
        out.append(best)
    return out
