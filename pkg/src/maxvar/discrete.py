"""Exact evaluation of the discrete nontangential maximal operator.

The operator value at a site x is the supremum of window averages
``sum(f over [y-R .. y+R]) / (2R+1)`` over all radii R >= 0 and centers y
whose deviation ``|x - y|`` stays within the aperture budget (ceil, floor or
exact comparison against ``alpha * R``).  For zero-tail inputs the supremum
is attained and computed exactly; with nonzero tails a certified enclosure
is returned instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd

from .core import (
    ZERO,
    DiscreteFunction,
    DiscreteWindow,
    Interval,
    OperatorParams,
    Rounding,
    as_rational,
)


@dataclass(frozen=True)
class PointEvaluation:
    """One operator value plus where the supremum lives.

    Exactly one of ``attaining_window`` / ``attained_at_tail_limit`` describes
    the supremum when the evaluation is exact; when tails force an enclosure,
    ``value <= true supremum <= enclosure_upper``.  The window is discrete for
    the integer operator and an interval for the continuous one.
    """

    value: Fraction
    attaining_window: DiscreteWindow | Interval | None
    attained_at_tail_limit: bool
    enclosure_upper: Fraction

    @property
    def is_exact(self) -> bool:
        return self.enclosure_upper == self.value

    def to_json_dict(self) -> dict:
        from .core import rational_to_str

        return {
            "value": rational_to_str(self.value),
            "attaining_window": self.attaining_window.to_json_dict() if self.attaining_window else None,
            "attained_at_tail_limit": self.attained_at_tail_limit,
            "enclosure_upper": rational_to_str(self.enclosure_upper),
        }


def admissible(x: int, window: DiscreteWindow, params: OperatorParams) -> bool:
    """Whether the window's center deviation from x fits the aperture budget."""
    deviation = abs(x - window.center)
    if params.rounding is Rounding.EXACT:
        return deviation <= params.alpha * window.radius
    return deviation <= params.deviation_budget(window.radius)


def tail_limit(f: DiscreteFunction, params: OperatorParams) -> Fraction:
    """Limit superior of admissible window averages as the radius grows.

    Closed form ``(A+B)/2 + min(alpha,1)*|B-A|/2`` with A, B the two tail
    values; validated against a large-radius scan in the test suite.  It is a
    universal lower bound for the maximal function and is independent of x.
    """
    a, b = f.left_tail, f.right_tail
    return (a + b) / 2 + min(params.alpha, Fraction(1)) * abs(b - a) / 2


def search_radius_bound(f: DiscreteFunction, x: int, current_best: Fraction,
                        params: OperatorParams) -> int:
    """Radius beyond which no window average can reach ``current_best``.

    Any window average is at most ``S / (2R+1)`` with S the total mass, so the
    smallest R with ``2R+1 >= S / current_best`` works.  The evaluation point
    and params are part of the interface but do not affect the bound.
    """
    del x, params
    current_best = as_rational(current_best)
    if not f.is_zero_tails:
        raise ValueError("search radius bounds require zero tails")
    if current_best <= 0:
        raise ValueError("current_best must be positive")
    quotient = f.total_mass() / current_best
    return max(0, ceil((quotient - 1) / 2))


# ---------------------------------------------------------------------------
# integer fast core
# ---------------------------------------------------------------------------


class _ScaledFunction:
    """Integer rescaling of a DiscreteFunction: all comparisons cross-multiply."""

    __slots__ = ("start", "n", "vals", "prefix", "total", "left", "right", "denominator")

    def __init__(self, f: DiscreteFunction):
        den = 1
        for v in (*f.values, f.left_tail, f.right_tail):
            den = den * v.denominator // gcd(den, v.denominator)
        self.denominator = den
        self.start = f.support_start
        self.n = len(f.values)
        self.vals = [int(v * den) for v in f.values]
        prefix = [0]
        acc = 0
        for v in self.vals:
            acc += v
            prefix.append(acc)
        self.prefix = prefix
        self.total = acc
        self.left = int(f.left_tail * den)
        self.right = int(f.right_tail * den)

    def value(self, site: int) -> int:
        if site < self.start:
            return self.left
        if site >= self.start + self.n:
            return self.right
        return self.vals[site - self.start]

    def window_sum(self, lo: int, hi: int) -> int:
        total = 0
        end = self.start + self.n
        if lo < self.start:
            total += self.left * (min(hi + 1, self.start) - lo)
        if hi >= end:
            total += self.right * (hi + 1 - max(lo, end))
        a = max(lo, self.start) - self.start
        b = min(hi + 1, end) - self.start
        if a < b:
            total += self.prefix[b] - self.prefix[a]
        return total


def _budget(params: OperatorParams, radius: int) -> int:
    return params.deviation_budget(radius)


def _eval_zero_tail(sf: _ScaledFunction, x: int, params: OperatorParams) -> tuple[int, int, DiscreteWindow]:
    """Exact supremum for a zero-tail function.

    Returns ``(num, win_len)`` meaning value ``num / (denominator * win_len)``
    plus the attaining window under the deterministic tie order: smallest
    radius, then smallest ``|y-x|``, then smallest y.
    """
    if sf.total == 0:
        return 0, 1, DiscreteWindow(x, 0)
    start, n = sf.start, sf.n
    end = start + n - 1
    fx = sf.value(x)
    # cutoff seed: the better of f(x) and the centered window covering every value
    r_cover = max(abs(x - start), abs(x - end))
    cb_num, cb_len = sf.total, 2 * r_cover + 1
    if fx * cb_len > cb_num:
        cb_num, cb_len = fx, 1
    best_num, best_len = fx, 1
    best_y, best_r = x, 0
    radius = 1
    while True:
        w = 2 * radius + 1
        if sf.total * cb_len < cb_num * w:
            break
        b = _budget(params, radius)
        ylo = max(x - b, start - radius)
        yhi = min(x + b, end + radius)
        if ylo <= yhi:
            s = sf.window_sum(ylo - radius, ylo + radius)
            y = ylo
            while True:
                if s * best_len > best_num * w:
                    best_num, best_len, best_y, best_r = s, w, y, radius
                elif best_r == radius and s * best_len == best_num * w:
                    if (abs(y - x), y) < (abs(best_y - x), best_y):
                        best_y = y
                if y == yhi:
                    break
                s += sf.value(y + radius + 1) - sf.value(y - radius)
                y += 1
            if best_num * cb_len > cb_num * best_len:
                cb_num, cb_len = best_num, best_len
        radius += 1
    return best_num, best_len, DiscreteWindow(best_y, best_r)


def _support_excess(sf: _ScaledFunction, split_at_start: bool) -> int:
    """Scaled mass of f above the two-level tail step split at either hull end."""
    level = sf.right if split_at_start else sf.left
    return sum(v - level for v in sf.vals if v > level)


def _far_step_bound(x: int, split: int, a: Fraction, b: Fraction,
                    alpha: Fraction, r_search: int) -> Fraction:
    """Upper bound for admissible averages of the two-level step beyond r_search.

    The extreme-center count is at most ``(1+alpha)R + c`` (the +1 ceiling slop
    is folded into c), a Mobius function of R whose supremum over R > r_search
    is reached at R = r_search + 1 or in the limit (1+alpha)/2.
    """
    if a == b:
        return a
    hi, lo = (b, a) if b > a else (a, b)
    c = Fraction(x - split + 2) if b > a else Fraction(split - x + 1)
    one_plus = 1 + alpha
    r1 = r_search + 1
    frac = max((one_plus * r1 + c) / (2 * r1 + 1), one_plus / 2)
    frac = min(Fraction(1), max(ZERO, frac))
    return lo + (hi - lo) * frac


def _eval_with_tails(f: DiscreteFunction, sf: _ScaledFunction, x: int,
                     params: OperatorParams) -> PointEvaluation:
    """Certified enclosure: near windows scanned exactly, far windows bounded.

    Far windows are dominated by the two-level tail step plus the support
    excess D, giving an upper bound that converges to the tail limit; the scan
    radius doubles until the enclosure width is within enclosure_epsilon.
    """
    limit = tail_limit(f, params)
    den = sf.denominator
    start, n = sf.start, sf.n
    end = start + n - 1 if n else start
    excess = (
        (f.support_start, Fraction(_support_excess(sf, True), den)),
        (f.support_end, Fraction(_support_excess(sf, False), den)),
    )
    best_num, best_len = sf.value(x), 1
    best_y, best_r = x, 0
    r_done = 0
    r_search = max(16, abs(x - start) + n, abs(x - end) + n)
    for _ in range(64):
        for radius in range(r_done + 1, r_search + 1):
            w = 2 * radius + 1
            b = _budget(params, radius)
            ylo, yhi = x - b, x + b
            s = sf.window_sum(ylo - radius, ylo + radius)
            y = ylo
            while True:
                if s * best_len > best_num * w:
                    best_num, best_len, best_y, best_r = s, w, y, radius
                elif best_r == radius and s * best_len == best_num * w:
                    if (abs(y - x), y) < (abs(best_y - x), best_y):
                        best_y = y
                if y == yhi:
                    break
                s += sf.value(y + radius + 1) - sf.value(y - radius)
                y += 1
        r_done = r_search
        best_finite = Fraction(best_num, den * best_len)
        value = max(best_finite, limit)
        width = min(
            max(ZERO, _far_step_bound(x, split, f.left_tail, f.right_tail, params.alpha, r_search)
                + d / (2 * r_search + 3) - value)
            for split, d in excess
        )
        if width <= params.enclosure_epsilon:
            window = DiscreteWindow(best_y, best_r) if best_finite >= limit else None
            return PointEvaluation(
                value=value,
                attaining_window=window,
                attained_at_tail_limit=limit > best_finite,
                enclosure_upper=value + width,
            )
        r_search *= 2
    raise RuntimeError("enclosure failed to converge; this is a bug")


def maximal_at(f: DiscreteFunction, x: int, params: OperatorParams) -> PointEvaluation:
    """Evaluate the nontangential maximal operator at one site."""
    sf = _ScaledFunction(f)
    return _maximal_at_scaled(f, sf, x, params)


def _maximal_at_scaled(f: DiscreteFunction, sf: _ScaledFunction, x: int,
                       params: OperatorParams) -> PointEvaluation:
    if f.is_zero_tails:
        num, win_len, window = _eval_zero_tail(sf, x, params)
        value = Fraction(num, sf.denominator * win_len)
        return PointEvaluation(value, window, False, value)
    return _eval_with_tails(f, sf, x, params)


def maximal_on_range(f: DiscreteFunction, lo: int, hi: int,
                     params: OperatorParams) -> list[PointEvaluation]:
    """Pointwise evaluations on the integer interval ``[lo..hi]`` in site order."""
    if lo > hi:
        raise ValueError("range requires lo <= hi")
    sf = _ScaledFunction(f)
    return [_maximal_at_scaled(f, sf, x, params) for x in range(lo, hi + 1)]


def maximal_values_on_range(f: DiscreteFunction, lo: int, hi: int,
                            params: OperatorParams) -> list[Fraction]:
    """Values only; same results as :func:`maximal_on_range`."""
    return [ev.value for ev in maximal_on_range(f, lo, hi, params)]
