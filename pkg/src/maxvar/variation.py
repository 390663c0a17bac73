"""Total variation, peaks, and the head/system/tail decomposition.

Site lists are either integers (discrete case) or rationals (sampled
continuous case); values are always exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .core import (
    ZERO,
    DiscreteFunction,
    StepFunction,
    as_rational,
    rational_to_str,
)

Site = Union[int, Fraction]


class SmallerPointNotFound(Exception):
    """No point at or below the bound exists in the interval.

    Raising this signals broken wiring in the caller (the bound was not a
    maximal-function value over the interval), not a mathematical outcome.
    """


@dataclass(frozen=True)
class Peak:
    """Three sites p < r < q whose values rise strictly then fall strictly."""

    p: Site
    r: Site
    q: Site
    v_p: Fraction
    v_r: Fraction
    v_q: Fraction

    def __post_init__(self) -> None:
        for name in ("v_p", "v_r", "v_q"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if not (self.p < self.r < self.q):
            raise ValueError("peak sites must satisfy p < r < q")
        if not (self.v_p < self.v_r > self.v_q):
            raise ValueError("peak values must satisfy v_p < v_r > v_q")

    @property
    def variation(self) -> Fraction:
        return 2 * self.v_r - self.v_p - self.v_q

    def to_json_dict(self) -> dict:
        return {
            "sites": [_site_to_json(s) for s in (self.p, self.r, self.q)],
            "values": [rational_to_str(v) for v in (self.v_p, self.v_r, self.v_q)],
        }


@dataclass(frozen=True)
class PeakSystem:
    """Chained peaks sharing endpoints: q of one peak is p of the next."""

    peaks: tuple[Peak, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "peaks", tuple(self.peaks))
        if not self.peaks:
            raise ValueError("a peak system holds at least one peak")
        for a, b in zip(self.peaks, self.peaks[1:]):
            if a.q != b.p or a.v_q != b.v_p:
                raise ValueError("consecutive peaks must share their endpoint")

    @property
    def variation(self) -> Fraction:
        return sum((pk.variation for pk in self.peaks), ZERO)

    @property
    def sites(self) -> tuple[Site, ...]:
        out: list[Site] = [self.peaks[0].p]
        for pk in self.peaks:
            out.extend((pk.r, pk.q))
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {"peaks": [pk.to_json_dict() for pk in self.peaks]}


@dataclass(frozen=True)
class Decomposition:
    """Head drop + optional peak system + tail rise covering a value list.

    ``k`` and ``j`` are 0-based indices into the value list: k is the first
    index followed by a strict rise (last index when none exists), j the last
    index preceded by a strict drop (0 when none exists).  When k < j the
    middle carries a peak system and ``head_drop = v[0] - v[k]``,
    ``tail_rise = v[-1] - v[j]``; otherwise the system is absent and
    ``head_drop = v[0] - v[j]``, ``tail_rise = v[-1] - v[k]``.
    """

    head_drop: Fraction
    system: PeakSystem | None
    tail_rise: Fraction
    k: int
    j: int

    @property
    def bound(self) -> Fraction:
        system_var = self.system.variation if self.system else ZERO
        return self.head_drop + system_var + self.tail_rise


def _site_to_json(site: Site):
    return site if isinstance(site, int) else rational_to_str(site)


def total_variation(f: DiscreteFunction, window: tuple[int, int] | None = None) -> Fraction:
    """Exact variation of a discrete function.

    With a window ``(a, b)`` this is ``sum(|f(i+1) - f(i)| for i in [a, b-1])``.
    Without one it is the variation over all of Z, which the constant tails
    make equal to the variation across the explicit values plus their two
    jumps against the tails.
    """
    if window is not None:
        a, b = window
        if a > b:
            raise ValueError("window requires a <= b")
        total = ZERO
        prev = f.value_at(a)
        for i in range(a + 1, b + 1):
            cur = f.value_at(i)
            total += abs(cur - prev)
            prev = cur
        return total
    levels = (f.left_tail, *f.values, f.right_tail)
    return sum((abs(b - a) for a, b in zip(levels, levels[1:])), ZERO)


def total_variation_step(f: StepFunction) -> Fraction:
    """Exact variation over R of a step function: the sum of absolute jumps."""
    return f.jump_variation()


def variation_over_sites(values: Sequence[Fraction]) -> Fraction:
    """Sum of absolute consecutive differences of a sampled value list."""
    if len(values) < 2:
        raise ValueError("variation needs at least two values")
    return sum((abs(b - a) for a, b in zip(values, values[1:])), ZERO)


def decompose(values: Sequence[Fraction], sites: Sequence[Site]) -> Decomposition:
    """Split the sampled variation into head drop, peak system, and tail rise.

    k is the smallest index with ``v[k] < v[k+1]`` and j the largest with
    ``v[j] < v[j-1]``; plateaus count as non-increasing, so peaks are built on
    strict rises and falls only.  The accounting is exact: the sampled
    variation equals the decomposition bound, which is asserted.
    """
    values = [as_rational(v) for v in values]
    n = len(values)
    if n < 2:
        raise ValueError("decomposition needs at least two values")
    if len(sites) != n:
        raise ValueError("sites and values must have equal length")
    if any(not a < b for a, b in zip(sites, sites[1:])):
        raise ValueError("sites must be strictly increasing")

    k = next((i for i in range(n - 1) if values[i] < values[i + 1]), n - 1)
    j = next((i for i in range(n - 1, 0, -1) if values[i] < values[i - 1]), 0)

    if k >= j:
        decomp = Decomposition(
            head_drop=values[0] - values[j],
            system=None,
            tail_rise=values[-1] - values[k],
            k=k,
            j=j,
        )
    else:
        peaks = []
        p = k
        while p < j:
            m = next(i for i in range(p + 1, j) if values[i + 1] < values[i])
            q = next((i for i in range(m + 1, j) if values[i + 1] > values[i]), j)
            peaks.append(Peak(sites[p], sites[m], sites[q],
                              values[p], values[m], values[q]))
            p = q
        decomp = Decomposition(
            head_drop=values[0] - values[k],
            system=PeakSystem(tuple(peaks)),
            tail_rise=values[-1] - values[j],
            k=k,
            j=j,
        )
    if decomp.bound != variation_over_sites(values):
        raise RuntimeError("decomposition accounting mismatch; this is a bug")
    return decomp


def find_smaller_point(f: DiscreteFunction | StepFunction, bound: Fraction,
                       interval: tuple[Site, Site]) -> Site:
    """A site in the interval where f is at most the bound.

    The bound must dominate some window average centered inside the interval
    (guaranteed when it is a maximal-function value at an interior point);
    the returned site is a minimal-value site of such a window.
    """
    bound = as_rational(bound)
    if isinstance(f, DiscreteFunction):
        return _find_smaller_discrete(f, bound, interval)
    return _find_smaller_step(f, bound, interval)


def _find_smaller_discrete(f: DiscreteFunction, bound: Fraction,
                           interval: tuple[int, int]) -> int:
    lo, hi = interval
    if lo > hi:
        raise ValueError("interval requires lo <= hi")
    for center in range(lo, hi + 1):
        for radius in range(min(center - lo, hi - center), -1, -1):
            length = 2 * radius + 1
            if f.window_sum(center - radius, center + radius) <= bound * length:
                window = range(center - radius, center + radius + 1)
                return min(window, key=lambda s: (f.value_at(s), s))
    raise SmallerPointNotFound(
        f"no site with value <= {bound} in [{lo}..{hi}]; bound is not a "
        "maximal-function value over this interval")


def _find_smaller_step(f: StepFunction, bound: Fraction,
                       interval: tuple[Fraction, Fraction]) -> Fraction:
    lo, hi = as_rational(interval[0]), as_rational(interval[1])
    if lo >= hi:
        raise ValueError("open interval requires lo < hi")
    best = None
    for seg_lo, seg_hi, value in f.segments_between(lo, hi):
        if value <= bound and (best is None or value < best[1]):
            best = ((seg_lo + seg_hi) / 2, value)
    if best is None:
        raise SmallerPointNotFound(
            f"no point with value <= {bound} in ({lo}, {hi}); bound is not a "
            "maximal-function value over this interval")
    return best[0]
