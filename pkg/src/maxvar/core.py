"""Exact-arithmetic value types: rationals, discrete functions, step functions.

Everything downstream works with :class:`fractions.Fraction`; no floats ever
enter a comparison.  Both function representations are immutable, hashable,
and carry eventually-constant tails so that window sums and averages over any
finite window have closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from math import ceil, floor
from typing import Iterable, Mapping, Sequence, Union

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints and strings like ``"2/5"``, ``"7"`` or ``"0.3"`` to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational values")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rational_to_str(value: Fraction) -> str:
    """Canonical string form: ``"p/q"`` in lowest terms, or ``"n"`` for integers."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Rounding(Enum):
    """How the discrete deviation budget ``alpha * R`` is turned into an integer.

    CEIL uses the ceiling, FLOOR the floor, EXACT compares ``|x - y| <= alpha*R``
    with no rounding (which coincides with FLOOR on integer offsets).
    """

    CEIL = "ceil"
    FLOOR = "floor"
    EXACT = "exact"

    @classmethod
    def from_string(cls, name: str) -> "Rounding":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown rounding mode {name!r}; expected ceil, floor or exact") from None


@dataclass(frozen=True)
class OperatorParams:
    """Aperture and evaluation knobs for the nontangential operators.

    ``alpha`` is the allowed center deviation per unit of window radius;
    ``rounding`` only affects the discrete operator; ``enclosure_epsilon``
    bounds the certified enclosure width when tails are nonzero.
    """

    alpha: Fraction
    rounding: Rounding = Rounding.CEIL
    enclosure_epsilon: Fraction = Fraction(1, 1000)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        object.__setattr__(self, "enclosure_epsilon", as_rational(self.enclosure_epsilon))
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.enclosure_epsilon <= 0:
            raise ValueError("enclosure_epsilon must be positive")

    def deviation_budget(self, radius: int) -> int:
        """Largest integer offset ``|x - y|`` admissible at the given radius."""
        bound = self.alpha * radius
        if self.rounding is Rounding.CEIL:
            return ceil(bound)
        # EXACT compares |x-y| <= alpha*R exactly, which for integer offsets
        # is the same test as the floor budget.
        return floor(bound)

    def to_json_dict(self) -> dict:
        return {
            "alpha": rational_to_str(self.alpha),
            "rounding": self.rounding.value,
            "enclosure_epsilon": rational_to_str(self.enclosure_epsilon),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "OperatorParams":
        return cls(
            alpha=as_rational(data["alpha"]),
            rounding=Rounding.from_string(data.get("rounding", "ceil")),
            enclosure_epsilon=as_rational(data.get("enclosure_epsilon", "1/1000")),
        )


@dataclass(frozen=True)
class DiscreteWindow:
    """The integer window ``[center-radius .. center+radius]`` (2R+1 sites)."""

    center: int
    radius: int

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    @property
    def lo(self) -> int:
        return self.center - self.radius

    @property
    def hi(self) -> int:
        return self.center + self.radius

    @property
    def size(self) -> int:
        return 2 * self.radius + 1

    def to_json_dict(self) -> dict:
        return {"center": self.center, "radius": self.radius}


@dataclass(frozen=True)
class Interval:
    """A continuous window ``[left, right]`` with rational endpoints."""

    left: Fraction
    right: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", as_rational(self.left))
        object.__setattr__(self, "right", as_rational(self.right))
        if self.left >= self.right:
            raise ValueError("interval requires left < right")

    @property
    def center(self) -> Fraction:
        return (self.left + self.right) / 2

    @property
    def half_width(self) -> Fraction:
        return (self.right - self.left) / 2

    @property
    def width(self) -> Fraction:
        return self.right - self.left

    def to_json_dict(self) -> dict:
        return {"left": rational_to_str(self.left), "right": rational_to_str(self.right)}


def _coerce_values(values: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(as_rational(v) for v in values)


@dataclass(frozen=True)
class DiscreteFunction:
    """A nonnegative function on the integers with eventually-constant tails.

    ``values`` lists the function on consecutive sites starting at
    ``support_start``; everything to the left equals ``left_tail`` and
    everything at or beyond ``support_start + len(values)`` equals
    ``right_tail``.
    """

    support_start: int = 0
    values: tuple[Fraction, ...] = ()
    left_tail: Fraction = ZERO
    right_tail: Fraction = ZERO

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _coerce_values(self.values))
        object.__setattr__(self, "left_tail", as_rational(self.left_tail))
        object.__setattr__(self, "right_tail", as_rational(self.right_tail))
        if self.left_tail < 0 or self.right_tail < 0 or any(v < 0 for v in self.values):
            raise ValueError("discrete functions are nonnegative by construction")
        if not self.values and self.left_tail != self.right_tail:
            raise ValueError("empty value list requires equal tails")

    # -- basic geometry ----------------------------------------------------

    @property
    def support_end(self) -> int:
        """First site to the right of the explicit values."""
        return self.support_start + len(self.values)

    @property
    def is_zero_tails(self) -> bool:
        return self.left_tail == 0 and self.right_tail == 0

    def value_at(self, site: int) -> Fraction:
        if site < self.support_start:
            return self.left_tail
        if site >= self.support_end:
            return self.right_tail
        return self.values[site - self.support_start]

    @cached_property
    def _prefix(self) -> tuple[Fraction, ...]:
        acc = ZERO
        out = [acc]
        for v in self.values:
            acc += v
            out.append(acc)
        return tuple(out)

    def window_sum(self, lo: int, hi: int) -> Fraction:
        """Exact sum of f over the integer window ``[lo..hi]`` (tails included)."""
        if lo > hi:
            raise ValueError("window requires lo <= hi")
        total = ZERO
        if lo < self.support_start:
            total += self.left_tail * (min(hi + 1, self.support_start) - lo)
        if hi >= self.support_end:
            total += self.right_tail * (hi + 1 - max(lo, self.support_end))
        a = max(lo, self.support_start) - self.support_start
        b = min(hi + 1, self.support_end) - self.support_start
        if a < b:
            total += self._prefix[b] - self._prefix[a]
        return total

    def total_mass(self) -> Fraction:
        """Sum over all of Z; only finite (and defined) for zero tails."""
        if not self.is_zero_tails:
            raise ValueError("total mass is only defined for zero-tail functions")
        return self._prefix[-1]

    def nonzero_hull(self) -> tuple[int, int] | None:
        """Smallest ``[lo, hi]`` containing every site that differs from the tails."""
        lo = None
        hi = None
        for idx, v in enumerate(self.values):
            if v != self.left_tail:
                lo = self.support_start + idx
                break
        for idx in range(len(self.values) - 1, -1, -1):
            if self.values[idx] != self.right_tail:
                hi = self.support_start + idx
                break
        if lo is None and hi is None:
            return None
        if lo is None:
            lo = self.support_start
        if hi is None:
            hi = self.support_end - 1
        return (min(lo, hi), max(lo, hi))

    def trimmed(self) -> "DiscreteFunction":
        """Drop leading values equal to the left tail and trailing ones equal to the right tail."""
        lo = 0
        hi = len(self.values)
        while lo < hi and self.values[lo] == self.left_tail:
            lo += 1
        while hi > lo and self.values[hi - 1] == self.right_tail:
            hi -= 1
        if lo == hi and self.left_tail != self.right_tail:
            # keep one crossover site so the representation stays valid
            return DiscreteFunction(self.support_start + lo, (self.right_tail,),
                                    self.left_tail, self.right_tail)
        if lo == 0 and hi == len(self.values):
            return self
        return DiscreteFunction(self.support_start + lo, self.values[lo:hi],
                                self.left_tail, self.right_tail)

    def translated(self, offset: int) -> "DiscreteFunction":
        return DiscreteFunction(self.support_start + offset, self.values,
                                self.left_tail, self.right_tail)

    def scaled(self, factor: Fraction) -> "DiscreteFunction":
        factor = as_rational(factor)
        if factor < 0:
            raise ValueError("scaling factor must be nonnegative")
        return DiscreteFunction(self.support_start,
                                tuple(v * factor for v in self.values),
                                self.left_tail * factor, self.right_tail * factor)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "support_start": self.support_start,
            "values": [rational_to_str(v) for v in self.values],
            "left_tail": rational_to_str(self.left_tail),
            "right_tail": rational_to_str(self.right_tail),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "DiscreteFunction":
        return cls(
            support_start=int(data.get("support_start", 0)),
            values=tuple(as_rational(v) for v in data.get("values", ())),
            left_tail=as_rational(data.get("left_tail", 0)),
            right_tail=as_rational(data.get("right_tail", 0)),
        )


@dataclass(frozen=True)
class StepFunction:
    """A nonnegative right-continuous step function with rational breakpoints.

    The function equals ``left_tail`` on ``(-inf, breakpoints[0])``,
    ``piece_values[i]`` on ``[breakpoints[i], breakpoints[i+1])`` and
    ``right_tail`` on ``[breakpoints[-1], inf)``.
    """

    breakpoints: tuple[Fraction, ...]
    piece_values: tuple[Fraction, ...] = ()
    left_tail: Fraction = ZERO
    right_tail: Fraction = ZERO

    def __post_init__(self) -> None:
        object.__setattr__(self, "breakpoints", _coerce_values(self.breakpoints))
        object.__setattr__(self, "piece_values", _coerce_values(self.piece_values))
        object.__setattr__(self, "left_tail", as_rational(self.left_tail))
        object.__setattr__(self, "right_tail", as_rational(self.right_tail))
        if not self.breakpoints:
            raise ValueError("at least one breakpoint is required")
        if len(self.piece_values) != len(self.breakpoints) - 1:
            raise ValueError("need exactly len(breakpoints) - 1 piece values")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if self.left_tail < 0 or self.right_tail < 0 or any(v < 0 for v in self.piece_values):
            raise ValueError("step functions are nonnegative by construction")

    @property
    def is_zero_tails(self) -> bool:
        return self.left_tail == 0 and self.right_tail == 0

    @property
    def hull(self) -> tuple[Fraction, Fraction]:
        return (self.breakpoints[0], self.breakpoints[-1])

    def value_at(self, x: RationalLike) -> Fraction:
        """Right-continuous pointwise value."""
        x = as_rational(x)
        if x < self.breakpoints[0]:
            return self.left_tail
        if x >= self.breakpoints[-1]:
            return self.right_tail
        # rightmost breakpoint <= x
        idx = self._locate(x)
        return self.piece_values[idx]

    def value_left(self, x: RationalLike) -> Fraction:
        """Left limit f(x-)."""
        x = as_rational(x)
        if x <= self.breakpoints[0]:
            return self.left_tail
        if x > self.breakpoints[-1]:
            return self.right_tail
        if x == self.breakpoints[-1]:
            return self.piece_values[-1] if self.piece_values else self.left_tail
        idx = self._locate(x)
        if x == self.breakpoints[idx]:
            return self.piece_values[idx - 1] if idx > 0 else self.left_tail
        return self.piece_values[idx]

    def _locate(self, x: Fraction) -> int:
        """Index i with breakpoints[i] <= x < breakpoints[i+1]; requires x in the hull."""
        lo, hi = 0, len(self.breakpoints) - 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self.breakpoints[mid] <= x:
                lo = mid
            else:
                hi = mid
        return lo

    @cached_property
    def _cumulative(self) -> tuple[Fraction, ...]:
        # integral from the first breakpoint to each breakpoint
        acc = ZERO
        out = [acc]
        for i, v in enumerate(self.piece_values):
            acc += v * (self.breakpoints[i + 1] - self.breakpoints[i])
            out.append(acc)
        return tuple(out)

    def _antiderivative(self, x: Fraction) -> Fraction:
        """Integral of f from breakpoints[0] to x (signed for x below it)."""
        t0, tm = self.breakpoints[0], self.breakpoints[-1]
        if x <= t0:
            return self.left_tail * (x - t0)
        if x >= tm:
            return self._cumulative[-1] + self.right_tail * (x - tm)
        idx = self._locate(x)
        return self._cumulative[idx] + self.piece_values[idx] * (x - self.breakpoints[idx])

    def integral_over(self, lo: RationalLike, hi: RationalLike) -> Fraction:
        lo, hi = as_rational(lo), as_rational(hi)
        if lo > hi:
            raise ValueError("integral requires lo <= hi")
        return self._antiderivative(hi) - self._antiderivative(lo)

    def total_mass(self) -> Fraction:
        if not self.is_zero_tails:
            raise ValueError("total mass is only defined for zero-tail functions")
        return self._cumulative[-1]

    def jump_variation(self) -> Fraction:
        """Total variation over R: the sum of absolute jumps, tails included."""
        levels = (self.left_tail, *self.piece_values, self.right_tail)
        return sum((abs(b - a) for a, b in zip(levels, levels[1:])), ZERO)

    def segments_between(self, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction, Fraction]]:
        """Constant pieces of f clipped to [lo, hi] as (seg_lo, seg_hi, value)."""
        lo, hi = as_rational(lo), as_rational(hi)
        if lo > hi:
            raise ValueError("segments require lo <= hi")
        cuts = [lo]
        for b in self.breakpoints:
            if lo < b < hi:
                cuts.append(b)
        cuts.append(hi)
        out = []
        for a, b in zip(cuts, cuts[1:]):
            if a < b:
                out.append((a, b, self.value_at(a)))
        if not out:
            out.append((lo, hi, self.value_at(lo)))
        return out

    def to_json_dict(self) -> dict:
        return {
            "breakpoints": [rational_to_str(b) for b in self.breakpoints],
            "piece_values": [rational_to_str(v) for v in self.piece_values],
            "left_tail": rational_to_str(self.left_tail),
            "right_tail": rational_to_str(self.right_tail),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "StepFunction":
        return cls(
            breakpoints=tuple(as_rational(b) for b in data["breakpoints"]),
            piece_values=tuple(as_rational(v) for v in data.get("piece_values", ())),
            left_tail=as_rational(data.get("left_tail", 0)),
            right_tail=as_rational(data.get("right_tail", 0)),
        )


def function_from_json_dict(data: Mapping) -> Union[DiscreteFunction, StepFunction]:
    """Dispatch a parsed JSON object to the matching function representation."""
    if "breakpoints" in data:
        return StepFunction.from_json_dict(data)
    if "support_start" in data or "values" in data:
        return DiscreteFunction.from_json_dict(data)
    raise ValueError("object is neither a discrete function (support_start/values) "
                     "nor a step function (breakpoints)")


def average_discrete(f: DiscreteFunction, window: DiscreteWindow) -> Fraction:
    """Exact window average ``sum(f over window) / (2R+1)``."""
    return f.window_sum(window.lo, window.hi) / window.size


def average_step(f: StepFunction, window: Interval) -> Fraction:
    """Exact average of f over a continuous interval."""
    return f.integral_over(window.left, window.right) / window.width
