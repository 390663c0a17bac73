"""Exact evaluation of the continuous nontangential operator on step functions.

The admissible windows for a point x form a cone in (left, right) coordinates;
on each cell cut by the breakpoint grid the window average is a ratio of
affine functions, so its maximum sits on a cell vertex.  Enumerating those
vertices, the shrinking-window candidates at x, and the tail limit gives the
exact supremum for zero-tail step functions and a certified enclosure
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ONE,
    ZERO,
    Interval,
    StepFunction,
    as_rational,
    rational_to_str,
)
from .discrete import PointEvaluation
from .variation import Peak


class WitnessNotFound(Exception):
    """The constructive witness search failed; carries the full search trace."""

    def __init__(self, message: str, trace: list[str]):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class ConeConstraint:
    """Admissible windows for x: center deviation at most alpha times half-width.

    In (l, r) coordinates that is the pair of inequalities
    ``(1+alpha)*l + (1-alpha)*r <= 2x`` and ``(1-alpha)*l + (1+alpha)*r >= 2x``
    together with l < r.
    """

    x: Fraction
    alpha: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", as_rational(self.x))
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        if self.alpha <= 0:
            raise ValueError("the continuous operator needs alpha > 0")

    def admits(self, left: Fraction, right: Fraction) -> bool:
        if left >= right:
            return False
        two_x = 2 * self.x
        a = self.alpha
        return ((1 + a) * left + (1 - a) * right <= two_x
                and (1 - a) * left + (1 + a) * right >= two_x)

    def admissible_x_range(self, left: Fraction, right: Fraction) -> tuple[Fraction, Fraction]:
        """The x-interval for which the fixed window [left, right] is admissible."""
        a = self.alpha
        return (((1 + a) * left + (1 - a) * right) / 2,
                ((1 - a) * left + (1 + a) * right) / 2)


@dataclass(frozen=True)
class SixPartition:
    """An attaining window split into six equal consecutive intervals."""

    cuts: tuple[Fraction, ...]

    @classmethod
    def of_window(cls, window: Interval) -> "SixPartition":
        y, t = window.center, window.half_width
        third = t / 3
        return cls(tuple(window.left + k * third for k in range(7)))

    def part(self, index: int) -> Interval:
        """Sixth number ``index`` counted from the left, 0-based."""
        return Interval(self.cuts[index], self.cuts[index + 1])


def _tail_limit_step(f: StepFunction, alpha: Fraction) -> Fraction:
    a, b = f.left_tail, f.right_tail
    return (a + b) / 2 + min(alpha, ONE) * abs(b - a) / 2


def _shrink_candidates(f: StepFunction, x: Fraction, alpha: Fraction) -> list[tuple[Fraction, Interval]]:
    """Values of shrinking admissible windows at x, with attaining representatives.

    The limit value is ``lam*f(x-) + (1-lam)*f(x+)`` for the window fraction
    ``lam`` left of x, and lam ranges over the cone-allowed band; linearity
    makes the two endpoints sufficient.  For step functions each limit is
    attained by any small enough window, so a concrete representative exists.
    """
    lam_lo = max(ZERO, (1 - alpha) / 2)
    lam_hi = min(ONE, (1 + alpha) / 2)
    f_left, f_right = f.value_left(x), f.value_at(x)
    gap_left = min((x - b for b in f.breakpoints if b < x), default=ONE)
    gap_right = min((b - x for b in f.breakpoints if b > x), default=ONE)
    out = []
    for lam in dict.fromkeys((lam_lo, lam_hi)):
        widths = [ONE]
        if lam > 0:
            widths.append(gap_left / lam)
        if lam < 1:
            widths.append(gap_right / (1 - lam))
        w = min(widths) / 2
        window = Interval(x - lam * w, x + (1 - lam) * w)
        out.append((lam * f_left + (1 - lam) * f_right, window))
    return out


def _cone_line_solutions(cone: ConeConstraint, fixed: Fraction, solve_for_right: bool) -> list[Fraction]:
    """Window endpoints completing ``fixed`` to a point on a cone boundary line."""
    a, two_x = cone.alpha, 2 * cone.x
    out = []
    # boundary (1+a)l + (1-a)r = 2x
    if solve_for_right:
        if a != 1:
            out.append((two_x - (1 + a) * fixed) / (1 - a))
        out.append((two_x - (1 - a) * fixed) / (1 + a))
    else:
        out.append((two_x - (1 - a) * fixed) / (1 + a))
        if a != 1:
            out.append((two_x - (1 + a) * fixed) / (1 - a))
    return out


def _candidate_windows(f: StepFunction, cone: ConeConstraint,
                       width_cap: Fraction | None) -> list[Interval]:
    """Vertices of the admissible-region arrangement cut by breakpoint lines.

    ``width_cap`` bounds the search region: with zero tails it is the largest
    width any above-threshold window can have, with tails it is the exactly
    scanned region (wider windows are handled by the far-window bound).
    """
    bps = f.breakpoints
    x = cone.x
    left_lines = list(bps)
    right_lines = list(bps)
    if width_cap is not None:
        left_lines.append(min(bps[0], x) - width_cap)
        right_lines.append(max(bps[-1], x) + width_cap)
    if cone.alpha == 1:
        left_lines.append(x)
        right_lines.append(x)

    points: set[tuple[Fraction, Fraction]] = set()
    for l in left_lines:
        for r in right_lines:
            points.add((l, r))
        for r in _cone_line_solutions(cone, l, solve_for_right=True):
            points.add((l, r))
        if width_cap is not None:
            points.add((l, l + width_cap))
    for r in right_lines:
        for l in _cone_line_solutions(cone, r, solve_for_right=False):
            points.add((l, r))
        if width_cap is not None:
            points.add((r - width_cap, r))
    if width_cap is not None:
        # cone boundaries meeting the width-cap line r = l + width_cap
        for sign in (1, -1):
            l = x - (1 + sign * cone.alpha) * width_cap / 2
            points.add((l, l + width_cap))

    out = []
    for l, r in points:
        if l < r and cone.admits(l, r):
            if width_cap is None or r - l <= width_cap:
                out.append(Interval(l, r))
    return out


def _window_sort_key(x: Fraction):
    def key(item: tuple[Fraction, Interval]):
        _, w = item
        return (w.width, abs(w.center - x), w.left)

    return key


def _best_candidate(candidates: list[tuple[Fraction, Interval]], x: Fraction) -> tuple[Fraction, Interval]:
    best = None
    key = _window_sort_key(x)
    for cand in candidates:
        if best is None or cand[0] > best[0] or (cand[0] == best[0] and key(cand) < key(best)):
            best = cand
    return best


def maximal_at_step(f: StepFunction, x: Fraction, alpha: Fraction,
                    enclosure_epsilon: Fraction = Fraction(1, 1000)) -> PointEvaluation:
    """Evaluate the continuous nontangential operator at x.

    Zero tails: the exact supremum, which for step functions is attained; the
    reported window realizes the value.  Nonzero tails: a certified enclosure
    of width at most ``enclosure_epsilon``, built from an exactly scanned
    width-capped region plus a far-window bound converging to the tail limit.
    """
    x, alpha = as_rational(x), as_rational(alpha)
    cone = ConeConstraint(x, alpha)
    shrink = _shrink_candidates(f, x, alpha)

    if f.is_zero_tails:
        mass = f.total_mass()
        if mass == 0:
            window = shrink[0][1]
            return PointEvaluation(ZERO, window, False, ZERO)
        reach = max(abs(x - f.breakpoints[0]), abs(x - f.breakpoints[-1]), ONE)
        floor_value = max(mass / (2 * reach), max(c[0] for c in shrink))
        width_cap = mass / floor_value
        candidates = list(shrink)
        for window in _candidate_windows(f, cone, width_cap):
            candidates.append((f.integral_over(window.left, window.right) / window.width, window))
        value, window = _best_candidate(candidates, x)
        return PointEvaluation(value, window, False, value)

    limit = _tail_limit_step(f, alpha)
    hull_width = f.breakpoints[-1] - f.breakpoints[0]
    width_cap = 2 * (hull_width + abs(x - f.breakpoints[0]) + abs(x - f.breakpoints[-1]) + 1)
    epsilon = as_rational(enclosure_epsilon)
    for _ in range(64):
        candidates = list(shrink)
        for window in _candidate_windows(f, cone, width_cap):
            candidates.append((f.integral_over(window.left, window.right) / window.width, window))
        best_value, best_window = _best_candidate(candidates, x)
        value = max(best_value, limit)
        width = min(
            max(ZERO, bound + excess / width_cap - value)
            for bound, excess in _far_bounds_step(f, x, alpha, width_cap)
        )
        if width <= epsilon:
            return PointEvaluation(
                value=value,
                attaining_window=best_window if best_value >= limit else None,
                attained_at_tail_limit=limit > best_value,
                enclosure_upper=value + width,
            )
        width_cap *= 2
    raise RuntimeError("step enclosure failed to converge; this is a bug")


def _far_bounds_step(f: StepFunction, x: Fraction, alpha: Fraction,
                     width_cap: Fraction):
    """(two-level bound, support excess) pairs for windows wider than the cap."""
    for split, level in ((f.breakpoints[0], f.right_tail), (f.breakpoints[-1], f.left_tail)):
        excess = ZERO
        for lo, hi, v in f.segments_between(*f.hull):
            if v > level:
                excess += (v - level) * (hi - lo)
        a, b = f.left_tail, f.right_tail
        if a == b:
            yield a, excess
            continue
        hi_t, lo_t = (b, a) if b > a else (a, b)
        offset = x - split if b > a else split - x
        frac = (1 + alpha) / 2 + max(ZERO, offset) / width_cap
        frac = min(ONE, max(ZERO, frac))
        yield lo_t + (hi_t - lo_t) * frac, excess


class _FastStepEvaluator:
    """Value-only evaluation with per-function candidate tables.

    The supremum of a zero-tail step function is always attained among the
    breakpoint-pair windows, the windows with one endpoint on a breakpoint
    line and the other on a cone boundary, and the shrinking-window limits at
    x; those candidates are precomputed as integer pairs so each grid point
    costs a few dozen integer operations.  Agrees with maximal_at_step by
    construction (tested property).
    """

    def __init__(self, f: StepFunction, alpha: Fraction):
        if not f.is_zero_tails:
            raise ValueError("the fast evaluator requires zero tails")
        self.f = f
        self.alpha = alpha
        an, ad = alpha.numerator, alpha.denominator
        self.is_uncentered = alpha == 1
        bps = f.breakpoints
        self.bp = [(b.numerator, b.denominator) for b in bps]
        cums = f._cumulative
        self.cum = [(c.numerator, c.denominator) for c in cums]
        self.piece = [(v.numerator, v.denominator) for v in f.piece_values]

        # fixed breakpoint-pair windows: admissibility x-interval plus value
        self.pairs = []
        for i in range(len(bps)):
            for j in range(i + 1, len(bps)):
                lo = ((ad + an) * bps[i] + (ad - an) * bps[j]) / (2 * ad)
                hi = ((ad - an) * bps[i] + (ad + an) * bps[j]) / (2 * ad)
                val = (cums[j] - cums[i]) / (bps[j] - bps[i])
                self.pairs.append((lo.numerator, lo.denominator,
                                   hi.numerator, hi.denominator,
                                   val.numerator, val.denominator))

        # cone-edge families: fixed endpoint t, the other endpoint affine in x
        # as (p*xd + q*xn) / (s*xd); boundary +1 is the far constraint
        # (1+a)l + (1-a)r = 2x, boundary -1 the near one
        self.edges = []
        for which_left in (True, False):
            for tn, td in self.bp:
                for boundary in (1, -1):
                    coeff = (ad - an) if boundary == 1 else (ad + an)
                    other = (ad + an) if boundary == 1 else (ad - an)
                    # fixed*other + moving*coeff = 2x*ad  (l, r order by side)
                    if coeff == 0:
                        continue
                    p, q, s = -other * tn, 2 * ad * td, coeff * td
                    if s < 0:
                        p, q, s = -p, -q, -s
                    self.edges.append((which_left, tn, td, p, q, s))
        self.two_ad = 2 * ad
        self.c_plus = ad + an
        self.c_minus = ad - an
        lam_lo = max(ZERO, (1 - alpha) / 2)
        lam_hi = min(ONE, (1 + alpha) / 2)
        self.lams = [(l.numerator, l.denominator) for l in dict.fromkeys((lam_lo, lam_hi))]

    def _piece_index(self, rn: int, rd: int) -> int:
        """Pieces: -1 left of the hull, k on [t_k, t_{k+1}), m-1 at/after t_m."""
        idx = -1
        for k, (tn, td) in enumerate(self.bp):
            if tn * rd <= rn * td:
                idx = k
            else:
                break
        return idx

    def _antiderivative(self, rn: int, rd: int) -> tuple[int, int]:
        idx = self._piece_index(rn, rd)
        if idx < 0:
            return 0, 1
        if idx >= len(self.piece):
            return self.cum[-1]
        cn, cd = self.cum[idx]
        vn, vd = self.piece[idx]
        tn, td = self.bp[idx]
        # cum + v*(r - t)
        dn, dd = rn * td - tn * rd, rd * td
        pn, pd = vn * dn, vd * dd
        return cn * pd + pn * cd, cd * pd

    def _average(self, ln: int, ld: int, rn: int, rd: int) -> tuple[int, int]:
        fl_n, fl_d = self._antiderivative(ln, ld)
        fr_n, fr_d = self._antiderivative(rn, rd)
        num_n = fr_n * fl_d - fl_n * fr_d
        num_d = fr_d * fl_d
        den_n = rn * ld - ln * rd
        den_d = rd * ld
        return num_n * den_d, num_d * den_n

    def _cone_ok(self, ln: int, ld: int, rn: int, rd: int, xn: int, xd: int) -> bool:
        if ln * rd >= rn * ld:
            return False
        lhs_far = self.c_plus * ln * rd * xd + self.c_minus * rn * ld * xd
        rhs = self.two_ad * xn * ld * rd
        if lhs_far > rhs:
            return False
        lhs_near = self.c_minus * ln * rd * xd + self.c_plus * rn * ld * xd
        return lhs_near >= rhs

    def value_at(self, x: Fraction) -> Fraction:
        xn, xd = x.numerator, x.denominator
        best_n, best_d = 0, 1

        # shrinking-window limits at x
        idx = self._piece_index(xn, xd)
        f_right = self.piece[idx] if 0 <= idx < len(self.piece) else (0, 1)
        on_bp = 0 <= idx < len(self.bp) and self.bp[idx][0] * xd == xn * self.bp[idx][1]
        if on_bp:
            f_left = self.piece[idx - 1] if idx > 0 else (0, 1)
        else:
            f_left = f_right
        for lam_n, lam_d in self.lams:
            # lam*f_left + (1-lam)*f_right
            a_n, a_d = lam_n * f_left[0], lam_d * f_left[1]
            b_n, b_d = (lam_d - lam_n) * f_right[0], lam_d * f_right[1]
            v_n, v_d = a_n * b_d + b_n * a_d, a_d * b_d
            if v_n * best_d > best_n * v_d:
                best_n, best_d = v_n, v_d

        for lo_n, lo_d, hi_n, hi_d, v_n, v_d in self.pairs:
            if lo_n * xd <= xn * lo_d and xn * hi_d <= hi_n * xd:
                if v_n * best_d > best_n * v_d:
                    best_n, best_d = v_n, v_d

        for which_left, tn, td, p, q, s in self.edges:
            cn, cd = p * xd + q * xn, s * xd
            if which_left:
                ln, ld, rn, rd = tn, td, cn, cd
            else:
                ln, ld, rn, rd = cn, cd, tn, td
            if self._cone_ok(ln, ld, rn, rd, xn, xd):
                v_n, v_d = self._average(ln, ld, rn, rd)
                if v_d < 0:
                    v_n, v_d = -v_n, -v_d
                if v_n * best_d > best_n * v_d:
                    best_n, best_d = v_n, v_d

        if self.is_uncentered:
            # alpha 1: the near cone boundary is l = x / r = x
            for tn, td in self.bp:
                for left_is_x in (True, False):
                    if left_is_x:
                        ln, ld, rn, rd = xn, xd, tn, td
                    else:
                        ln, ld, rn, rd = tn, td, xn, xd
                    if ln * rd < rn * ld:
                        v_n, v_d = self._average(ln, ld, rn, rd)
                        if v_d < 0:
                            v_n, v_d = -v_n, -v_d
                        if v_n * best_d > best_n * v_d:
                            best_n, best_d = v_n, v_d

        return Fraction(best_n, best_d)


def maximal_values_on_grid(f: StepFunction, alpha: Fraction,
                           grid: list[Fraction]) -> list[Fraction]:
    """Pointwise operator values on a site grid, in grid order."""
    alpha = as_rational(alpha)
    if alpha > 0 and f.is_zero_tails:
        evaluator = _FastStepEvaluator(f, alpha)
        return [evaluator.value_at(as_rational(x)) for x in grid]
    return [maximal_at_step(f, x, alpha).value for x in grid]


# ---------------------------------------------------------------------------
# peak witness construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepPeakWitness:
    """A point strictly inside a sampled peak where f reaches the peak value."""

    b: Fraction
    f_value: Fraction
    case: str

    def to_json_dict(self) -> dict:
        return {"b": rational_to_str(self.b), "f_value": rational_to_str(self.f_value),
                "case": self.case}


def _point_with_value_at_least(f: StepFunction, lo: Fraction, hi: Fraction,
                               threshold: Fraction) -> Fraction | None:
    """Leftmost convenient point in [lo, hi] with f at least the threshold."""
    candidates = [lo]
    for seg_lo, seg_hi, _ in f.segments_between(lo, hi):
        candidates.append((seg_lo + seg_hi) / 2)
    candidates.extend(b for b in f.breakpoints if lo <= b <= hi)
    candidates.append(hi)
    for point in sorted(set(candidates)):
        if f.value_at(point) >= threshold:
            return point
    return None


def find_peak_witness(f: StepFunction, peak: Peak, attaining: Interval | None,
                      alpha: Fraction, delta: Fraction = ZERO) -> StepPeakWitness:
    """Locate b in (p, q) with ``f(b) >= peak value - delta``.

    Follows the attaining-window case analysis: if one of the two inner sixths
    averages at least the peak value, a point there works; otherwise the
    middle sixth on the heavy side; otherwise a dyadic scan of the outer sixth
    from its inner end.  A degenerate (shrinking-window) attainment scans the
    small representative window directly.  Failure raises with the full trace,
    since for alpha >= 1/3 it would falsify the construction.
    """
    alpha, delta = as_rational(alpha), as_rational(delta)
    target = peak.v_r - delta
    trace: list[str] = []

    if attaining is None:
        for value, window in _shrink_candidates(f, peak.r, alpha):
            if value >= target:
                b = _point_with_value_at_least(f, window.left, window.right, value)
                if b is not None and peak.p < b < peak.q:
                    return StepPeakWitness(b, f.value_at(b), "shrinking-window")
                trace.append(f"shrinking window {window} gave no interior point")
        raise WitnessNotFound("no shrinking-window witness", trace)

    value = f.integral_over(attaining.left, attaining.right) / attaining.width
    trace.append(f"attaining window [{attaining.left}, {attaining.right}] average {value}")
    if value < target:
        raise WitnessNotFound("window average below the peak value", trace)
    parts = SixPartition.of_window(attaining)

    def avg(index: int) -> Fraction:
        part = parts.part(index)
        return f.integral_over(part.left, part.right) / part.width

    left_side = f.integral_over(parts.cuts[0], parts.cuts[3])
    right_side = f.integral_over(parts.cuts[3], parts.cuts[6])
    heavy_left = left_side >= right_side
    trace.append(f"heavy side: {'left' if heavy_left else 'right'}")

    b = None
    case = ""
    inner_lo, inner_hi = parts.cuts[2], parts.cuts[4]
    if avg(2) >= value or avg(3) >= value:
        b = _point_with_value_at_least(f, inner_lo, inner_hi, value)
        case = "inner-sixths"
    else:
        mid_index = 1 if heavy_left else 4
        if avg(mid_index) >= value:
            part = parts.part(mid_index)
            b = _point_with_value_at_least(f, part.left, part.right, value)
            case = "middle-sixth"
        else:
            b = _dyadic_outer_scan(f, parts, heavy_left, value, trace)
            case = "outer-halving"
    if b is None:
        raise WitnessNotFound(f"case {case!r} produced no point", trace)
    f_b = f.value_at(b)
    if not (peak.p < b < peak.q):
        trace.append(f"witness {b} escapes ({peak.p}, {peak.q})")
        raise WitnessNotFound("witness outside the peak interval", trace)
    if f_b < target:
        trace.append(f"f({b}) = {f_b} < {target}")
        raise WitnessNotFound("witness value below the peak value", trace)
    return StepPeakWitness(b, f_b, case)


def _dyadic_outer_scan(f: StepFunction, parts: SixPartition, heavy_left: bool,
                       value: Fraction, trace: list[str]) -> Fraction | None:
    """Halving scan of the outer sixth, starting from its inner half."""
    if heavy_left:
        outer_lo, outer_hi = parts.cuts[0], parts.cuts[1]
    else:
        outer_lo, outer_hi = parts.cuts[5], parts.cuts[6]
    span = outer_hi - outer_lo
    for k in range(1, 512):
        step = span / (2 ** k)
        if heavy_left:
            piece_lo, piece_hi = outer_lo + step, outer_lo + 2 * step
        else:
            piece_lo, piece_hi = outer_hi - 2 * step, outer_hi - step
        b = _point_with_value_at_least(f, piece_lo, piece_hi, value)
        if b is not None:
            trace.append(f"outer halving hit at depth {k}")
            return b
    trace.append("outer halving exhausted 511 levels")
    return None
