"""Checkers that confirm or refute the variation claims on concrete inputs.

Each checker returns a :class:`VerificationReport` whose verdict is Holds,
Violated, or Inconclusive.  Holds verdicts are relative to the checked range
or grid (total variation is a supremum over finite site sets); a Violated
verdict is absolute and always carries a witness that re-verifies from the
serialized input alone.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .continuous import WitnessNotFound, find_peak_witness, maximal_at_step, maximal_values_on_grid
from .core import (
    ZERO,
    DiscreteFunction,
    DiscreteWindow,
    OperatorParams,
    StepFunction,
    as_rational,
    rational_to_str,
)
from .discrete import PointEvaluation, maximal_at, maximal_on_range
from .variation import (
    Peak,
    PeakSystem,
    SmallerPointNotFound,
    find_smaller_point,
    total_variation,
    total_variation_step,
    variation_over_sites,
)


class ClaimId(Enum):
    THEOREM_DISCRETE = "TheoremDiscrete"
    THEOREM_CONTINUOUS_GRID = "TheoremContinuousGrid"
    LEMMA_DOMINATE = "LemmaDominate"
    LEMMA_PLATEAU = "LemmaPlateau"
    PROP_EXTREMOS = "PropExtremos"
    PEAK_TRANSFER = "PeakTransfer"

    @classmethod
    def from_string(cls, name: str) -> "ClaimId":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown claim {name!r}")


class Verdict(Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class VerificationReport:
    claim_id: ClaimId
    verdict: Verdict
    input_digest: str
    numbers: dict
    witnesses: tuple
    range_relative: bool = False

    def to_json_dict(self) -> dict:
        return {
            "claim": self.claim_id.value,
            "verdict": self.verdict.value,
            "input_digest": self.input_digest,
            "range_relative": self.range_relative,
            "numbers": {k: rational_to_str(v) for k, v in self.numbers.items()},
            "witnesses": [_jsonify(w) for w in self.witnesses],
        }


@dataclass(frozen=True)
class ExtremosWitness:
    """Sites transferring a maximal-function increase to an f increase.

    ``z`` equals x (the discrete reduction) and ``w`` lies on the far side of
    x relative to y; the certified inequality is ``My - Mx <= f(w) - f(z)``.
    """

    x: int
    y: int
    z: int
    w: int
    m_x: Fraction
    m_y: Fraction
    f_z: Fraction
    f_w: Fraction

    def to_json_dict(self) -> dict:
        return {
            "x": self.x, "y": self.y, "z": self.z, "w": self.w,
            "m_x": rational_to_str(self.m_x), "m_y": rational_to_str(self.m_y),
            "f_z": rational_to_str(self.f_z), "f_w": rational_to_str(self.f_w),
        }


@dataclass(frozen=True)
class PlateauWitness:
    """A maximal-function plateau together with a site where f matches it."""

    r: int
    value: Fraction
    m_prime: int
    plateau_range: tuple[int, int]

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "value": rational_to_str(self.value),
            "m_prime": self.m_prime,
            "plateau_range": list(self.plateau_range),
        }


def _jsonify(obj):
    if hasattr(obj, "to_json_dict"):
        return obj.to_json_dict()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, Fraction):
        return rational_to_str(obj)
    return obj


def input_digest(payload: Mapping) -> str:
    canonical = json.dumps(_jsonify(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def default_range(f: DiscreteFunction, margin: int = 30) -> tuple[int, int]:
    """The explicit-value hull padded on both sides."""
    hi = max(f.support_start, f.support_end - 1)
    return (f.support_start - margin, hi + margin)


# ---------------------------------------------------------------------------
# profiles: shared per-input evaluations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteProfile:
    """Pointwise evaluations of the maximal operator on a site range."""

    f: DiscreteFunction
    params: OperatorParams
    lo: int
    hi: int
    evaluations: tuple[PointEvaluation, ...]

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(ev.value for ev in self.evaluations)

    def eval_at(self, x: int) -> PointEvaluation:
        if not self.lo <= x <= self.hi:
            raise ValueError(f"site {x} outside profiled range [{self.lo}..{self.hi}]")
        return self.evaluations[x - self.lo]

    def value_at(self, x: int) -> Fraction:
        return self.eval_at(x).value


def compute_profile(f: DiscreteFunction, params: OperatorParams,
                    lo: int, hi: int) -> DiscreteProfile:
    return DiscreteProfile(f, params, lo, hi, tuple(maximal_on_range(f, lo, hi, params)))


def _resolve_profile(f, params, site_range, margin, profile) -> DiscreteProfile:
    if profile is not None:
        return profile
    lo, hi = site_range if site_range is not None else default_range(f, margin)
    return compute_profile(f, params, lo, hi)


def _base_payload(claim: ClaimId, f, params, extra: Mapping) -> str:
    payload = {"claim": claim.value, "function": f.to_json_dict(),
               "params": params.to_json_dict(), **extra}
    return input_digest(payload)


# ---------------------------------------------------------------------------
# theorem checkers
# ---------------------------------------------------------------------------


def check_theorem_discrete(f: DiscreteFunction, params: OperatorParams,
                           site_range: tuple[int, int] | None = None,
                           margin: int = 30,
                           profile: DiscreteProfile | None = None) -> VerificationReport:
    """Compare the maximal function's range variation with Var(f).

    Holds is range-relative (the true variation is a supremum over ranges);
    Violated is absolute.  Nonzero tails compare interval enclosures and may
    come back Inconclusive.
    """
    profile = _resolve_profile(f, params, site_range, margin, profile)
    lo, hi = profile.lo, profile.hi
    digest = _base_payload(ClaimId.THEOREM_DISCRETE, f, params, {"range": [lo, hi]})
    var_f = total_variation(f)

    if all(ev.is_exact for ev in profile.evaluations):
        var_m = variation_over_sites(profile.values)
        holds = var_m <= var_f
        return VerificationReport(
            claim_id=ClaimId.THEOREM_DISCRETE,
            verdict=Verdict.HOLDS if holds else Verdict.VIOLATED,
            input_digest=digest,
            numbers={"maximal_variation": var_m, "function_variation": var_f},
            witnesses=() if holds else ({"range": [lo, hi], "maximal_variation": var_m,
                                         "function_variation": var_f},),
            range_relative=holds,
        )

    var_lo = ZERO
    var_hi = ZERO
    evs = profile.evaluations
    for a, b in zip(evs, evs[1:]):
        var_lo += max(ZERO, a.value - b.enclosure_upper, b.value - a.enclosure_upper)
        var_hi += max(b.enclosure_upper - a.value, a.enclosure_upper - b.value)
    if var_hi <= var_f:
        verdict = Verdict.HOLDS
    elif var_lo > var_f:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.INCONCLUSIVE
    return VerificationReport(
        claim_id=ClaimId.THEOREM_DISCRETE,
        verdict=verdict,
        input_digest=digest,
        numbers={"maximal_variation_lower": var_lo, "maximal_variation_upper": var_hi,
                 "function_variation": var_f},
        witnesses=() if verdict is not Verdict.VIOLATED else ({"range": [lo, hi]},),
        range_relative=verdict is Verdict.HOLDS,
    )


def check_lemma_dominate(f: DiscreteFunction, params: OperatorParams,
                         site_range: tuple[int, int] | None = None,
                         margin: int = 30,
                         profile: DiscreteProfile | None = None,
                         evaluate: Callable[[DiscreteFunction, int, OperatorParams], Fraction] | None = None,
                         ) -> VerificationReport:
    """Check pointwise domination: the maximal function never drops below f.

    ``evaluate`` substitutes the operator evaluation (used by mutation tests
    to confirm the checker catches broken evaluators).
    """
    if evaluate is None:
        profile = _resolve_profile(f, params, site_range, margin, profile)
        lo, hi = profile.lo, profile.hi
        values = profile.values
    else:
        lo, hi = site_range if site_range is not None else default_range(f, margin)
        values = tuple(evaluate(f, x, params) for x in range(lo, hi + 1))
    digest = _base_payload(ClaimId.LEMMA_DOMINATE, f, params, {"range": [lo, hi]})
    for x, m_value in zip(range(lo, hi + 1), values):
        f_value = f.value_at(x)
        if m_value < f_value:
            return VerificationReport(
                claim_id=ClaimId.LEMMA_DOMINATE,
                verdict=Verdict.VIOLATED,
                input_digest=digest,
                numbers={"maximal": m_value, "function": f_value},
                witnesses=({"site": x, "maximal": m_value, "function": f_value},),
            )
    return VerificationReport(
        claim_id=ClaimId.LEMMA_DOMINATE,
        verdict=Verdict.HOLDS,
        input_digest=digest,
        numbers={"sites_checked": Fraction(hi - lo + 1)},
        witnesses=(),
        range_relative=True,
    )


def _plateau_runs(values: Sequence[Fraction]) -> list[tuple[int, int]]:
    """Maximal constant runs as (start, end) index pairs."""
    runs = []
    start = 0
    for i in range(1, len(values)):
        if values[i] != values[start]:
            runs.append((start, i - 1))
            start = i
    runs.append((start, len(values) - 1))
    return runs


def check_lemma_plateau(f: DiscreteFunction, params: OperatorParams,
                        site_range: tuple[int, int] | None = None,
                        margin: int = 30,
                        profile: DiscreteProfile | None = None) -> VerificationReport:
    """Every local-maximum plateau of the maximal function must touch f.

    A plateau is a maximal constant run whose in-range neighbors are strictly
    smaller; the claim needs a site on the run where f equals the plateau
    value.  Runs touching the range boundary cannot be certified as local
    maxima: unwitnessed ones downgrade the verdict to Inconclusive only.
    """
    if not f.is_zero_tails:
        raise ValueError("plateau checking requires zero tails")
    profile = _resolve_profile(f, params, site_range, margin, profile)
    lo, hi = profile.lo, profile.hi
    digest = _base_payload(ClaimId.LEMMA_PLATEAU, f, params, {"range": [lo, hi]})
    values = profile.values

    witnesses = []
    violations = []
    boundary_unwitnessed = []
    for start, end in _plateau_runs(values):
        level = values[start]
        left_smaller = values[start - 1] < level if start > 0 else None
        right_smaller = values[end + 1] < level if end < len(values) - 1 else None
        if left_smaller is False or right_smaller is False:
            continue
        interior = left_smaller is True and right_smaller is True
        run_lo, run_hi = lo + start, lo + end
        m_prime = next((s for s in range(run_lo, run_hi + 1) if f.value_at(s) == level), None)
        if m_prime is not None:
            witnesses.append(PlateauWitness(r=run_lo, value=level, m_prime=m_prime,
                                            plateau_range=(run_lo, run_hi)))
        elif interior:
            violations.append({"plateau_range": [run_lo, run_hi], "value": level,
                               "f_on_plateau": [f.value_at(s) for s in range(run_lo, run_hi + 1)]})
        else:
            boundary_unwitnessed.append({"plateau_range": [run_lo, run_hi], "value": level,
                                         "boundary": True})
    if violations:
        verdict = Verdict.VIOLATED
    elif boundary_unwitnessed:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.HOLDS
    return VerificationReport(
        claim_id=ClaimId.LEMMA_PLATEAU,
        verdict=verdict,
        input_digest=digest,
        numbers={"plateaus_witnessed": Fraction(len(witnesses))},
        witnesses=tuple(violations) + tuple(boundary_unwitnessed) + tuple(witnesses),
        range_relative=verdict is Verdict.HOLDS,
    )


# ---------------------------------------------------------------------------
# monotone-stretch transfer (extremos)
# ---------------------------------------------------------------------------


def _window_high_site(f: DiscreteFunction, window: DiscreteWindow, threshold: Fraction,
                      pick_max: bool) -> int | None:
    """Extreme site of the window where f reaches the threshold."""
    sites = range(window.lo, window.hi + 1)
    found = [s for s in sites if f.value_at(s) >= threshold]
    if not found:
        return None
    return max(found) if pick_max else min(found)


def _far_side_fallback(f: DiscreteFunction, x: int, need: Fraction, to_right: bool) -> int | None:
    """Any site strictly beyond x (on the required side) with f at least `need`."""
    lo = min(f.support_start, x) - 1
    hi = max(f.support_end - 1, x) + 1
    sites = range(x + 1, hi + 1) if to_right else range(x - 1, lo - 1, -1)
    for s in sites:
        if f.value_at(s) >= need:
            return s
    return None


def _extremos_find_w(f: DiscreteFunction, x: int, y: int, m_x: Fraction, m_y: Fraction,
                     attaining: DiscreteWindow | None) -> int | None:
    to_right = y > x
    if attaining is not None and attaining.radius == 0:
        return y
    if attaining is not None:
        w = _window_high_site(f, attaining, m_y, pick_max=to_right)
        if w is not None and ((w > x) if to_right else (w < x)):
            return w
    # complete fallback: with z = x any far-side site with
    # f(w) >= My - Mx + f(x) certifies the transfer
    return _far_side_fallback(f, x, m_y - m_x + f.value_at(x), to_right)


def check_prop_extremos(f: DiscreteFunction, params: OperatorParams, x: int, y: int,
                        profile: DiscreteProfile | None = None) -> VerificationReport:
    """Produce sites (z, w) with ``My - Mx <= f(w) - f(z)``, z = x.

    The primary site w comes from scanning the attaining window of y on the
    far side of x; a complete far-side scan backs it up, so Violated means no
    valid witness with z = x exists at all.
    """
    if profile is not None:
        ev_x, ev_y = profile.eval_at(x), profile.eval_at(y)
    else:
        ev_x, ev_y = maximal_at(f, x, params), maximal_at(f, y, params)
    m_x, m_y = ev_x.value, ev_y.value
    if m_x > m_y:
        raise ValueError("extremos transfer requires Mf(x) <= Mf(y)")
    digest = _base_payload(ClaimId.PROP_EXTREMOS, f, params, {"x": x, "y": y})
    if x == y:
        return VerificationReport(
            claim_id=ClaimId.PROP_EXTREMOS, verdict=Verdict.HOLDS, input_digest=digest,
            numbers={"difference": ZERO}, witnesses=(),
        )
    if m_x == m_y:
        # zero gap: any ordered pair with a nonnegative f difference certifies
        # it, so orient (z, w) by the f values instead of scanning
        z, w = (x, y) if f.value_at(y) >= f.value_at(x) else (y, x)
        witness = ExtremosWitness(x=x, y=y, z=z, w=w, m_x=m_x, m_y=m_y,
                                  f_z=f.value_at(z), f_w=f.value_at(w))
        return VerificationReport(
            claim_id=ClaimId.PROP_EXTREMOS, verdict=Verdict.HOLDS, input_digest=digest,
            numbers={"difference": ZERO}, witnesses=(witness,),
        )
    w = _extremos_find_w(f, x, y, m_x, m_y, ev_y.attaining_window)
    z_prime = find_smaller_point(f, m_x, (x, x))
    if w is None:
        return VerificationReport(
            claim_id=ClaimId.PROP_EXTREMOS, verdict=Verdict.VIOLATED, input_digest=digest,
            numbers={"m_x": m_x, "m_y": m_y},
            witnesses=({"x": x, "y": y, "m_x": m_x, "m_y": m_y},),
        )
    witness = ExtremosWitness(x=x, y=y, z=z_prime, w=w, m_x=m_x, m_y=m_y,
                              f_z=f.value_at(z_prime), f_w=f.value_at(w))
    if witness.f_w - witness.f_z < m_y - m_x:
        return VerificationReport(
            claim_id=ClaimId.PROP_EXTREMOS, verdict=Verdict.VIOLATED, input_digest=digest,
            numbers={"m_x": m_x, "m_y": m_y, "f_w": witness.f_w, "f_z": witness.f_z},
            witnesses=(witness,),
        )
    return VerificationReport(
        claim_id=ClaimId.PROP_EXTREMOS, verdict=Verdict.HOLDS, input_digest=digest,
        numbers={"m_x": m_x, "m_y": m_y, "f_w": witness.f_w, "f_z": witness.f_z},
        witnesses=(witness,),
    )


def check_prop_extremos_all(f: DiscreteFunction, params: OperatorParams,
                            site_range: tuple[int, int] | None = None,
                            margin: int = 30,
                            profile: DiscreteProfile | None = None) -> VerificationReport:
    """Witness every ordered pair (x, y) in the range with Mf(x) <= Mf(y).

    Shares one profile and per-y window scans across all pairs; reports the
    pairs (not expected to exist) for which no witness with z = x exists.
    """
    profile = _resolve_profile(f, params, site_range, margin, profile)
    lo, hi = profile.lo, profile.hi
    digest = _base_payload(ClaimId.PROP_EXTREMOS, f, params,
                           {"range": [lo, hi], "all_pairs": True})
    values = profile.values
    sites = range(lo, hi + 1)
    f_values = [f.value_at(s) for s in sites]

    # per y: extreme window sites reaching My, shared by every paired x
    high_right: list[int | None] = []
    high_left: list[int | None] = []
    for ev in profile.evaluations:
        win = ev.attaining_window
        if win is None:
            high_right.append(None)
            high_left.append(None)
        elif win.radius == 0:
            high_right.append(win.center)
            high_left.append(win.center)
        else:
            high_right.append(_window_high_site(f, win, ev.value, pick_max=True))
            high_left.append(_window_high_site(f, win, ev.value, pick_max=False))

    # best far-side f value from each site outward (one step beyond the hull
    # covers the zero tails)
    n = len(values)
    suffix_max = [ZERO] * n
    prefix_max = [ZERO] * n
    acc = max(f.value_at(hi + 1), ZERO)
    for i in range(n - 1, -1, -1):
        suffix_max[i] = acc
        acc = max(acc, f_values[i])
    acc = max(f.value_at(lo - 1), ZERO)
    for i in range(n):
        prefix_max[i] = acc
        acc = max(acc, f_values[i])

    violations = []
    pairs = 0
    for yi in range(n):
        m_y = values[yi]
        w_right = high_right[yi]
        w_left = high_left[yi]
        for xi in range(n):
            if xi == yi or values[xi] > m_y:
                continue
            pairs += 1
            if values[xi] == m_y:
                continue  # zero gap: trivially witnessed by an oriented pair
            if xi < yi:
                ok = (w_right is not None and w_right > lo + xi) or \
                    suffix_max[xi] >= m_y - values[xi] + f_values[xi]
            else:
                ok = (w_left is not None and w_left < lo + xi) or \
                    prefix_max[xi] >= m_y - values[xi] + f_values[xi]
            if not ok:
                violations.append({"x": lo + xi, "y": lo + yi,
                                   "m_x": values[xi], "m_y": m_y})
    verdict = Verdict.VIOLATED if violations else Verdict.HOLDS
    return VerificationReport(
        claim_id=ClaimId.PROP_EXTREMOS, verdict=verdict, input_digest=digest,
        numbers={"pairs_checked": Fraction(pairs)},
        witnesses=tuple(violations),
        range_relative=verdict is Verdict.HOLDS,
    )


# ---------------------------------------------------------------------------
# peak transfer
# ---------------------------------------------------------------------------


def _discrete_peak_site(f: DiscreteFunction, profile: DiscreteProfile,
                        peak: Peak) -> tuple[int | None, str]:
    """Site b in (p, q) with f(b) >= peak value: plateau first, full scan second."""
    level = peak.v_r
    run_lo = run_hi = peak.r
    while run_lo - 1 > peak.p and profile.value_at(run_lo - 1) == level:
        run_lo -= 1
    while run_hi + 1 < peak.q and profile.value_at(run_hi + 1) == level:
        run_hi += 1
    for s in range(run_lo, run_hi + 1):
        if f.value_at(s) == level:
            return s, "plateau"
    for s in range(peak.p + 1, peak.q):
        if f.value_at(s) >= level:
            return s, "scan"
    return None, "none"


def check_peak_transfer(f: DiscreteFunction | StepFunction, params: OperatorParams,
                        system: PeakSystem, delta: Fraction = ZERO,
                        profile: DiscreteProfile | None = None) -> VerificationReport:
    """Transfer a sampled maximal-function peak system to a peak system of f.

    Builds b sites where f reaches each peak value (discrete: plateau search;
    continuous: the attaining-window construction) and interleaved a sites
    where f sits below the shared endpoints, then compares variations:
    ``Var_system(maximal) <= Var_transferred(f) + n * delta``.
    """
    delta = as_rational(delta)
    if isinstance(f, StepFunction):
        return _check_peak_transfer_step(f, params, system, delta)
    return _check_peak_transfer_discrete(f, params, system, delta, profile)


def _check_peak_transfer_discrete(f, params, system, delta, profile):
    sites = system.sites
    span_lo, span_hi = min(sites), max(sites)
    if profile is None or profile.lo > span_lo or profile.hi < span_hi:
        profile = compute_profile(f, params, span_lo, span_hi)
    digest = _base_payload(ClaimId.PEAK_TRANSFER, f, params,
                           {"system": system.to_json_dict()})
    b_sites = []
    b_cases = []
    for peak in system.peaks:
        b, how = _discrete_peak_site(f, profile, peak)
        if b is None:
            return VerificationReport(
                claim_id=ClaimId.PEAK_TRANSFER, verdict=Verdict.VIOLATED,
                input_digest=digest,
                numbers={"peak_value": peak.v_r},
                witnesses=({"peak": peak.to_json_dict(), "reason": "no site reaches the peak value"},),
            )
        b_sites.append(b)
        b_cases.append(how)

    hull_lo = min(f.support_start, span_lo) - 1
    hull_hi = max(f.support_end - 1, span_hi) + 1
    a_sites = []
    endpoints = [system.peaks[0].p] + [pk.q for pk in system.peaks]
    endpoint_values = [system.peaks[0].v_p] + [pk.v_q for pk in system.peaks]
    try:
        for i, (site, bound) in enumerate(zip(endpoints, endpoint_values)):
            if i == 0:
                interval = (min(hull_lo, site), b_sites[0] - 1)
            elif i == len(endpoints) - 1:
                interval = (b_sites[-1] + 1, max(hull_hi, site))
            else:
                interval = (b_sites[i - 1] + 1, b_sites[i] - 1)
            a_sites.append(find_smaller_point(f, bound, interval))
    except SmallerPointNotFound as exc:
        return VerificationReport(
            claim_id=ClaimId.PEAK_TRANSFER, verdict=Verdict.VIOLATED, input_digest=digest,
            numbers={}, witnesses=({"reason": str(exc)},),
        )
    return _peak_transfer_report(f.value_at, digest, system, a_sites, b_sites, b_cases, delta)


def _check_peak_transfer_step(f: StepFunction, params, system, delta):
    digest = _base_payload(ClaimId.PEAK_TRANSFER, f, params,
                           {"system": system.to_json_dict()})
    b_sites = []
    b_cases = []
    for peak in system.peaks:
        evaluation = maximal_at_step(f, peak.r, params.alpha)
        try:
            witness = find_peak_witness(f, peak, evaluation.attaining_window,
                                        params.alpha, delta)
        except WitnessNotFound as exc:
            return VerificationReport(
                claim_id=ClaimId.PEAK_TRANSFER, verdict=Verdict.VIOLATED,
                input_digest=digest, numbers={"peak_value": peak.v_r},
                witnesses=({"peak": peak.to_json_dict(), "reason": str(exc),
                            "trace": exc.trace},),
            )
        b_sites.append(witness.b)
        b_cases.append(witness.case)

    hull_lo, hull_hi = f.hull
    a_sites = []
    endpoints = [system.peaks[0].p] + [pk.q for pk in system.peaks]
    endpoint_values = [system.peaks[0].v_p] + [pk.v_q for pk in system.peaks]
    try:
        for i, (site, bound) in enumerate(zip(endpoints, endpoint_values)):
            if i == 0:
                interval = (min(hull_lo, site) - 1, b_sites[0])
            elif i == len(endpoints) - 1:
                interval = (b_sites[-1], max(hull_hi, site) + 1)
            else:
                interval = (b_sites[i - 1], b_sites[i])
            a_sites.append(find_smaller_point(f, bound, interval))
    except SmallerPointNotFound as exc:
        return VerificationReport(
            claim_id=ClaimId.PEAK_TRANSFER, verdict=Verdict.VIOLATED, input_digest=digest,
            numbers={}, witnesses=({"reason": str(exc)},),
        )
    return _peak_transfer_report(f.value_at, digest, system, a_sites, b_sites, b_cases, delta)


def _peak_transfer_report(value_at, digest, system, a_sites, b_sites, b_cases, delta):
    interleaved = []
    for a, b in zip(a_sites, b_sites):
        interleaved.extend((a, b))
    interleaved.append(a_sites[-1])
    if any(not u < v for u, v in zip(interleaved, interleaved[1:])):
        return VerificationReport(
            claim_id=ClaimId.PEAK_TRANSFER, verdict=Verdict.VIOLATED, input_digest=digest,
            numbers={},
            witnesses=({"reason": "transferred sites fail to interleave",
                        "sites": interleaved},),
        )
    transferred = sum(
        (2 * value_at(b) - value_at(a_sites[i]) - value_at(a_sites[i + 1])
         for i, b in enumerate(b_sites)), ZERO)
    allowance = len(system.peaks) * delta
    holds = system.variation <= transferred + allowance
    witness = {
        "a_sites": list(a_sites),
        "b_sites": list(b_sites),
        "b_cases": list(b_cases),
        "f_at_a": [value_at(a) for a in a_sites],
        "f_at_b": [value_at(b) for b in b_sites],
    }
    return VerificationReport(
        claim_id=ClaimId.PEAK_TRANSFER,
        verdict=Verdict.HOLDS if holds else Verdict.VIOLATED,
        input_digest=digest,
        numbers={"system_variation": system.variation,
                 "transferred_variation": transferred,
                 "delta_allowance": allowance},
        witnesses=(witness,),
    )


# ---------------------------------------------------------------------------
# continuous theorem on sampled grids
# ---------------------------------------------------------------------------


def make_uniform_grid(lo: Fraction, hi: Fraction, count: int) -> list[Fraction]:
    """`count` equally spaced exact sites from lo to hi inclusive."""
    lo, hi = as_rational(lo), as_rational(hi)
    if count < 2 or lo >= hi:
        raise ValueError("grid needs count >= 2 and lo < hi")
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count)]


def refine_grid(grid: Sequence[Fraction], factor: int) -> list[Fraction]:
    """Uniformly refined superset: every step subdivided `factor` times."""
    if factor < 1:
        raise ValueError("refinement factor must be at least 1")
    out = []
    for a, b in zip(grid, grid[1:]):
        step = (b - a) / factor
        out.extend(a + k * step for k in range(factor))
    out.append(grid[-1])
    return out


def check_theorem_continuous_grid(f: StepFunction, alpha: Fraction,
                                  grid: Sequence[Fraction] | None = None,
                                  points: int = 1000) -> VerificationReport:
    """Grid-sampled variation of the continuous maximal function vs Var(f).

    The sampled variation is a certified lower bound for the true variation,
    so Holds is grid-relative while Violated is absolute.
    """
    alpha = as_rational(alpha)
    if grid is None:
        t_lo, t_hi = f.hull
        pad = max(t_hi - t_lo, Fraction(1))
        grid = make_uniform_grid(t_lo - pad, t_hi + pad, points)
    grid = [as_rational(x) for x in grid]
    params = OperatorParams(alpha=alpha)
    digest = _base_payload(ClaimId.THEOREM_CONTINUOUS_GRID, f, params,
                           {"grid": [rational_to_str(x) for x in grid]})
    values = maximal_values_on_grid(f, alpha, grid)
    var_sampled = variation_over_sites(values)
    var_f = total_variation_step(f)
    holds = var_sampled <= var_f
    return VerificationReport(
        claim_id=ClaimId.THEOREM_CONTINUOUS_GRID,
        verdict=Verdict.HOLDS if holds else Verdict.VIOLATED,
        input_digest=digest,
        numbers={"sampled_variation": var_sampled, "function_variation": var_f},
        witnesses=() if holds else ({"grid_size": len(grid), "sampled_variation": var_sampled,
                                     "function_variation": var_f},),
        range_relative=holds,
    )


# ---------------------------------------------------------------------------
# arithmetic side condition used by the plateau argument
# ---------------------------------------------------------------------------


def radius_induction_first_failure(max_radius: int) -> int | None:
    """First radius violating R <= fl(R) + ceil(R/3) + ceil(fl(R)/3) + 1, if any.

    Here fl(R) = floor((R-1)/2); the inequality underpins the reach of the
    half-radius subwindows in the plateau argument and is expected to hold for
    every R >= 1.
    """
    for r in range(1, max_radius + 1):
        half = (r - 1) // 2
        if r > half + (-(-r // 3)) + (-(-half // 3)) + 1:
            return r
    return None
