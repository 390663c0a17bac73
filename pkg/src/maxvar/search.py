"""Exhaustive and randomized counterexample search with witness shrinking.

Candidates are canonicalized zero-tail discrete functions (support starting
at 0, first and last value nonzero, rational content 1) so translation and
scaling never produce redundant work.  Every emitted violation re-verifies
from its serialization alone, and identical spaces or seeds reproduce
byte-identical corpora.
"""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from math import floor, gcd
from pathlib import Path
from typing import Callable, Iterator, Sequence

from .core import DiscreteFunction, OperatorParams, Rounding, as_rational
from .variation import decompose
from .verify import (
    ClaimId,
    DiscreteProfile,
    Verdict,
    VerificationReport,
    check_lemma_dominate,
    check_lemma_plateau,
    check_peak_transfer,
    check_prop_extremos_all,
    check_theorem_discrete,
    compute_profile,
    default_range,
)

DISCRETE_CLAIMS = (
    ClaimId.THEOREM_DISCRETE,
    ClaimId.LEMMA_DOMINATE,
    ClaimId.LEMMA_PLATEAU,
    ClaimId.PROP_EXTREMOS,
    ClaimId.PEAK_TRANSFER,
)

DEFAULT_ALPHA_GRID = (
    Fraction(1, 4), Fraction(3, 10), Fraction(1, 3), Fraction(2, 5),
    Fraction(1, 2), Fraction(1), Fraction(2),
)


class BudgetExceeded(Exception):
    """The declared candidate count does not fit the configured budget."""

    def __init__(self, count: int, budget: int):
        super().__init__(f"candidate count {count} exceeds budget {budget}")
        self.count = count
        self.budget = budget


def _content(values: Sequence[Fraction]) -> Fraction:
    num = 0
    den = 1
    for v in values:
        num = gcd(num, v.numerator)
        den = den * v.denominator // gcd(den, v.denominator)
    return Fraction(num, den)


def is_canonical(values: Sequence[Fraction]) -> bool:
    """Translation and scaling representative: trimmed ends, content one."""
    if not values or values[0] == 0 or values[-1] == 0:
        return False
    return _content(values) == 1


@dataclass(frozen=True)
class SearchSpace:
    """An enumerable family of canonical candidates times operator settings."""

    max_support_length: int
    value_grid: tuple[Fraction, ...] = (Fraction(0), Fraction(1), Fraction(2), Fraction(3))
    alpha_grid: tuple[Fraction, ...] = DEFAULT_ALPHA_GRID
    rounding_modes: tuple[Rounding, ...] = (Rounding.CEIL,)
    claims: tuple[ClaimId, ...] = (ClaimId.THEOREM_DISCRETE, ClaimId.LEMMA_DOMINATE,
                                   ClaimId.LEMMA_PLATEAU)
    range_margin: int = 30
    budget: int = 500_000

    def __post_init__(self) -> None:
        object.__setattr__(self, "value_grid",
                           tuple(sorted(as_rational(v) for v in self.value_grid)))
        object.__setattr__(self, "alpha_grid",
                           tuple(as_rational(a) for a in self.alpha_grid))
        if self.max_support_length < 1:
            raise ValueError("max_support_length must be at least 1")
        if any(c is ClaimId.THEOREM_CONTINUOUS_GRID for c in self.claims):
            raise ValueError("the grid theorem claim does not apply to discrete sweeps")

    def candidate_functions(self) -> Iterator[DiscreteFunction]:
        """Canonical candidates in lexicographic order (length, then values)."""
        for length in range(1, self.max_support_length + 1):
            for values in product(self.value_grid, repeat=length):
                if is_canonical(values):
                    yield DiscreteFunction(0, values)

    def candidate_count(self) -> int:
        return sum(1 for _ in self.candidate_functions())


@dataclass(frozen=True)
class ViolationRecord:
    """A reproducible Violated verdict: input, settings, claim, and witness."""

    function: DiscreteFunction
    params: OperatorParams
    claim_id: ClaimId
    witness: dict
    margin: int = 30
    shrunk: bool = False

    def to_json_dict(self) -> dict:
        return {
            "function": self.function.to_json_dict(),
            "params": self.params.to_json_dict(),
            "claim": self.claim_id.value,
            "witness": self.witness,
            "margin": self.margin,
            "shrunk": self.shrunk,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ViolationRecord":
        return cls(
            function=DiscreteFunction.from_json_dict(data["function"]),
            params=OperatorParams.from_json_dict(data["params"]),
            claim_id=ClaimId.from_string(data["claim"]),
            witness=data["witness"],
            margin=int(data.get("margin", 30)),
            shrunk=bool(data.get("shrunk", False)),
        )


def run_claim(f: DiscreteFunction, params: OperatorParams, claim: ClaimId,
              margin: int = 30,
              profile: DiscreteProfile | None = None) -> VerificationReport | None:
    """Dispatch one claim checker; None when the claim is vacuous on the input."""
    if profile is None:
        profile = compute_profile(f, params, *default_range(f, margin))
    if claim is ClaimId.THEOREM_DISCRETE:
        return check_theorem_discrete(f, params, profile=profile)
    if claim is ClaimId.LEMMA_DOMINATE:
        return check_lemma_dominate(f, params, profile=profile)
    if claim is ClaimId.LEMMA_PLATEAU:
        return check_lemma_plateau(f, params, profile=profile)
    if claim is ClaimId.PROP_EXTREMOS:
        return check_prop_extremos_all(f, params, profile=profile)
    if claim is ClaimId.PEAK_TRANSFER:
        sites = list(range(profile.lo, profile.hi + 1))
        decomposition = decompose(list(profile.values), sites)
        if decomposition.system is None:
            return None
        return check_peak_transfer(f, params, decomposition.system, profile=profile)
    raise ValueError(f"claim {claim} is not runnable on discrete inputs")


def _violations_for(f: DiscreteFunction, alpha_grid, rounding_modes, claims,
                    margin: int) -> list[ViolationRecord]:
    out = []
    for alpha in alpha_grid:
        for mode in rounding_modes:
            params = OperatorParams(alpha=alpha, rounding=mode)
            profile = compute_profile(f, params, *default_range(f, margin))
            for claim in claims:
                report = run_claim(f, params, claim, margin, profile=profile)
                if report is not None and report.verdict is Verdict.VIOLATED:
                    out.append(ViolationRecord(
                        function=f, params=params, claim_id=claim,
                        witness=report.to_json_dict(), margin=margin))
    return out


def _sweep_chunk(args) -> list[dict]:
    functions, alpha_grid, rounding_modes, claims, margin = args
    records = []
    for f in functions:
        records.extend(r.to_json_dict()
                       for r in _violations_for(f, alpha_grid, rounding_modes, claims, margin))
    return records


def worker_count() -> int:
    """Parallel worker count, controlled by the MAXVAR_WORKERS variable only."""
    try:
        return max(1, int(os.environ.get("MAXVAR_WORKERS", "1")))
    except ValueError:
        return 1


def exhaustive_sweep(space: SearchSpace,
                     on_candidate: Callable[[DiscreteFunction], None] | None = None,
                     ) -> list[ViolationRecord]:
    """Run every selected checker on every candidate in the space.

    Refuses to start when the candidate count exceeds the budget.  Output
    order is the canonical candidate order regardless of worker count.
    """
    candidates = list(space.candidate_functions())
    if len(candidates) > space.budget:
        raise BudgetExceeded(len(candidates), space.budget)
    workers = worker_count()
    if workers <= 1 or on_candidate is not None or len(candidates) < 4 * workers:
        records = []
        for f in candidates:
            if on_candidate is not None:
                on_candidate(f)
            records.extend(_violations_for(f, space.alpha_grid, space.rounding_modes,
                                           space.claims, space.range_margin))
        return records
    chunk_size = max(1, (len(candidates) + workers * 8 - 1) // (workers * 8))
    chunks = [candidates[i:i + chunk_size] for i in range(0, len(candidates), chunk_size)]
    args = [(chunk, space.alpha_grid, space.rounding_modes, space.claims, space.range_margin)
            for chunk in chunks]
    records: list[ViolationRecord] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for chunk_records in pool.map(_sweep_chunk, args):
            records.extend(ViolationRecord.from_json_dict(r) for r in chunk_records)
    return records


@dataclass(frozen=True)
class RandomSweepConfig:
    max_support_length: int = 6
    max_numerator: int = 4
    max_denominator: int = 4
    support_start_span: int = 5
    alpha_grid: tuple[Fraction, ...] = (Fraction(1, 3),)
    rounding_modes: tuple[Rounding, ...] = (Rounding.CEIL,)
    claims: tuple[ClaimId, ...] = (ClaimId.THEOREM_DISCRETE, ClaimId.LEMMA_DOMINATE,
                                   ClaimId.LEMMA_PLATEAU)
    range_margin: int = 30


def random_function(rng: random.Random, config: RandomSweepConfig) -> DiscreteFunction:
    length = rng.randint(1, config.max_support_length)
    values = tuple(
        Fraction(rng.randint(0, config.max_numerator), rng.randint(1, config.max_denominator))
        for _ in range(length)
    )
    start = rng.randint(-config.support_start_span, config.support_start_span)
    return DiscreteFunction(start, values)


def random_sweep(seed: int, count: int,
                 config: RandomSweepConfig = RandomSweepConfig()) -> list[ViolationRecord]:
    """Seeded random exploration; identical seeds give identical output."""
    rng = random.Random(seed)
    records = []
    for _ in range(count):
        f = random_function(rng, config)
        records.extend(_violations_for(f, config.alpha_grid, config.rounding_modes,
                                       config.claims, config.range_margin))
    return records


def reverify(record: ViolationRecord) -> bool:
    """Re-run the recorded claim from the record alone."""
    report = run_claim(record.function, record.params, record.claim_id, record.margin)
    return report is not None and report.verdict is Verdict.VIOLATED


def _shrink_candidates_for(f: DiscreteFunction) -> Iterator[DiscreteFunction]:
    """One-step reductions in deterministic order."""
    values = f.values
    n = len(values)
    if n > 1:
        yield DiscreteFunction(f.support_start, values[1:])
        yield DiscreteFunction(f.support_start, values[:-1])
    for i in range(n):
        v = values[i]
        if v != 0:
            yield DiscreteFunction(f.support_start, values[:i] + (Fraction(0),) + values[i + 1:])
            yield DiscreteFunction(f.support_start, values[:i] + (v / 2,) + values[i + 1:])
        if v.denominator > 1:
            smaller = v.denominator // 2
            yield DiscreteFunction(
                f.support_start,
                values[:i] + (Fraction(floor(v * smaller), smaller),) + values[i + 1:])
            if v != floor(v):
                yield DiscreteFunction(f.support_start,
                                       values[:i] + (Fraction(floor(v)),) + values[i + 1:])


def shrink(record: ViolationRecord) -> ViolationRecord:
    """Greedy local minimization of a violation under the reduction moves.

    Keeps applying the first reduction that still re-verifies as Violated
    until none does; rejects records that do not reproduce to begin with.
    """
    if not reverify(record):
        raise ValueError("record does not reproduce its violation")
    current = record
    improved = True
    while improved:
        improved = False
        for candidate_f in _shrink_candidates_for(current.function):
            if candidate_f == current.function:
                continue
            candidate = replace(current, function=candidate_f, shrunk=True)
            if reverify(candidate):
                report = run_claim(candidate.function, candidate.params,
                                   candidate.claim_id, candidate.margin)
                current = replace(candidate, witness=report.to_json_dict())
                improved = True
                break
    if current is record:
        current = replace(record, shrunk=True)
    return current


def save_jsonl(records: Sequence[ViolationRecord], path: str | Path) -> None:
    """One canonical JSON object per line; byte-stable for identical inputs."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_json_dict(), sort_keys=True,
                                    separators=(",", ":")))
            handle.write("\n")


def load_jsonl(path: str | Path) -> list[ViolationRecord]:
    records = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(ViolationRecord.from_json_dict(json.loads(line)))
    return records


def corpus_bytes(records: Sequence[ViolationRecord]) -> bytes:
    """The exact bytes save_jsonl would write; handy for determinism checks."""
    lines = [json.dumps(r.to_json_dict(), sort_keys=True, separators=(",", ":"))
             for r in records]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
