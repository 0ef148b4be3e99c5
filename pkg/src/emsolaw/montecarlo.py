"""Monte Carlo and exhaustive estimates of P(G(n, p) has property)."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Callable

from . import rng
from .family import FamilyGuardError, FamilyParams, check_phi_h
from .equivalence import ScanGuardError
from .family import MAX_N as FAMILY_MAX_N
from .graph import EnumerationGuardError, Graph, MAX_ENUMERATE_N, enumerate_graphs, sample_gnp_codes
from .logic import (
    EvaluationGuardError, Formula, builtin, builtin_text, check_guard, evaluate, mso_quantifier_depth,
    parse_formula,
)
from .logic.builtins import strip_comments
from .witness import MAX_N as WITNESS_MAX_N
from .witness import SearchGuardError, satisfies_phi

CONFIDENCE = 0.99
CHUNK = 1 << 14
EXACT_MAX_N_GENERIC = 5  # two nested set quantifiers over every graph
EXACT_MAX_N_SEARCH = MAX_ENUMERATE_N


class GuardError(ValueError):
    pass


GUARD_ERRORS = (GuardError, EvaluationGuardError, SearchGuardError, FamilyGuardError,
                EnumerationGuardError, ScanGuardError)


@dataclass(frozen=True)
class CheckerSpec:
    """Picklable description of a property: ``phi``, ``phi_h`` or ``formula``."""

    kind: str
    u: int = 3
    v: int = 2
    h: int = 1
    reading: str = "literal"
    formula_text: str | None = None
    label: str | None = None

    def __post_init__(self):
        if self.kind not in ("phi", "phi_h", "formula"):
            raise ValueError(f"unknown checker {self.kind!r}")
        if self.kind == "formula" and self.formula_text is None:
            raise ValueError("formula checker needs formula text")
        if self.kind == "phi_h":
            FamilyParams(self.u, self.v, self.h)

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind == "phi_h":
            return f"phi_h(u={self.u},v={self.v},h={self.h},{self.reading})"
        return self.kind

    def formula(self) -> Formula:
        return parse_formula(strip_comments(self.formula_text or ""))

    def guard(self, n: int, exact: bool = False) -> None:
        if self.kind == "phi":
            limit = EXACT_MAX_N_SEARCH if exact else WITNESS_MAX_N
            if n > limit:
                raise GuardError(f"witness search is limited to n <= {limit} here (got n={n})")
        elif self.kind == "phi_h":
            limit = EXACT_MAX_N_SEARCH if exact else FAMILY_MAX_N
            if n > limit:
                raise GuardError(f"clique-family search is limited to n <= {limit} here (got n={n})")
        else:
            s = self.formula()
            if exact and mso_quantifier_depth(s) >= 2 and n > EXACT_MAX_N_GENERIC:
                raise GuardError(
                    f"exhaustive evaluation with nested set quantifiers is limited to "
                    f"n <= {EXACT_MAX_N_GENERIC} (got n={n})")
            if exact and n > MAX_ENUMERATE_N:
                raise GuardError(f"exhaustive enumeration is limited to n <= {MAX_ENUMERATE_N}")
            check_guard(n, s)

    def build(self) -> Callable[[Graph], bool]:
        if self.kind == "phi":
            return satisfies_phi
        if self.kind == "phi_h":
            u, v, h, reading = self.u, self.v, self.h, self.reading
            return lambda g: g.n > 2 * u * h and check_phi_h(g, u, v, h, reading)
        s = self.formula()
        return lambda g: evaluate(g, s)


def builtin_spec(name: str) -> CheckerSpec:
    """Checker for a built-in sentence evaluated generically."""
    builtin(name)
    return CheckerSpec("formula", formula_text=builtin_text(name), label=f"{name}:generic")


@dataclass(frozen=True)
class McResult:
    n: int
    p: float
    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float
    wall_time: float
    seed: int
    checker: str
    rng: str = rng.ALGORITHM

    def to_dict(self) -> dict:
        return asdict(self)

    def same_outcome(self, other: "McResult") -> bool:
        """Equality ignoring wall time."""
        a, b = self.to_dict(), other.to_dict()
        a.pop("wall_time")
        b.pop("wall_time")
        return a == b


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be positive")
    z = NormalDist().inv_cdf(1 - (1 - confidence) / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _count_chunk(args) -> int:
    n, p, seed, start, stop, spec = args
    check = spec.build()
    cache: dict[int, bool] = {}
    hits = 0
    for code in sample_gnp_codes(n, p, seed, range(start + 1, stop + 1)):
        hit = cache.get(code)
        if hit is None:
            hit = cache[code] = check(Graph.from_code(n, code))
        hits += hit
    return hits


def cmd_mc(n: int, p: float, trials: int, seed: int, checker: CheckerSpec, workers: int = 1) -> McResult:
    """Estimate P(G(n, p) has the property) from ``trials`` samples.

    Trial ``i`` (0-based) is the graph of Philox stream ``i + 1`` under key
    ``seed``, so the count does not depend on chunking or on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    checker.guard(n)
    t0 = time.perf_counter()
    jobs = [(n, p, seed, s, min(s + CHUNK, trials), checker) for s in range(0, trials, CHUNK)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(_count_chunk, jobs))
    else:
        successes = sum(map(_count_chunk, jobs))
    lo, hi = wilson_interval(successes, trials)
    return McResult(n, p, trials, successes, successes / trials, lo, hi, CONFIDENCE,
                    time.perf_counter() - t0, seed, checker.name)


@dataclass(frozen=True)
class ExactResult:
    n: int
    checker: str
    satisfying: int
    total: int
    probability: Fraction

    @property
    def decimal(self) -> float:
        return float(self.probability)

    def to_dict(self) -> dict:
        return {"n": self.n, "checker": self.checker, "satisfying": self.satisfying, "total": self.total,
                "probability": str(self.probability), "decimal": self.decimal}


def cmd_exact(n: int, checker: CheckerSpec) -> ExactResult:
    """P(G(n, 1/2) has the property) as an exact fraction, by enumerating all labeled graphs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    checker.guard(n, exact=True)
    check = checker.build()
    hits = 0
    total = 0
    for g in enumerate_graphs(n):
        total += 1
        hits += bool(check(g))
    return ExactResult(n, checker.name, hits, total, Fraction(hits, total))
