"""Model-by-model comparison of sentences (or decision procedures) over graph corpora."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from . import rng
from .graph import Graph, enumerate_graphs, sample_gnp, write_graph
from .logic import Formula, check_guard, evaluate

MAX_EXHAUSTIVE_N = 5


class ScanGuardError(ValueError):
    pass


Decider = Union[Formula, Callable[[Graph], bool]]


@dataclass
class EquivalenceReport:
    mode: str
    n_min: int
    n_max: int
    graphs_checked: int = 0
    disagreements: int = 0
    per_n: dict[int, list[int]] = field(default_factory=dict)  # n -> [checked, disagreements]
    first_counterexample: str | None = None  # edge-list text
    first_values: tuple[bool, ...] | None = None

    @property
    def agree(self) -> bool:
        return self.disagreements == 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode, "n_min": self.n_min, "n_max": self.n_max,
            "graphs_checked": self.graphs_checked, "disagreements": self.disagreements,
            "per_n": {str(n): {"checked": c, "disagreements": d} for n, (c, d) in sorted(self.per_n.items())},
            "first_counterexample": self.first_counterexample,
            "first_values": list(self.first_values) if self.first_values is not None else None,
        }


def _decide(d: Decider, g: Graph) -> bool:
    if callable(d):
        return bool(d(g))
    return evaluate(g, d)


def equivalence_scan(
    deciders: Sequence[Decider],
    n_max: int,
    mode: str = "exhaustive",
    trials: int = 1000,
    seed: int = 0,
    n_min: int | None = None,
) -> EquivalenceReport:
    """Evaluate every decider on each graph of the corpus and count the graphs on
    which they do not all agree.

    ``exhaustive`` covers every labeled graph with ``n_min <= n <= n_max``
    (``n_min`` defaults to 1).  ``random`` draws ``trials`` graphs from
    G(n, 1/2) with ``n`` uniform in ``[n_min, n_max]`` (``n_min`` defaults to
    ``n_max``); the vertex counts come from stream 0 of the generator and trial
    ``i`` uses stream ``i + 1``.
    """
    if len(deciders) < 2:
        raise ValueError("need at least two sentences to compare")
    if mode not in ("exhaustive", "random"):
        raise ValueError(f"mode must be 'exhaustive' or 'random', got {mode!r}")
    if n_min is None:
        n_min = 1 if mode == "exhaustive" else n_max
    if not 1 <= n_min <= n_max:
        raise ValueError(f"need 1 <= n_min <= n_max (got {n_min}, {n_max})")
    if mode == "exhaustive" and n_max > MAX_EXHAUSTIVE_N:
        raise ScanGuardError(f"exhaustive scans are limited to n <= {MAX_EXHAUSTIVE_N}")
    for d in deciders:
        if not callable(d):
            check_guard(n_max, d)
    report = EquivalenceReport(mode, n_min, n_max)

    def visit(g: Graph) -> None:
        values = tuple(_decide(d, g) for d in deciders)
        stats = report.per_n.setdefault(g.n, [0, 0])
        stats[0] += 1
        report.graphs_checked += 1
        if len(set(values)) > 1:
            stats[1] += 1
            report.disagreements += 1
            if report.first_counterexample is None:
                report.first_counterexample = write_graph(g)
                report.first_values = values

    if mode == "exhaustive":
        for n in range(n_min, n_max + 1):
            report.per_n.setdefault(n, [0, 0])
            for g in enumerate_graphs(n):
                visit(g)
    else:
        if trials < 1:
            raise ValueError("trials must be positive")
        span = n_max - n_min + 1
        picks = (rng.uniforms(seed, [0], trials)[0] * span).astype(int) + n_min
        for i, n in enumerate(picks.tolist()):
            visit(sample_gnp(n, 0.5, seed, stream=i + 1))
    return report
