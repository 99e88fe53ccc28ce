"""Minimal-measurement pinning selection: greedy heuristic, exhaustive
search, random and degree baselines, and whole-partition sweeps.

A selection problem fixes a hypergraph, a pool of disjoint candidate pin
head-sets, and a node model.  Feasibility of a sub-selection is decided on
the spectrum of its reduced block: every eigenvalue's exponent must clear
the stability margin.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import models
from .errors import ExhaustedError, InfeasibleError
from .hypergraph import DirectedHypergraph, degrees
from .msf import (
    DEFAULT_MARGIN,
    ControllabilityVerdict,
    LyapunovSettings,
    MsfEvaluator,
    controllability_verdict,
)
from .spectral import PinReducer, laplacian


@dataclass(frozen=True, eq=False)
class PinningProblem:
    """A candidate pool of disjoint pin head-sets over one hypergraph."""

    hypergraph: DirectedHypergraph | None
    candidates: tuple[tuple[int, ...], ...]
    model: models.NodeModel = field(default_factory=models.consensus_model)
    betas: tuple[tuple[float, ...], ...] | None = None
    settings: LyapunovSettings | None = None
    margin: float = DEFAULT_MARGIN
    laplacian_matrix: np.ndarray | None = None  # overrides the hypergraph's

    def __post_init__(self):
        object.__setattr__(
            self, "candidates", tuple(tuple(int(v) for v in hs) for hs in self.candidates)
        )
        if self.hypergraph is None and self.laplacian_matrix is None:
            raise ValueError("need a hypergraph or an explicit coupling matrix")

    @classmethod
    def singletons(cls, hypergraph: DirectedHypergraph, **kw) -> "PinningProblem":
        """One singleton candidate per node: the pairwise-pinning pool."""
        cands = tuple((v,) for v in range(hypergraph.n_nodes))
        return cls(hypergraph, cands, **kw)

    @property
    def m(self) -> int:
        return len(self.candidates)

    @cached_property
    def reducer(self) -> PinReducer:
        L = self.laplacian_matrix
        if L is None:
            L = laplacian(self.hypergraph)
        return PinReducer(L, self.candidates, self.betas)

    @cached_property
    def evaluator(self) -> MsfEvaluator:
        return MsfEvaluator(self.model, self.settings)

    def sub_spectrum(self, subset) -> np.ndarray:
        return self.reducer.sub_spectrum(subset)

    def unstable_score(self, subset) -> tuple[float, int]:
        """J value and unstable count for a sub-selection.

        J sums the exponents over the eigenvalues that fail the margin and
        adds their count; J == 0 exactly when the selection is feasible.
        """
        lam = self.evaluator.batch(self.sub_spectrum(subset))
        mask = ~(lam < -self.margin)
        picked = lam[mask]
        if not np.all(np.isfinite(picked)):
            return float("inf"), int(mask.sum())
        return float(picked.sum() + mask.sum()), int(mask.sum())

    def is_feasible(self, subset) -> bool:
        return self.unstable_score(subset)[1] == 0

    def verdict(self, subset) -> ControllabilityVerdict:
        return controllability_verdict(
            self.model,
            self.sub_spectrum(subset),
            settings=self.settings,
            margin=self.margin,
            evaluator=self.evaluator,
        )

    def precheck(self) -> None:
        """Require the full candidate pool to be feasible."""
        if not self.is_feasible(range(self.m)):
            raise InfeasibleError(
                "selecting every candidate still leaves unstable directions"
            )


@dataclass(frozen=True)
class IterationRecord:
    step: int
    scores: tuple[tuple[int, float], ...]  # (candidate index, J)
    chosen: int
    j_value: float


@dataclass(frozen=True)
class SelectionResult:
    method: str
    chosen: tuple[int, ...]
    chosen_sets: tuple[tuple[int, ...], ...]
    cost: int
    verdict: ControllabilityVerdict
    iterations: tuple[IterationRecord, ...] = ()


@dataclass(frozen=True)
class LowerBound:
    """Marker: no feasible selection within the cardinality cap."""

    bound: int
    explored_cardinality: int


def _result(problem: PinningProblem, method: str, chosen, iterations=()) -> SelectionResult:
    chosen = tuple(chosen)
    return SelectionResult(
        method=method,
        chosen=chosen,
        chosen_sets=tuple(problem.candidates[i] for i in chosen),
        cost=len(chosen),
        verdict=problem.verdict(chosen),
        iterations=tuple(iterations),
    )


def greedy_select(problem: PinningProblem) -> SelectionResult:
    """Iteratively add the candidate with the smallest unstable mass J.

    Terminates as soon as the chosen set is feasible (J = 0).  Ties in J
    break toward the lowest candidate index.
    """
    problem.precheck()
    chosen: list[int] = []
    records: list[IterationRecord] = []
    for step in range(problem.m):
        best = None
        scores = []
        for i in range(problem.m):
            if i in chosen:
                continue
            J, n_unstable = problem.unstable_score(chosen + [i])
            scores.append((i, J))
            if best is None or J < best[0] - 1e-12:
                best = (J, i, n_unstable)
        J, i_star, n_unstable = best
        chosen.append(i_star)
        records.append(IterationRecord(step, tuple(scores), i_star, J))
        if n_unstable == 0:
            return _result(problem, "greedy", chosen, records)
    raise ExhaustedError(
        "all candidates chosen but unstable directions remain; "
        "precheck and scoring margins disagree"
    )


def exhaustive_min(problem: PinningProblem,
                   max_cardinality: int | None = None) -> SelectionResult | LowerBound:
    """Smallest feasible sub-selection by increasing-cardinality enumeration.

    Subsets of equal size are visited in lexicographic order and the first
    feasible one wins.  With a cardinality cap, exhausting the cap returns a
    LowerBound marker instead of a result.
    """
    if problem.m > 25 and max_cardinality is None:
        raise ValueError("pool too large for uncapped enumeration; set max_cardinality")
    problem.precheck()
    cap = problem.m if max_cardinality is None else min(max_cardinality, problem.m)
    for c in range(1, cap + 1):
        for S in itertools.combinations(range(problem.m), c):
            if problem.is_feasible(S):
                return _result(problem, "exhaustive", S)
    return LowerBound(bound=cap + 1, explored_cardinality=cap)


def random_select(problem: PinningProblem, rng_seed) -> SelectionResult:
    """Add candidates in uniformly random order until feasible."""
    problem.precheck()
    rng = np.random.default_rng(rng_seed)
    order = rng.permutation(problem.m)
    chosen: list[int] = []
    records = []
    for step, i in enumerate(order):
        chosen.append(int(i))
        J, n_unstable = problem.unstable_score(chosen)
        records.append(IterationRecord(step, ((int(i), J),), int(i), J))
        if n_unstable == 0:
            return _result(problem, "random", chosen, records)
    raise ExhaustedError("random selection exhausted the pool without feasibility")


def degree_select(problem: PinningProblem) -> SelectionResult:
    """Add nodes by decreasing out-minus-in degree surplus until feasible.

    Only defined for singleton candidate pools.
    """
    if any(len(hs) != 1 for hs in problem.candidates):
        raise ValueError("degree baseline needs singleton candidates")
    problem.precheck()
    rep = degrees(problem.hypergraph)
    order = sorted(range(problem.m),
                   key=lambda i: (-rep.delta[problem.candidates[i][0]],
                                  problem.candidates[i][0]))
    chosen: list[int] = []
    records = []
    for step, i in enumerate(order):
        chosen.append(i)
        J, n_unstable = problem.unstable_score(chosen)
        records.append(IterationRecord(step, ((i, J),), i, J))
        if n_unstable == 0:
            return _result(problem, "degree", chosen, records)
    raise ExhaustedError("degree selection exhausted the pool without feasibility")


# ---------------------------------------------------------------------------
# Partition sweep

def set_partitions(n: int):
    """All set partitions of range(n) in restricted-growth lexicographic order."""
    blocks: list[list[int]] = []

    def rec(i):
        if i == n:
            yield tuple(tuple(b) for b in blocks)
            return
        for k in range(len(blocks)):
            blocks[k].append(i)
            yield from rec(i + 1)
            blocks[k].pop()
        blocks.append([i])
        yield from rec(i + 1)
        blocks.pop()

    yield from rec(0)


@dataclass(frozen=True)
class SweepRow:
    partition_id: int
    feasible: bool
    min_cost: int | None
    greedy_cost: int | None


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    total: int
    feasible_count: int
    match_count: int
    max_excess: int

    @property
    def optimal_fraction(self) -> float:
        return self.match_count / self.feasible_count if self.feasible_count else float("nan")


def _sweep_partition(L: np.ndarray, blocks, model_name: str, margin: float) -> tuple[bool, int | None, int | None]:
    problem = PinningProblem(
        hypergraph=None,
        candidates=blocks,
        model=models.by_name(model_name),
        margin=margin,
        laplacian_matrix=L,
    )
    try:
        problem.precheck()
    except InfeasibleError:
        return False, None, None
    g = greedy_select(problem).cost
    e = exhaustive_min(problem).cost
    return True, e, g


def _sweep_chunk(args) -> list[tuple[int, bool, int | None, int | None]]:
    L, chunk, model_name, margin = args
    out = []
    for pid, blocks in chunk:
        feas, e, g = _sweep_partition(L, blocks, model_name, margin)
        out.append((pid, feas, e, g))
    return out


def partition_sweep(H: DirectedHypergraph, model: models.NodeModel | None = None,
                    margin: float = DEFAULT_MARGIN, jobs: int = 1) -> SweepReport:
    """Evaluate every set partition of the node set as a candidate pool.

    Each partition's blocks form the pool; infeasible partitions (full pool
    fails) are recorded and skipped, feasible ones get exhaustive-min and
    greedy costs.  Parallel chunks reduce deterministically by partition id.
    """
    N = H.n_nodes
    if N > 12:
        raise ValueError(f"partition sweep limited to N <= 12, got {N}")
    model = model or models.consensus_model()
    try:
        models.by_name(model.name)
    except KeyError:
        raise ValueError("partition_sweep needs a constructible named model") from None
    model_name = model.name
    L = laplacian(H).matrix
    work = list(enumerate(set_partitions(N)))
    if jobs > 1:
        chunks = [work[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_sweep_chunk, [(L, c, model_name, margin) for c in chunks])
        flat = [row for part in parts for row in part]
        flat.sort(key=lambda r: r[0])
    else:
        flat = _sweep_chunk((L, work, model_name, margin))
    rows = tuple(SweepRow(*r) for r in flat)
    feas = [r for r in rows if r.feasible]
    match = sum(1 for r in feas if r.greedy_cost == r.min_cost)
    max_excess = max((r.greedy_cost - r.min_cost for r in feas), default=0)
    return SweepReport(
        rows=rows,
        total=len(rows),
        feasible_count=len(feas),
        match_count=match,
        max_excess=max_excess,
    )
