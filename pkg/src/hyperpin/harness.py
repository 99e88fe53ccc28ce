"""Experiment harness behind the CLI: benchmark tables, named examples,
and the whole-partition sweep, each returning plain result records that the
CLI serializes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import models
from .errors import UnknownExample
from .hypergraph import er_hypergraph, giant_scc, nearest_neighbor_3body
from .select import (
    LowerBound,
    PinningProblem,
    SweepReport,
    degree_select,
    exhaustive_min,
    greedy_select,
    partition_sweep,
    random_select,
)
from .simulate import SimConfig, integrate, run_lorenz_experiment
from .spectral import PinningConfig, laplacian, reduced_block, spectrum

EXAMPLE_NAMES = ("fig2a", "fig2b", "fig3", "fig4", "fig6", "lorenz")


# ---------------------------------------------------------------------------
# Three-body ring benchmark (exhaustive / greedy / random columns)

@dataclass(frozen=True)
class RingBenchRow:
    n: int
    min_cost: int
    greedy_cost: int
    random_mean: float
    p_min: float  # probability that random selection hits the minimum
    p_min_plus_1: float


def table_ring(range_n, replicates: int = 10_000, seed: int = 0) -> list[RingBenchRow]:
    """Selection-cost columns over three-body rings with singleton pools."""
    rows = []
    for N in range_n:
        ring = nearest_neighbor_3body(N)
        problem = PinningProblem.singletons(ring)
        min_cost = exhaustive_min(problem).cost
        greedy_cost = greedy_select(problem).cost
        costs = np.array(
            [random_select(problem, (seed, N, rep)).cost for rep in range(replicates)]
        )
        rows.append(
            RingBenchRow(
                n=N,
                min_cost=min_cost,
                greedy_cost=greedy_cost,
                random_mean=float(costs.mean()),
                p_min=float(np.mean(costs == min_cost)),
                p_min_plus_1=float(np.mean(costs == min_cost + 1)),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Random-hypergraph benchmark (percentage-of-nodes columns)

@dataclass(frozen=True)
class ErBenchRow:
    p: float
    o: int
    mean_scc: float
    min_pct: float
    min_found: int
    min_is_lower_bound: bool
    greedy_pct: float
    degree_pct: float
    random_pct: float


def _er_replicate(args):
    p, o, seed_tuple, cap, methods, n_nodes, sigma = args
    H_full = er_hypergraph(n_nodes, p, o, rng_seed=seed_tuple, sigma=sigma)
    _, H = giant_scc(H_full)
    problem = PinningProblem.singletons(H)
    out = {"scc": H.n_nodes}
    if "greedy" in methods:
        out["greedy"] = greedy_select(problem).cost
    if "exhaustive" in methods:
        r = exhaustive_min(problem, max_cardinality=cap)
        out["exhaustive"] = None if isinstance(r, LowerBound) else r.cost
    if "degree" in methods:
        out["degree"] = degree_select(problem).cost
    if "random" in methods:
        out["random"] = random_select(problem, seed_tuple + (777,)).cost
    return out


def table_er(
    p_list,
    o_list,
    replicates: int = 100,
    cap: int = 4,
    seed: int = 0,
    methods: tuple[str, ...] = ("exhaustive", "greedy", "degree", "random"),
    n_nodes: int = 100,
    sigma: float = 1.0,
    jobs: int = 1,
) -> list[ErBenchRow]:
    """Mean giant-SCC size and pinned-node percentages per (p, order) cell."""
    rows = []
    for pi, p in enumerate(p_list):
        for o in o_list:
            work = [
                (p, o, (seed, pi, o, rep), cap, methods, n_nodes, sigma)
                for rep in range(replicates)
            ]
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    reps = list(pool.map(_er_replicate, work))
            else:
                reps = [_er_replicate(w) for w in work]

            def pct(key):
                vals = [
                    100.0 * r[key] / r["scc"] for r in reps if r.get(key) is not None
                ]
                return float(np.mean(vals)) if vals else float("nan")

            found = sum(1 for r in reps if r.get("exhaustive") is not None)
            rows.append(
                ErBenchRow(
                    p=p,
                    o=o,
                    mean_scc=float(np.mean([r["scc"] for r in reps])),
                    min_pct=pct("exhaustive"),
                    min_found=found,
                    min_is_lower_bound="exhaustive" in methods and found < replicates,
                    greedy_pct=pct("greedy"),
                    degree_pct=pct("degree"),
                    random_pct=pct("random"),
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Named examples

def example_fig3():
    """Three-node hypergraph controllable through one aggregated measurement."""
    from .hypergraph import Hyperedge, build

    H = build(3, [Hyperedge.homogeneous((2,), (0,)), Hyperedge.homogeneous((0,), (1, 2))])
    L = laplacian(H)
    rb = reduced_block(L, PinningConfig.singletons([2]))
    expected = np.array([[1.0, 0.0, -1.0], [-1.0, 0.5, 0.5], [-1.0, 0.5, 0.5]])
    assert np.array_equal(L.matrix, expected), "coupling matrix mismatch"
    assert np.allclose(
        np.sort(rb.spectrum.real), [0.5, 1.0], atol=1e-9
    ) and np.allclose(rb.spectrum.imag, 0.0, atol=1e-9), "reduced spectrum mismatch"
    return H, L, rb


def _ring7_sim(pins: PinningConfig | None, t_end: float = 100.0) -> tuple[SimConfig, object]:
    ring = nearest_neighbor_3body(7)
    cfg = SimConfig(
        hypergraph=ring,
        model=models.consensus_model(),
        initial_states=np.arange(1.0, 8.0),
        pinner_init=np.array([8.0]),
        pinning=pins,
        t_end=t_end,
        step=1e-2,
        record_stride=10,
    )
    return cfg, integrate(cfg)


def example_fig2(panel: str):
    """7-node ring under pairwise pins (panel a) or aggregated pins (panel b)."""
    if panel == "a":
        pins = PinningConfig.singletons([0, 2, 4], kappa=5.0)
    elif panel == "b":
        pins = PinningConfig.homogeneous([(0, 1), (2, 3), (4, 6)], kappa=5.0)
    else:
        raise UnknownExample(f"fig2 panel {panel!r}")
    cfg, traj = _ring7_sim(pins)
    ratio = traj.error_norm[-1] / traj.error_norm[0]
    if panel == "b":
        assert ratio <= 1e-2, f"aggregated pinning failed to converge (ratio {ratio:g})"
    else:
        assert ratio >= 1e-1, f"pairwise pinning unexpectedly converged (ratio {ratio:g})"
    return cfg, traj


def example_fig4():
    """Uncontrolled 6-node ring: consensus instability."""
    ring = nearest_neighbor_3body(6)
    cfg = SimConfig(
        hypergraph=ring,
        model=models.consensus_model(),
        initial_states=np.arange(1.0, 7.0),
        pinner_init=np.array([0.0]),
        pinning=None,
        t_end=50.0,
        step=1e-2,
        record_stride=10,
    )
    traj = integrate(cfg)
    spread = np.ptp(traj.states[-1])
    assert spread > 100.0 * np.ptp(traj.states[0]), "expected divergence did not occur"
    ev = spectrum(laplacian(ring).matrix)
    assert ev.real.min() < -1e-9, "expected an unstable open-loop direction"
    return cfg, traj


def example_lorenz(seed: int = 1):
    report, traj = run_lorenz_experiment(seed)
    assert report.lambda_max < 0.0, f"selection not stabilizing: {report.lambda_max}"
    assert report.error_ratio <= 1e-3, f"control failed to converge: {report.error_ratio:g}"
    return report, traj


def sweep_n10(jobs: int = 1) -> SweepReport:
    return partition_sweep(nearest_neighbor_3body(10), jobs=jobs)
