"""Directed hypergraph model, generators, degrees, and strong connectivity.

A directed hyperedge is an ordered pair of disjoint node sets (tails, heads)
with normalized non-negative weights on each side and a positive coupling
gain.  Hypergraphs are immutable after construction; every operation here is
a pure function.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import OverlapError, SizeError, WeightError

WEIGHT_TOL = 1e-12


def _normalized(weights: tuple[float, ...], side: str) -> None:
    if any(w < 0.0 for w in weights):
        raise WeightError(f"negative {side} weight in {weights}")
    if weights and abs(math.fsum(weights) - 1.0) > WEIGHT_TOL:
        raise WeightError(f"{side} weights {weights} do not sum to 1")


@dataclass(frozen=True)
class Hyperedge:
    """Directed hyperedge: ordered tails/heads with per-node weights and a gain."""

    tails: tuple[int, ...]
    heads: tuple[int, ...]
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "tails", tuple(int(v) for v in self.tails))
        object.__setattr__(self, "heads", tuple(int(v) for v in self.heads))
        object.__setattr__(self, "alpha", tuple(float(w) for w in self.alpha))
        object.__setattr__(self, "beta", tuple(float(w) for w in self.beta))
        if not self.tails and not self.heads:
            raise WeightError("hyperedge needs at least one tail or head")
        if set(self.tails) & set(self.heads):
            raise OverlapError(f"tails {self.tails} intersect heads {self.heads}")
        if len(set(self.tails)) != len(self.tails) or len(set(self.heads)) != len(self.heads):
            raise OverlapError("repeated node within tails or heads")
        if len(self.alpha) != len(self.tails) or len(self.beta) != len(self.heads):
            raise WeightError("weight vector length does not match node list")
        _normalized(self.alpha, "tail")
        _normalized(self.beta, "head")
        if not self.sigma > 0.0:
            raise WeightError(f"coupling gain must be positive, got {self.sigma}")

    @classmethod
    def homogeneous(cls, tails, heads, sigma: float = 1.0) -> "Hyperedge":
        """Edge with uniform weights 1/|tails| and 1/|heads|."""
        tails = tuple(tails)
        heads = tuple(heads)
        alpha = (1.0 / len(tails),) * len(tails) if tails else ()
        beta = (1.0 / len(heads),) * len(heads) if heads else ()
        return cls(tails, heads, alpha, beta, sigma)

    @property
    def cardinality(self) -> int:
        return len(self.tails) + len(self.heads)

    def key(self) -> tuple[frozenset, frozenset]:
        """Identity of the edge up to node ordering, used for duplicate checks."""
        return (frozenset(self.tails), frozenset(self.heads))


def homogeneous_weights(edge: Hyperedge) -> Hyperedge:
    """Return a copy of `edge` with homogeneous tail/head weights."""
    return Hyperedge.homogeneous(edge.tails, edge.heads, edge.sigma)


@dataclass(frozen=True)
class DirectedHypergraph:
    """Immutable directed hypergraph on nodes 0..n_nodes-1."""

    n_nodes: int
    edges: tuple[Hyperedge, ...]
    allow_multi: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.n_nodes < 1:
            raise SizeError(f"need at least one node, got {self.n_nodes}")
        seen = set()
        for e in self.edges:
            for v in e.tails + e.heads:
                if not 0 <= v < self.n_nodes:
                    raise IndexError(f"node {v} out of range [0, {self.n_nodes})")
            k = e.key()
            if k in seen and not self.allow_multi:
                raise OverlapError(f"duplicate hyperedge {k}; pass allow_multi to permit")
            seen.add(k)

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def build(n_nodes: int, edges, allow_multi: bool = False) -> DirectedHypergraph:
    """Validated hypergraph from an edge iterable."""
    return DirectedHypergraph(n_nodes, tuple(edges), allow_multi)


@dataclass(frozen=True)
class DegreeReport:
    """Per-node tail membership count (d_out), head count (d_in), and surplus."""

    d_in: np.ndarray
    d_out: np.ndarray
    delta: np.ndarray  # d_out - d_in


def degrees(H: DirectedHypergraph) -> DegreeReport:
    """Count, per node, hyperedges where it appears as a tail (out) or head (in)."""
    d_in = np.zeros(H.n_nodes, dtype=int)
    d_out = np.zeros(H.n_nodes, dtype=int)
    for e in H.edges:
        for v in e.tails:
            d_out[v] += 1
        for v in e.heads:
            d_in[v] += 1
    return DegreeReport(d_in=d_in, d_out=d_out, delta=d_out - d_in)


class Orientation(enum.Enum):
    """Tail/head assignment within each consecutive node triple of the ring.

    TAIL_CENTER is the calibrated default: the middle node drives the outer
    pair.  It is the only variant whose uncontrolled consensus dynamics turn
    unstable for N >= 5 while staying stable at N = 4.
    """

    TAIL_CENTER = "tail_center"  # tails {i+1}, heads {i, i+2}
    HEAD_CENTER = "head_center"  # tails {i, i+2}, heads {i+1}
    TAIL_FIRST = "tail_first"    # tails {i}, heads {i+1, i+2}
    HEAD_FIRST = "head_first"    # tails {i+1, i+2}, heads {i}


_ORIENT_OFFSETS = {
    Orientation.TAIL_CENTER: ((1,), (0, 2)),
    Orientation.HEAD_CENTER: ((0, 2), (1,)),
    Orientation.TAIL_FIRST: ((0,), (1, 2)),
    Orientation.HEAD_FIRST: ((1, 2), (0,)),
}


def nearest_neighbor_3body(
    N: int,
    orientation: Orientation | str = Orientation.TAIL_CENTER,
    sigma: float = 1.0,
) -> DirectedHypergraph:
    """Ring of N three-body hyperedges over consecutive triples, homogeneous weights."""
    if N < 3:
        raise SizeError(f"three-body ring needs N >= 3, got {N}")
    orientation = Orientation(orientation)
    t_off, h_off = _ORIENT_OFFSETS[orientation]
    edges = []
    for i in range(N):
        tails = tuple((i + o) % N for o in t_off)
        heads = tuple((i + o) % N for o in h_off)
        edges.append(Hyperedge.homogeneous(tails, heads, sigma))
    return build(N, edges)


def er_hypergraph(
    N: int,
    p: float,
    o: int,
    rng_seed,
    sigma: float = 1.0,
    order_scale: float = 1.0,
    per_head_cap: int | None = None,
) -> DirectedHypergraph:
    """Random directed hypergraph with single-head hyperedges of orders 2..o.

    For each order k and head node i there are min(cap, C(N-1, k-1)) candidate
    tail-sets; each candidate is kept independently with probability
    p * order_scale**(k-2).  The kept candidates are drawn by sampling their
    binomial count and then that many distinct tail-sets, which has the same
    distribution and costs O(edges) instead of O(candidates).
    """
    if not 0.0 < p < 1.0:
        raise WeightError(f"need 0 < p < 1, got {p}")
    if o < 2:
        raise SizeError(f"maximum order must be >= 2, got {o}")
    rng = np.random.default_rng(rng_seed)
    cap = N - 1 if per_head_cap is None else per_head_cap
    edges = []
    for k in range(2, o + 1):
        n_tails = k - 1
        keep_p = min(1.0, p * order_scale ** (k - 2))
        for i in range(N):
            others = np.array([v for v in range(N) if v != i])
            ncand = min(cap, math.comb(N - 1, n_tails))
            if ncand <= 0:
                continue
            n_keep = min(int(rng.binomial(ncand, keep_p)), ncand)
            chosen: set[tuple[int, ...]] = set()
            while len(chosen) < n_keep:
                ts = tuple(sorted(rng.choice(others, size=n_tails, replace=False).tolist()))
                chosen.add(ts)
            for ts in sorted(chosen):
                edges.append(Hyperedge.homogeneous(ts, (i,), sigma))
    return build(N, edges)


def projected_adjacency(H: DirectedHypergraph) -> csr_matrix:
    """Digraph projection: one arc tail -> head for every (tail, head) pair."""
    rows, cols = [], []
    for e in H.edges:
        for t in e.tails:
            for h in e.heads:
                rows.append(t)
                cols.append(h)
    data = np.ones(len(rows))
    return csr_matrix((data, (rows, cols)), shape=(H.n_nodes, H.n_nodes))


def giant_scc(H: DirectedHypergraph) -> tuple[tuple[int, ...], DirectedHypergraph]:
    """Largest strongly connected node set under head-to-tail chaining.

    Returns the node subset (ascending original labels) and the induced
    sub-hypergraph, relabeled densely in that order.  Only hyperedges with
    every endpoint inside the subset survive.  Ties on component size break
    toward the component containing the smallest node label.
    """
    A = projected_adjacency(H)
    n_comp, labels = connected_components(A, directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=n_comp)
    best = sizes.max()
    candidates = np.flatnonzero(sizes == best)
    winner = min(candidates, key=lambda c: int(np.flatnonzero(labels == c)[0]))
    nodes = tuple(int(v) for v in np.flatnonzero(labels == winner))
    relabel = {v: i for i, v in enumerate(nodes)}
    keep = set(nodes)
    sub_edges = []
    for e in H.edges:
        if keep.issuperset(e.tails) and keep.issuperset(e.heads):
            sub_edges.append(
                Hyperedge(
                    tuple(relabel[v] for v in e.tails),
                    tuple(relabel[v] for v in e.heads),
                    e.alpha,
                    e.beta,
                    e.sigma,
                )
            )
    return nodes, build(len(nodes), sub_edges, allow_multi=True)


# ---------------------------------------------------------------------------
# Line-oriented text format:
#   N <n_nodes>
#   E sigma=<float> T <id:weight,...> H <id:weight,...>
# `hom:<id,...>` may replace an explicit weight list; `-` marks an empty side.

def _format_side(nodes: tuple[int, ...], weights: tuple[float, ...]) -> str:
    if not nodes:
        return "-"
    return ",".join(f"{v}:{w:.17g}" for v, w in zip(nodes, weights))


def _parse_side(token: str) -> tuple[tuple[int, ...], tuple[float, ...] | None]:
    if token == "-":
        return (), ()
    if token.startswith("hom:"):
        nodes = tuple(int(v) for v in token[4:].split(",") if v)
        return nodes, None
    nodes, weights = [], []
    for item in token.split(","):
        v, _, w = item.partition(":")
        if not _:
            raise WeightError(f"malformed node:weight item {item!r}")
        nodes.append(int(v))
        weights.append(float(w))
    return tuple(nodes), tuple(weights)


def write_hypergraph(H: DirectedHypergraph, path) -> None:
    lines = [f"N {H.n_nodes}"]
    for e in H.edges:
        lines.append(
            f"E sigma={e.sigma:.17g} T {_format_side(e.tails, e.alpha)}"
            f" H {_format_side(e.heads, e.beta)}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_hypergraph(path, allow_multi: bool = False) -> DirectedHypergraph:
    n_nodes = None
    edges = []
    edge_re = re.compile(r"^E\s+sigma=(\S+)\s+T\s+(\S+)\s+H\s+(\S+)\s*$")
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("N "):
                n_nodes = int(line.split()[1])
                continue
            m = edge_re.match(line)
            if not m:
                raise WeightError(f"unparseable hyperedge line: {line!r}")
            sigma = float(m.group(1))
            tails, alpha = _parse_side(m.group(2))
            heads, beta = _parse_side(m.group(3))
            if alpha is None:
                alpha = (1.0 / len(tails),) * len(tails) if tails else ()
            if beta is None:
                beta = (1.0 / len(heads),) * len(heads) if heads else ()
            edges.append(Hyperedge(tails, heads, alpha, beta, sigma))
    if n_nodes is None:
        raise WeightError(f"missing 'N <n_nodes>' header in {path}")
    return build(n_nodes, edges, allow_multi)
