"""Signed-graph Laplacian, pinning matrix, block transform, and spectra.

The linearized coupling of node i is -sum_j L[i, j] x_j.  Pinning a set of
disjoint head-sets adds kappa * P in a node ordering that puts pinned nodes
first; a block transform T diagonalizes P, and the trailing block of
T^-1 L T (written `l22` here) carries the part of the closed-loop spectrum
that stays finite as the control gain grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, OverlapError, SingularTransform, WeightError
from .hypergraph import DirectedHypergraph

ROW_SUM_TOL = 1e-10


@dataclass(frozen=True)
class SignedLaplacian:
    """Dense zero-row-sum coupling matrix of a hypergraph."""

    matrix: np.ndarray
    source: DirectedHypergraph

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def laplacian(H: DirectedHypergraph) -> SignedLaplacian:
    """Zero-row-sum signed Laplacian of the hyperdiffusive coupling.

    Each hyperedge contributes, to the row of every one of its heads, its full
    head-weight vector with a plus sign and its tail-weight vector with a
    minus sign, scaled by the edge gain.  Rows sum to zero by construction.
    """
    L = np.zeros((H.n_nodes, H.n_nodes))
    for e in H.edges:
        for h in e.heads:
            for t, a in zip(e.tails, e.alpha):
                L[h, t] -= e.sigma * a
            for h2, b in zip(e.heads, e.beta):
                L[h, h2] += e.sigma * b
    return SignedLaplacian(L, H)


def _as_matrix(L) -> np.ndarray:
    if isinstance(L, SignedLaplacian):
        return L.matrix
    return np.asarray(L, dtype=float)


@dataclass(frozen=True)
class PinningConfig:
    """Disjoint pinned head-sets with normalized head weights and a gain."""

    head_sets: tuple[tuple[int, ...], ...]
    betas: tuple[tuple[float, ...], ...]
    kappa: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "head_sets", tuple(tuple(int(v) for v in hs) for hs in self.head_sets)
        )
        object.__setattr__(
            self, "betas", tuple(tuple(float(w) for w in b) for b in self.betas)
        )
        if len(self.head_sets) != len(self.betas):
            raise WeightError("one beta vector per head-set required")
        seen: set[int] = set()
        for hs, beta in zip(self.head_sets, self.betas):
            if not hs:
                raise WeightError("empty pin head-set")
            if len(beta) != len(hs):
                raise WeightError("beta length does not match head-set")
            if seen & set(hs):
                raise OverlapError(f"pin head-sets overlap on {seen & set(hs)}")
            seen |= set(hs)
            if any(w <= 0.0 for w in beta):
                raise WeightError(f"head weights must be strictly positive: {beta}")
            if abs(sum(beta) - 1.0) > 1e-12:
                raise WeightError(f"head weights {beta} do not sum to 1")
        if not self.kappa > 0.0:
            raise WeightError(f"control gain must be positive, got {self.kappa}")

    @classmethod
    def homogeneous(cls, head_sets, kappa: float = 1.0) -> "PinningConfig":
        head_sets = tuple(tuple(hs) for hs in head_sets)
        betas = tuple((1.0 / len(hs),) * len(hs) for hs in head_sets)
        return cls(head_sets, betas, kappa)

    @classmethod
    def singletons(cls, nodes, kappa: float = 1.0) -> "PinningConfig":
        return cls.homogeneous(tuple((int(v),) for v in nodes), kappa)

    @property
    def m(self) -> int:
        """Number of pin hyperedges."""
        return len(self.head_sets)

    @property
    def pinned(self) -> tuple[int, ...]:
        return tuple(v for hs in self.head_sets for v in hs)


def pin_permutation(cfg: PinningConfig, N: int) -> tuple[int, ...]:
    """Node order with pinned nodes first (head-set by head-set), rest ascending."""
    pinned = cfg.pinned
    if any(not 0 <= v < N for v in pinned):
        raise IndexError(f"pinned node out of range [0, {N})")
    rest = [v for v in range(N) if v not in set(pinned)]
    return tuple(pinned) + tuple(rest)


@dataclass(frozen=True)
class PinningMatrix:
    """Block-diagonal pin matrix in the pinned-first ordering."""

    matrix: np.ndarray
    permutation: tuple[int, ...]


def pinning_matrix(cfg: PinningConfig, N: int) -> PinningMatrix:
    """Rank-one block per pin hyperedge: every row of a block equals beta."""
    perm = pin_permutation(cfg, N)
    P = np.zeros((N, N))
    row0 = 0
    for hs, beta in zip(cfg.head_sets, cfg.betas):
        s = len(hs)
        P[row0 : row0 + s, row0 : row0 + s] = np.tile(np.asarray(beta), (s, 1))
        row0 += s
    return PinningMatrix(P, perm)


def build_transform(cfg: PinningConfig, N: int) -> np.ndarray:
    """Invertible T (pinned-first ordering) with T^-1 P T = diag(1,...,1,0,...).

    Each pin block of size s contributes the ones vector (a unit-eigenvalue
    column, placed among the first m columns) and s-1 null-space columns
    v_k = e_k/beta_k - e_{k+1}/beta_{k+1}.  Unpinned nodes keep identity
    columns.
    """
    pin_permutation(cfg, N)  # range-checks the pinned nodes
    m = cfg.m
    T = np.zeros((N, N))
    col = m
    row0 = 0
    for bi, (hs, beta) in enumerate(zip(cfg.head_sets, cfg.betas)):
        s = len(hs)
        T[row0 : row0 + s, bi] = 1.0
        for k in range(s - 1):
            T[row0 + k, col] = 1.0 / beta[k]
            T[row0 + k + 1, col] = -1.0 / beta[k + 1]
            col += 1
        row0 += s
    for j in range(len(cfg.pinned), N):
        T[j, col] = 1.0
        col += 1
    return T


@dataclass(frozen=True)
class ReducedBlock:
    """Blocks of T^-1 L T in pinned-first coordinates."""

    l11: np.ndarray
    l22: np.ndarray
    transform: np.ndarray
    permutation: tuple[int, ...]
    spectrum: np.ndarray


def reduced_block(L, cfg: PinningConfig) -> ReducedBlock:
    """Transform the Laplacian and split off the gain-limit block `l22`."""
    Lm = _as_matrix(L)
    N = Lm.shape[0]
    perm = pin_permutation(cfg, N)
    T = build_transform(cfg, N)
    Lp = Lm[np.ix_(perm, perm)]
    try:
        Lbar = np.linalg.solve(T, Lp @ T)
    except np.linalg.LinAlgError as exc:
        raise SingularTransform(f"pin-block transform not invertible: {exc}") from exc
    m = cfg.m
    return ReducedBlock(
        l11=Lbar[:m, :m],
        l22=Lbar[m:, m:],
        transform=T,
        permutation=perm,
        spectrum=spectrum(Lbar[m:, m:]),
    )


def m_kappa(L, cfg: PinningConfig, kappa: float | None = None) -> np.ndarray:
    """Closed-loop matrix L + kappa*P in the pinned-first ordering."""
    if kappa is None:
        kappa = cfg.kappa
    if kappa < 0.0:
        raise WeightError(f"gain must be non-negative, got {kappa}")
    Lm = _as_matrix(L)
    pm = pinning_matrix(cfg, Lm.shape[0])
    Lp = Lm[np.ix_(pm.permutation, pm.permutation)]
    return Lp + kappa * pm.matrix


def spectrum(A) -> np.ndarray:
    """All eigenvalues, sorted by real part then imaginary part."""
    A = np.asarray(A)
    if A.size == 0:
        return np.zeros(0, dtype=complex)
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


class PinReducer:
    """Subset spectra for a pool of disjoint candidate pin hyperedges.

    Builds the transform for the whole pool once; the reduced spectrum of any
    sub-selection is the pool matrix with the unit-eigenvalue rows/columns of
    the selected blocks removed.  Agrees with `reduced_block` built from the
    subset alone (the spectrum does not depend on the basis chosen for the
    unpinned coordinates).
    """

    def __init__(self, L, head_sets, betas=None):
        Lm = _as_matrix(L)
        head_sets = tuple(tuple(hs) for hs in head_sets)
        if betas is None:
            cfg = PinningConfig.homogeneous(head_sets)
        else:
            cfg = PinningConfig(head_sets, tuple(tuple(b) for b in betas))
        self.cfg = cfg
        self.n = Lm.shape[0]
        self.m = cfg.m
        T = build_transform(cfg, self.n)
        perm = pin_permutation(cfg, self.n)
        Lp = Lm[np.ix_(perm, perm)]
        try:
            self.lbar = np.linalg.solve(T, Lp @ T)
        except np.linalg.LinAlgError as exc:
            raise SingularTransform(f"pool transform not invertible: {exc}") from exc
        self._all = np.arange(self.n)

    def sub_spectrum(self, subset) -> np.ndarray:
        """Reduced spectrum when only the blocks in `subset` are pinned."""
        drop = set(int(i) for i in subset)
        keep = [i for i in range(self.n) if i not in drop]
        return spectrum(self.lbar[np.ix_(keep, keep)])
