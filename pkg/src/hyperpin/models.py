"""Node dynamics and coupling protocols used across analysis and simulation.

A NodeModel bundles the vector field, its Jacobian, the coupling protocol g
(applied componentwise), and the coupling Jacobian at the origin.  Vector
fields accept arrays of shape (..., dim) so one definition serves both the
single reference trajectory and a whole network of states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

LORENZ_B = 8.0 / 3.0
LORENZ_P = 28.0
LORENZ_S = 10.0


@dataclass(frozen=True)
class NodeModel:
    name: str
    dim: int
    f: Callable[[np.ndarray], np.ndarray]
    jac_f: Callable[[np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], np.ndarray]
    coupling_jac: np.ndarray  # Jacobian of g at 0
    x0: np.ndarray  # default reference initial condition
    recommended_step: float = 1e-2
    closed_form_msf: Callable[[complex], float] | None = None


def _zero_field(x):
    return np.zeros_like(x)


def _zero_jac(x):
    return np.zeros((1, 1))


def _identity(x):
    return np.asarray(x, dtype=float)


def consensus_model() -> NodeModel:
    """Scalar integrator nodes with identity coupling (leader-follower consensus)."""
    return NodeModel(
        name="consensus",
        dim=1,
        f=_zero_field,
        jac_f=_zero_jac,
        g=_identity,
        coupling_jac=np.eye(1),
        x0=np.zeros(1),
        recommended_step=1e-2,
        closed_form_msf=lambda mu: -complex(mu).real,
    )


def linear_model(a: float) -> NodeModel:
    """Scalar node with growth rate a and identity coupling."""
    return NodeModel(
        name=f"linear(a={a:g})",
        dim=1,
        f=lambda x, a=a: a * np.asarray(x, dtype=float),
        jac_f=lambda x, a=a: np.array([[a]]),
        g=_identity,
        coupling_jac=np.eye(1),
        x0=np.ones(1),
        recommended_step=1e-2,
    )


def lorenz_field(x: np.ndarray) -> np.ndarray:
    """Chaotic Lorenz-type field with the third component shifted by -(p+s)."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    out[..., 0] = LORENZ_S * (x2 - x1)
    out[..., 1] = LORENZ_S * x1 - x2 - x1 * x3
    out[..., 2] = x1 * x2 - LORENZ_B * (x3 + LORENZ_P + LORENZ_S)
    return out


def lorenz_jacobian(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[0], x[1], x[2]
    return np.array(
        [
            [-LORENZ_S, LORENZ_S, 0.0],
            [LORENZ_S - x3, -1.0, -x1],
            [x2, x1, -LORENZ_B],
        ]
    )


def lorenz_arctan_model() -> NodeModel:
    """Lorenz nodes coupled through componentwise arctan (unit slope at 0)."""
    return NodeModel(
        name="lorenz_arctan",
        dim=3,
        f=lorenz_field,
        jac_f=lorenz_jacobian,
        g=np.arctan,
        coupling_jac=np.eye(3),
        x0=np.array([1.0, 1.0, 0.0]),
        recommended_step=1e-3,
    )


def by_name(name: str) -> NodeModel:
    if name == "consensus":
        return consensus_model()
    if name == "lorenz_arctan":
        return lorenz_arctan_model()
    raise KeyError(f"unknown model {name!r}; expected consensus or lorenz_arctan")


def validate_jacobians(model: NodeModel, rtol: float = 1e-5, n_points: int = 5,
                       rng_seed: int = 0) -> None:
    """Finite-difference consistency of jac_f with f and coupling_jac with g."""
    rng = np.random.default_rng(rng_seed)
    h = 1e-6
    for _ in range(n_points):
        x = model.x0 + rng.normal(scale=1.0, size=model.dim)
        J = np.asarray(model.jac_f(x), dtype=float)
        fd = np.empty_like(J)
        for j in range(model.dim):
            e = np.zeros(model.dim)
            e[j] = h
            fd[:, j] = (model.f(x + e) - model.f(x - e)) / (2 * h)
        scale = max(np.linalg.norm(J), 1.0)
        if np.linalg.norm(J - fd) > rtol * scale:
            raise ValueError(f"jac_f of {model.name} disagrees with finite differences")
    Jg = np.asarray(model.coupling_jac, dtype=float)
    fd = np.empty_like(Jg)
    zero = np.zeros(model.dim)
    for j in range(model.dim):
        e = np.zeros(model.dim)
        e[j] = h
        fd[:, j] = (model.g(zero + e) - model.g(zero - e)) / (2 * h)
    if np.linalg.norm(Jg - fd) > rtol * max(np.linalg.norm(Jg), 1.0):
        raise ValueError(f"coupling_jac of {model.name} disagrees with finite differences")
