"""Master stability function: largest Lyapunov exponent of the pinned
variational flow xi' = (JF(x_ref(t)) - mu * JG(0)) xi, and the
controllability decisions built on it.

Numerics: fixed-step RK4 co-integration of the reference trajectory and a
batch of complex variational states, renormalized at a fixed cadence; the
exponent is the average log growth over the post-transient window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, NotType2Error
from .models import NodeModel

#: Stability margin: an exponent above -MARGIN counts as not stable.
DEFAULT_MARGIN = 1e-3

#: Gain used as the infinite-gain proxy in limit checks.
LIMIT_GAIN = 1e6

#: (model name, settings) -> uncoupled base exponent, shared across evaluators.
_BASE_EXPONENT_CACHE: dict = {}


@dataclass(frozen=True)
class LyapunovSettings:
    transient: float = 100.0
    horizon: float = 1100.0
    renorm_interval: float = 1.0
    step: float = 1e-2

    def __post_init__(self):
        if min(self.transient, self.horizon, self.renorm_interval, self.step) <= 0:
            raise ValueError("all integration times must be positive")
        if self.horizon - self.transient < self.renorm_interval:
            raise ValueError("horizon must exceed transient by at least one renorm window")

    @classmethod
    def for_model(cls, model: NodeModel, **overrides) -> "LyapunovSettings":
        kw = dict(step=model.recommended_step)
        kw.update(overrides)
        return cls(**kw)


def lyapunov_batch(model: NodeModel, mus, settings: LyapunovSettings) -> np.ndarray:
    """Largest Lyapunov exponent for every complex mu in `mus`.

    One reference trajectory is shared by the whole batch.  A batch row whose
    variational state stops being finite is reported as NaN; a non-finite
    reference trajectory aborts the whole batch.
    """
    mus = np.asarray(mus, dtype=complex).ravel()
    B = mus.size
    if B == 0:
        return np.zeros(0)
    n = model.dim
    h = settings.step
    JG = np.asarray(model.coupling_jac, dtype=float)
    x = np.array(model.x0, dtype=float).copy()
    xi = np.full((B, n), 1.0 / math.sqrt(n), dtype=complex)
    mu_col = mus[:, None]

    steps = int(round(settings.horizon / h))
    per = max(1, int(round(settings.renorm_interval / h)))
    window = per * h
    acc = np.zeros(B)
    n_acc = 0
    dead = np.zeros(B, dtype=bool)

    f, jac = model.f, model.jac_f

    def vrhs(J, z):
        return z @ J.T - mu_col * (z @ JG.T)

    for k in range(1, steps + 1):
        k1x = f(x)
        j1 = jac(x)
        k1v = vrhs(j1, xi)
        x2 = x + 0.5 * h * k1x
        j2 = jac(x2)
        k2x = f(x2)
        k2v = vrhs(j2, xi + 0.5 * h * k1v)
        x3 = x + 0.5 * h * k2x
        j3 = jac(x3)
        k3x = f(x3)
        k3v = vrhs(j3, xi + 0.5 * h * k2v)
        x4 = x + h * k3x
        j4 = jac(x4)
        k4x = f(x4)
        k4v = vrhs(j4, xi + h * k3v)
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        xi = xi + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        if k % per == 0:
            if not np.all(np.isfinite(x)):
                raise IntegrationError(
                    f"reference trajectory of {model.name} lost finiteness at t={k * h:g}"
                )
            nrm = np.linalg.norm(xi, axis=1)
            bad = ~(np.isfinite(nrm) & (nrm > 0.0))
            if bad.any():
                dead |= bad
                nrm[bad] = 1.0
                xi[bad] = 1.0 / math.sqrt(n)
            t = k * h
            if t - window >= settings.transient - 1e-9:
                acc += np.log(nrm)
                n_acc += 1
            xi = xi / nrm[:, None]

    out = acc / (n_acc * window)
    out[dead] = np.nan
    return out


def lyapunov_exponent(model: NodeModel, mu: complex, settings: LyapunovSettings | None = None) -> float:
    """Largest Lyapunov exponent of the variational flow at a single mu."""
    if settings is None:
        settings = LyapunovSettings.for_model(model)
    val = float(lyapunov_batch(model, [mu], settings)[0])
    if not np.isfinite(val):
        raise IntegrationError(f"variational state of {model.name} overflowed at mu={mu}")
    return val


def msf_closed_form_consensus(mu: complex) -> float:
    """Exact exponent for zero individual dynamics with identity coupling."""
    return -complex(mu).real


def _scalar_coupling(JG: np.ndarray) -> float | None:
    """c such that JG = c*I, or None."""
    JG = np.asarray(JG, dtype=float)
    c = float(JG[0, 0])
    if np.allclose(JG, c * np.eye(JG.shape[0]), rtol=0.0, atol=1e-14):
        return c
    return None


class MsfEvaluator:
    """Callable master stability function with shortcut and caching layers.

    mode "auto": use the model's closed form when present; otherwise, if the
    coupling Jacobian is a positive multiple c of the identity, the exact
    identity Lambda(mu) = Lambda(0) - c*Re(mu) reduces every query to one
    base-exponent integration; otherwise fall back to per-mu integration.
    mode "numeric" forces integration for every query (conjugate-symmetric
    queries share a cache entry).
    """

    def __init__(self, model: NodeModel, settings: LyapunovSettings | None = None,
                 mode: str = "auto"):
        if mode not in ("auto", "numeric"):
            raise ValueError(f"mode must be auto or numeric, got {mode!r}")
        self.model = model
        self.settings = settings or LyapunovSettings.for_model(model)
        self.mode = mode
        self._cache: dict[tuple[float, float], float] = {}
        self._base: float | None = None
        self._scalar = _scalar_coupling(model.coupling_jac) if mode == "auto" else None
        if self._scalar is not None and self._scalar <= 0.0:
            self._scalar = None

    @property
    def has_affine_shortcut(self) -> bool:
        """True when queries reduce to a closed form or an affine identity."""
        return self.model.closed_form_msf is not None and self.mode == "auto" \
            or self._scalar is not None

    @property
    def base_exponent(self) -> float:
        """Exponent of the uncoupled reference system (mu = 0).

        Cached per (model name, settings) across evaluator instances: the
        named constructors always produce the same dynamics for a name.
        """
        if self._base is None:
            if self.model.closed_form_msf is not None and self.mode == "auto":
                self._base = float(self.model.closed_form_msf(0.0))
            else:
                key = (self.model.name, self.settings)
                if key not in _BASE_EXPONENT_CACHE:
                    _BASE_EXPONENT_CACHE[key] = float(
                        lyapunov_batch(self.model, [0.0], self.settings)[0]
                    )
                self._base = _BASE_EXPONENT_CACHE[key]
        return self._base

    def __call__(self, mu: complex) -> float:
        return float(self.batch([mu])[0])

    def batch(self, mus) -> np.ndarray:
        mus = np.asarray(mus, dtype=complex).ravel()
        if self.mode == "auto" and self.model.closed_form_msf is not None:
            return np.array([self.model.closed_form_msf(m) for m in mus], dtype=float)
        if self._scalar is not None:
            return self.base_exponent - self._scalar * mus.real
        out = np.empty(mus.size)
        missing: dict[tuple[float, float], int] = {}
        for i, m in enumerate(mus):
            key = (float(m.real), abs(float(m.imag)))
            if key in self._cache:
                out[i] = self._cache[key]
            else:
                missing.setdefault(key, -1)
                out[i] = np.nan
        if missing:
            keys = list(missing)
            vals = lyapunov_batch(
                self.model, [complex(re, im) for re, im in keys], self.settings
            )
            self._cache.update(zip(keys, vals))
            for i, m in enumerate(mus):
                key = (float(m.real), abs(float(m.imag)))
                out[i] = self._cache[key]
        return out


@dataclass(frozen=True)
class MsfGrid:
    re: np.ndarray     # sampled real parts, ascending
    im: np.ndarray     # sampled imaginary parts, ascending
    values: np.ndarray  # shape (len(im), len(re))


def msf_grid(model: NodeModel, re_range, im_range, resolution: int,
             settings: LyapunovSettings | None = None, mode: str = "auto") -> MsfGrid:
    """Sample the master stability function on a rectangular complex grid.

    Conjugate symmetry is exploited: a cell below the real axis copies its
    mirror when the mirror lies on the grid.  Cells whose integration fails
    carry NaN.
    """
    re = np.linspace(re_range[0], re_range[1], resolution)
    im = np.linspace(im_range[0], im_range[1], resolution)
    ev = MsfEvaluator(model, settings, mode=mode)
    values = np.full((resolution, resolution), np.nan)
    todo = []
    mirror = []
    for r in range(resolution):
        for c in range(resolution):
            if im[r] < 0.0:
                j = np.flatnonzero(np.isclose(im, -im[r], rtol=0.0, atol=1e-12))
                if j.size:
                    mirror.append((r, c, int(j[0])))
                    continue
            todo.append((r, c))
    mus = [complex(re[c], im[r]) for r, c in todo]
    vals = ev.batch(mus)
    for (r, c), v in zip(todo, vals):
        values[r, c] = v
    for r, c, j in mirror:
        values[r, c] = values[j, c]
    return MsfGrid(re=re, im=im, values=values)


def type2_threshold(model: NodeModel, settings: LyapunovSettings | None = None,
                    mu_max: float = 50.0, n_samples: int = 26,
                    mode: str = "auto") -> float | None:
    """Smallest sampled real gain beyond which the sampled exponent stays
    negative; None when the exponent is still non-negative at mu_max."""
    if mu_max <= 0.0:
        raise ValueError(f"mu_max must be positive, got {mu_max}")
    grid = np.linspace(0.0, mu_max, n_samples)
    ev = MsfEvaluator(model, settings, mode=mode)
    lam = ev.batch(grid)
    if lam[-1] >= 0.0 or not np.isfinite(lam[-1]):
        return None
    nonneg = np.flatnonzero(lam >= 0.0)
    if nonneg.size == 0:
        return float(grid[0])
    return float(grid[nonneg[-1]])


@dataclass(frozen=True)
class ControllabilityVerdict:
    """Per-eigenvalue exponents and the resulting feasibility decision."""

    feasible: bool
    lambda_values: tuple[tuple[complex, float], ...]
    worst: tuple[complex, float]
    margin: float = DEFAULT_MARGIN

    @property
    def marginal(self) -> tuple[complex, ...]:
        return tuple(ev for ev, lam in self.lambda_values if abs(lam) <= self.margin)


def controllability_verdict(model: NodeModel, l22_spectrum,
                            settings: LyapunovSettings | None = None,
                            margin: float = DEFAULT_MARGIN,
                            check_type2: bool = True,
                            mu_max: float = 50.0,
                            evaluator: MsfEvaluator | None = None) -> ControllabilityVerdict:
    """Feasibility of a pinning selection from its reduced-block spectrum.

    Feasible iff the exponent at every reduced eigenvalue is below -margin;
    values within the margin count as infeasible.  Unless disabled, first
    verifies that a large enough real gain stabilizes the model at all
    (raises NotType2Error otherwise).
    """
    ev = evaluator or MsfEvaluator(model, settings)
    if check_type2 and not ev.has_affine_shortcut:
        # affine-decreasing exponents always admit a stabilizing gain
        if type2_threshold(model, settings, mu_max=mu_max) is None:
            raise NotType2Error(
                f"{model.name}: exponent still non-negative at mu={mu_max}"
            )
    eigs = np.asarray(l22_spectrum, dtype=complex).ravel()
    if eigs.size == 0:
        return ControllabilityVerdict(True, (), (0.0 + 0.0j, -np.inf), margin)
    lams = ev.batch(eigs)
    pairs = tuple((complex(e), float(l)) for e, l in zip(eigs, lams))
    worst_i = int(np.nanargmax(lams))
    feasible = bool(np.all(np.isfinite(lams)) and np.all(lams < -margin))
    return ControllabilityVerdict(feasible, pairs, pairs[worst_i], margin)
