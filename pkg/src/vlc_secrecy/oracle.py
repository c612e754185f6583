"""Independent numerical verification of the closed-form secrecy rates.

The closed forms are entropy-power-inequality lower bounds on exact mutual
information differences for uniform signaling through Gaussian noise.  This
module computes those differences exactly (to quadrature tolerance): the
received value is a sum of up to three independent centered uniforms plus
unit Gaussian noise, whose density has a closed form via iterated
antiderivatives of the normal CDF, and differential entropies are evaluated
by adaptive quadrature.  A seeded random search over beamforming feasible
sets provides the optimality oracle for the beamforming designs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .errors import DimensionError, QuadratureError
from .geometry import ChannelGains
from .numerics import orth_projection

GAUSS_ENTROPY = 0.5 * math.log(2.0 * math.pi * math.e)
SUPPORT_SIGMAS = 8.0


@dataclass(frozen=True)
class ScalarChannelSpec:
    """One scalar received value: uniform signal component(s) plus N(0, 1).

    ``component`` selects the signal part: "user1_only" is the single term
    gain*alpha*U(-amplitude, amplitude); "superposition" adds the second
    user's term gain*(1-alpha)*U.  An independent uniform jamming term with
    amplitude jam_gain*jam_amplitude can be added to either.  Setting
    gain = 0 (or alpha degenerating a term) drops that component, leaving the
    pure Gaussian.
    """

    gain: float
    alpha: float
    amplitude: float
    component: str = "user1_only"
    jam_gain: float = 0.0
    jam_amplitude: float = 0.0
    noise_sigma: float = 1.0

    def __post_init__(self):
        if self.component not in ("user1_only", "superposition"):
            raise ValueError(f"unknown component kind {self.component!r}")
        if self.amplitude < 0 or self.jam_amplitude < 0:
            raise ValueError("amplitudes must be nonnegative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.noise_sigma <= 0:
            raise ValueError("noise_sigma must be positive")

    def half_widths(self) -> tuple[float, ...]:
        """Half-widths of the independent uniform components, zeros dropped."""
        widths = [abs(self.gain) * self.alpha * self.amplitude]
        if self.component == "superposition":
            widths.append(abs(self.gain) * (1.0 - self.alpha) * self.amplitude)
        widths.append(abs(self.jam_gain) * self.jam_amplitude)
        return tuple(w for w in widths if w > 0.0)

    def variance(self) -> float:
        return sum(w * w / 3.0 for w in self.half_widths()) + self.noise_sigma ** 2


def _phi(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _phi_int(x, order: int):
    """Iterated antiderivatives of the standard normal density.

    order 0 is the density, 1 the CDF, k+1 the antiderivative of k; each has
    a closed form in terms of the CDF and density.
    """
    if order == 0:
        return _phi(x)
    if order == 1:
        return ndtr(x)
    if order == 2:
        return x * ndtr(x) + _phi(x)
    if order == 3:
        return 0.5 * ((x * x + 1.0) * ndtr(x) + x * _phi(x))
    raise DimensionError(f"at most 3 uniform components supported, got order {order}")


def output_density(spec: ScalarChannelSpec, y):
    """Exact density of the received value at ``y`` (scalar or array).

    Convolving with each uniform component turns the Gaussian kernel into a
    central difference of its next antiderivative, so the density of n
    uniforms plus noise is an alternating sum of _phi_int(., n) over the 2^n
    corner offsets, scaled by the product of the uniform widths.
    """
    y = np.asarray(y, dtype=float)
    sigma = spec.noise_sigma
    widths = tuple(w / sigma for w in spec.half_widths())
    x = y / sigma
    n = len(widths)
    if n == 0:
        return _phi(x) / sigma
    total = np.zeros_like(x)
    for signs in np.ndindex(*(2,) * n):
        eps = np.array([1.0 if s == 0 else -1.0 for s in signs])
        total = total + np.prod(eps) * _phi_int(x + float(eps @ widths), n)
    scale = (2.0 ** n) * math.prod(widths) * sigma
    dens = total / scale
    return np.maximum(dens, 0.0)


def _kink_points(widths: tuple[float, ...]) -> np.ndarray:
    """Locations where the piecewise density formula changes segment."""
    pts = {0.0}
    acc = [0.0]
    for w in widths:
        acc = [a + s * w for a in acc for s in (1.0, -1.0)]
        pts.update(abs(a) for a in acc)
        pts.update(acc)
    return np.array(sorted({p for p in pts}))


def diff_entropy(spec: ScalarChannelSpec, tol: float = 1e-8) -> float:
    """Differential entropy -int p log p in nats via adaptive quadrature.

    Integrates over +-(sum of peaks + 8 noise sigmas); the Gaussian tail
    beyond that is below 1e-15 of mass and cannot affect the default
    tolerance.
    """
    widths = spec.half_widths()
    limit = sum(widths) + SUPPORT_SIGMAS * spec.noise_sigma

    def integrand(y):
        p = float(output_density(spec, y))
        return -p * math.log(p) if p > 0.0 else 0.0

    interior = [float(p) for p in _kink_points(widths) if -limit < p < limit]
    value, abserr, info, *rest = integrate.quad(
        integrand, -limit, limit, points=sorted(set(interior)) or None,
        epsabs=tol, epsrel=1e-10, limit=250, full_output=True)
    if rest:
        raise QuadratureError(f"entropy quadrature failed: {rest[0]}")
    if abserr > max(tol * 10.0, 1e-12):
        raise QuadratureError(f"entropy quadrature error estimate {abserr} above tolerance")
    return value


def _mi_uniform(gain: float, alpha: float, amplitude: float, jam_gain: float,
                jam_amplitude: float, tol: float) -> float:
    """I(x1; gain*alpha*x1 + jam + n) for uniform x1 and independent jam."""
    sig = ScalarChannelSpec(gain=gain, alpha=alpha, amplitude=amplitude,
                            component="user1_only", jam_gain=jam_gain,
                            jam_amplitude=jam_amplitude)
    noise_only = ScalarChannelSpec(gain=jam_gain, alpha=1.0, amplitude=jam_amplitude,
                                   component="user1_only")
    h_noise = diff_entropy(noise_only, tol) if noise_only.half_widths() else GAUSS_ENTROPY
    return diff_entropy(sig, tol) - h_noise


def _mi_weak(gain: float, alpha: float, amplitude: float, jam_gain: float,
             jam_amplitude: float, tol: float) -> float:
    """I(x2; gain*(alpha*x1 + (1-alpha)*x2) + jam + n) for uniform x1, x2."""
    both = ScalarChannelSpec(gain=gain, alpha=alpha, amplitude=amplitude,
                             component="superposition", jam_gain=jam_gain,
                             jam_amplitude=jam_amplitude)
    cond = ScalarChannelSpec(gain=gain, alpha=alpha, amplitude=amplitude,
                             component="user1_only", jam_gain=jam_gain,
                             jam_amplitude=jam_amplitude)
    return diff_entropy(both, tol) - diff_entropy(cond, tol)


def mi_secrecy_oracle(g: ChannelGains, alpha: float, amplitude: float,
                      jam_gain: float = 0.0, jam_amplitude: float = 0.0,
                      tol: float = 1e-8) -> tuple[float, float]:
    """Exact secrecy quantities (c1s, c2s) for uniform signaling.

    c1s = I(x; y1 | x2) - I(x; ye | x2) and c2s = I(x2; y2) - I(x2; ye),
    clamped at zero.  The jamming term (amplitude jam_gain * jam_amplitude)
    enters only the eavesdropper-side channels, both conditionally and
    unconditionally, mirroring a both-user-nulled jamming signal; the caller
    passes the effective source amplitude (reduced by the relay power split
    when relaying is active).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    c1 = _mi_uniform(g.h1, alpha, amplitude, 0.0, 0.0, tol) \
        - _mi_uniform(g.he, alpha, amplitude, jam_gain, jam_amplitude, tol)
    c2 = _mi_weak(g.h2, alpha, amplitude, 0.0, 0.0, tol) \
        - _mi_weak(g.he, alpha, amplitude, jam_gain, jam_amplitude, tol)
    return max(c1, 0.0), max(c2, 0.0)


@dataclass(frozen=True)
class FeasibleSet:
    """Search region for the beamforming optimality oracle.

    Samples are drawn in the orthogonal complement of ``null_vectors`` and
    scaled onto the budget surface: ||x||_1 = norm_budget, or
    ||diag(surrogate_weights) x||_1 = norm_budget when weights are given.
    """

    null_vectors: tuple = ()
    norm_budget: float = 1.0
    surrogate_weights: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "null_vectors",
                           tuple(tuple(float(x) for x in v) for v in self.null_vectors))
        if self.surrogate_weights is not None:
            object.__setattr__(self, "surrogate_weights",
                               tuple(float(x) for x in self.surrogate_weights))
        if self.norm_budget <= 0:
            raise ValueError("norm_budget must be positive")


def random_feasible_search(objective, constraints: FeasibleSet, samples: int,
                           seed: int) -> tuple[np.ndarray, float]:
    """Best of ``samples`` random feasible vectors; deterministic given seed.

    Standard normal draws are projected into the nulled subspace and scaled
    onto the budget surface, then ranked by ``objective``.  Raises
    DimensionError when the null space is empty.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if not constraints.null_vectors:
        raise DimensionError("need at least the ambient dimension via null_vectors")
    k = len(constraints.null_vectors[0])
    proj = orth_projection([np.array(v) for v in constraints.null_vectors])
    if np.abs(proj).max() < 1e-14:
        raise DimensionError("null space is empty; nothing to sample")
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((samples, k)) @ proj
    weights = np.ones(k) if constraints.surrogate_weights is None \
        else np.asarray(constraints.surrogate_weights, dtype=float)
    norms = np.abs(draws * weights).sum(axis=1)
    ok = norms > 1e-300
    draws = draws[ok] * (constraints.norm_budget / norms[ok])[:, None]
    best_val = -math.inf
    best_vec = None
    for row in draws:
        val = float(objective(row))
        if val > best_val:
            best_val = val
            best_vec = row
    if best_vec is None:
        raise DimensionError("all samples degenerate; cannot search")
    return best_vec, best_val
