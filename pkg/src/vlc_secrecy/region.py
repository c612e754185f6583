"""Secrecy-rate-region boundary tracing over the (alpha, gamma) design box.

For a weight mu in [0, 1] the boundary point of a scheme's achievable region
solves max_{alpha, gamma} mu*r1s + (1-mu)*r2s.  The objective is
piecewise-smooth with flat clamped-at-zero plateaus and is not concave, so we
use an exhaustive grid (endpoints always included) followed by local grid
refinement around the incumbent.  Evaluations on a grid share everything that
does not depend on the grid point: channel gains, the jamming vector (scheme
CJ is alpha/gamma independent), the decode-and-forward vertex table (only the
argmax depends on alpha), and per-gamma amplify-and-forward solutions.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import rates
from .beamforming import (AfFeasibleSet, DegenerateBeamformerError, _dinkelbach,
                          cj_vector, null_directions)
from .errors import InsufficientRelaysError, RankDeficiencyError
from .geometry import ChannelGains, Scenario, build_gains
from .rates import SchemeParams

SCHEMES = ("DT", "CJ", "DF", "AF")


@dataclass(frozen=True)
class GridSpec:
    """Search grid: uniform steps over [0,1]^2 plus local refinement rounds."""

    alpha_steps: int = 101
    gamma_steps: int = 101
    refine_rounds: int = 2
    refine_shrink: float = 0.2

    def __post_init__(self):
        if self.alpha_steps < 2 or self.gamma_steps < 2:
            raise ValueError("grid needs at least 2 steps per axis")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be nonnegative")
        if not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refine_shrink must lie in (0, 1)")


@dataclass(frozen=True)
class RegionPoint:
    """One optimized boundary sample of a scheme's secrecy region."""

    scheme: str
    mu: float
    alpha_star: float
    gamma_star: float
    r1s: float
    r2s: float
    objective: float
    flags: tuple[str, ...] = ()


class _Evaluator:
    """Rate surfaces (r1s, r2s) over alpha x gamma grids for one scheme."""

    def __init__(self, scheme: str, scenario: Scenario, af_mode: str = "dinkelbach",
                 fixed_lambda: float = 1.0):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
        if af_mode not in ("dinkelbach", "fixed_lambda"):
            raise ValueError(f"unknown AF mode {af_mode!r}")
        self.scheme = scheme
        self.scenario = scenario
        self.af_mode = af_mode
        self.fixed_lambda = fixed_lambda
        self.gains = build_gains(scenario)
        self.amplitude = scenario.amplitude
        self.fallback = False
        g = self.gains
        if scheme in ("CJ", "DF", "AF") and g.relay_count == 0:
            raise InsufficientRelaysError(f"scheme {scheme} needs relays")
        if scheme == "CJ":
            try:
                self.jam_vector = cj_vector(g).weights
                self.jam_unit = float(g.ge @ self.jam_vector) ** 2
            except (InsufficientRelaysError, DegenerateBeamformerError, RankDeficiencyError):
                self.jam_vector = np.zeros(g.relay_count)
                self.jam_unit = 0.0
                self.fallback = True
        elif scheme == "DF":
            dirs = null_directions(g.ge.reshape(1, -1)) if g.relay_count >= 2 else np.empty((0, g.relay_count))
            if dirs.size:
                verts = dirs / np.abs(dirs).sum(axis=1, keepdims=True)
                self.df_verts = verts
                self.df_v1 = (verts @ g.g1) ** 2
                self.df_v2 = (verts @ g.g2) ** 2
            else:
                self.df_verts = np.zeros((1, g.relay_count))
                self.df_v1 = np.zeros(1)
                self.df_v2 = np.zeros(1)
                self.fallback = True
        elif scheme == "AF":
            self._af_cache: dict[float, tuple[float, ...]] = {}

    # -- AF helpers --------------------------------------------------------

    def _af_solutions(self, gamma: float) -> tuple[float, ...]:
        """Per-user AF vectors at one gamma, reduced to the dot products
        (b_j . a_i, g_j . a_i) that the rate formulas need, plus solver
        iteration counts."""
        cached = self._af_cache.get(gamma)
        if cached is not None:
            return cached
        g = self.gains
        p = SchemeParams(alpha=0.0, gamma=gamma)
        vecs = []
        iters = 0
        for user in (1, 2):
            try:
                feas = AfFeasibleSet(g, user, p, self.amplitude,
                                     self.scenario.noise_clip_sigma)
                if self.af_mode == "dinkelbach":
                    _, a, n = _dinkelbach(feas, 1e-8)
                    iters += n
                else:
                    a, _ = feas.solve(self.fixed_lambda)
            except InsufficientRelaysError:
                a = np.zeros(g.relay_count)
                self.fallback = True
            vecs.append(a)
        a1, a2 = vecs
        b1, b2 = g.hr * g.g1, g.hr * g.g2
        out = (float(b1 @ a1), float(g.g1 @ a1), float(b1 @ a2), float(g.g1 @ a2),
               float(b2 @ a1), float(g.g2 @ a1), float(b2 @ a2), float(g.g2 @ a2),
               float(iters))
        self._af_cache[gamma] = out
        return out

    def af_weights(self, alpha: float, gamma: float) -> np.ndarray:
        """Combined beamformer alpha*a1 + (1-alpha)*a2 at one grid point."""
        g = self.gains
        p = SchemeParams(alpha=alpha, gamma=gamma)
        ws = []
        for user in (1, 2):
            try:
                feas = AfFeasibleSet(g, user, p, self.amplitude,
                                     self.scenario.noise_clip_sigma)
                if self.af_mode == "dinkelbach":
                    _, a, _ = _dinkelbach(feas, 1e-8)
                else:
                    a, _ = feas.solve(self.fixed_lambda)
            except InsufficientRelaysError:
                a = np.zeros(g.relay_count)
            ws.append(a)
        return alpha * ws[0] + (1.0 - alpha) * ws[1]

    # -- grid evaluation ----------------------------------------------------

    def rates_grid(self, alphas: np.ndarray, gammas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Clamped (r1s, r2s) arrays of shape (len(alphas), len(gammas))."""
        g = self.gains
        a2 = self.amplitude * self.amplitude
        al = np.asarray(alphas, dtype=float)[:, None]
        if self.scheme == "DT":
            r1, r2 = rates.dt_raw(g.h1, g.h2, g.he, al, a2)
            r1 = np.broadcast_to(r1, (al.size, len(gammas)))
            r2 = np.broadcast_to(r2, (al.size, len(gammas)))
            return np.maximum(r1, 0.0), np.maximum(r2, 0.0)
        ga = np.asarray(gammas, dtype=float)[None, :]
        amp2_src = (1.0 - ga * ga) * a2
        abar2 = (ga * ga) * a2
        if self.scheme == "CJ":
            jam = self.jam_unit * abar2
            r1, r2 = rates.cj_raw(g.h1, g.h2, g.he, al, amp2_src, jam)
            return np.maximum(r1, 0.0), np.maximum(r2, 0.0)
        if self.scheme == "DF":
            r1 = np.empty((al.size, ga.size))
            r2 = np.empty_like(r1)
            for i, a in enumerate(al[:, 0]):
                idx = int(np.argmax(a * self.df_v1 + (1.0 - a) * self.df_v2))
                b1, b2 = rates.df_raw(g.h1, g.h2, g.he, g.hr, a, amp2_src[0],
                                      abar2[0], self.df_v1[idx], self.df_v2[idx])
                r1[i], r2[i] = b1, b2
            return 0.5 * np.maximum(r1, 0.0), 0.5 * np.maximum(r2, 0.0)
        # AF
        r1 = np.empty((al.size, ga.size))
        r2 = np.empty_like(r1)
        alv = al[:, 0]
        for j, gamma in enumerate(ga[0]):
            x11, y11, x12, y12, x21, y21, x22, y22, _ = self._af_solutions(float(gamma))
            x1 = alv * x11 + (1.0 - alv) * x12
            y1 = alv * y11 + (1.0 - alv) * y12
            x2 = alv * x21 + (1.0 - alv) * x22
            y2 = alv * y21 + (1.0 - alv) * y22
            k1 = g.h1 ** 2 + x1 * x1 / (1.0 + y1 * y1)
            k2 = g.h2 ** 2 + x2 * x2 / (1.0 + y2 * y2)
            b1, b2 = rates.af_raw(g.he, alv, amp2_src[0, j], k1, k2)
            r1[:, j], r2[:, j] = b1, b2
        return 0.5 * np.maximum(r1, 0.0), 0.5 * np.maximum(r2, 0.0)

    def point(self, alpha: float, gamma: float) -> tuple[float, float]:
        r1, r2 = self.rates_grid(np.array([alpha]), np.array([gamma]))
        return float(r1[0, 0]), float(r2[0, 0])

    def point_flags(self, alpha: float, gamma: float) -> tuple[str, ...]:
        flags = []
        if self.fallback:
            flags.append("null_fallback")
        if self.scheme == "CJ":
            m1, m2 = rates.cj_monotonicity(
                self.gains, SchemeParams(alpha=alpha, gamma=gamma), self.amplitude)
            if m1:
                flags.append("cj_mono1")
            if m2:
                flags.append("cj_mono2")
        if self.scheme == "AF" and self.af_mode == "dinkelbach":
            sol = self._af_solutions(gamma)
            flags.append(f"dinkelbach_iters={int(sol[8])}")
        return tuple(flags)


@functools.lru_cache(maxsize=64)
def _evaluator(scheme: str, scenario: Scenario, af_mode: str, fixed_lambda: float) -> _Evaluator:
    return _Evaluator(scheme, scenario, af_mode, fixed_lambda)


def objective_eval(scheme: str, scenario: Scenario, mu: float, alpha: float, gamma: float,
                   af_mode: str = "dinkelbach", fixed_lambda: float = 1.0):
    """Rates and mu-weighted objective at one (alpha, gamma) point.

    DT ignores gamma (no relays transmit).  Beamformer degeneracies do not
    raise here; the affected scheme falls back to the zero beamformer, which
    reduces it to its gamma = 0 behaviour, and the condition is reported via
    the point flags of :func:`optimize_point`.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    SchemeParams(alpha=alpha, gamma=gamma)
    ev = _evaluator(scheme, scenario, af_mode, fixed_lambda)
    if scheme == "DT":
        gamma = 0.0
    r1, r2 = ev.point(alpha, gamma)
    pair = rates.RatePair(r1, r2)
    return pair, pair.weighted(mu)


def _axis(lo: float, hi: float, steps: int) -> np.ndarray:
    return np.linspace(lo, hi, steps)


def optimize_point(scheme: str, scenario: Scenario, mu: float, grid: GridSpec = GridSpec(),
                   af_mode: str = "dinkelbach", fixed_lambda: float = 1.0) -> RegionPoint:
    """Best boundary point for one mu: exhaustive grid plus local refinement.

    Ties break deterministically toward the smallest alpha, then the smallest
    gamma; a refinement round only replaces the incumbent when it finds a
    strictly larger objective, so the result is monotone over rounds.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    ev = _evaluator(scheme, scenario, af_mode, fixed_lambda)
    return _optimize_with(ev, mu, grid)


def _optimize_with(ev: _Evaluator, mu: float, grid: GridSpec) -> RegionPoint:
    lo_a, hi_a = 0.0, 1.0
    lo_g, hi_g = 0.0, 1.0
    best_obj = -np.inf
    best_a = best_g = 0.0
    for round_idx in range(grid.refine_rounds + 1):
        alphas = _axis(lo_a, hi_a, grid.alpha_steps)
        gammas = _axis(lo_g, hi_g, grid.gamma_steps) if ev.scheme != "DT" else np.array([0.0])
        r1, r2 = ev.rates_grid(alphas, gammas)
        obj = mu * r1 + (1.0 - mu) * r2
        flat = int(np.argmax(obj))
        ia, ig = np.unravel_index(flat, obj.shape)
        if obj[ia, ig] > best_obj:
            best_obj = float(obj[ia, ig])
            best_a = float(alphas[ia])
            best_g = float(gammas[ig])
        if round_idx == grid.refine_rounds:
            break
        width_a = (hi_a - lo_a) * grid.refine_shrink
        width_g = (hi_g - lo_g) * grid.refine_shrink
        lo_a = min(max(best_a - 0.5 * width_a, 0.0), 1.0 - width_a)
        hi_a = lo_a + width_a
        if ev.scheme != "DT":
            lo_g = min(max(best_g - 0.5 * width_g, 0.0), 1.0 - width_g)
            hi_g = lo_g + width_g
    # Re-evaluation reproduces the grid value exactly (same code path), so the
    # objective stays consistent with its parts.
    r1, r2 = ev.point(best_a, best_g)
    obj = mu * r1 + (1.0 - mu) * r2
    return RegionPoint(scheme=ev.scheme, mu=mu, alpha_star=best_a, gamma_star=best_g,
                       r1s=r1, r2s=r2, objective=obj,
                       flags=ev.point_flags(best_a, best_g))


def boundary_sweep(scheme: str, scenario: Scenario, mu_list, grid: GridSpec = GridSpec(),
                   af_mode: str = "dinkelbach", fixed_lambda: float = 1.0) -> list[RegionPoint]:
    """One optimized point per mu, returned in ascending mu order."""
    mus = sorted(float(m) for m in mu_list)
    if not mus:
        raise ValueError("mu_list must be nonempty")
    ev = _evaluator(scheme, scenario, af_mode, fixed_lambda)
    return [_optimize_with(ev, mu, grid) for mu in mus]


def sum_rate(scheme: str, scenario: Scenario, grid: GridSpec = GridSpec(),
             af_mode: str = "dinkelbach", fixed_lambda: float = 1.0) -> RegionPoint:
    """Secrecy sum-rate point (equal user weighting, mu = 1/2)."""
    return optimize_point(scheme, scenario, 0.5, grid, af_mode, fixed_lambda)
