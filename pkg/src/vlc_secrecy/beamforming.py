"""Secure relay beamforming vectors for the three relaying schemes.

All three designs maximize a quadratic form of at most rank 2 over the
intersection of a zero-forcing subspace with a (possibly weighted) L1
amplitude-budget ball:

* jamming:           max (ge . J)^2        s.t. g1.J = g2.J = 0, ||J||_1 <= 1
* decode-forward:    max a(g1.d)^2+(1-a)(g2.d)^2  s.t. ge.d = 0, ||d||_1 <= 1
* amplify-forward:   max (b.a)^2 - lam(1+(gj.a)^2) s.t. (hr*ge).a = 0,
                     ||diag(w) a||_1 <= A_bar,   b = hr*gj

The classical closed forms (project the target vector / take a leading
eigenvector, then rescale onto the budget surface) pick the direction that is
optimal over an L2 ball, which is *not* the maximizer over the L1 budget
actually imposed.  Because the objectives have rank <= 2, the exact optimum
is computable instead: the feasible set is a polytope whose extreme points
have support <= codim+1, so we enumerate them; a convex objective is
maximized at one of them, and the indefinite amplify-and-forward objective is
maximized on the boundary of the planar image {(b.a, gj.a)}, which we scan
edge by edge on its convex hull.  The resulting vectors dominate every
feasible point, including the classical constructions.

The amplify-and-forward amplitude constraint nominally involves the random
relay receive signal; it is replaced by the deterministic worst-case
amplitude w_i = hr_i * A_gamma + clip * sigma_n (sigma_n = 1), with the clip
factor taken from the scenario (default 3).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (DegenerateBeamformerError, InsufficientRelaysError)
from .geometry import ChannelGains
from .numerics import bisect_decreasing, orth_projection
from .rates import SchemeParams

DEGENERACY_RTOL = 1e-12
SIGN_TOL = 1e-9


@dataclass(frozen=True)
class Beamformer:
    """Relay weight vector together with its scheme tag and budget.

    For CJ/DF the budget is the unit L1 norm of the weights themselves; for
    AF it is the L1 norm of the weights scaled by the surrogate amplitudes.
    """

    weights: np.ndarray
    scheme: str
    norm_budget: float

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    scale = np.abs(v).max(initial=0.0)
    for comp in v:
        if abs(comp) > SIGN_TOL * max(scale, 1e-300):
            return -v if comp < 0 else v
    return v


def null_directions(null_rows: np.ndarray) -> np.ndarray:
    """Unit-L2 directions of every extreme ray of {x : N x = 0} cap L1 sphere.

    For c constraint rows in R^K the extreme points of the polytope
    {N x = 0, ||x||_1 <= 1} have support at most c+1; for every support set
    whose constraint submatrix has nullity exactly one, the (unique up to
    sign) null direction is an extreme-ray candidate.  Returns one sign
    representative per direction, stacked as rows; enumeration order is
    lexicographic in the support sets, which makes downstream tie-breaking
    deterministic.
    """
    n = np.atleast_2d(np.asarray(null_rows, dtype=float))
    c, k = n.shape
    scale = float(np.linalg.svd(n, compute_uv=False)[0]) if n.size else 0.0
    tol = DEGENERACY_RTOL * max(scale, 1e-300)
    dirs = []
    for m in range(1, min(c + 1, k) + 1):
        for support in combinations(range(k), m):
            sub = n[:, support]
            svals = np.linalg.svd(sub, compute_uv=False)
            rank = int((svals > tol).sum())
            if m - rank != 1:
                continue
            vt = np.linalg.svd(sub)[2]
            v = np.zeros(k)
            v[list(support)] = vt[-1]
            dirs.append(_fix_sign(v / np.linalg.norm(v)))
    return np.array(dirs) if dirs else np.empty((0, k))


def cj_vector(g: ChannelGains) -> Beamformer:
    """Jamming vector maximizing the eavesdropper hit under both-user nulling.

    Solves max (ge . J)^2 over {g1.J = g2.J = 0, ||J||_1 <= 1} exactly by
    enumerating the extreme points of the feasible polytope (the objective is
    convex, so the maximum sits at one of them).  Requires K >= 3 so the
    nulled subspace is nonempty; raises DegenerateBeamformerError when the
    eavesdropper vector lies in the span of the user vectors, in which case
    no jamming direction can reach the eavesdropper.
    """
    if g.relay_count < 3:
        raise InsufficientRelaysError(
            f"cooperative jamming needs K >= 3 relays, got {g.relay_count}")
    residual = orth_projection([g.g1, g.g2]) @ g.ge
    if np.linalg.norm(residual) <= DEGENERACY_RTOL * max(np.linalg.norm(g.ge), 1e-300):
        raise DegenerateBeamformerError(
            "eavesdropper gains lie in the users' span; jamming cannot reach the eavesdropper")
    dirs = null_directions(np.vstack([g.g1, g.g2]))
    verts = dirs / np.abs(dirs).sum(axis=1, keepdims=True)
    vals = (verts @ g.ge) ** 2
    best = int(np.argmax(vals))
    return Beamformer(weights=_fix_sign(verts[best]), scheme="CJ", norm_budget=1.0)


def df_vector(g: ChannelGains, alpha: float) -> Beamformer:
    """Decode-and-forward beamformer for the weighted two-user objective.

    Solves max alpha (g1.d)^2 + (1-alpha) (g2.d)^2 over {ge.d = 0,
    ||d||_1 <= 1} exactly; the objective is convex, so extreme-point
    enumeration is sufficient.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if g.relay_count < 2:
        raise InsufficientRelaysError(
            f"decode-and-forward beamforming needs K >= 2 relays, got {g.relay_count}")
    dirs = null_directions(g.ge.reshape(1, -1))
    if dirs.size == 0:
        raise DegenerateBeamformerError("eavesdropper nulling leaves no feasible direction")
    verts = dirs / np.abs(dirs).sum(axis=1, keepdims=True)
    vals = alpha * (verts @ g.g1) ** 2 + (1.0 - alpha) * (verts @ g.g2) ** 2
    scale = alpha * np.abs(g.g1).max(initial=0.0) ** 2 \
        + (1.0 - alpha) * np.abs(g.g2).max(initial=0.0) ** 2
    best = int(np.argmax(vals))
    if vals[best] <= DEGENERACY_RTOL ** 2 * scale:
        raise DegenerateBeamformerError("both user gains are orthogonal to the nulled subspace")
    return Beamformer(weights=_fix_sign(verts[best]), scheme="DF", norm_budget=1.0)


def _hull_indices(pts: np.ndarray) -> list[int]:
    """Convex hull (counterclockwise) of 2-D points via monotone chain.

    Coordinates are rescaled per axis before the cross-product tests to cope
    with the strong anisotropy of the beamforming images.  Collinear interior
    points are dropped; degenerate clouds collapse to 1 or 2 indices.
    """
    span = np.abs(pts).max(axis=0)
    span[span == 0] = 1.0
    q = pts / span
    order = np.lexsort((q[:, 1], q[:, 0]))

    def build(idx):
        out: list[int] = []
        for i in idx:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                cross = (q[a, 0] - q[o, 0]) * (q[i, 1] - q[o, 1]) \
                    - (q[a, 1] - q[o, 1]) * (q[i, 0] - q[o, 0])
                if cross <= 0:
                    out.pop()
                else:
                    break
            out.append(i)
        return out

    lower = build(order)
    upper = build(order[::-1])
    hull = lower[:-1] + upper[:-1]
    return hull if hull else [int(order[0])]


class AfFeasibleSet:
    """Feasible polytope of the amplify-and-forward design for one user.

    Precomputes the signed extreme points of {(hr*ge).a = 0,
    ||diag(w) a||_1 <= A_bar} and the convex hull of their planar image under
    a -> (b.a, gj.a); ``solve`` then maximizes (b.a)^2 - lam (1+(gj.a)^2)
    exactly for any lam by scanning hull edges (the objective is quadratic
    along each edge, and any interior maximizer improves by moving in +-x, so
    the maximum lies on the boundary or at the origin).
    """

    def __init__(self, g: ChannelGains, user: int, p: SchemeParams, amplitude: float,
                 noise_clip_sigma: float = 3.0):
        if user not in (1, 2):
            raise ValueError(f"user must be 1 or 2, got {user}")
        if g.relay_count < 2:
            raise InsufficientRelaysError(
                f"amplify-and-forward beamforming needs K >= 2 relays, got {g.relay_count}")
        gj = g.g1 if user == 1 else g.g2
        self.k = g.relay_count
        self.b = g.hr * gj
        self.gj = gj
        self.a_bar = p.a_bar(amplitude)
        w = g.hr * p.a_gamma(amplitude) + noise_clip_sigma
        self.points = None
        if self.a_bar > 0.0:
            dirs = null_directions((g.hr * g.ge).reshape(1, -1))
            if dirs.size:
                wnorm = np.abs(dirs * w).sum(axis=1)
                usable = wnorm > 1e-300
                if usable.any():
                    verts = dirs[usable] * (self.a_bar / wnorm[usable])[:, None]
                    self.points = np.concatenate([verts, -verts])
                    self.images = np.stack([self.points @ self.b, self.points @ self.gj], axis=1)
                    self.hull = _hull_indices(self.images)

    def solve(self, lam: float) -> tuple[np.ndarray, float]:
        """Exact maximizer and value of the auxiliary objective at ``lam``."""
        if lam < 0:
            raise ValueError(f"lam must be nonnegative, got {lam}")
        zero = np.zeros(self.k)
        if self.points is None:
            return zero, -lam
        best_q = -lam
        best = zero
        hull = self.hull
        m = len(hull)
        for e in range(m):
            i = hull[e]
            j = hull[(e + 1) % m] if m > 1 else i
            x0, y0 = self.images[i]
            dx = self.images[j, 0] - x0
            dy = self.images[j, 1] - y0
            ts = (0.0,) if i == j else (0.0, 1.0)
            for t in ts:
                x, y = x0 + t * dx, y0 + t * dy
                q = x * x - lam * (1.0 + y * y)
                if q > best_q:
                    best_q, best = q, (1.0 - t) * self.points[i] + t * self.points[j]
            if i != j:
                den = dx * dx - lam * dy * dy
                if den != 0.0:
                    t = -(x0 * dx - lam * y0 * dy) / den
                    if 0.0 < t < 1.0:
                        x, y = x0 + t * dx, y0 + t * dy
                        q = x * x - lam * (1.0 + y * y)
                        if q > best_q:
                            best_q, best = q, (1.0 - t) * self.points[i] + t * self.points[j]
        return _fix_sign(best), best_q

    def achieved_ratio(self, a: np.ndarray) -> float:
        x = float(self.b @ a)
        y = float(self.gj @ a)
        return x * x / (1.0 + y * y)


def af_vector_user(g: ChannelGains, user: int, lam: float, p: SchemeParams,
                   amplitude: float, noise_clip_sigma: float = 3.0) -> Beamformer:
    """Single-user amplify-and-forward vector at a fixed trade-off ``lam``."""
    feas = AfFeasibleSet(g, user, p, amplitude, noise_clip_sigma)
    a, _ = feas.solve(lam)
    return Beamformer(weights=a, scheme="AF", norm_budget=feas.a_bar)


def _dinkelbach(feas: AfFeasibleSet, tol: float) -> tuple[float, np.ndarray, int]:
    """Root of p(lam) = max_a [(b.a)^2 - lam (1 + (gj.a)^2)] by bisection.

    p is strictly decreasing with slope <= -1, p(0) = max (b.a)^2 >= 0, and
    the root (the optimal ratio) is at most p(0), so [0, p(0)] brackets it.
    The bisection tolerance is tightened relative to the achieved ratio at
    lam = 0 so the returned lam matches the ratio its maximizer attains.
    """
    evals = [0]

    def f(lam):
        evals[0] += 1
        return feas.solve(lam)[1]

    a0, q0 = feas.solve(0.0)
    if q0 <= 0.0:
        return 0.0, np.zeros(feas.k), evals[0]
    ratio0 = feas.achieved_ratio(a0)
    bisect_tol = min(tol, 1e-8 * ratio0) if ratio0 > 0 else tol
    lam = bisect_decreasing(f, 0.0, q0 * (1.0 + 1e-9), bisect_tol)
    a, _ = feas.solve(lam)
    return lam, a, evals[0]


def af_dinkelbach(g: ChannelGains, user: int, p: SchemeParams, amplitude: float,
                  tol: float = 1e-8, noise_clip_sigma: float = 3.0) -> tuple[float, Beamformer]:
    """Optimal ratio lam* = max (b.a)^2 / (1 + (gj.a)^2) and its maximizer."""
    feas = AfFeasibleSet(g, user, p, amplitude, noise_clip_sigma)
    lam, a, _ = _dinkelbach(feas, tol)
    return lam, Beamformer(weights=a, scheme="AF", norm_budget=feas.a_bar)


def af_vector(g: ChannelGains, alpha: float, p: SchemeParams, amplitude: float,
              mode: str = "dinkelbach", lam: float = 1.0,
              noise_clip_sigma: float = 3.0, tol: float = 1e-8) -> Beamformer:
    """Combined two-user amplify-and-forward vector a = alpha a1 + (1-alpha) a2.

    ``mode`` selects how each per-user vector is designed: "dinkelbach"
    maximizes the exact ratio, "fixed_lambda" solves the auxiliary problem at
    the given ``lam``.  The convex combination stays feasible (both parts are
    nulled and the weighted L1 budget is convex), possibly with slack.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    parts = []
    for user in (1, 2):
        if mode == "dinkelbach":
            _, bf = af_dinkelbach(g, user, p, amplitude, tol, noise_clip_sigma)
        elif mode == "fixed_lambda":
            bf = af_vector_user(g, user, lam, p, amplitude, noise_clip_sigma)
        else:
            raise ValueError(f"unknown AF mode {mode!r}")
        parts.append(bf)
    weights = alpha * parts[0].weights + (1.0 - alpha) * parts[1].weights
    return Beamformer(weights=weights, scheme="AF", norm_budget=parts[0].norm_budget)
