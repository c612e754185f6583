"""Small dense linear-algebra and root-finding primitives.

Everything here is deterministic and sized for K <= ~16 relays; no attempt is
made at large-scale performance.
"""

from __future__ import annotations

import numpy as np

from .errors import (BracketingError, ConvergenceError, DimensionError,
                     NonSymmetricError, RankDeficiencyError)

RANK_RTOL = 1e-12          # relative to the largest singular value
EIG_TOL = 1e-10
EIG_MAX_ITER = 10_000
SYM_RTOL = 1e-12


def orth_projection(columns) -> np.ndarray:
    """Orthogonal projector onto the complement of span(columns).

    Given n < K linearly independent K-vectors stacked as columns of B,
    returns P = I_K - B (B^T B)^-1 B^T, i.e. the projector onto the null
    space of B^T.  Rank is checked by SVD with tolerance ``RANK_RTOL``
    relative to the largest singular value.
    """
    B = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    k, n = B.shape
    if n >= k:
        raise DimensionError(f"need fewer columns than rows, got {n} columns in R^{k}")
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[-1] <= RANK_RTOL * sv[0]:
        raise RankDeficiencyError(
            f"columns are rank deficient (singular values {sv})")
    # QR is numerically kinder than forming (B^T B)^-1 directly.
    q, _ = np.linalg.qr(B)
    p = np.eye(k) - q @ q.T
    return 0.5 * (p + p.T)


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    scale = np.abs(m).max()
    if scale > 0 and np.abs(m - m.T).max() > SYM_RTOL * scale * 10:
        raise NonSymmetricError("matrix is not symmetric to tolerance")
    return 0.5 * (m + m.T)


def leading_eigenvector(m) -> tuple[np.ndarray, float]:
    """Unit eigenvector for the largest *algebraic* eigenvalue of a symmetric matrix.

    Power iteration finds the eigenvalue largest in magnitude, so the matrix is
    first shifted by its Gershgorin lower bound to make the target eigenvalue
    the dominant one even for indefinite input.  Deterministic all-ones start
    vector; on stagnation (start orthogonal to the leading eigenspace) the
    start is perturbed deterministically.  Sign convention: the first
    component with magnitude above 1e-9 is positive.
    """
    m = _check_symmetric(m)
    k = m.shape[0]
    diag = np.diag(m)
    radii = np.abs(m).sum(axis=1) - np.abs(diag)
    shift = float((diag - radii).min())
    shifted = m - shift * np.eye(k)

    v = np.ones(k) / np.sqrt(k)
    lam_old = np.inf
    scale = max(np.abs(m).max(), 1e-300)
    for it in range(EIG_MAX_ITER):
        w = shifted @ v
        norm = np.linalg.norm(w)
        if norm <= 1e-300:
            # v lies in the kernel of the shifted matrix: perturb deterministically.
            v = np.ones(k) / np.sqrt(k)
            v[it % k] += 1.0
            v /= np.linalg.norm(v)
            continue
        v_new = w / norm
        lam = float(v_new @ (m @ v_new))
        if np.linalg.norm(m @ v_new - lam * v_new) <= EIG_TOL * scale:
            v = v_new
            break
        if abs(lam - lam_old) <= 1e-16 * scale and it > 50:
            # Stagnated without meeting the residual: perturb the iterate.
            v_new = v_new + 1e-6 * np.eye(k)[it % k]
            v_new /= np.linalg.norm(v_new)
        lam_old = lam
        v = v_new
    else:
        raise ConvergenceError(f"power iteration did not converge in {EIG_MAX_ITER} steps")

    lam = float(v @ (m @ v))
    for comp in v:
        if abs(comp) > 1e-9:
            if comp < 0:
                v = -v
            break
    return v, lam


def bisect_decreasing(f, lo: float, hi: float, tol: float) -> float:
    """Root of a decreasing function: f(lo) > 0 >= f(hi) after bracketing.

    If f(hi) > 0 the upper end is doubled (at most 60 times) until the sign
    changes.  Stops when |f(mid)| <= tol or the interval width drops below
    tol * max(1, |mid|).
    """
    if lo >= hi:
        raise BracketingError(f"need lo < hi, got [{lo}, {hi}]")
    f_lo = f(lo)
    if f_lo <= 0:
        if f_lo == 0:
            return lo
        raise BracketingError(f"f(lo) = {f_lo} is not positive at lo = {lo}")
    f_hi = f(hi)
    doublings = 0
    while f_hi > 0:
        if doublings >= 60:
            raise BracketingError(f"no sign change after 60 doublings (hi = {hi})")
        lo, f_lo = hi, f_hi
        hi *= 2.0
        f_hi = f(hi)
        doublings += 1

    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) <= tol:
            return mid
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            return 0.5 * (lo + hi)
    return 0.5 * (lo + hi)
