"""Closed-form achievable secrecy rates for the four transmission schemes.

Two users share a superposition-coded signal x = alpha*x1 + (1-alpha)*x2 with
uniform signaling under a peak-amplitude budget; user 1 is the strong user
(h1 >= h2) and applies successive interference cancellation.  All rates are
in nats per channel use, with noise variance normalized to 1.  Each formula
is a lower bound built from the entropy power inequality on the legitimate
side and a max-entropy Gaussian substitution on the eavesdropper side, hence
the recurring constants 2/(pi*e) and 1/3 (variance of a unit uniform).

The relaying schemes split the amplitude budget: the relays get
A_bar = gamma*A and the source keeps A_gamma = sqrt(1-gamma^2)*A, so the
total peak power A^2 is conserved.

Formula helpers (``*_raw``) accept numpy arrays for alpha/gamma-derived
arguments so rate surfaces can be evaluated on grids without re-deriving the
expressions; the public operations validate inputs and clamp at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InsufficientRelaysError, NullingViolationError
from .geometry import ChannelGains

TWO_OVER_PI_E = 2.0 / (math.pi * math.e)
ONE_THIRD = 1.0 / 3.0
NULLING_RTOL = 1e-9
L1_BUDGET_TOL = 1e-12


@dataclass(frozen=True)
class SchemeParams:
    """Superposition weight alpha and relay power-split fraction gamma."""

    alpha: float
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")

    def a_gamma(self, amplitude: float) -> float:
        """Effective source amplitude once the relays take their share."""
        return math.sqrt(max(0.0, 1.0 - self.gamma * self.gamma)) * amplitude

    def a_bar(self, amplitude: float) -> float:
        """Relay amplitude budget."""
        return self.gamma * amplitude


@dataclass(frozen=True)
class RatePair:
    """Achievable secrecy rates (strong user, weak user) in nats per use."""

    r1s: float
    r2s: float

    def __post_init__(self):
        for name, v in (("r1s", self.r1s), ("r2s", self.r2s)):
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")

    def weighted(self, mu: float) -> float:
        return mu * self.r1s + (1.0 - mu) * self.r2s


def _clamp(x):
    return np.maximum(x, 0.0)


def _check_nulling(gain_vec: np.ndarray, weights: np.ndarray, what: str) -> None:
    scale = float(np.abs(gain_vec).max(initial=0.0) * np.abs(weights).sum())
    residual = abs(float(gain_vec @ weights))
    if residual > NULLING_RTOL * max(scale, 1e-300):
        raise NullingViolationError(
            f"{what} residual {residual:.3e} exceeds {NULLING_RTOL:.0e} * {scale:.3e}")


def _check_l1(weights: np.ndarray, budget: float, what: str) -> None:
    n1 = float(np.abs(weights).sum())
    if n1 > budget * (1.0 + L1_BUDGET_TOL) + L1_BUDGET_TOL * 1e-300:
        raise ValueError(f"{what} L1 norm {n1} exceeds budget {budget}")


# ---------------------------------------------------------------------------
# Raw (unclamped) formula bodies; array friendly.

def dt_raw(h1, h2, he, alpha, amp2):
    """Direct-transmission rate bodies before the positive-part clamp."""
    u = alpha * alpha * amp2
    r1 = 0.5 * np.log1p(TWO_OVER_PI_E * h1 * h1 * u) \
        - 0.5 * np.log1p(ONE_THIRD * he * he * u)
    r2 = 0.5 * np.log1p(TWO_OVER_PI_E * h2 * h2 * amp2) \
        - 0.5 * np.log1p(ONE_THIRD * h2 * h2 * u) \
        - 0.5 * np.log1p(ONE_THIRD * he * he * amp2) \
        + 0.5 * np.log1p(TWO_OVER_PI_E * he * he * u)
    return r1, r2


def cj_raw(h1, h2, he, alpha, amp2_src, jam):
    """Cooperative-jamming rate bodies; ``jam`` is (ge . J)^2 * A_bar^2."""
    u = alpha * alpha * amp2_src
    r1 = 0.5 * np.log1p(TWO_OVER_PI_E * h1 * h1 * u) \
        - (0.5 * np.log1p(ONE_THIRD * (he * he * u + jam))
           - 0.5 * np.log1p(TWO_OVER_PI_E * jam))
    r2 = 0.5 * np.log1p(TWO_OVER_PI_E * h2 * h2 * amp2_src) \
        - 0.5 * np.log1p(ONE_THIRD * h2 * h2 * u) \
        - (0.5 * np.log1p(ONE_THIRD * (he * he * amp2_src + jam))
           - 0.5 * np.log1p(TWO_OVER_PI_E * (he * he * u + jam)))
    return r1, r2


def df_raw(h1, h2, he, hr, alpha, amp2_src, abar2, v1, v2):
    """Decode-and-forward bodies. v1/v2 are (g1 . d)^2 and (g2 . d)^2.

    Each user's first-hop sum (source phase + relay phase) competes with the
    relay decoding bottleneck, which is a min over individual relays.  The
    half-duplex pre-log 1/2 is applied by the caller together with the clamp.
    """
    hr = np.asarray(hr, dtype=float)
    u = alpha * alpha * amp2_src
    hop1 = 0.5 * np.log1p(TWO_OVER_PI_E * h1 * h1 * u) \
        + 0.5 * np.log1p(TWO_OVER_PI_E * v1 * (alpha * alpha) * abar2)
    hr_min2 = float(np.min(hr) ** 2) if hr.size else 0.0
    decode1 = 0.5 * np.log1p(TWO_OVER_PI_E * hr_min2 * u)
    r1_body = np.minimum(hop1, decode1)

    hop2 = 0.5 * np.log1p(TWO_OVER_PI_E * h2 * h2 * amp2_src) \
        - 0.5 * np.log1p(ONE_THIRD * h2 * h2 * u) \
        + 0.5 * np.log1p(TWO_OVER_PI_E * v2 * abar2) \
        - 0.5 * np.log1p(ONE_THIRD * v2 * (alpha * alpha) * abar2)
    # The weak user's decode bottleneck ratio is not monotone in the relay
    # gain, so the min must be taken per relay.
    hr2 = hr * hr
    d2 = 0.5 * np.log1p(TWO_OVER_PI_E * np.multiply.outer(np.asarray(amp2_src), hr2)) \
        - 0.5 * np.log1p(ONE_THIRD * np.multiply.outer(np.asarray(u), hr2))
    decode2 = d2.min(axis=-1)
    r2_body = np.minimum(hop2, decode2)

    eve1 = 0.5 * np.log1p(ONE_THIRD * he * he * u)
    eve2 = 0.5 * np.log1p(ONE_THIRD * he * he * amp2_src) \
        - 0.5 * np.log1p(TWO_OVER_PI_E * he * he * u)
    return r1_body - eve1, r2_body - eve2


def af_raw(he, alpha, amp2_src, k1sq, k2sq):
    """Amplify-and-forward bodies with effective gains kappa_j."""
    u = alpha * alpha * amp2_src
    r1 = 0.5 * np.log1p(TWO_OVER_PI_E * k1sq * u) \
        - 0.5 * np.log1p(ONE_THIRD * he * he * u)
    r2 = 0.5 * np.log1p(TWO_OVER_PI_E * k2sq * amp2_src) \
        - 0.5 * np.log1p(ONE_THIRD * k2sq * u) \
        - 0.5 * np.log1p(ONE_THIRD * he * he * amp2_src) \
        + 0.5 * np.log1p(TWO_OVER_PI_E * he * he * u)
    return r1, r2


# ---------------------------------------------------------------------------
# Public operations.

def dt_rates(g: ChannelGains, alpha: float, amplitude: float) -> RatePair:
    """Secrecy rates without relays (Theorem-style EPI lower bounds)."""
    p = SchemeParams(alpha=alpha)
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    r1, r2 = dt_raw(g.h1, g.h2, g.he, p.alpha, amplitude * amplitude)
    return RatePair(float(_clamp(r1)), float(_clamp(r2)))


def dt_positivity(g: ChannelGains, alpha: float, amplitude: float) -> tuple[bool, bool]:
    """Whether each user's direct-transmission secrecy rate is positive.

    User 1: (2/pi e) h1^2 > (1/3) he^2, independent of alpha and A.
    User 2: the quadratic-in-gains condition obtained by expanding the rate
    body; the bilinear term carries an A^2 factor (it does not cancel the way
    the user-1 condition does).
    """
    SchemeParams(alpha=alpha)
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    user1 = TWO_OVER_PI_E * g.h1 ** 2 > ONE_THIRD * g.he ** 2
    a2 = alpha * alpha
    lhs = (TWO_OVER_PI_E - a2 * ONE_THIRD) * g.h2 ** 2 \
        + (2.0 * a2 / (math.pi * math.e) - ONE_THIRD) * g.he ** 2
    rhs = (1.0 / 9.0 - 4.0 / (math.pi * math.e) ** 2) * a2 * g.h2 ** 2 * g.he ** 2 \
        * amplitude * amplitude
    return bool(user1), bool(lhs > rhs)


def cj_rates(g: ChannelGains, p: SchemeParams, amplitude: float, jam_weights) -> RatePair:
    """Secrecy rates when relays radiate a jamming signal nulled at both users.

    ``jam_weights`` must satisfy the zero-forcing condition g1.J = g2.J = 0
    (the formula is meaningless otherwise) and the unit L1 budget.
    """
    J = np.asarray(jam_weights, dtype=float)
    if J.shape != g.g1.shape:
        raise DimensionError(f"jam vector shape {J.shape} != relay count {g.g1.shape}")
    _check_l1(J, 1.0, "jam vector")
    _check_nulling(g.g1, J, "strong-user nulling")
    _check_nulling(g.g2, J, "weak-user nulling")
    amp2_src = (1.0 - p.gamma * p.gamma) * (amplitude * amplitude)
    abar2 = (p.gamma * amplitude) ** 2
    jam = float(g.ge @ J) ** 2 * abar2
    r1, r2 = cj_raw(g.h1, g.h2, g.he, p.alpha, amp2_src, jam)
    return RatePair(float(_clamp(r1)), float(_clamp(r2)))


def cj_monotonicity(g: ChannelGains, p: SchemeParams, amplitude: float) -> tuple[bool, bool]:
    """Whether each user's jamming rate grows with the jam power (ge . J)^2.

    The threshold constant is pi*e/2 - 3 (about 1.27).
    """
    thresh = math.pi * math.e / 2.0 - 3.0
    ag2 = (1.0 - p.gamma * p.gamma) * amplitude * amplitude
    c1 = g.he ** 2 * p.alpha ** 2 * ag2 > thresh
    c2 = g.he ** 2 * (1.0 - p.alpha ** 2) * ag2 > thresh
    return bool(c1), bool(c2)


def df_rates(g: ChannelGains, p: SchemeParams, amplitude: float, relay_weights) -> RatePair:
    """Two-phase decode-and-forward secrecy rates with an eve-nulled beamformer.

    The pre-log 1/2 reflects the half-duplex relays; the relay decoding
    bottleneck (worst relay) caps each user's first hop.
    """
    if g.relay_count == 0:
        raise InsufficientRelaysError("decode-and-forward needs at least one relay")
    d = np.asarray(relay_weights, dtype=float)
    if d.shape != g.g1.shape:
        raise DimensionError(f"beamformer shape {d.shape} != relay count {g.g1.shape}")
    _check_l1(d, 1.0, "relay beamformer")
    _check_nulling(g.ge, d, "eavesdropper nulling")
    amp2_src = (1.0 - p.gamma * p.gamma) * (amplitude * amplitude)
    abar2 = (p.gamma * amplitude) ** 2
    v1 = float(g.g1 @ d) ** 2
    v2 = float(g.g2 @ d) ** 2
    r1, r2 = df_raw(g.h1, g.h2, g.he, g.hr, p.alpha, amp2_src, abar2, v1, v2)
    return RatePair(0.5 * float(_clamp(r1)), 0.5 * float(_clamp(r2)))


def af_kappa(g: ChannelGains, amp_weights) -> tuple[float, float]:
    """Effective squared gains kappa_j^2 seen after maximal-ratio combining.

    kappa_j^2 = h_j^2 + (g_j . diag(hr) a)^2 / (1 + (g_j . a)^2): the direct
    link plus the relayed branch discounted by its amplified-noise variance.
    """
    if g.relay_count == 0:
        raise InsufficientRelaysError("amplify-and-forward needs at least one relay")
    a = np.asarray(amp_weights, dtype=float)
    if a.shape != g.g1.shape:
        raise DimensionError(f"beamformer shape {a.shape} != relay count {g.g1.shape}")
    ha = g.hr * a
    k1 = g.h1 ** 2 + float(g.g1 @ ha) ** 2 / (1.0 + float(g.g1 @ a) ** 2)
    k2 = g.h2 ** 2 + float(g.g2 @ ha) ** 2 / (1.0 + float(g.g2 @ a) ** 2)
    return float(k1), float(k2)


def af_rates(g: ChannelGains, p: SchemeParams, amplitude: float, amp_weights) -> RatePair:
    """Two-phase amplify-and-forward secrecy rates with an eve-nulled beamformer."""
    a = np.asarray(amp_weights, dtype=float)
    _check_nulling(g.hr * g.ge, a, "eavesdropper nulling (amplified)")
    k1, k2 = af_kappa(g, a)
    amp2_src = (1.0 - p.gamma * p.gamma) * (amplitude * amplitude)
    r1, r2 = af_raw(g.he, p.alpha, amp2_src, k1, k2)
    return RatePair(0.5 * float(_clamp(r1)), 0.5 * float(_clamp(r2)))
