"""Node layout and line-of-sight VLC channel gains.

All transmitters (source luminaire, relay luminaires) face straight down and
follow a Lambertian radiation pattern; receivers (user/eavesdropper photo
detectors) face straight up.  The gain between a transmitter at height z_t and
a receiver at height z_r < z_t over a link of length l is

    A_det * (m + 1) / (2 pi l^2) * (|z_t - z_r| / l)^(m + 1),

where A_det is the detector area and m the Lambertian order of the LED.
Gains are real and nonnegative; noise variances are normalized to 1, so the
amplitude budget A carries the SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class Point3:
    """Position in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise GeometryError(f"non-finite coordinate in {(self.x, self.y, self.z)}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


def lambertian_order(half_angle_deg: float) -> float:
    """Lambertian emission order m = -ln 2 / ln(cos phi_half).

    phi_half is the LED semi-angle at half power, in degrees, restricted to
    (0, 90) so the logarithm is well defined.
    """
    if not 0.0 < half_angle_deg < 90.0:
        raise GeometryError(f"half_angle_deg must lie in (0, 90), got {half_angle_deg}")
    return -math.log(2.0) / math.log(math.cos(math.radians(half_angle_deg)))


@dataclass(frozen=True)
class OpticalParams:
    """Photo-detector area (m^2) and LED half-power semi-angle (degrees)."""

    detector_area: float = 1e-4
    half_angle_deg: float = 60.0
    lambertian_order: float = field(init=False)

    def __post_init__(self):
        if self.detector_area <= 0:
            raise GeometryError(f"detector_area must be positive, got {self.detector_area}")
        object.__setattr__(self, "lambertian_order", lambertian_order(self.half_angle_deg))


def channel_gain(tx: Point3, rx: Point3, optics: OpticalParams) -> float:
    """Line-of-sight gain from a downward-facing luminaire to a detector.

    Returns 0 at grazing incidence (equal heights).  Raises GeometryError for
    coincident nodes or a receiver above the transmitter.
    """
    dx, dy, dz = tx.x - rx.x, tx.y - rx.y, tx.z - rx.z
    l2 = dx * dx + dy * dy + dz * dz
    if l2 == 0.0:
        raise GeometryError(f"coincident transmitter and receiver at {(tx.x, tx.y, tx.z)}")
    if dz < 0.0:
        raise GeometryError("receiver above transmitter; downward-facing luminaires assumed")
    if dz == 0.0:
        return 0.0
    m = optics.lambertian_order
    cos_pow = (dz / math.sqrt(l2)) ** (m + 1.0)
    return optics.detector_area * (m + 1.0) / (2.0 * math.pi * l2) * cos_pow


@dataclass(frozen=True)
class Scenario:
    """Full problem instance: node positions, optics and amplitude budget.

    ``amplitude`` is the system peak-amplitude budget A shared between the
    source and (when relaying) the relays.  ``noise_clip_sigma`` sets the
    deterministic clip on relay receiver noise used by the amplify-and-forward
    amplitude surrogate (see :mod:`vlc_secrecy.beamforming`).
    """

    source: Point3
    user_a: Point3
    user_b: Point3
    eavesdropper: Point3
    relays: tuple[Point3, ...] = ()
    optics: OpticalParams = OpticalParams()
    amplitude: float = 1e7
    noise_clip_sigma: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "relays", tuple(self.relays))
        if self.amplitude <= 0:
            raise GeometryError(f"amplitude budget must be positive, got {self.amplitude}")
        if self.noise_clip_sigma < 0:
            raise GeometryError("noise_clip_sigma must be nonnegative")
        nodes = [("source", self.source), ("user_a", self.user_a),
                 ("user_b", self.user_b), ("eavesdropper", self.eavesdropper)]
        nodes += [(f"relay[{i}]", r) for i, r in enumerate(self.relays)]
        seen = {}
        for name, p in nodes:
            key = (p.x, p.y, p.z)
            if key in seen:
                raise GeometryError(f"{name} coincides with {seen[key]} at {key}")
            seen[key] = name
        receivers = [("user_a", self.user_a), ("user_b", self.user_b),
                     ("eavesdropper", self.eavesdropper)]
        for tname, t in [("source", self.source)] + [(f"relay[{i}]", r) for i, r in enumerate(self.relays)]:
            for rname, r in receivers:
                if t.z <= r.z:
                    raise GeometryError(f"{tname} must be strictly above {rname} in z "
                                        f"({t.z} <= {r.z})")

    @property
    def relay_count(self) -> int:
        return len(self.relays)


@dataclass(frozen=True)
class ChannelGains:
    """All source/relay link gains with the strong-user convention h1 >= h2.

    ``swapped`` records whether user_a/user_b were relabeled to enforce the
    convention.  Vectors are indexed in relay order.
    """

    h1: float
    h2: float
    he: float
    hr: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    ge: np.ndarray
    swapped: bool

    def __post_init__(self):
        for name in ("hr", "g1", "g2", "ge"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.h1 < self.h2:
            raise GeometryError("strong-user convention violated: h1 < h2")

    @property
    def relay_count(self) -> int:
        return self.hr.size


def build_gains(scenario: Scenario) -> ChannelGains:
    """Compute every link gain and relabel users so the stronger one is user 1."""
    opt = scenario.optics
    ha = channel_gain(scenario.source, scenario.user_a, opt)
    hb = channel_gain(scenario.source, scenario.user_b, opt)
    swapped = hb > ha
    u1, u2 = (scenario.user_b, scenario.user_a) if swapped else (scenario.user_a, scenario.user_b)
    h1, h2 = (hb, ha) if swapped else (ha, hb)
    he = channel_gain(scenario.source, scenario.eavesdropper, opt)
    hr = np.array([channel_gain(scenario.source, r, opt) for r in scenario.relays])
    g1 = np.array([channel_gain(r, u1, opt) for r in scenario.relays])
    g2 = np.array([channel_gain(r, u2, opt) for r in scenario.relays])
    ge = np.array([channel_gain(r, scenario.eavesdropper, opt) for r in scenario.relays])
    return ChannelGains(h1=h1, h2=h2, he=he, hr=hr, g1=g1, g2=g2, ge=ge, swapped=swapped)
