"""Achievable secrecy-rate regions for a two-user VLC broadcast channel
with trusted half-duplex relay luminaires.

The package computes closed-form achievable secrecy rates for direct
transmission, cooperative jamming, decode-and-forward and amplify-and-forward
relaying under peak-amplitude constraints, designs the corresponding secure
beamforming vectors, traces rate-region boundaries over the superposition /
power-split design box, and validates every closed form against an exact
mutual-information quadrature oracle.
"""

from .beamforming import (AfFeasibleSet, Beamformer, af_dinkelbach, af_vector,
                          af_vector_user, cj_vector, df_vector, null_directions)
from .errors import (BracketingError, ConvergenceError, DegenerateBeamformerError,
                     DimensionError, GeometryError, InsufficientRelaysError,
                     NonSymmetricError, NullingViolationError, QuadratureError,
                     RankDeficiencyError, ScenarioError, VlcSecrecyError)
from .geometry import (ChannelGains, OpticalParams, Point3, Scenario, build_gains,
                       channel_gain, lambertian_order)
from .numerics import bisect_decreasing, leading_eigenvector, orth_projection
from .oracle import (FeasibleSet, ScalarChannelSpec, diff_entropy, mi_secrecy_oracle,
                     output_density, random_feasible_search)
from .rates import (RatePair, SchemeParams, af_kappa, af_rates, cj_monotonicity,
                    cj_rates, df_rates, dt_positivity, dt_rates)
from .region import (GridSpec, RegionPoint, SCHEMES, boundary_sweep, objective_eval,
                     optimize_point, sum_rate)

__version__ = "0.1.0"
