"""Underlay cognitive MAC capacity simulator with random aerial beamforming.

Library layout:

* :mod:`cogmac.analytic` - closed-form distributions, scaling laws, and the
  special functions behind them (Lambert W, modified Bessel I0).
* :mod:`cogmac.channels` - seeded Rayleigh/Rician channel samplers.
* :mod:`cogmac.rab` - random basis-pattern weights and equivalent channels.
* :mod:`cogmac.espar` - parasitic-array beamspace model (currents, basis
  patterns, pattern weights).
* :mod:`cogmac.simulator` - max-SINR scheduling and Monte-Carlo capacity.
* :mod:`cogmac.stats` - empirical CDFs and Kolmogorov-Smirnov checks.
* :mod:`cogmac.validation` - the named cross-validation checks run by the
  CLI and the acceptance test suite.
* :mod:`cogmac.cli` - ``cogmac`` command-line front end.
"""

from .analytic import (
    RatioDistParams,
    RicianSpec,
    ScalingLawEval,
    bessel_i0,
    bessel_i0e,
    effective_users_moderate_k,
    effective_users_rab_m2,
    lambert_w0,
    normalizer_a_n,
    rab_m2_a_tilde_pdf,
    rab_m2_cdf,
    rab_m2_tail_cdf,
    ratio_cdf,
    ratio_pdf,
    theorem1_law,
)
from .channels import ChannelRealization, ComplexGain, FadingSpec
from .rab import RabWeights, arcsine_pdf, draw_weights, transmit_power
from .simulator import (
    CapacityEstimate,
    NetworkConfig,
    SlotOutcome,
    SweepResult,
    ergodic_capacity,
    growth_flatness,
    run_experiment,
    run_slot,
    sweep,
)
from .stats import EmpiricalDist, KsReport, empirical_cdf, ks_test, max_normalization_check

__version__ = "0.1.0"
