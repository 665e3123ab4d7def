"""relaymi: finite-alphabet mutual-information precoding for AF relay channels.

The library optimizes a generalized linear precoder for a two-hop
amplify-and-forward relay network under discrete-constellation inputs,
maximizing Monte Carlo estimates of mutual information.  The main entry
points are optimize_two_step (the alternating power/rotation method), the
direct-gradient and Gaussian-waterfilling baselines, and the experiment
drivers run_convergence / run_sweep behind the `relaymi` CLI.
"""

from .channel import (
    EffectiveChannel,
    RelayNetworkParams,
    amplification_factor,
    effective_channel,
    select_relay,
)
from .constellation import (
    CapacityError,
    Constellation,
    SymbolSpace,
    build_constellation,
    build_symbol_space,
    parse_constellation_name,
)
from .experiments import (
    ExperimentConfig,
    SweepRow,
    build_config,
    mi_eval,
    run_convergence,
    run_sweep,
    snr_at_level,
)
from .infotheory import (
    MiEstimate,
    MmseMatrix,
    NoiseBatch,
    check_stationarity,
    derive_seed,
    draw_noise,
    mmse_matrix,
    mutual_information,
    mutual_information_nats,
    mutual_information_oracle,
    unitary_invariance_check,
)
from .manifold import project_to_stiefel, require_unitary, stiefel_gradient
from .optimizer import (
    BarrierConfig,
    EstimatorContext,
    OptimizerConfig,
    OptimizerReport,
    Precoder,
    TracePoint,
    barrier_gradient,
    barrier_objective,
    direct_gradient_baseline,
    gaussian_waterfilling_baseline,
    optimize_power,
    optimize_rotation,
    optimize_two_step,
    power_jacobian,
)

__version__ = "0.1.0"

__all__ = [
    "amplification_factor",
    "barrier_gradient",
    "barrier_objective",
    "build_config",
    "build_constellation",
    "build_symbol_space",
    "check_stationarity",
    "derive_seed",
    "direct_gradient_baseline",
    "draw_noise",
    "effective_channel",
    "gaussian_waterfilling_baseline",
    "mi_eval",
    "mmse_matrix",
    "mutual_information",
    "mutual_information_nats",
    "mutual_information_oracle",
    "optimize_power",
    "optimize_rotation",
    "optimize_two_step",
    "parse_constellation_name",
    "power_jacobian",
    "project_to_stiefel",
    "require_unitary",
    "run_convergence",
    "run_sweep",
    "select_relay",
    "snr_at_level",
    "stiefel_gradient",
    "unitary_invariance_check",
    "BarrierConfig",
    "CapacityError",
    "Constellation",
    "EffectiveChannel",
    "EstimatorContext",
    "ExperimentConfig",
    "MiEstimate",
    "MmseMatrix",
    "NoiseBatch",
    "OptimizerConfig",
    "OptimizerReport",
    "Precoder",
    "RelayNetworkParams",
    "SweepRow",
    "SymbolSpace",
    "TracePoint",
]
