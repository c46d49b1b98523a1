"""Coined quantum walks on port-labeled graphs with tunable coin measurement.

The package simulates discrete-time walks whose step is a coin toss
followed by a coin-conditioned move along graph edges. A meter of
adjustable strength can read the coin each step, trading interference
for which-path knowledge; at full strength the walk becomes the
classical random chain, at zero strength it stays unitary.
"""

__version__ = "0.1.0"

from .analysis import (
    ComplementarityPoint,
    MixingComparison,
    MixingCurve,
    coherence_l1,
    compare_mixing,
    complementarity_sweep,
    first_crossing,
    time_averaged_distribution,
    tvd,
)
from .classical import (
    classical_run,
    classical_step,
    half_edge_run,
    half_edge_step,
    port_transition_probabilities,
    uniform_distribution,
    validate_distribution,
)
from .coin import (
    CoinSpec,
    build_coin_operator,
    default_coin_spec,
    dft_coin,
    hadamard_phi,
)
from .errors import ConfigError, InvariantViolation, StructureError
from .evolution import (
    StepMap,
    TrajectoryRecord,
    assembled_step_operators,
    cp_step,
    enumerate_branches,
    make_step,
    marginal_history,
    reconstruct_cycle_path,
    run,
    sample_trajectory,
    unitary_step,
    vertex_dephasing,
)
from .graph import (
    Edge,
    PortGraph,
    assign_ports,
    build_cycle,
    from_edge_list,
    load_graph,
    save_graph,
)
from .meter import (
    DephasingKraus,
    MeterCoupling,
    apply_kraus,
    build_meter_unitary,
    conditional_meter_states,
    dephasing_kraus,
    distinguishability,
    induced_coin_channel,
    trace_distance,
    uniform_dephasing_kraus,
    visibility,
)
from .shift import ShiftOperator, build_cycle_shift, build_shift
from .state import (
    DEFAULT_TOLERANCES,
    Tolerances,
    basis_state,
    check_density,
    check_pure,
    flat_index,
    partial_trace_meter,
    position_marginal,
    pure_position_marginal,
    to_density,
)
