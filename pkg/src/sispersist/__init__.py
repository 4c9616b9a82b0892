"""Mean persistence times of heterogeneous SIS epidemics.

Three independent routes to the persistence time and its large-population
exponent: exact eigenvalue computation on the finite state space, closed-form
action formulas for single-sided heterogeneity, and Monte-Carlo simulation,
plus a Hamiltonian connecting-orbit solver for mixed heterogeneity and
ordering predicates for the monotonicity results.
"""

from .asymptotics import (
    action_closed_form,
    action_homogeneous,
    action_network_in,
    action_network_out,
    endemic_equilibrium,
    momentum_potential,
    momentum_potential_staged,
    momentum_residual,
    momentum_residual_staged,
    momentum_root,
    momentum_root_staged,
    saturation_root,
    staged_saturation_root,
    state_potential,
    state_potential_gradient,
    state_potential_gradient_staged,
    state_potential_staged,
    terminal_momentum,
    terminal_momentum_staged,
)
from .errors import (
    ConvergenceError,
    DegreeBalanceError,
    MixedHeterogeneityError,
    NoExtinctionsError,
    SpecError,
    StateSpaceError,
    SubcriticalError,
)
from .exact import (
    QsdCache,
    QsdResult,
    StateSpace,
    build_generator,
    dump_qsd_csv,
    expected_absorption_times,
    finite_size_action_estimate,
    log_profile,
    profile_slope,
    quasi_stationary,
    transient_probabilities,
)
# the submodule keeps its same-named value function (hamiltonian.hamiltonian,
# like datetime.datetime); re-exporting it here would shadow the submodule
from .hamiltonian import (
    ActionGrid,
    ExtinctionPath,
    action_grid,
    eom_jacobian,
    eom_rhs,
    equilibrium_eigenvalues,
    grid_spec,
    hamiltonian_staged,
    solve_extinction_path,
)
from .model import (
    DegreeDistribution,
    GroupStructure,
    ModelSpec,
    beta_for_r0,
    from_degree_distribution,
    group_sizes,
    load_config,
    merge_equal_groups,
    r0,
    spec_as_dict,
    spec_digest,
    spec_from_mapping,
    validate,
)
from .montecarlo import (
    DualityProbe,
    SimConfig,
    SimEstimate,
    duality_probe,
    estimate_tau,
    initial_counts,
    simulate_once,
    state_at,
    swapped_spec,
)
from .ordering import (
    convex_order_leq,
    majorizes,
    p_majorizes,
    spread_cap,
    spread_family,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "GroupStructure", "ModelSpec", "DegreeDistribution", "validate", "r0",
    "beta_for_r0", "from_degree_distribution", "merge_equal_groups",
    "group_sizes", "spec_as_dict", "spec_digest", "spec_from_mapping",
    "load_config",
    # asymptotics
    "saturation_root", "staged_saturation_root", "endemic_equilibrium",
    "terminal_momentum", "terminal_momentum_staged", "momentum_residual",
    "momentum_residual_staged", "action_homogeneous", "action_closed_form",
    "state_potential", "state_potential_gradient", "momentum_root",
    "momentum_potential", "state_potential_staged",
    "state_potential_gradient_staged", "momentum_root_staged",
    "momentum_potential_staged", "action_network_out", "action_network_in",
    # exact
    "StateSpace", "QsdResult", "QsdCache", "build_generator",
    "quasi_stationary", "expected_absorption_times",
    "transient_probabilities", "finite_size_action_estimate", "log_profile",
    "profile_slope", "dump_qsd_csv",
    # hamiltonian
    "hamiltonian_staged", "eom_rhs", "eom_jacobian",
    "equilibrium_eigenvalues", "ExtinctionPath", "solve_extinction_path",
    "ActionGrid", "grid_spec", "action_grid",
    # montecarlo
    "SimConfig", "SimEstimate", "DualityProbe", "initial_counts",
    "simulate_once", "state_at", "estimate_tau", "swapped_spec",
    "duality_probe",
    # ordering
    "majorizes", "p_majorizes", "convex_order_leq", "spread_family",
    "spread_cap",
    # errors
    "SpecError", "SubcriticalError", "MixedHeterogeneityError",
    "DegreeBalanceError", "StateSpaceError", "ConvergenceError",
    "NoExtinctionsError",
]
