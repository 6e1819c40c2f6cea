"""Position-based coding and quantum hypothesis-testing toolkit."""

from .operators import (
    BinaryTest,
    BudgetError,
    DensityOperator,
    HermitianOperator,
    Povm,
    QuantumChannel,
    apply_channel,
    fidelity,
    partial_trace,
    permute_systems,
    positive_spectral_projection,
    tensor,
    tensor_power,
    trace_norm,
)
from .entropy import (
    chernoff_distance,
    collision_conditional_entropy,
    conditional_entropy,
    mutual_information,
    mutual_information_variance,
    relative_entropy,
    relative_entropy_variance,
    renyi2_entropy,
    renyi_mutual_information,
    renyi_relative_entropy,
    sandwiched_renyi_relative_entropy,
    von_neumann_entropy,
)
from .hyptest import (
    chernoff_multi_trace,
    check_close,
    check_cmw_upper,
    check_gentle,
    check_hayashi_nagaoka,
    check_prop_hypo_renyi,
    check_spectral_ineq,
    helstrom_error,
    hyp_test_mutual_info,
    hyp_test_mutual_info_min_sigma,
    hyp_test_rel_entropy,
    pe_star_composite,
    second_order_approx,
    stein_sandwich,
)
from .typicality import (
    check_projector_tricks,
    composite_alternative_test,
    relative_typical_projector,
    typical_projector,
)
from .p2p import (
    P2PCodeSpec,
    capacity_upper_eps_MI,
    check_marginal_prod_lemma,
    error_exponent_lower,
    one_shot_capacity_lower,
    one_shot_error_bound,
    second_order_rate,
    simulate_p2p,
)
from .mac import (
    CqMac,
    MacCodeSpec,
    RateRegion,
    boundary_crossing,
    collision_region,
    convex_hull_union,
    derandomize_cq_mac,
    hull_contains,
    mac_divergence_identities,
    mac_error_exponent,
    mac_one_shot_bound,
    mi_region,
    renyi2_region,
    simulate_mac,
)
from .sweeps import run_check

__version__ = "0.1.0"
