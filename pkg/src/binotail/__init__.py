"""Sharp supermartingale tail bounds via the least log-concave majorant
of the interpolated binomial tail, with independent oracles and a Monte
Carlo soundness harness."""

from .binomial import (
    LOG_ZERO,
    BinomialSpec,
    TailTable,
    build_tail_table,
    j_star,
    log_factorial,
    log_pmf,
    normal_tail,
)
from .bounds import (
    C2,
    C3,
    BoundReport,
    RademacherSpec,
    SupermartingaleSpec,
    bound_report,
    c_alpha,
    gaussian_bound,
    gaussian_hoeffding_crossover,
    hoeffding_baseline,
    old_bound,
    rademacher_bound,
    rescale,
    rescale_inverse,
    theorem23_bound,
    truncation_bound,
)
from .comparison import (
    ComparisonConstants,
    comparison_constants,
    dominance_all_x,
    h_function,
    j_double_star,
    lemma36_constants,
    ratio_r,
    u_double_star,
    u_star,
)
from .majorant import (
    Knot,
    KnotLattice,
    build_knot_lattice,
    grid_log_lc,
    grid_log_lin,
    grid_log_majorant,
    q_interp,
    q_lc,
    q_lin,
    q_linlc_shifted,
)
from .oracle import (
    DiscreteDistribution,
    HullFunction,
    concave_hull_majorant,
    convolve,
    exact_log_tail,
    exact_tail,
    extremal_two_point,
    lc_majorant_on_integers,
    lemma32_check,
    majorant_samples,
)
from .simulate import (
    FAMILY_KINDS,
    Z95,
    IncrementFamily,
    McEstimate,
    bounded_uniform,
    estimate_tail,
    sample_path,
    simulate_terminal,
    step_conditional_mean,
    tilt_to_martingale,
    truncated_shifted,
    two_point_extremal,
    wilson_interval,
)
