"""Limit laws and normality diagnostics for quadratic forms indexed by graphs.

The statistic is ``S = sum_{uv in E} X_u X_v / sqrt(|E|)`` with i.i.d.
standardized inputs.  See the README for an overview.
"""
__version__ = "0.1.0"

from .diagnostics import (
    MomentReport,
    NormalityVerdict,
    classify_normality,
    exact_fourth_moment,
    ks_distance,
    oracle_fourth_moment,
    truncated_fourth_moment_curve,
    universality_gap,
    wasserstein1,
)
from .distributions import (
    SourceDistribution,
    TruncationParams,
    parse_distribution,
    truncate,
    truncation_params,
)
from .ensembles import EnsembleSpec, expected_limit, generate
from .graph import (
    Graph,
    VertexPartition,
    codegree,
    from_edge_list,
    partition,
    read_edge_list,
    truncated_graph,
    write_edge_list,
)
from .kernels import BACKEND
from .limits import (
    ClosedFormLimit,
    LimitSpec,
    closed_form,
    estimate_limit_spec,
    gaussian_f_chi_representation,
    sample_limit,
)
from .motifs import (
    MotifCounts,
    SmallMultigraph,
    alon_bound_ratio,
    brute_force_count,
    count_motifs,
    fractional_stable_number,
)
from .sampling import EmpiricalSample, draw, monte_carlo, statistic
from .spectra import (
    ScaledSpectrum,
    adjacency_spectrum,
    scaled_truncated_spectrum,
    spectral_criterion,
)
