"""Lipschitz normal embedding of semialgebraic germs and their medial axes.

The package decides and quantifies the LNE property for curve/surface germs
at the origin: induced vs. inner (graph-geodesic) vs. pancake metrics,
tangency orders and Lojasiewicz exponents via the arc criterion, discrete
medial-axis extraction with branch tracking, and link sections with the
link-based LNE criterion.  A scenario registry packages the four canonical
benchmark cases, and ``lnegerm.cli`` exposes everything as a command-line
tool.
"""

from .config import MedialConfig, RunConfig
from .errors import (
    DisconnectedError,
    DomainError,
    InputError,
    LnegermError,
    OnSetError,
    RegistryError,
    ReparametrizationError,
    ResolutionError,
    TraceError,
    UndecidableOrderError,
)
from .germs import (
    GermSet,
    HalfLine,
    PuiseuxBranch,
    germ_set,
    germset_from_json,
    germset_to_json,
    load_germ_file,
    puiseux_branch,
    sample_cloud,
    sample_germ,
    symbolic_separation_order,
)
from .links import LinkSample, LLNEReport, link_criterion_verdict, link_section, llne_test
from .medial import (
    FootFinder,
    MedialAxisSample,
    SampledCurve,
    extract_medial_axis_grid,
    medial_branch_germs,
    nearest_point_set,
    reaches_origin,
    refine_equidistant,
    trace_bisector_2d,
)
from .metrics import (
    NeighborhoodGraph,
    Pancake,
    PancakeComplex,
    PointCloud,
    build_graph,
    induced_distance,
    inner_distance,
    pancake_distance,
)
from .norms import EUCLID, EuclideanNorm, WeightedMaxNorm, make_norm
from .scenarios import (
    BUILTIN_LABELS,
    Scenario,
    ScenarioResult,
    builtin,
    run_all,
    run_scenario,
)
from .tangency import (
    OrderEstimate,
    TangencyReport,
    Verdict,
    estimate_order,
    inner_tangency_order,
    lojasiewicz_germ,
    outer_tangency_order,
    pair_verdict,
)

__version__ = "1.0.0"
