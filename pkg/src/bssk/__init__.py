"""Numerical laboratory for the bipartite spherical Sherrington-Kirkpatrick model.

Subpackage map:
    disorder     seeded sampling of coupling matrices
    spectra      Gram spectra and Marchenko-Pastur analytics
    theory       closed-form limiting and fluctuation constants
    saddle       critical point and asymptotics of the random double integral
    partition    partition function by Monte Carlo, contour quadrature, asymptotics
    experiments  seeded fluctuation / edge / rigidity campaigns
    cli          command-line front end
"""

__version__ = "0.1.0"

from .disorder import DisorderMatrix, DisorderSpec, make_distribution, sample_disorder
from .experiments import (
    ExperimentConfig,
    ExperimentSummary,
    goe_oracle,
    run_edge_experiment,
    run_fluctuation_experiment,
    run_rigidity_experiment,
    summarize,
)
from .partition import (
    PartitionEstimate,
    QuadratureSpec,
    assemble_free_energy,
    contour_q_numeric,
    finite_n_prediction,
    sphere_area_log,
    sphere_mc_partition,
)
from .saddle import (
    AsymptoticQ,
    SaddleInput,
    SaddlePoint,
    g_eval,
    q_high_asymptotic,
    q_low_asymptotic,
    q_saddle_value,
    saddle_input_from_spectrum,
    solve_gamma,
)
from .spectra import (
    ClassicalLocations,
    MPLaw,
    Spectrum,
    classical_locations,
    gram_eigenvalues,
    mp_density,
    mp_law,
    mp_log_transform,
    mp_stieltjes,
    rigidity_report,
)
from .theory import (
    CltConstants,
    RegimeConstants,
    auffinger_chen_value,
    b_critical,
    beta_critical,
    chebyshev_tau,
    clt_general,
    clt_log_constants,
    regime_constants,
    ssk_free_energy,
)
