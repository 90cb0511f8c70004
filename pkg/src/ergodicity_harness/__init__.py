from src.ergodicity_harness.averaging import averaging_decomposition, partition_average_bound
from src.ergodicity_harness.boundary_lemmas import BoundaryLemmaReport, verify_boundary_lemmas
from src.ergodicity_harness.bundles import BUNDLES, GlobalAverage, LocalFunctionBundle, get_bundle, global_average
from src.ergodicity_harness.ensembles import (
    EnsembleDecay,
    canonical_expectation,
    verify_equivalence_of_ensembles,
    verify_two_block_bound,
)
from src.ergodicity_harness.experiment import ExperimentConfig, ExperimentReport, ergodicity_experiment
from src.ergodicity_harness.mpl import mpl_graph_table, mpl_psd_check, mpl_sweep, two_block_comparison
from src.ergodicity_harness.partition import Partition, build_partition, reference_block
from src.ergodicity_harness.spectral import spectral_estimate, spectral_table
from src.ergodicity_harness.ufields import UFieldContext, UFields, field_context, partition_context, u_fields

__all__ = [
    "averaging_decomposition",
    "partition_average_bound",
    "BoundaryLemmaReport",
    "verify_boundary_lemmas",
    "BUNDLES",
    "GlobalAverage",
    "LocalFunctionBundle",
    "get_bundle",
    "global_average",
    "EnsembleDecay",
    "canonical_expectation",
    "verify_equivalence_of_ensembles",
    "verify_two_block_bound",
    "ExperimentConfig",
    "ExperimentReport",
    "ergodicity_experiment",
    "mpl_graph_table",
    "mpl_psd_check",
    "mpl_sweep",
    "two_block_comparison",
    "Partition",
    "build_partition",
    "reference_block",
    "spectral_estimate",
    "spectral_table",
    "UFieldContext",
    "UFields",
    "field_context",
    "partition_context",
    "u_fields",
]
