"""Clique size and composition distributions estimated from egonet samples."""

__version__ = "0.1.0"

from .cliques import (Census, CensusBudgetExceeded, CliqueRecord, EgoCliqueProfile, census,
                      enumerate_maximal_cliques, profile_ego, profile_sample)
from .designs import (SamplingDesign, UnsupportedDesignError, approximate_draw_probs, clique_inclusion_prob,
                      draw_sample, draw_sequence, joint_inclusion_prob, node_inclusion_prob, uis, wis)
from .estimators import (DistinctCliquePool, Estimate, build_clique_pool, estimate_cc, estimate_cds,
                         estimate_cds_generalized, estimate_distribution, estimate_var_bh,
                         estimate_var_bh_cc, estimate_var_ht)
from .evaluation import (ReplicationReport, nmae, plot_distribution, plot_nmae, recommend_estimator, run_sweep,
                         saturation_metrics)
from .graph import Egonet, EgonetSample, Graph, extract_egonet, load_graph, sample_from_draws
from .io import read_egonet_sample, write_egonet_sample

__all__ = [
    "Census", "CensusBudgetExceeded", "CliqueRecord", "DistinctCliquePool", "EgoCliqueProfile",
    "Egonet", "EgonetSample", "Estimate", "Graph", "ReplicationReport", "SamplingDesign",
    "UnsupportedDesignError", "approximate_draw_probs", "build_clique_pool", "census",
    "clique_inclusion_prob", "draw_sample", "draw_sequence", "enumerate_maximal_cliques", "estimate_cc",
    "estimate_cds", "estimate_cds_generalized", "estimate_distribution", "estimate_var_bh",
    "estimate_var_bh_cc", "estimate_var_ht", "extract_egonet", "joint_inclusion_prob",
    "load_graph", "nmae", "node_inclusion_prob", "plot_distribution", "plot_nmae", "profile_ego",
    "profile_sample", "read_egonet_sample", "recommend_estimator", "run_sweep", "sample_from_draws",
    "saturation_metrics", "uis", "wis", "write_egonet_sample",
]
