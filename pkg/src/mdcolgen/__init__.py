"""Modularity density maximization by column generation."""
from .colgen import ColGenConfig, ColGenReport, run_colgen
from .gadgets import build_ap_gadget, build_md_gadget, cut_to_partition
from .graph import Graph, GraphFormatError, parse_edge_list, read_edge_list
from .objectives import Partition, cluster_contribution, modularity_density, pricing_objective
from .peeling import PeelConfig, peel_densest, peel_pricing
from .pricing import ExactConfig, enumerate_pricing, exact_pricing, solve_apk

__all__ = [
    "ColGenConfig", "ColGenReport", "run_colgen",
    "build_ap_gadget", "build_md_gadget", "cut_to_partition",
    "Graph", "GraphFormatError", "parse_edge_list", "read_edge_list",
    "Partition", "cluster_contribution", "modularity_density", "pricing_objective",
    "PeelConfig", "peel_densest", "peel_pricing",
    "ExactConfig", "enumerate_pricing", "exact_pricing", "solve_apk",
]
__version__ = "0.1.0"
