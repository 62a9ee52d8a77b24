"""DP-colouring (correspondence colouring): covers, exact solvers, samplers and a randomized colourer."""

from .colorer import Phase1Config, RunReport, color_kr_free, color_triangle_free, complete_lll, greedy_complete, mt_phase1
from .cover import Cover, cover_from_lists, is_coloring, parse_cover, random_cover, residual, validate
from .exact import SearchBudget, chi_dp, find_coloring, ind_count, median_alpha
from .graph import Graph, generate, parse_graph

__all__ = [
    "Cover",
    "Graph",
    "Phase1Config",
    "RunReport",
    "SearchBudget",
    "chi_dp",
    "color_kr_free",
    "color_triangle_free",
    "complete_lll",
    "cover_from_lists",
    "find_coloring",
    "generate",
    "greedy_complete",
    "ind_count",
    "is_coloring",
    "median_alpha",
    "mt_phase1",
    "parse_cover",
    "parse_graph",
    "random_cover",
    "residual",
    "validate",
]
