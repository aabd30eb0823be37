"""Embedding trees into host graphs."""

from .almost import embed_almost_spanning_tree, embed_forest
from .driver import CaseThresholds, EmbedReport, embed_spanning_tree
from .hamilton import EmbedBudget, check_path, hamilton_path
from .starmatch import StarDemand, hall_violated, star_matching

__all__ = [
    "CaseThresholds",
    "EmbedBudget",
    "EmbedReport",
    "StarDemand",
    "check_path",
    "embed_almost_spanning_tree",
    "embed_forest",
    "embed_spanning_tree",
    "hall_violated",
    "hamilton_path",
    "star_matching",
]
