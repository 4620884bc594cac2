"""drlint: static fault detection for DQN-style training scripts.

Pipeline: parse the script into a syntax tree over a documented subset,
extract a typed attributed model graph, run additive detection rules to
fixpoint, report one finding per fault node.
"""

from .extract import extract_model
from .graph import META_MODEL, ModelGraph, add_fault_node, conforms_to
from .parser import SourceSyntaxError, SourceUnit, parse
from .report import FaultReport, extract_report, lint
from .rules import builtin_catalog, load_rules

__all__ = [
    "META_MODEL",
    "ModelGraph",
    "SourceUnit",
    "SourceSyntaxError",
    "FaultReport",
    "add_fault_node",
    "builtin_catalog",
    "conforms_to",
    "extract_model",
    "extract_report",
    "lint",
    "load_rules",
    "parse",
]

__version__ = "0.1.0"
