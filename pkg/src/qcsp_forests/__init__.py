"""QCSP dichotomy toolkit for partially reflexive forests.

Graphs carry optional self-loops; paths are written as 0/1 words, one
letter per vertex, ``1`` marking a loop.  Everything is checked against a
brute-force quantified evaluator.
"""

from .classify import Verdict, classify_forest, classify_path, is_quasi_loop_connected, is_zero_eccentric
from .graphs import PRGraph, parse_graph, path_graph
from .logic import PHSentence, parse_sentence, print_sentence
from .solver import EvalConfig, ResourceExhausted, evaluate

__version__ = "0.1.0"

__all__ = [
    "PRGraph", "path_graph", "parse_graph", "PHSentence", "parse_sentence", "print_sentence",
    "EvalConfig", "ResourceExhausted", "evaluate", "Verdict", "classify_path", "classify_forest",
    "is_zero_eccentric", "is_quasi_loop_connected",
]
