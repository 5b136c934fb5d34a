"""Simulator and finite-horizon logic checker for a quantum printing machine.

A head with an internal label walks right along a tape over the symbols
``0 P ~ ( )`` (plus ``N`` in extended mode), rewriting the site under it and
the one behind it.  Words frozen behind the head are read as sentences
about which words the machine prints.
"""

from qsm.basis import (SiteUnitary, commutation_defect, observer_projector_expectation,
                       projector_expectation, rotated_joint_amplitude, transformed_dynamics,
                       validity_transport_check)
from qsm.builtins import BUILTINS, builtin
from qsm.evolution import (Configuration, SparseState, amplitude, dump_state, evolve,
                           initial_state, step)
from qsm.kernels import BACKEND
from qsm.machine import Output, RuleTable, load_table, validate
from qsm.paths import build_path_tree, enumerate_word_paths, split_step, verify_pathsum
from qsm.semantics import (TruthStatus, incompleteness_check, machine_report, printability,
                           truth_status)
from qsm.symbols import SentenceKind, Word, classify, decompose, parse_word

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BUILTINS", "Configuration", "Output", "RuleTable", "SentenceKind",
    "SiteUnitary", "SparseState", "TruthStatus", "Word", "amplitude", "build_path_tree",
    "builtin", "classify", "commutation_defect", "decompose", "dump_state",
    "enumerate_word_paths", "evolve", "incompleteness_check", "initial_state",
    "load_table", "machine_report", "observer_projector_expectation", "parse_word",
    "printability", "projector_expectation", "rotated_joint_amplitude", "split_step",
    "step", "transformed_dynamics", "truth_status", "validate", "validity_transport_check",
    "verify_pathsum",
]
