"""Example machines, each witnessing one logical phenomenon.

A rightward head with finitely many labels cannot count, so every builtin
prints a periodic tape.  The step operator must also be injective on the
local (label, cur, prev) space, which rules out two label chains merging:
the branching printer therefore starts each branch with an extra spacer so
its entry transition never coincides with a transition inside the cycle.
"""

from __future__ import annotations

import math

from qsm.machine import (MachineError, Output, RuleTable, UnknownName,
                         complete_permutation, periodic_printer)
from qsm.symbols import BASE, EXTENDED, SPACER

# Periodic tapes; each starts at site 1 with the initial spacer.
ENUMERATOR_PATTERN = "0P(PP)0PP"
INVALID_PATTERN = "0~P(PP)0PP"
LIAR_PATTERN = "0~PN(~PN)"
# Branch tapes start at site 2 (site 1 stays 0).  Each period must begin
# with a spacer preceded by a non-spacer symbol; see module docstring.
BRANCH_A_PATTERN = "0P(PP)0PP"
BRANCH_B_PATTERN = "00000~P(PP)"


def classical_enumerator() -> RuleTable:
    """Prints ``0P(PP)0PP`` forever: valid, consistent, incomplete."""
    return periodic_printer(ENUMERATOR_PATTERN, BASE, "classical-enumerator")


def invalid_printer() -> RuleTable:
    """Prints ``0~P(PP)0PP`` forever, so ``~P(PP)`` is false."""
    return periodic_printer(INVALID_PATTERN, BASE, "invalid-printer")


def incomplete_liar() -> RuleTable:
    """Extended-mode machine printing the self-denying ``~PN(~PN)``."""
    return periodic_printer(LIAR_PATTERN, EXTENDED, "incomplete-liar")


def _cycle(prefix: str, pattern: str) -> tuple[tuple[str, ...], dict]:
    labels = tuple(f"{prefix}{k}" for k in range(len(pattern)))
    partial = {}
    for k in range(len(pattern)):
        prev = pattern[k - 1]
        partial[(labels[k], SPACER, prev)] = (
            Output(labels[(k + 1) % len(pattern)], pattern[k], prev, 1.0),)
    return labels, partial


def branching_table(pattern_a: str, pattern_b: str, name: str = "") -> RuleTable:
    """One Hadamard-like split at the first step, then two periodic branches.

    Both branches write a spacer at site 2 and differ only in the head
    label after step 1; branch ``k`` then prints its pattern repeated, so
    its tape is ``0`` followed by the pattern forever.  Each pattern must
    start with the spacer and end with something else: the cycle re-enters
    its second phase with a non-spacer behind the head, which keeps that
    input distinct from the split's output.
    """
    for pattern in (pattern_a, pattern_b):
        if len(pattern) < 2 or pattern[0] != SPACER or pattern[-1] == SPACER:
            raise MachineError("branch pattern must start with 0 and end with a non-spacer")
    a_labels, a_rules = _cycle("a", pattern_a)
    b_labels, b_rules = _cycle("b", pattern_b)
    labels = ("i",) + a_labels + b_labels
    out_a = (a_labels[1], SPACER, SPACER)
    out_b = (b_labels[1], SPACER, SPACER)
    h = 1 / math.sqrt(2)
    partial = {**a_rules, **b_rules}
    partial[("i", SPACER, SPACER)] = (Output(*out_a, h), Output(*out_b, h))
    # Unreachable partner input closes the 2x2 block unitarily.
    partial[("i", SPACER, "P")] = (Output(*out_a, h), Output(*out_b, -h))
    rules = complete_permutation(labels, BASE, partial)
    return RuleTable(labels, "i", rules, BASE, name)


def branching_printer() -> RuleTable:
    """Branch A prints P(PP) and PP; branch B prints ~P(PP) and never PP.

    Branch B pads with spacers so its tape has a run of four spacers right
    after ~P(PP), which the basis experiments rotate into a PP pattern.
    """
    return branching_table(BRANCH_A_PATTERN, BRANCH_B_PATTERN, "branching-printer")


BUILTINS = {
    "classical-enumerator": classical_enumerator,
    "branching-printer": branching_printer,
    "invalid-printer": invalid_printer,
    "incomplete-liar": incomplete_liar,
}


def builtin(name: str) -> RuleTable:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise UnknownName(f"unknown builtin machine {name!r}; "
                          f"choose from {', '.join(BUILTINS)}") from None
    return factory()
