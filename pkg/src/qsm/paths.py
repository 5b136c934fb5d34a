"""Word-path expansion of the evolved state.

The step operator splits as ``U = U Q0 + U (1 - Q0)`` where ``Q0`` asks
whether the site two behind the head (site 1 while the head is at site
1 or 2) holds the spacer.  Expanding ``U^n`` gives one product per
alternating composition ``(nu1; h_1..h_t)`` of ``n``.  Factor ``k`` looks at
site ``max(k - 1, 1)``, so the composition that carries a configuration is
the segmentation of ``"0" + tape[sites 1..n-1]``: the initial spacer at
site 1 followed by the frozen sites.  Path identity for reporting, on the
other hand, uses the segmentation of sites ``1..n``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from qsm.evolution import (EvolutionError, SparseState, _step, add_states, evolve,
                           initial_state)
from qsm.machine import RuleTable
from qsm.oracle import SizeLimit
from qsm.symbols import SPACER, SegmentDecomposition, decompose, frozen_words, word_count

ZERO_BRANCH = "zero"
NONZERO_BRANCH = "nonzero"
_PROJ = {ZERO_BRANCH: 1, NONZERO_BRANCH: 2, 0: 1, 1: 2}

MAX_PATHSUM_STEPS = 8


def split_step(state: SparseState, table: RuleTable, branch, *, eps: float | None = None) -> SparseState:
    """``U_0`` (branch ``"zero"``/0) or ``U_{!=0}`` (``"nonzero"``/1) applied to ``state``."""
    try:
        mode = _PROJ[branch]
    except KeyError:
        raise ValueError(f"branch must be 'zero' or 'nonzero', got {branch!r}") from None
    return _step(state, table, mode, eps, None)


def compositions(n: int) -> Iterator[tuple[int, ...]]:
    """Ordered compositions of ``n`` into positive parts."""
    if n == 0:
        yield ()
        return
    for mask in range(1 << (n - 1)):
        parts, run = [], 1
        for bit in range(n - 1):
            if mask >> bit & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def all_signatures(n: int) -> Iterator[tuple[int, tuple[int, ...]]]:
    for nu1 in (0, 1):
        for lengths in compositions(n):
            if lengths or nu1 == 0:
                yield nu1, lengths


@dataclass(frozen=True)
class OperatorSplitTrace:
    factors: tuple[tuple[int, int], ...]
    state: SparseState

    @property
    def nu1(self) -> int:
        return self.factors[0][0] if self.factors else 0

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(h for _, h in self.factors)


def composition_evolve(table: RuleTable, nu1: int, lengths, *, eps: float | None = None) -> OperatorSplitTrace:
    """Apply ``U_{nu(t)}^{h_t} ... U_{nu(1)}^{h_1}`` to the initial state.

    Pruning is disabled by default so that sums over compositions match
    the direct evolution exactly.
    """
    lengths = tuple(int(h) for h in lengths)
    if any(h < 1 for h in lengths):
        raise ValueError("every composition part must be >= 1")
    if nu1 not in (0, 1):
        raise ValueError("nu1 must be 0 or 1")
    state = initial_state(table)
    factors = []
    nu = nu1
    for h in lengths:
        for _ in range(h):
            state = _step(state, table, _PROJ[nu], 0.0 if eps is None else eps, None)
        factors.append((nu, h))
        nu = 1 - nu
    return OperatorSplitTrace(tuple(factors), state)


def observed_string(tape: str) -> str:
    """What the n split projectors look at: site 1 at time 0, then sites 1..n-1."""
    n = len(tape) - 1
    return SPACER + tape[: max(n - 1, 0)]


def observed_signature(tape: str) -> tuple[int, tuple[int, ...]]:
    if len(tape) == 1:
        return 0, ()
    return decompose(observed_string(tape)).signature


def path_segments(tape: str) -> SegmentDecomposition:
    """Segmentation of sites 1..n (site 1 alone at n = 0)."""
    n = len(tape) - 1
    return decompose(tape[: max(n, 1)])


@dataclass
class WordPath:
    composition: SegmentDecomposition
    members: list = field(default_factory=list)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(str(w) for w in self.composition.words)

    @property
    def probability(self) -> float:
        return sum(abs(a) ** 2 for _, a in self.members)

    @property
    def word_count_ok(self) -> bool:
        c = self.composition
        return len(c.words) == word_count(c.t, c.nu1)


def enumerate_word_paths(table: RuleTable, n: int, state: SparseState | None = None) -> list[WordPath]:
    """Group the step-``n`` support by the segmentation of sites 1..n.

    The in-flight site n+1 can still be rewritten, so it is not part of a
    path's identity.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    state = evolve(table, n) if state is None else state
    groups: dict[str, WordPath] = {}
    for config, amp in state.items():
        seg = path_segments(config.tape)
        key = seg.text()
        if key not in groups:
            groups[key] = WordPath(seg)
        groups[key].members.append((config, amp))
    paths = [groups[k] for k in sorted(groups)]
    for p in paths:
        p.members.sort(key=lambda m: (m[0].tape, m[0].label))
    return paths


@dataclass(frozen=True)
class PathSumCheck:
    n: int
    residual: float
    signature_mismatches: int
    nonzero_compositions: int
    compositions_checked: int


def verify_pathsum(table: RuleTable, n: int) -> PathSumCheck:
    """Compare the sum over all compositions with direct evolution.

    Also checks that every configuration a composition produces has that
    composition as its observed signature.
    """
    if n > MAX_PATHSUM_STEPS:
        raise SizeLimit(f"path-sum verification limited to n <= {MAX_PATHSUM_STEPS}")
    direct = evolve(table, n)
    if n == 0:
        return PathSumCheck(0, 0.0, 0, 1, 1)
    traces = []
    mismatches = 0
    for nu1, lengths in all_signatures(n):
        trace = composition_evolve(table, nu1, lengths)
        traces.append(trace.state)
        for config, _ in trace.state.items():
            if observed_signature(config.tape) != (nu1, lengths):
                mismatches += 1
    total = add_states(traces)
    keys = set(total.terms) | set(direct.terms)
    residual = max((abs(total.terms.get(k, 0j) - direct.terms.get(k, 0j)) for k in keys),
                   default=0.0)
    nonzero = sum(1 for s in traces if s.terms)
    return PathSumCheck(n, float(residual), mismatches, nonzero, len(traces))


# Path tree export ----------------------------------------------------------

def word_events(tape: str) -> list[tuple[str, int, int, int]]:
    """Frozen 0-delimited words as ``(word, first_site, last_site, frozen_at)``.

    ``frozen_at`` is the first step at which the trailing spacer sits two
    sites behind the head.
    """
    head = len(tape) + 1
    events = []
    pos = 1
    for w in frozen_words(tape, head):
        start = tape.index(SPACER + w + SPACER, pos - 1) + 2
        end = start + len(w) - 1
        events.append((w, start, end, end + 1))
        pos = end + 1
    return events


@dataclass
class TreeNode:
    node_id: int
    word: str | None
    sites: tuple[int, int] | None
    frozen_at: int | None
    probability: float = 0.0
    children: dict = field(default_factory=dict)
    terminal_configs: list = field(default_factory=list)


def build_path_tree(state: SparseState) -> TreeNode:
    """Prefix tree of the frozen word events of every support configuration."""
    root = TreeNode(0, None, None, None)
    counter = 1
    probs = []
    for config, amp in sorted(state.items(), key=lambda ca: (ca[0].tape, ca[0].label)):
        p = abs(amp) ** 2
        probs.append((config.digest(), p))
        node = root
        node.probability += p
        for w, a, b, frozen_at in word_events(config.tape):
            key = (w, a, b)
            if key not in node.children:
                node.children[key] = TreeNode(counter, w, (a, b), frozen_at)
                counter += 1
            node = node.children[key]
            node.probability += p
        node.terminal_configs.append(config.digest())
    # A path whose frozen words are a prefix of another path's still gets its own leaf.
    for node in list(_walk(root)):
        if node.children and node.terminal_configs:
            pending = TreeNode(counter, None, None, None)
            counter += 1
            pending.terminal_configs = node.terminal_configs
            pending.probability = sum(p for c, p in probs if c in set(node.terminal_configs))
            node.terminal_configs = []
            node.children[("", 0, 0)] = pending
    return root


def _walk(node: TreeNode):
    yield node
    for key in sorted(node.children):
        yield from _walk(node.children[key])


def tree_leaves(root: TreeNode) -> list[TreeNode]:
    return [n for n in _walk(root) if not n.children]


def tree_to_dot(root: TreeNode, title: str = "word_paths") -> str:
    lines = [f'digraph "{title}" {{', "  rankdir=BT;", '  node [shape=box, fontname="monospace"];']
    for node in _walk(root):
        if node.node_id == 0:
            label = f"start\\np={node.probability:.6g}"
        elif node.word is None:
            label = f"no further frozen word\\np={node.probability:.6g}"
        else:
            a, b = node.sites
            label = f"{node.word}\\nsites {a}-{b}, frozen n>={node.frozen_at}\\np={node.probability:.6g}"
        label = label.replace('"', '\\"')
        lines.append(f'  n{node.node_id} [label="{label}"];')
    for node in _walk(root):
        for key in sorted(node.children):
            lines.append(f"  n{node.node_id} -> n{node.children[key].node_id};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_json(root: TreeNode) -> dict:
    def conv(node: TreeNode) -> dict:
        return {
            "id": node.node_id,
            "word": node.word,
            "sites": list(node.sites) if node.sites else None,
            "frozen_at": node.frozen_at,
            "probability": node.probability,
            "terminal_configs": sorted(node.terminal_configs),
            "children": [conv(node.children[k]) for k in sorted(node.children)],
        }
    return conv(root)


def path_tree_json_text(root: TreeNode) -> str:
    return json.dumps(tree_to_json(root), indent=1, sort_keys=True) + "\n"


__all__ = [
    "EvolutionError", "OperatorSplitTrace", "PathSumCheck", "TreeNode", "WordPath",
    "all_signatures", "build_path_tree", "composition_evolve", "compositions",
    "enumerate_word_paths", "observed_signature", "observed_string", "path_segments",
    "split_step", "tree_leaves", "tree_to_dot", "tree_to_json", "verify_pathsum",
    "word_events",
]
