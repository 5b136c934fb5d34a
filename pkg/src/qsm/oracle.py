"""Brute-force oracles used to cross-check the sparse engine.

Nothing here touches the sparse kernel: the dense routines contract the
full local rule matrix against a complete tensor over every tape, and the
classical emulator walks a deterministic table symbol by symbol.
"""

from __future__ import annotations

import numpy as np

from qsm.machine import MachineError, RuleTable
from qsm.symbols import SPACER

MAX_DENSE_STEPS = 8
MAX_DENSE_ENTRIES = 2 ** 25


class SizeLimit(MachineError):
    pass


class NotDeterministic(MachineError):
    pass


def _local_tensor(table: RuleTable) -> np.ndarray:
    return table.local_matrix()


def _apply_step(psi: np.ndarray, local: np.ndarray, head_axis: int) -> np.ndarray:
    """Apply one step with the head on tensor axis ``head_axis``.

    Axis 0 is the head label; axis ``k >= 1`` is one lattice site.  The
    rule acts on (label, head site, site behind the head).
    """
    L = psi.shape[0]
    d = psi.shape[1]
    moved = np.moveaxis(psi, (0, head_axis, head_axis - 1), (0, 1, 2))
    rest = moved.shape[3:]
    flat = moved.reshape(L * d * d, -1)
    out = (local @ flat).reshape((L, d, d) + rest)
    return np.moveaxis(out, (0, 1, 2), (0, head_axis, head_axis - 1))


def _check_size(table: RuleTable, sites: int) -> None:
    size = len(table.head_states) * len(table.symbols) ** sites
    if size > MAX_DENSE_ENTRIES:
        raise SizeLimit(f"dense basis of {size} entries is too large")


def dense_oracle_evolve(table: RuleTable, n: int) -> np.ndarray:
    """Complete amplitude tensor of U^n applied to the initial state.

    Shape ``(L, d, ..., d)`` with ``n + 1`` site axes for sites 1..n+1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > MAX_DENSE_STEPS:
        raise SizeLimit(f"dense oracle limited to n <= {MAX_DENSE_STEPS}")
    _check_size(table, n + 1)
    L, d = len(table.head_states), len(table.symbols)
    psi = np.zeros((L,) + (d,) * (n + 1), dtype=complex)
    zero = table.symbols.index(SPACER)
    psi[(table.head_states.index(table.initial),) + (zero,) * (n + 1)] = 1.0
    local = _local_tensor(table)
    for k in range(n):
        psi = _apply_step(psi, local, k + 2)
    return psi


def dense_to_dict(psi: np.ndarray, table: RuleTable, tol: float = 0.0) -> dict:
    """``{(label, tape): amplitude}`` for entries with magnitude above ``tol``."""
    syms = table.symbols
    out = {}
    for idx in zip(*np.nonzero(np.abs(psi) > tol)):
        label = table.head_states[idx[0]]
        tape = "".join(syms[k] for k in idx[1:])
        out[(label, tape)] = complex(psi[idx])
    return out


def classical_run(table: RuleTable, n: int) -> tuple[str, str]:
    """Run a deterministic table as a plain automaton; return (label, tape)."""
    if not table.deterministic:
        raise NotDeterministic(f"{table.name or 'table'} is not deterministic")
    label = table.initial
    tape = [SPACER]
    for k in range(n):
        j = k + 2
        out = table.rules[(label, SPACER, tape[j - 2])][0]
        tape[j - 2] = out.prev
        tape.append(out.cur)
        label = out.label
    return label, "".join(tape)


def classical_emulate(table: RuleTable, n: int) -> str:
    return classical_run(table, n)[1]


def pattern_at(tape: str, head: int, word: str) -> list[int]:
    """Start sites ``a`` where ``0 word 0`` lies in the frozen region.

    Plain placement-by-placement scan: the trailing spacer at site ``b``
    must satisfy ``b <= head - 2``.
    """
    pattern = SPACER + word + SPACER
    hits = []
    for a in range(1, len(tape) + 1):
        b = a + len(pattern) - 1
        if b > head - 2 or b > len(tape):
            break
        if tape[a - 1:b] == pattern:
            hits.append(a)
    return hits


def brute_contains(tape: str, head: int, word: str) -> bool:
    return bool(pattern_at(tape, head, word))


def dense_printability(table: RuleTable, word: str, n: int) -> float:
    psi = dense_oracle_evolve(table, n)
    return sum(abs(a) ** 2 for (label, tape), a in dense_to_dict(psi, table).items()
               if brute_contains(tape, n + 2, word))


def dense_truth_elements(table: RuleTable, sentence_word: str, target: str,
                         negative: bool, n: int, m: int,
                         psi: np.ndarray | None = None,
                         support: dict | None = None) -> tuple[float, float]:
    """Matrix elements of the truth conditions by dense contraction.

    Returns ``(lhs, rhs)`` with ``rhs = <Q_S>`` at step ``n`` and
    ``lhs = || Q U^m Q_S Psi(n) ||^2``, ``Q`` being the projector onto
    configurations containing ``target`` (or not containing it when
    ``negative``) at step ``n + m``.

    The frozen sites 1..n never change after step ``n``, so the projected
    state splits into orthogonal blocks, one per frozen prefix; each block
    is evolved densely over the window of sites n+1..n+m+1.  Pass ``psi``
    to reuse an already computed step-``n`` tensor, or ``support`` (its
    :func:`dense_to_dict` form) to skip the scan as well.
    """
    if support is None:
        if psi is None:
            psi = dense_oracle_evolve(table, n)
        support = dense_to_dict(psi, table)
    L, d = len(table.head_states), len(table.symbols)
    syms = table.symbols
    blocks: dict[str, np.ndarray] = {}
    rhs = 0.0
    for (label, tape), amp in support.items():
        if not brute_contains(tape, n + 2, sentence_word):
            continue
        rhs += abs(amp) ** 2
        window = blocks.setdefault(tape[:n], np.zeros((L, d), dtype=complex))
        window[table.head_states.index(label), syms.index(tape[n])] += amp
    local = _local_tensor(table)
    zero = syms.index(SPACER)
    lhs = 0.0
    for prefix, window in blocks.items():
        _check_size(table, m + 1)
        phi = np.zeros((L,) + (d,) * (m + 1), dtype=complex)
        phi[(slice(None), slice(None)) + (zero,) * m] = window
        for k in range(m):
            phi = _apply_step(phi, local, k + 2)
        head = n + m + 2
        for idx in zip(*np.nonzero(phi)):
            tape = prefix + "".join(syms[s] for s in idx[1:])
            found = brute_contains(tape, head, target)
            if found != negative:
                lhs += abs(phi[idx]) ** 2
    return float(lhs), float(rhs)
