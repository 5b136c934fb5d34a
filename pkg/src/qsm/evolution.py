"""Exact sparse evolution of head + tape configurations.

The head moves one site right per step, so after ``n`` steps it sits at
site ``n + 2`` and only sites ``1..n+1`` can differ from the spacer.  A
basis configuration is therefore just ``(label, tape)`` with
``len(tape) == n + 1``; the head position is derived.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from qsm.kernels import MissingRuleError, compile_table, kernel_for
from qsm.machine import MachineError, RuleTable, eps_amp
from qsm.symbols import SPACER


class EvolutionError(MachineError):
    pass


class MissingRule(EvolutionError):
    pass


class StepMismatch(EvolutionError):
    pass


@dataclass(frozen=True, order=True)
class Configuration:
    label: str
    tape: str

    def __post_init__(self):
        if not self.tape:
            raise EvolutionError("a configuration has at least site 1")

    @property
    def n(self) -> int:
        return len(self.tape) - 1

    @property
    def head(self) -> int:
        return len(self.tape) + 1

    def digest(self) -> str:
        return f"{self.label}:{self.tape}"


class SparseState:
    """Finite superposition of configurations sharing one step count.

    ``terms`` maps ``(label_index, tape_bytes)`` to complex amplitudes; use
    :meth:`items` for the public ``(Configuration, amplitude)`` view.
    """

    __slots__ = ("n", "labels", "terms")

    def __init__(self, n: int, labels: tuple[str, ...], terms: Mapping):
        self.n = n
        self.labels = labels
        self.terms = dict(terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"SparseState(n={self.n}, terms={len(self.terms)})"

    def items(self) -> Iterator[tuple[Configuration, complex]]:
        for (label, tape), amp in self.terms.items():
            yield Configuration(self.labels[label], tape.decode("ascii")), amp

    def configurations(self) -> list[Configuration]:
        return sorted(c for c, _ in self.items())

    def norm2(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.terms.values()))

    def as_dict(self) -> dict[Configuration, complex]:
        return dict(self.items())

    def key(self, config: Configuration) -> tuple[int, bytes]:
        return self.labels.index(config.label), config.tape.encode("ascii")

    def with_terms(self, terms: Mapping) -> "SparseState":
        return SparseState(self.n, self.labels, terms)

    def __add__(self, other: "SparseState") -> "SparseState":
        return add_states([self, other])


def add_states(states, eps: float | None = None) -> "SparseState":
    """Sum states termwise; ``eps`` prunes the result (default: no pruning)."""
    states = list(states)
    if not states:
        raise EvolutionError("nothing to add")
    n, labels = states[0].n, states[0].labels
    acc: dict = {}
    for s in states:
        if s.n != n or s.labels != labels:
            raise StepMismatch("states differ in step count or label set")
        for k, v in s.terms.items():
            acc[k] = acc.get(k, 0j) + v
    if eps is not None:
        acc = {k: v for k, v in acc.items() if abs(v) > eps}
    return SparseState(n, labels, acc)


def initial_state(table: RuleTable) -> SparseState:
    """Head in the initial label at site 2, every site holding the spacer."""
    label = table.head_states.index(table.initial)
    return SparseState(0, table.head_states, {(label, SPACER.encode("ascii")): 1 + 0j})


def _step(state: SparseState, table: RuleTable, proj_mode: int,
          eps: float | None, backend: str | None) -> SparseState:
    ct = compile_table(table)
    n = state.n
    site = max(n - 1, 0)  # 0-based index of the site two behind the head
    kernel = kernel_for(backend)
    try:
        terms = kernel(state.terms, n, ct, eps_amp() if eps is None else eps,
                       site, proj_mode)
    except MissingRuleError as exc:
        label, prev = exc.args
        raise MissingRule(
            f"no rule for input ({table.head_states[label]!r}, '0', {chr(prev)!r}) "
            f"at step {n}") from None
    return SparseState(n + 1, state.labels, terms)


def step(state: SparseState, table: RuleTable, *, eps: float | None = None,
         backend: str | None = None) -> SparseState:
    if state.labels != table.head_states:
        raise EvolutionError("state and table use different label sets")
    return _step(state, table, 0, eps, backend)


def evolve(table: RuleTable, n: int, *, backend: str | None = None) -> SparseState:
    if n < 0:
        raise EvolutionError("n must be nonnegative")
    state = initial_state(table)
    for _ in range(n):
        state = step(state, table, backend=backend)
    return state


def evolve_iter(table: RuleTable, n: int) -> Iterator[SparseState]:
    """Yield the states at steps 0..n."""
    state = initial_state(table)
    yield state
    for _ in range(n):
        state = step(state, table)
        yield state


def amplitude(state: SparseState, config: Configuration) -> complex:
    if config.n != state.n:
        raise StepMismatch(f"configuration is at step {config.n}, state at {state.n}")
    try:
        key = state.key(config)
    except ValueError:
        return 0j
    return state.terms.get(key, 0j)


def dump_lines(state: SparseState) -> list[str]:
    """Canonical ``amp_re amp_im label tape`` lines ordered by tape, then label."""
    rows = sorted(((c.tape, c.label), a) for c, a in state.items())
    return [f"{a.real:.17g} {a.imag:.17g} {label} {tape}" for (tape, label), a in rows]


def dump_state(state: SparseState) -> str:
    return "".join(line + "\n" for line in dump_lines(state))


def parse_dump(text: str, labels: tuple[str, ...]) -> SparseState:
    terms = {}
    n = None
    for line in text.splitlines():
        if not line.strip():
            continue
        re, im, label, tape = line.split()
        if n is None:
            n = len(tape) - 1
        elif len(tape) - 1 != n:
            raise StepMismatch("dump mixes step counts")
        terms[(labels.index(label), tape.encode("ascii"))] = complex(float(re), float(im))
    if n is None:
        raise EvolutionError("empty dump")
    return SparseState(n, labels, terms)
