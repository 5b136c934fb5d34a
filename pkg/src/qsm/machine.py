"""Rule tables for the step operator, isometry validation and JSON I/O."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from qsm.symbols import BASE, EXTENDED, MODES, SPACER, alphabet

DEFAULT_EPS_AMP = 1e-12
ISOMETRY_TOL = 1e-10


def eps_amp() -> float:
    """Amplitude magnitude treated as zero; ``QSM_EPS_AMP`` overrides it."""
    raw = os.environ.get("QSM_EPS_AMP")
    return float(raw) if raw else DEFAULT_EPS_AMP


class MachineError(ValueError):
    pass


class MalformedTable(MachineError):
    pass


class UnknownName(MachineError, KeyError):
    pass


# (label, cur, prev): cur is the symbol at the head site j, prev the one at j-1.
Key = tuple[str, str, str]


@dataclass(frozen=True)
class Output:
    label: str
    cur: str
    prev: str
    amp: complex


@dataclass(frozen=True)
class RuleTable:
    """Local nonzero matrix elements of the step operator.

    ``rules`` maps an input ``(label, cur, prev)`` to the outputs it
    produces.  The table is position independent.
    """

    head_states: tuple[str, ...]
    initial: str
    rules: Mapping[Key, tuple[Output, ...]]
    mode: str = BASE
    name: str = ""
    _compiled: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise MalformedTable(f"unknown mode {self.mode!r}")
        labels = set(self.head_states)
        if len(labels) != len(self.head_states):
            raise MalformedTable("duplicate head-state labels")
        if self.initial not in labels:
            raise MalformedTable(f"initial label {self.initial!r} not declared")
        symbols = alphabet(self.mode)
        eps = eps_amp()
        cleaned = {}
        for (label, cur, prev), outs in self.rules.items():
            if label not in labels:
                raise MalformedTable(f"rule input references undeclared label {label!r}")
            if cur not in symbols or prev not in symbols:
                raise MalformedTable(f"rule input ({label},{cur},{prev}) has bad symbols")
            kept = []
            for o in outs:
                if o.label not in labels:
                    raise MalformedTable(f"rule output references undeclared label {o.label!r}")
                if o.cur not in symbols or o.prev not in symbols:
                    raise MalformedTable(f"rule output ({o.label},{o.cur},{o.prev}) has bad symbols")
                if abs(o.amp) > eps:
                    kept.append(Output(o.label, o.cur, o.prev, complex(o.amp)))
            cleaned[(label, cur, prev)] = tuple(kept)
        object.__setattr__(self, "rules", cleaned)

    @property
    def symbols(self) -> str:
        return alphabet(self.mode)

    @property
    def local_dim(self) -> int:
        return len(self.head_states) * len(self.symbols) ** 2

    def label_index(self) -> dict[str, int]:
        return {label: k for k, label in enumerate(self.head_states)}

    def local_index(self, label: str, cur: str, prev: str) -> int:
        d = len(self.symbols)
        return (self.label_index()[label] * d + self.symbols.index(cur)) * d + self.symbols.index(prev)

    def local_matrix(self) -> np.ndarray:
        """Dense matrix from inputs (label, cur, prev) to outputs, columns = inputs."""
        dim = self.local_dim
        mat = np.zeros((dim, dim), dtype=complex)
        lidx = self.label_index()
        d = len(self.symbols)
        sym = {ch: k for k, ch in enumerate(self.symbols)}
        for (label, cur, prev), outs in self.rules.items():
            col = (lidx[label] * d + sym[cur]) * d + sym[prev]
            for o in outs:
                row = (lidx[o.label] * d + sym[o.cur]) * d + sym[o.prev]
                mat[row, col] += o.amp
        return mat

    @property
    def deterministic(self) -> bool:
        """Every input has exactly one output of unit magnitude."""
        n_inputs = len(self.head_states) * len(self.symbols) ** 2
        if len(self.rules) != n_inputs:
            return False
        return all(len(outs) == 1 and abs(abs(outs[0].amp) - 1) <= ISOMETRY_TOL
                   for outs in self.rules.values())

    def with_mode(self, mode: str) -> "RuleTable":
        """Lift a base table to extended mode (identity on inputs touching N)."""
        if mode == self.mode:
            return self
        if self.mode != BASE or mode != EXTENDED:
            raise MachineError("only base -> extended lifting is supported")
        rules = dict(self.rules)
        for label in self.head_states:
            for cur in alphabet(EXTENDED):
                for prev in alphabet(EXTENDED):
                    if "N" in (cur, prev):
                        rules[(label, cur, prev)] = (Output(label, cur, prev, 1.0),)
        return RuleTable(self.head_states, self.initial, rules, EXTENDED, self.name)


@dataclass(frozen=True)
class IsometryReport:
    is_isometric: bool
    max_column_defect: float
    offending_pairs: tuple[tuple[Key, Key], ...]


def validate(table: RuleTable, tol: float = ISOMETRY_TOL) -> IsometryReport:
    """Check the local rule matrix has orthonormal columns.

    Inputs missing from the table give zero columns and therefore show up
    as defects of size 1.
    """
    mat = table.local_matrix()
    gram = mat.conj().T @ mat
    defect = np.abs(gram - np.eye(gram.shape[0]))
    worst = float(defect.max()) if defect.size else 0.0
    d = len(table.symbols)

    def key(idx: int) -> Key:
        label, rest = divmod(idx, d * d)
        cur, prev = divmod(rest, d)
        return table.head_states[label], table.symbols[cur], table.symbols[prev]

    bad = np.argwhere(np.triu(defect) > tol)
    pairs = tuple((key(int(a)), key(int(b))) for a, b in bad[:64])
    return IsometryReport(worst <= tol, worst, pairs)


# JSON machine-spec format ---------------------------------------------------

def table_to_dict(table: RuleTable) -> dict:
    rules = []
    for (label, cur, prev), outs in sorted(table.rules.items()):
        rules.append({
            "l": label, "cur": cur, "prev": prev,
            "out": [{"l": o.label, "cur": o.cur, "prev": o.prev,
                     "amp": [o.amp.real, o.amp.imag]} for o in outs],
        })
    return {"mode": table.mode, "head_states": list(table.head_states),
            "initial": table.initial, "rules": rules}


def table_from_dict(doc: Mapping, name: str = "") -> RuleTable:
    try:
        mode = doc.get("mode", BASE)
        head_states = tuple(str(s) for s in doc["head_states"])
        initial = str(doc["initial"])
        rules: dict[Key, tuple[Output, ...]] = {}
        for entry in doc["rules"]:
            key = (str(entry["l"]), str(entry["cur"]), str(entry["prev"]))
            if key in rules:
                raise MalformedTable(f"duplicate rule input {key}")
            outs = []
            for o in entry["out"]:
                re, im = o["amp"]
                outs.append(Output(str(o["l"]), str(o["cur"]), str(o["prev"]),
                                   complex(float(re), float(im))))
            rules[key] = tuple(outs)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MachineError):
            raise
        raise MalformedTable(f"bad machine spec: {exc!r}") from exc
    return RuleTable(head_states, initial, rules, mode, name)


def load_table(path: str | Path) -> RuleTable:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedTable(f"{path}: not valid JSON ({exc})") from exc
    return table_from_dict(doc, name=path.stem)


def dump_table(table: RuleTable, path: str | Path) -> None:
    Path(path).write_text(json.dumps(table_to_dict(table), indent=1) + "\n", encoding="utf-8")


# Table construction helpers -------------------------------------------------

def complete_permutation(
    head_states: Iterable[str],
    mode: str,
    partial: Mapping[Key, Iterable[Output]],
    reserved_outputs: Iterable[Key] = (),
) -> dict[Key, tuple[Output, ...]]:
    """Extend a partial isometric table to the whole local space.

    Inputs not in ``partial`` are sent, in sorted order, to the sorted
    outputs nobody uses yet, giving a permutation on that complement.
    """
    syms = alphabet(mode)
    labels = tuple(head_states)
    rules = {k: tuple(v) for k, v in partial.items()}
    used = set(reserved_outputs)
    for outs in rules.values():
        used.update((o.label, o.cur, o.prev) for o in outs)
    universe = [(l, c, p) for l in labels for c in syms for p in syms]
    free_in = [k for k in universe if k not in rules]
    free_out = [k for k in universe if k not in used]
    if len(free_in) != len(free_out):
        raise MalformedTable("partial table is not injective; cannot complete")
    for src, dst in zip(free_in, free_out):
        rules[src] = (Output(*dst, 1.0),)
    return rules


def periodic_printer(pattern: str, mode: str = BASE, name: str = "") -> RuleTable:
    """Deterministic table printing ``pattern`` repeated forever from site 1.

    Site 1 is the initial spacer, so ``pattern`` must start with ``0``.
    Label ``q{k}`` writes ``pattern[k]``.
    """
    if not pattern.startswith(SPACER):
        raise MachineError("pattern must start with the spacer")
    period = len(pattern)
    labels = tuple(f"q{k}" for k in range(period))
    partial = {}
    for k in range(period):
        prev = pattern[k - 1]
        partial[(labels[k], SPACER, prev)] = (
            Output(labels[(k + 1) % period], pattern[k], prev, 1.0),)
    rules = complete_permutation(labels, mode, partial)
    return RuleTable(labels, labels[1 % period], rules, mode, name)


def random_deterministic_table(rng: np.random.Generator, n_labels: int = 3,
                               mode: str = BASE) -> RuleTable:
    """A uniformly random permutation of the local space."""
    syms = alphabet(mode)
    labels = tuple(f"s{k}" for k in range(n_labels))
    universe = [(l, c, p) for l in labels for c in syms for p in syms]
    perm = rng.permutation(len(universe))
    rules = {universe[k]: (Output(*universe[int(perm[k])], 1.0),) for k in range(len(universe))}
    return RuleTable(labels, labels[0], rules, mode, "random-deterministic")


def random_isometric_table(rng: np.random.Generator, n_labels: int = 2,
                           n_mixes: int = 3, mode: str = BASE) -> RuleTable:
    """A random permutation followed by random 2x2 unitary output mixings.

    Mixings are placed on outputs of inputs with a spacer under the head,
    the only inputs the dynamics ever reaches; the first one always involves
    the initial input, so the first step branches.
    """
    syms = alphabet(mode)
    labels = tuple(f"s{k}" for k in range(n_labels))
    universe = [(l, c, p) for l in labels for c in syms for p in syms]
    dim = len(universe)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[rng.permutation(dim), np.arange(dim)] = 1.0
    reachable_cols = [k for k, (_, c, _) in enumerate(universe) if c == SPACER]
    start = universe.index((labels[0], SPACER, SPACER))
    for k in range(n_mixes):
        a, b = rng.choice(reachable_cols, size=2, replace=False)
        if k == 0 and start not in (a, b):
            # The initial input is always reached, so the first mix guarantees a branch.
            a = start
        ra, rb = int(np.argmax(np.abs(mat[:, a]))), int(np.argmax(np.abs(mat[:, b])))
        if ra == rb:
            continue
        theta = rng.uniform(0.2, np.pi / 2 - 0.2)
        phi, chi = rng.uniform(0, 2 * np.pi, size=2)
        mix = np.array([[np.cos(theta), -np.exp(1j * chi) * np.sin(theta)],
                        [np.exp(1j * phi) * np.sin(theta), np.exp(1j * (phi + chi)) * np.cos(theta)]])
        rows = mat[[ra, rb], :]
        mat[[ra, rb], :] = mix @ rows
    rules = {}
    for col, key in enumerate(universe):
        outs = tuple(Output(*universe[row], complex(mat[row, col]))
                     for row in np.nonzero(np.abs(mat[:, col]) > DEFAULT_EPS_AMP)[0])
        rules[key] = outs
    return RuleTable(labels, labels[0], rules, mode, "random-isometric")
