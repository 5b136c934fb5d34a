"""Observer-rotated bases, the conjugated dynamics and joint amplitudes.

A single-site unitary ``u`` acts on the symbol basis.  Rotated states use
plain ``{(label, tape): amplitude}`` dictionaries because rotations can put
non-spacer symbols under the head, which the sparse engine never sees.
The head site is then stored explicitly, so a tape at step ``n`` covers
sites ``1..n+2``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qsm.evolution import MissingRule, SparseState, evolve, initial_state, step
from qsm.machine import BASE, MachineError, RuleTable, eps_amp
from qsm.semantics import MachineReport, PATH_LOCAL, machine_report
from qsm.symbols import SPACER, Word, alphabet

UNITARY_TOL = 1e-12
LOCAL = "local"
CUMULATIVE = "cumulative"
VARIANTS = (LOCAL, CUMULATIVE)

Terms = dict  # {(label, tape): complex}


class BasisError(MachineError):
    pass


class NotUnitary(BasisError):
    pass


class PlacementOutOfFrozenRegion(BasisError):
    pass


class IntervalNotFrozen(BasisError):
    pass


class SiteUnitary:
    """A unitary on the symbol basis, indices in alphabet order."""

    def __init__(self, matrix, mode: str = BASE, name: str = ""):
        mat = np.asarray(matrix, dtype=complex)
        d = len(alphabet(mode))
        if mat.shape != (d, d):
            raise BasisError(f"{mode} mode needs a {d}x{d} matrix, got {mat.shape}")
        defect = float(np.abs(mat.conj().T @ mat - np.eye(d)).max())
        if defect > UNITARY_TOL:
            raise NotUnitary(f"u^dagger u differs from identity by {defect:.3g}")
        self.matrix = mat
        self.mode = mode
        self.name = name or "custom"
        self.symbols = alphabet(mode)
        self._index = {ch: k for k, ch in enumerate(self.symbols)}

    def __repr__(self) -> str:
        return f"SiteUnitary({self.name!r}, mode={self.mode!r})"

    @classmethod
    def identity(cls, mode: str = BASE) -> "SiteUnitary":
        return cls(np.eye(len(alphabet(mode))), mode, "identity")

    @classmethod
    def rot_0p(cls, theta: float, mode: str = BASE) -> "SiteUnitary":
        """Real rotation by ``theta`` in the (spacer, P) plane."""
        mat = np.eye(len(alphabet(mode)), dtype=complex)
        c, s = math.cos(theta), math.sin(theta)
        mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1] = c, -s, s, c
        return cls(mat, mode, f"rot-0P({theta:g})")

    @classmethod
    def preset(cls, text: str, mode: str = BASE) -> "SiteUnitary":
        if text == "identity":
            return cls.identity(mode)
        m = re.fullmatch(r"rot-0P\(\s*([-+0-9.eE]+)\s*\)", text)
        if m:
            try:
                return cls.rot_0p(float(m.group(1)), mode)
            except ValueError:
                pass
        raise BasisError(f"unknown unitary preset {text!r}")

    @classmethod
    def from_json(cls, doc, mode: str = BASE, name: str = "") -> "SiteUnitary":
        """Row-major ``[[[re, im], ...], ...]`` matrix."""
        try:
            mat = np.array([[complex(float(re_), float(im)) for re_, im in row] for row in doc])
        except (TypeError, ValueError) as exc:
            raise BasisError(f"bad unitary matrix: {exc}") from exc
        return cls(mat, mode, name)

    @classmethod
    def load(cls, spec: str, mode: str = BASE) -> "SiteUnitary":
        """A preset name or the path of a JSON matrix file."""
        path = Path(spec)
        if path.suffix == ".json" or path.exists():
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise BasisError(f"cannot read unitary {spec}: {exc}") from exc
            return cls.from_json(doc, mode, path.stem)
        return cls.preset(spec, mode)

    def to_json(self) -> list:
        return [[[z.real, z.imag] for z in row] for row in self.matrix]

    def elem(self, out: str, inp: str) -> complex:
        """``<out|u|inp>``."""
        return complex(self.matrix[self._index[out], self._index[inp]])

    def adjoint(self) -> "SiteUnitary":
        return SiteUnitary(self.matrix.conj().T, self.mode, self.name + "^dagger")

    def columns(self) -> dict[str, list[tuple[str, complex]]]:
        """For each input symbol, the nonzero ``(output, <output|u|input>)`` pairs."""
        cols = {}
        for j, inp in enumerate(self.symbols):
            cols[inp] = [(self.symbols[i], complex(self.matrix[i, j]))
                         for i in range(len(self.symbols)) if self.matrix[i, j] != 0]
        return cols


def _check_symbols(u: SiteUnitary, table: RuleTable) -> None:
    if u.symbols != table.symbols:
        raise BasisError(f"unitary is {u.mode} mode, table is {table.mode} mode")


def apply_sites(terms: Terms, u: SiteUnitary, sites, eps: float | None = None) -> Terms:
    """Apply ``u`` independently on each listed site (1-based)."""
    cols = u.columns()
    cur = terms
    for site in sites:
        nxt: Terms = {}
        k = site - 1
        for (label, tape), amp in cur.items():
            for sym, coef in cols[tape[k]]:
                key = (label, tape[:k] + sym + tape[k + 1:])
                nxt[key] = nxt.get(key, 0j) + coef * amp
        cur = nxt
    if eps is not None:
        cur = {k: v for k, v in cur.items() if abs(v) > eps}
    return cur


def extended_terms(state: SparseState) -> Terms:
    """Sparse state with the head site appended explicitly as a spacer."""
    return {(c.label, c.tape + SPACER): a for c, a in state.items()}


def terms_distance(a: Terms, b: Terms) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0j) - b.get(k, 0j)) for k in keys), default=0.0)


# Projector expectations ------------------------------------------------------

def projector_expectation(state: SparseState, x: str, a: int) -> float:
    """Standard-basis expectation of the ``0X0`` projector placed at site ``a``."""
    pattern = SPACER + str(Word(x)) + SPACER
    b = a + len(pattern) - 1
    _placement_ok(state.n, a, b)
    return sum(abs(amp) ** 2 for c, amp in state.items() if c.tape[a - 1:b] == pattern)


def _placement_ok(n: int, a: int, b: int) -> None:
    if a < 1:
        raise PlacementOutOfFrozenRegion("placements start at site 1")
    if b > n:
        raise PlacementOutOfFrozenRegion(
            f"interval [{a},{b}] is not frozen at step {n} (head at {n + 2})")


def observer_projector_expectation(state: SparseState, u: SiteUnitary, x: str, a: int) -> float:
    """Expectation of ``u P u^dagger`` for the ``0X0`` pattern on ``[a, a+L(X)+1]``."""
    pattern = SPACER + str(Word(x)) + SPACER
    b = a + len(pattern) - 1
    _placement_ok(state.n, a, b)
    groups: dict = {}
    for c, amp in state.items():
        coef = 1 + 0j
        for k, w in enumerate(pattern):
            coef *= u.elem(c.tape[a - 1 + k], w).conjugate()
            if coef == 0:
                break
        if coef == 0:
            continue
        rest = (c.label, c.tape[:a - 1], c.tape[b:])
        groups[rest] = groups.get(rest, 0j) + coef * amp
    return float(sum(abs(v) ** 2 for v in groups.values()))


# Rotated joint amplitude -----------------------------------------------------

@dataclass(frozen=True)
class JointAmplitude:
    value: float
    word: str
    a: int
    b: int
    c: int
    d: int
    n: int
    m: int

    def to_dict(self) -> dict:
        return {"value": self.value, "word": self.word, "negative_interval": [self.a, self.b],
                "word_interval": [self.c, self.d], "n": self.n, "m": self.m}


def joint_intervals(x: str, a: int, c: int) -> tuple[int, int]:
    """End sites of ``0~P(X)0`` starting at ``a`` and ``0X0`` starting at ``c``."""
    return a + len(x) + 5, c + len(x) + 1


def rotated_joint_amplitude(table: RuleTable, u: SiteUnitary, x: str, a: int, c: int,
                            n: int, m: int) -> JointAmplitude:
    """Magnitude of finding ``X`` at ``[c,d]`` ``m`` steps after ``~P(X)`` at ``[a,b]``, rotated.

    The step-``n`` state is contracted with ``<~P(X)|u`` on ``[a,b]`` and
    replaced there by ``u^dagger|~P(X)>``; after ``m`` more steps it is
    contracted with ``<X|u`` on ``[c,d]``.  The ``[a,b]`` sites are frozen,
    so they ride along as a normalised spectator: on sites shared with
    ``[c,d]`` the two contractions reduce to ``<x|u u^dagger|p> = delta``.
    The remaining sites are left open and the norm of the leftover vector
    is returned.
    """
    _check_symbols(u, table)
    x = str(Word(x))
    neg = SPACER + "~P(" + x + ")" + SPACER
    pos = SPACER + x + SPACER
    b, d = joint_intervals(x, a, c)
    if a < 1 or c < 1:
        raise IntervalNotFrozen("placements start at site 1")
    if n < b or n + m < d:
        raise IntervalNotFrozen(f"need n >= {b} and n + m >= {d}, got n={n}, m={m}")
    for ch in x:
        if ch not in table.symbols:
            raise BasisError(f"symbol {ch!r} not in {table.mode} alphabet")
    state = evolve(table, n)
    blank = SPACER * len(neg)
    projected: dict = {}
    for config, amp in state.items():
        tape = config.tape
        coef = 1 + 0j
        for k, p in enumerate(neg):
            coef *= u.elem(p, tape[a - 1 + k])
            if coef == 0:
                break
        if coef == 0:
            continue
        key = state.key(config)[0], (tape[:a - 1] + blank + tape[b:]).encode("ascii")
        projected[key] = projected.get(key, 0j) + coef * amp
    cur = state.with_terms(projected)
    for _ in range(m):
        cur = step(cur, table, eps=0.0)
    overlap_ok = all(neg[s - a] == pos[s - c] for s in range(max(a, c), min(b, d) + 1))
    out: dict = {}
    if overlap_ok:
        for config, amp in cur.items():
            tape = config.tape
            coef = 1 + 0j
            for k, ch in enumerate(pos):
                site = c + k
                if not a <= site <= b:
                    coef *= u.elem(ch, tape[site - 1])
                    if coef == 0:
                        break
            if coef == 0:
                continue
            rest = "".join("*" if a <= s <= b or c <= s <= d else tape[s - 1]
                           for s in range(1, len(tape) + 1))
            out[(config.label, rest)] = out.get((config.label, rest), 0j) + coef * amp
    value = math.sqrt(sum(abs(v) ** 2 for v in out.values()))
    return JointAmplitude(value, x, a, b, c, d, n, m)


# Conjugated dynamics ----------------------------------------------------------

def general_step(terms: Terms, table: RuleTable, n: int) -> Terms:
    """One application of ``U`` to extended terms, any symbol under the head.

    Input tapes cover sites ``1..n+2`` with the head at ``n+2``; outputs
    cover ``1..n+3``.
    """
    out: Terms = {}
    head = n + 2
    for (label, tape), amp in terms.items():
        cur, prev = tape[head - 1], tape[head - 2]
        outs = table.rules.get((label, cur, prev))
        if outs is None:
            raise MissingRule(f"no rule for input ({label!r}, {cur!r}, {prev!r}) at step {n}")
        base = tape[:head - 2]
        for o in outs:
            key = (o.label, base + o.prev + o.cur + SPACER)
            out[key] = out.get(key, 0j) + o.amp * amp
    return out


@dataclass
class TransformedDynamics:
    """``V = omega U omega^dagger`` realised through ``V^n omega = omega U^n``.

    ``local`` applies ``u`` at the head site and the site behind it;
    ``cumulative`` applies it at every site up to the head.
    """

    table: RuleTable
    u: SiteUnitary
    variant: str = CUMULATIVE
    _udag: SiteUnitary = field(init=False, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise BasisError(f"omega variant must be one of {VARIANTS}")
        _check_symbols(self.u, self.table)
        self._udag = self.u.adjoint()

    def omega_sites(self, n: int) -> tuple[int, ...]:
        head = n + 2
        if self.variant == LOCAL:
            return (head - 1, head)
        return tuple(range(1, head + 1))

    def omega(self, terms: Terms, n: int, *, adjoint: bool = False) -> Terms:
        return apply_sites(terms, self._udag if adjoint else self.u, self.omega_sites(n), eps=0.0)

    def initial(self) -> Terms:
        return self.omega(extended_terms(initial_state(self.table)), 0)

    def readout(self, n: int) -> Terms:
        """``omega U^n`` applied to the initial state."""
        return self.omega(extended_terms(evolve(self.table, n)), n)

    def v_step(self, terms: Terms, n: int) -> Terms:
        """Directly apply ``omega U omega^dagger`` to extended terms at step ``n``."""
        back = self.omega(terms, n, adjoint=True)
        back = {k: v for k, v in back.items() if abs(v) > eps_amp()}
        return self.omega(general_step(back, self.table, n), n + 1)

    def evolve_direct(self, n: int) -> Terms:
        """``V^n`` applied to ``omega`` times the initial state, step by step."""
        terms = self.initial()
        for k in range(n):
            terms = self.v_step(terms, k)
        return terms

    def observer_state(self, n: int) -> SparseState:
        """``V^n omega |init>`` read with observer projectors.

        Observer projectors are ``u P u^dagger`` on every site, so their
        statistics are those of the standard projectors on ``u^dagger``
        applied to every site.
        """
        terms = self.readout(n)
        coords = apply_sites(terms, self._udag, range(1, n + 3), eps=eps_amp())
        labels = self.table.head_states
        out = {}
        for (label, tape), amp in coords.items():
            if tape[-1] != SPACER:
                raise BasisError("observer coordinates put a symbol under the head")
            out[(labels.index(label), tape[:-1].encode("ascii"))] = amp
        return SparseState(n, labels, out)


def transformed_dynamics(table: RuleTable, u: SiteUnitary, variant: str = CUMULATIVE) -> TransformedDynamics:
    return TransformedDynamics(table, u, variant)


@dataclass(frozen=True)
class CommutationReport:
    variant: str
    max_defect: float
    witness: tuple | None

    @property
    def commutes(self) -> bool:
        return self.max_defect <= 1e-12


def commutation_defect(table: RuleTable, u: SiteUnitary, variant: str = LOCAL) -> CommutationReport:
    """Largest matrix-element difference between one step of ``V`` and of ``U``.

    Evaluated on the three-site block (j-1, j, j+1) around a head at ``j``:
    sites further back see ``u u^dagger`` and drop out.
    """
    if variant not in VARIANTS:
        raise BasisError(f"omega variant must be one of {VARIANTS}")
    _check_symbols(u, table)
    udag = u.adjoint()
    before = (1, 2)
    after = (2, 3) if variant == LOCAL else (1, 2, 3)

    def u_step(terms: Terms) -> Terms:
        out: Terms = {}
        for (label, t), amp in terms.items():
            for o in table.rules.get((label, t[1], t[0]), ()):
                key = (o.label, o.prev + o.cur + t[2])
                out[key] = out.get(key, 0j) + o.amp * amp
        return out

    worst, witness = 0.0, None
    syms = table.symbols
    for label in table.head_states:
        for x in syms:
            for y in syms:
                for z in syms:
                    col = {(label, x + y + z): 1 + 0j}
                    plain = u_step(col)
                    conj = apply_sites(u_step(apply_sites(col, udag, before)), u, after)
                    for key in set(plain) | set(conj):
                        diff = abs(plain.get(key, 0j) - conj.get(key, 0j))
                        if diff > worst:
                            worst, witness = diff, ((label, x + y + z), key)
    return CommutationReport(variant, float(worst), witness)


# Validity transport -----------------------------------------------------------

@dataclass
class TransportReport:
    variant: str
    unitary: str
    standard: MachineReport
    observer: MachineReport
    discrepancies: list[dict]

    @property
    def preserved(self) -> bool:
        return not self.discrepancies

    def to_dict(self) -> dict:
        return {"variant": self.variant, "unitary": self.unitary,
                "verdicts_preserved": self.preserved,
                "discrepancies": self.discrepancies,
                "standard_valid_so_far": self.standard.valid_so_far,
                "observer_valid_so_far": self.observer.valid_so_far}


def validity_transport_check(table: RuleTable, u: SiteUnitary, n: int, max_len: int = 6,
                             variant: str = CUMULATIVE, semantics: str = PATH_LOCAL) -> TransportReport:
    """Compare ``U``'s standard verdicts with ``V``'s observer-basis verdicts."""
    dyn = transformed_dynamics(table, u, variant)
    standard = machine_report(table, n, max_len, semantics)
    observer = machine_report(table, n, max_len, semantics, state=dyn.observer_state(n))
    std = {v.sentence: v for v in standard.verdicts}
    obs = {v.sentence: v for v in observer.verdicts}
    diffs = []
    for word in sorted(set(std) | set(obs), key=lambda w: (len(w), w)):
        s, o = std.get(word), obs.get(word)
        s_status = s.status.value if s else "absent"
        o_status = o.status.value if o else "absent"
        if s_status != o_status:
            diffs.append({"sentence": word, "standard": s_status, "observer": o_status})
    return TransportReport(variant, u.name, standard, observer, diffs)
