"""Finite-horizon printability, truth, validity, consistency and completeness.

The defining limits (n, m -> infinity) are replaced by a three-valued
verdict at horizon ``n`` that relies on the frozen region: once a 0-delimited
word sits two sites behind the head it can never be rewritten, so
``Violated`` is final while ``HoldsSoFar``/``Open`` may still change.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from qsm.evolution import SparseState, evolve, step
from qsm.machine import MachineError, RuleTable
from qsm.symbols import (EXTENDED, SentenceForm, SentenceKind, Word, classify,
                         enumerate_sentences, frozen_words, sentence, words_up_to)

EPS_P = 1e-9
PATH_LOCAL = "path-local"
GLOBAL = "global"
SEMANTICS = (PATH_LOCAL, GLOBAL)
MAX_WITNESSES = 4

LIAR = "~PN(~PN)"
TRUTHTELLER = "PN(~PN)"


class SemanticsError(MachineError):
    pass


class NotASentence(SemanticsError):
    pass


class NotExtendedMode(SemanticsError):
    pass


class TruthStatus(enum.Enum):
    HOLDS_SO_FAR = "holds-so-far"
    OPEN = "open"
    VIOLATED = "violated"
    NO_DOMAIN_YET = "no-domain-yet"


@dataclass(frozen=True)
class Snapshot:
    """Per-configuration frozen words of one evolved state."""

    n: int
    mode: str
    rows: tuple[tuple[str, float, frozenset], ...]

    @classmethod
    def of(cls, state: SparseState, mode: str) -> "Snapshot":
        head = state.n + 2
        rows = []
        for config, amp in state.items():
            rows.append((config.digest(), abs(amp) ** 2, frozenset(frozen_words(config.tape, head))))
        rows.sort()
        return cls(state.n, mode, tuple(rows))

    def mass(self, pred) -> float:
        return sum(p for _, p, words in self.rows if pred(words))

    def witnesses(self, pred) -> list[str]:
        return [d for d, _, words in self.rows if pred(words)][:MAX_WITNESSES]

    def printed_words(self) -> set[str]:
        out: set[str] = set()
        for _, _, words in self.rows:
            out |= words
        return out


def _snapshot(table: RuleTable, n: int, state: SparseState | None) -> Snapshot:
    if state is None:
        state = evolve(table, n)
    elif state.n != n:
        raise SemanticsError(f"state is at step {state.n}, expected {n}")
    return Snapshot.of(state, table.mode)


def printability_in(snap: Snapshot, word: str) -> float:
    return snap.mass(lambda ws: word in ws)


def printability(table: RuleTable, word: str, n: int, state: SparseState | None = None) -> float:
    """Probability that ``word`` appears 0-delimited in the frozen region at step ``n``."""
    return printability_in(_snapshot(table, n, state), str(Word(word)))


@dataclass(frozen=True)
class SentenceVerdict:
    sentence: str
    kind: str
    status: TruthStatus
    probability: float
    witnesses: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"sentence": self.sentence, "kind": self.kind, "status": self.status.value,
                "probability": self.probability, "witnesses": list(self.witnesses)}


def _as_sentence(s, mode: str) -> SentenceForm:
    form = s if isinstance(s, SentenceForm) else classify(s, mode)
    if not form.is_sentence:
        raise NotASentence(f"{form.word!r} is not a sentence in {mode} mode")
    return form


def judge(snap: Snapshot, form: SentenceForm, semantics: str = PATH_LOCAL) -> SentenceVerdict:
    if semantics not in SEMANTICS:
        raise SemanticsError(f"unknown semantics {semantics!r}")
    word, target = str(form.word), str(form.target)
    has_s = lambda ws: word in ws  # noqa: E731
    domain = snap.mass(has_s)
    kind = form.kind.value

    def verdict(status, pred=has_s):
        return SentenceVerdict(word, kind, status, domain, tuple(snap.witnesses(pred)))

    if domain <= EPS_P:
        return verdict(TruthStatus.NO_DOMAIN_YET, lambda ws: False)
    negative = form.kind.negative
    if semantics == PATH_LOCAL:
        if negative:
            bad = lambda ws: word in ws and target in ws  # noqa: E731
            if snap.mass(bad) > EPS_P:
                return verdict(TruthStatus.VIOLATED, bad)
            return verdict(TruthStatus.HOLDS_SO_FAR)
        missing = lambda ws: word in ws and target not in ws  # noqa: E731
        if snap.mass(missing) > EPS_P:
            return verdict(TruthStatus.OPEN, missing)
        return verdict(TruthStatus.HOLDS_SO_FAR)
    seen = snap.mass(lambda ws: target in ws) > EPS_P
    has_t = lambda ws: target in ws  # noqa: E731
    if negative:
        return verdict(TruthStatus.VIOLATED, has_t) if seen else verdict(TruthStatus.HOLDS_SO_FAR)
    return verdict(TruthStatus.HOLDS_SO_FAR, has_t) if seen else verdict(TruthStatus.OPEN)


def truth_status(table: RuleTable, s, n: int, semantics: str = PATH_LOCAL,
                 state: SparseState | None = None) -> TruthStatus:
    form = _as_sentence(s, table.mode)
    return judge(_snapshot(table, n, state), form, semantics).status


def truth_matrix_elements(table: RuleTable, s, n: int, m: int,
                          state: SparseState | None = None) -> tuple[float, float]:
    """Sparse evaluation of the truth-condition matrix elements.

    ``rhs = <Q_S>`` at step ``n``; ``lhs = ||Q U^m Q_S Psi(n)||^2`` where
    ``Q`` finds the target (positive sentences) or its absence (negative
    ones) at step ``n + m``.  ``lhs == rhs`` means true on the step-``n``
    domain; ``lhs < rhs`` means false there.
    """
    form = _as_sentence(s, table.mode)
    state = evolve(table, n) if state is None else state
    word, target = str(form.word), str(form.target)
    head = n + 2
    proj = {}
    for key, amp in state.terms.items():
        if word in frozen_words(key[1].decode("ascii"), head):
            proj[key] = amp
    rhs = sum(abs(a) ** 2 for a in proj.values())
    cur = state.with_terms(proj)
    for _ in range(m):
        cur = step(cur, table, eps=0.0)
    lhs = 0.0
    for config, amp in cur.items():
        found = target in frozen_words(config.tape, config.head)
        if found != form.kind.negative:
            lhs += abs(amp) ** 2
    return lhs, rhs


@dataclass
class MachineReport:
    machine: str
    mode: str
    semantics: str
    horizon: int
    max_sentence_len: int
    verdicts: list[SentenceVerdict]
    consistent_so_far: bool
    inconsistency_witnesses: list[dict]
    cannot_be_valid: bool
    valid_so_far: bool
    completeness_coverage: float
    maximal_completeness_coverage: float
    printable_sentences: list[str] = field(default_factory=list)

    def verdict(self, word: str) -> SentenceVerdict:
        for v in self.verdicts:
            if v.sentence == word:
                return v
        raise KeyError(word)

    def violated(self) -> list[SentenceVerdict]:
        return [v for v in self.verdicts if v.status is TruthStatus.VIOLATED]

    def to_dict(self) -> dict:
        return {
            "machine": self.machine,
            "mode": self.mode,
            "semantics": self.semantics,
            "horizon": self.horizon,
            "max_sentence_len": self.max_sentence_len,
            "flags": {
                "valid_so_far": self.valid_so_far,
                "consistent_so_far": self.consistent_so_far,
                "cannot_be_valid": self.cannot_be_valid,
                "completeness_coverage": self.completeness_coverage,
                "maximal_completeness_coverage": self.maximal_completeness_coverage,
            },
            "printable_sentences": self.printable_sentences,
            "inconsistencies": self.inconsistency_witnesses,
            "sentences": [v.to_dict() for v in self.verdicts],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def summary(self) -> str:
        lines = [f"machine {self.machine or '?'} ({self.mode}), horizon n={self.horizon}, "
                 f"L={self.max_sentence_len}, {self.semantics} semantics"]
        if self.cannot_be_valid:
            lines.append("CANNOT BE VALID")
            for v in self.violated():
                lines.append(f"  violated: {v.sentence} witness {', '.join(v.witnesses)}")
            for w in self.inconsistency_witnesses:
                lines.append(f"  inconsistent: {w['positive']} and {w['negative']} on {w['config']}")
        else:
            lines.append("valid-so-far")
        pos = {v.sentence for v in self.verdicts if v.probability > EPS_P}
        pairs = []
        for word in sorted(pos):
            form = classify(word, self.mode)
            if form.kind in (SentenceKind.POSITIVE_P, SentenceKind.POSITIVE_PN):
                neg = str(form.negation.word)
                if neg in pos and self.consistent_so_far:
                    pairs.append(f"{word} and {neg} both printable on disjoint paths")
        lines.append("; ".join(["consistent" if self.consistent_so_far else "inconsistent"] + pairs))
        lines.append("printable sentences: " + (", ".join(self.printable_sentences) or "none"))
        lines.append(f"completeness coverage {self.completeness_coverage:.4f}, "
                     f"maximal completeness coverage {self.maximal_completeness_coverage:.4f}")
        return "\n".join(lines) + "\n"


def _printed_sentences(snap: Snapshot) -> list[SentenceForm]:
    out = []
    for w in snap.printed_words():
        form = classify(w, snap.mode)
        if form.is_sentence:
            out.append(form)
    return out


def inconsistencies(snap: Snapshot) -> list[dict]:
    """Configurations holding both a sentence and its negation."""
    found = []
    for digest, p, words in snap.rows:
        for w in sorted(words):
            form = classify(w, snap.mode)
            if form.kind in (SentenceKind.POSITIVE_P, SentenceKind.POSITIVE_PN):
                neg = str(form.negation.word)
                if neg in words and p > EPS_P:
                    found.append({"config": digest, "positive": w, "negative": neg,
                                  "probability": p})
    return found


EXCLUDED_EXTENDED = (TRUTHTELLER, LIAR)


def machine_report(table: RuleTable, n: int, max_len: int = 6, semantics: str = PATH_LOCAL,
                   state: SparseState | None = None, snapshot: Snapshot | None = None) -> MachineReport:
    """Evaluate every sentence of length <= ``max_len`` plus every printed one."""
    if max_len < 5:
        raise SemanticsError("max sentence length must be at least 5")
    if semantics not in SEMANTICS:
        raise SemanticsError(f"unknown semantics {semantics!r}")
    snap = snapshot if snapshot is not None else _snapshot(table, n, state)
    mode = table.mode
    forms = {str(f.word): f for f in enumerate_sentences(max_len, mode)}
    for f in _printed_sentences(snap):
        forms.setdefault(str(f.word), f)
    verdicts = [judge(snap, forms[w], semantics) for w in sorted(forms, key=lambda w: (len(w), w))]
    bad = inconsistencies(snap)
    violated = any(v.status is TruthStatus.VIOLATED for v in verdicts)
    cannot = violated or bool(bad)
    printable = {v.sentence for v in verdicts if v.probability > EPS_P}

    args = [x for x in words_up_to(max_len - 4, mode) if not classify(x, mode).is_sentence]
    covered = 0
    for x in args:
        if str(sentence(SentenceKind.POSITIVE_P, x).word) in printable or \
                str(sentence(SentenceKind.NEGATIVE_P, x).word) in printable:
            covered += 1
    coverage = covered / len(args) if args else 0.0
    bounded = [w for w in forms if len(w) <= max_len
               and not (mode == EXTENDED and w in EXCLUDED_EXTENDED)]
    max_cov = sum(1 for w in bounded if w in printable) / len(bounded) if bounded else 0.0

    return MachineReport(
        machine=table.name, mode=mode, semantics=semantics, horizon=snap.n,
        max_sentence_len=max_len, verdicts=verdicts,
        consistent_so_far=not bad, inconsistency_witnesses=bad,
        cannot_be_valid=cannot, valid_so_far=not cannot,
        completeness_coverage=coverage, maximal_completeness_coverage=max_cov,
        printable_sentences=sorted(printable, key=lambda w: (len(w), w)),
    )


@dataclass(frozen=True)
class IncompletenessReport:
    horizon: int
    liar_probability: float
    truthteller_probability: float
    liar_status: TruthStatus
    truthteller_status: TruthStatus
    truthteller_verdict: str
    cannot_be_valid: bool
    witnesses: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "liar": LIAR, "truthteller": TRUTHTELLER,
                "liar_probability": self.liar_probability,
                "truthteller_probability": self.truthteller_probability,
                "liar_status": self.liar_status.value,
                "truthteller_status": self.truthteller_status.value,
                "truthteller_verdict": self.truthteller_verdict,
                "cannot_be_valid": self.cannot_be_valid,
                "witnesses": list(self.witnesses)}


def incompleteness_check(table: RuleTable, n: int, state: SparseState | None = None) -> IncompletenessReport:
    """Check the self-referential pair ``PN(~PN)`` / ``~PN(~PN)``.

    ``~PN(~PN)`` names itself as its target, so printing it on any path
    violates it on that very path.  ``PN(~PN)`` can then only be true on
    paths that also print the liar, which are already invalid.
    """
    if table.mode != EXTENDED:
        raise NotExtendedMode("incompleteness check needs an extended-mode table")
    snap = _snapshot(table, n, state)
    liar = judge(snap, classify(LIAR, EXTENDED))
    teller = judge(snap, classify(TRUTHTELLER, EXTENDED))
    if teller.probability <= EPS_P:
        teller_verdict = "unprintable-so-far"
    elif teller.status is TruthStatus.HOLDS_SO_FAR:
        teller_verdict = "true-only-alongside-violated-liar"
    else:
        teller_verdict = "violated-or-meaningless"
    cannot = liar.status is TruthStatus.VIOLATED
    return IncompletenessReport(
        horizon=n,
        liar_probability=liar.probability,
        truthteller_probability=teller.probability,
        liar_status=liar.status,
        truthteller_status=teller.status,
        truthteller_verdict=teller_verdict,
        cannot_be_valid=cannot,
        witnesses=liar.witnesses + teller.witnesses,
    )
