"""Alphabet, words, sentence grammar and tape segmentation.

Tapes and words are handled as plain strings over the one-character
alphabet ``P ~ ( ) 0`` (plus ``N`` in extended mode).  ``Word`` is a thin
``str`` subclass so words can be compared, hashed and sliced like text.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence, Union


class Symbol(str, enum.Enum):
    ZERO = "0"
    P = "P"
    TILDE = "~"
    LPAREN = "("
    RPAREN = ")"
    N = "N"

    def __str__(self) -> str:
        return self.value


SPACER = Symbol.ZERO.value

BASE = "base"
EXTENDED = "extended"
MODES = (BASE, EXTENDED)

# Index order used for every matrix over the symbol basis.
_BASE_ALPHABET = "0P~()"
_EXTENDED_ALPHABET = "0P~()N"


def alphabet(mode: str = BASE) -> str:
    """Symbol characters in basis order; the spacer is always index 0."""
    if mode == BASE:
        return _BASE_ALPHABET
    if mode == EXTENDED:
        return _EXTENDED_ALPHABET
    raise ValueError(f"unknown mode {mode!r}")


def word_alphabet(mode: str = BASE) -> str:
    return alphabet(mode)[1:]


class LanguageError(ValueError):
    pass


class EmptyInput(LanguageError):
    pass


class ContainsSpacer(LanguageError):
    pass


class InvalidSymbol(LanguageError):
    pass


SymbolsLike = Union[str, Sequence[Union[Symbol, str]]]


def to_text(symbols: SymbolsLike, mode: str = EXTENDED) -> str:
    """Render a sequence of symbols (or characters) as tape text."""
    if isinstance(symbols, str):
        text = symbols
    else:
        text = "".join(s.value if isinstance(s, Symbol) else str(s) for s in symbols)
    allowed = alphabet(mode)
    for ch in text:
        if ch not in allowed:
            raise InvalidSymbol(f"symbol {ch!r} not in {mode} alphabet")
    return text


class Word(str):
    """A nonempty, spacer-free symbol string."""

    def __new__(cls, text: str) -> "Word":
        if not text:
            raise EmptyInput("a word has at least one symbol")
        if SPACER in text:
            raise ContainsSpacer(f"{text!r} contains the spacer symbol")
        return super().__new__(cls, text)

    def __repr__(self) -> str:
        return f"Word({str.__repr__(self)})"

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol(ch) for ch in self)


def parse_word(symbols: SymbolsLike, mode: str = EXTENDED) -> Word:
    text = to_text(symbols, mode)
    if not text:
        raise EmptyInput("empty symbol sequence")
    return Word(text)


class SentenceKind(enum.Enum):
    POSITIVE_P = "P"
    NEGATIVE_P = "~P"
    POSITIVE_PN = "PN"
    NEGATIVE_PN = "~PN"
    PLAIN = "plain"

    @property
    def negative(self) -> bool:
        return self in (SentenceKind.NEGATIVE_P, SentenceKind.NEGATIVE_PN)

    @property
    def is_sentence(self) -> bool:
        return self is not SentenceKind.PLAIN


_PREFIXES = {
    SentenceKind.POSITIVE_P: "P(",
    SentenceKind.NEGATIVE_P: "~P(",
    SentenceKind.POSITIVE_PN: "PN(",
    SentenceKind.NEGATIVE_PN: "~PN(",
}

# Longest prefix first so "~PN(" is never mistaken for something shorter.
_MATCH_ORDER = (
    SentenceKind.NEGATIVE_PN,
    SentenceKind.POSITIVE_PN,
    SentenceKind.NEGATIVE_P,
    SentenceKind.POSITIVE_P,
)


@dataclass(frozen=True)
class SentenceForm:
    kind: SentenceKind
    word: Word
    argument: Word | None = None

    @property
    def is_sentence(self) -> bool:
        return self.kind.is_sentence

    @property
    def target(self) -> Word | None:
        """The word whose presence (or absence) the sentence asserts."""
        if self.argument is None:
            return None
        if self.kind in (SentenceKind.POSITIVE_PN, SentenceKind.NEGATIVE_PN):
            return Word(f"{self.argument}({self.argument})")
        return self.argument

    @property
    def negation(self) -> "SentenceForm":
        flip = {
            SentenceKind.POSITIVE_P: SentenceKind.NEGATIVE_P,
            SentenceKind.NEGATIVE_P: SentenceKind.POSITIVE_P,
            SentenceKind.POSITIVE_PN: SentenceKind.NEGATIVE_PN,
            SentenceKind.NEGATIVE_PN: SentenceKind.POSITIVE_PN,
        }
        if self.argument is None:
            raise LanguageError(f"{self.word!r} is not a sentence")
        return sentence(flip[self.kind], self.argument)

    def __str__(self) -> str:
        return str(self.word)


def sentence(kind: SentenceKind, argument: str) -> SentenceForm:
    """Build a sentence of the given kind around ``argument``."""
    if kind is SentenceKind.PLAIN:
        raise LanguageError("PLAIN is not a sentence kind")
    arg = Word(argument)
    return SentenceForm(kind, Word(f"{_PREFIXES[kind]}{arg})"), arg)


def render(form: SentenceForm) -> Word:
    if form.argument is None:
        return form.word
    return Word(f"{_PREFIXES[form.kind]}{form.argument})")


def classify(word: str, mode: str = BASE) -> SentenceForm:
    """Classify a word as one of the sentence forms or a plain word.

    Interior parentheses are uninterpreted; only the fixed prefix and the
    closing ``)`` at the very end matter.  ``P(X)``/``~P(X)`` require an
    argument that is not itself a sentence, while the extended ``PN(X)``
    forms accept any nonempty argument.

    >>> classify("P(~(PP)").argument
    Word('~(PP')
    >>> classify("P(P(PP))").kind
    <SentenceKind.PLAIN: 'plain'>
    """
    w = word if isinstance(word, Word) else Word(word)
    if w.endswith(")"):
        for kind in _MATCH_ORDER:
            pn = kind in (SentenceKind.POSITIVE_PN, SentenceKind.NEGATIVE_PN)
            if pn and mode != EXTENDED:
                continue
            prefix = _PREFIXES[kind]
            if len(w) <= len(prefix) + 1 or not w.startswith(prefix):
                continue
            arg = Word(w[len(prefix):-1])
            if not pn and classify(arg, mode).is_sentence:
                return SentenceForm(SentenceKind.PLAIN, w)
            return SentenceForm(kind, w, arg)
    return SentenceForm(SentenceKind.PLAIN, w)


def is_sentence(word: str, mode: str = BASE) -> bool:
    return classify(word, mode).is_sentence


@dataclass(frozen=True)
class SegmentDecomposition:
    """Alternating spacer/word segmentation of a tape string.

    ``segments`` holds ``(True, Word)`` for words and ``(False, length)``
    for spacer runs.
    """

    t: int
    nu1: int
    lengths: tuple[int, ...]
    segments: tuple[tuple[bool, Union[Word, int]], ...]

    @property
    def nus(self) -> tuple[int, ...]:
        return tuple((self.nu1 + k) % 2 for k in range(self.t))

    @property
    def words(self) -> tuple[Word, ...]:
        return tuple(seg for is_word, seg in self.segments if is_word)

    @property
    def signature(self) -> tuple[int, tuple[int, ...]]:
        return self.nu1, self.lengths

    def text(self) -> str:
        return "".join(
            str(seg) if is_word else SPACER * int(seg) for is_word, seg in self.segments
        )


def decompose(tape: SymbolsLike) -> SegmentDecomposition:
    text = to_text(tape)
    if not text:
        raise EmptyInput("cannot decompose an empty tape")
    segments: list[tuple[bool, Union[Word, int]]] = []
    for is_word, run in itertools.groupby(text, key=lambda ch: ch != SPACER):
        chunk = "".join(run)
        segments.append((True, Word(chunk)) if is_word else (False, len(chunk)))
    lengths = tuple(len(seg) if w else int(seg) for w, seg in segments)
    return SegmentDecomposition(
        t=len(segments),
        nu1=1 if segments[0][0] else 0,
        lengths=lengths,
        segments=tuple(segments),
    )


def word_count(t: int, nu1: int) -> int:
    """Number of nonempty words in a path with ``t`` alternating segments."""
    if t % 2 == 0:
        return t // 2
    return (t - 1) // 2 if nu1 == 0 else (t + 1) // 2


def frozen_words(tape: str, head: int) -> list[str]:
    """0-delimited words whose trailing spacer sits at site <= head - 2.

    Sites are 1-based; ``tape[0]`` is site 1.  The region beyond the tape
    is treated as spacer.  Returned in order of appearance.
    """
    limit = head - 2
    if limit <= 0:
        return []
    frozen = tape[:limit]
    if len(frozen) < limit:
        frozen = frozen + SPACER * (limit - len(frozen))
    parts = frozen.split(SPACER)
    return [p for p in parts[1:-1] if p]


def contained_words(tape: SymbolsLike, head_pos: int) -> set[Word]:
    """Words printed 0-delimited inside the frozen region behind the head.

    A word starting at site 1 has no leading spacer and is never contained.
    """
    return {Word(w) for w in frozen_words(to_text(tape), head_pos)}


def words_up_to(max_len: int, mode: str = BASE) -> Iterable[Word]:
    """All words of length 1..max_len in canonical (length, lexicographic) order."""
    letters = word_alphabet(mode)
    for k in range(1, max_len + 1):
        for combo in itertools.product(letters, repeat=k):
            yield Word("".join(combo))


def enumerate_sentences(max_len: int, mode: str = BASE) -> list[SentenceForm]:
    """Every sentence whose rendered length is at most ``max_len``."""
    kinds = [SentenceKind.POSITIVE_P, SentenceKind.NEGATIVE_P]
    if mode == EXTENDED:
        kinds += [SentenceKind.POSITIVE_PN, SentenceKind.NEGATIVE_PN]
    out = []
    for kind in kinds:
        room = max_len - len(_PREFIXES[kind]) - 1
        for arg in words_up_to(room, mode):
            form = classify(f"{_PREFIXES[kind]}{arg})", mode)
            if form.kind is kind:
                out.append(form)
    return out
