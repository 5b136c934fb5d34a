import itertools
import random

import pytest

from qsm.symbols import (BASE, EXTENDED, ContainsSpacer, EmptyInput, InvalidSymbol,
                         SentenceKind, Symbol, Word, alphabet, classify, contained_words,
                         decompose, enumerate_sentences, frozen_words, parse_word, render,
                         sentence, word_count, words_up_to)
from qsm.oracle import pattern_at


def test_alphabet_sizes():
    assert len(alphabet(BASE)) == 5
    assert len(alphabet(EXTENDED)) == 6
    assert alphabet(BASE)[0] == "0" == alphabet(EXTENDED)[0]
    assert [ch for ch in alphabet(EXTENDED) if ch == "0"] == ["0"]


def test_parse_word_examples():
    S = Symbol
    assert parse_word([S.P, S.P]) == "PP"
    w = parse_word([S.P, S.LPAREN, S.TILDE, S.LPAREN, S.P, S.P, S.RPAREN])
    assert w == "P(~(PP)"
    with pytest.raises(ContainsSpacer):
        parse_word([S.P, S.ZERO, S.P])
    with pytest.raises(EmptyInput):
        parse_word([])
    with pytest.raises(InvalidSymbol):
        parse_word("PX")


def test_word_rejects_spacer_and_empty():
    with pytest.raises(ContainsSpacer):
        Word("P0")
    with pytest.raises(EmptyInput):
        Word("")


@pytest.mark.parametrize("text, kind, arg", [
    ("P(~(PP)", SentenceKind.POSITIVE_P, "~(PP"),
    ("~P()P)~()", SentenceKind.NEGATIVE_P, ")P)~("),
    ("P(PP)", SentenceKind.POSITIVE_P, "PP"),
    ("~P(P)", SentenceKind.NEGATIVE_P, "P"),
])
def test_classify_sentences(text, kind, arg):
    form = classify(text)
    assert form.kind is kind
    assert form.argument == arg
    assert form.target == arg


@pytest.mark.parametrize("text", ["PP", "P(P(PP))", "P()", "~P()", "P(", "(P)", "P(PP", "~P(~P(P))"])
def test_plain_words(text):
    assert classify(text).kind is SentenceKind.PLAIN
    assert not classify(text).is_sentence


def test_extended_forms():
    liar = classify("~PN(~PN)", EXTENDED)
    assert liar.kind is SentenceKind.NEGATIVE_PN
    assert liar.argument == "~PN"
    assert liar.target == "~PN(~PN)"
    teller = classify("PN(~PN)", EXTENDED)
    assert teller.kind is SentenceKind.POSITIVE_PN
    assert teller.target == "~PN(~PN)"
    # PN arguments may themselves be sentences.
    assert classify("PN(P(P))", EXTENDED).kind is SentenceKind.POSITIVE_PN
    # Base mode has no PN forms; N is not even a base symbol.
    assert classify("P(PP)", BASE).kind is SentenceKind.POSITIVE_P


def test_negation_roundtrip():
    form = classify("P(PP)")
    assert str(form.negation) == "~P(PP)"
    assert str(form.negation.negation) == "P(PP)"


def test_classify_render_identity():
    for arg in words_up_to(3):
        if classify(arg).is_sentence:
            continue
        for kind in (SentenceKind.POSITIVE_P, SentenceKind.NEGATIVE_P):
            form = sentence(kind, arg)
            assert classify(render(form)) == form
    for arg in ("~PN", "P", "N(N"):
        for kind in (SentenceKind.POSITIVE_PN, SentenceKind.NEGATIVE_PN):
            form = sentence(kind, arg)
            assert classify(render(form), EXTENDED) == form


def test_enumerate_sentences_counts():
    # P(X) with |X| <= 2 over 4 letters, none of which is a sentence.
    base = enumerate_sentences(5)
    assert len(base) == 4 + 16 + 4
    assert all(len(f.word) <= 5 for f in base)
    ext = enumerate_sentences(6, EXTENDED)
    kinds = {f.kind for f in ext}
    assert SentenceKind.POSITIVE_PN in kinds and SentenceKind.NEGATIVE_PN in kinds
    # Sentences are never duplicated and all classify back to their kind.
    words = [str(f.word) for f in ext]
    assert len(words) == len(set(words))
    assert all(classify(w, EXTENDED).kind is f.kind for w, f in zip(words, ext))


@pytest.mark.parametrize("tape, t, nu1, lengths", [
    ("0PP0", 3, 0, (1, 2, 1)),
    ("000", 1, 0, (3,)),
    ("P0P(P)", 3, 1, (1, 1, 4)),
])
def test_decompose_examples(tape, t, nu1, lengths):
    seg = decompose(tape)
    assert (seg.t, seg.nu1, seg.lengths) == (t, nu1, lengths)
    assert seg.text() == tape


def test_decompose_words():
    seg = decompose("P0P(P)")
    assert seg.words == ("P", "P(P)")
    with pytest.raises(EmptyInput):
        decompose("")


def test_decompose_exhaustive_two_symbols():
    for length in range(1, 13):
        for combo in itertools.product("0P", repeat=length):
            tape = "".join(combo)
            seg = decompose(tape)
            assert seg.text() == tape
            assert sum(seg.lengths) == length
            assert 1 <= seg.t <= length
            kinds = [w for w, _ in seg.segments]
            assert all(a != b for a, b in zip(kinds, kinds[1:]))
            assert len(seg.words) == word_count(seg.t, seg.nu1)


def test_decompose_random_full_alphabet():
    r = random.Random(5)
    for _ in range(500):
        tape = "".join(r.choice(alphabet(EXTENDED)) for _ in range(r.randint(1, 12)))
        seg = decompose(tape)
        assert seg.text() == tape
        assert len(seg.words) == word_count(seg.t, seg.nu1)


def test_contained_words_examples():
    assert contained_words("0PP0000", 8) == {"PP"}
    assert contained_words("PP000000", 9) == set()
    assert contained_words("0PP0", 5) == set()
    assert contained_words("0PP0", 6) == {"PP"}


def test_contained_words_match_brute_force():
    r = random.Random(9)
    for _ in range(400):
        tape = "".join(r.choice("0P(") for _ in range(r.randint(1, 11)))
        head = len(tape) + 1
        found = set(frozen_words(tape, head))
        for length in range(1, len(tape) + 1):
            for combo in itertools.product("P(", repeat=length):
                w = "".join(combo)
                assert (w in found) == bool(pattern_at(tape, head, w))


def test_contained_words_monotone():
    r = random.Random(3)
    for _ in range(300):
        tape = "".join(r.choice("0P~") for _ in range(r.randint(1, 10)))
        h = r.randint(2, len(tape) + 1)
        extended = tape[:h - 1] + "".join(r.choice("0P~") for _ in range(r.randint(0, 6)))
        for h2 in range(h, len(extended) + 2):
            assert contained_words(tape, h) <= contained_words(extended, h2)


def test_contained_words_disjoint():
    r = random.Random(4)
    for _ in range(200):
        tape = "".join(r.choice("0P(") for _ in range(12))
        words = frozen_words(tape, 13)
        # Re-joining the words with spacers must be a substring of the frozen region.
        assert all("0" not in w for w in words)
        assert sum(len(w) + 1 for w in words) <= 11
