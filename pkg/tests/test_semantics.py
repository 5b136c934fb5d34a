import json

import pytest

from conftest import BUILTIN_NAMES, mini_branching, random_deterministic
from qsm.builtins import builtin
from qsm.evolution import evolve
from qsm.machine import EXTENDED, periodic_printer
from qsm.oracle import dense_oracle_evolve, dense_printability, dense_truth_elements
from qsm.semantics import (EPS_P, GLOBAL, PATH_LOCAL, NotASentence, NotExtendedMode, SemanticsError,
                           TruthStatus, incompleteness_check, machine_report, printability,
                           truth_matrix_elements, truth_status)
from qsm.symbols import classify, enumerate_sentences, words_up_to

HS, OPEN, VIOL, NODOM = (TruthStatus.HOLDS_SO_FAR, TruthStatus.OPEN, TruthStatus.VIOLATED,
                         TruthStatus.NO_DOMAIN_YET)


def test_printability_examples():
    assert printability(builtin("classical-enumerator"), "PP", 12) == pytest.approx(1.0)
    assert printability(builtin("branching-printer"), "PP", 40) == pytest.approx(0.5, abs=1e-12)
    for name in BUILTIN_NAMES:
        assert printability(builtin(name), "PP", 0) == 0


def test_printability_matches_dense():
    t = builtin("branching-printer")
    for n in range(5):
        for w in ("PP", "P", "P(PP)"):
            assert printability(t, w, n) == pytest.approx(dense_printability(t, w, n), abs=1e-12)
    m = mini_branching()
    assert printability(m, "P(P)", 7) == pytest.approx(dense_printability(m, "P(P)", 7), abs=1e-12)
    assert printability(m, "P(P)", 7) == pytest.approx(0.5, abs=1e-12)


def test_truth_status_examples():
    assert truth_status(builtin("invalid-printer"), "~P(PP)", 11) is VIOL
    assert truth_status(builtin("invalid-printer"), "~P(PP)", 10) is HS
    assert truth_status(builtin("branching-printer"), "P(PP)", 20) is HS
    assert truth_status(builtin("branching-printer"), "~P(PP)", 20) is HS
    for name in BUILTIN_NAMES:
        t = builtin(name)
        assert truth_status(t, "P(PP)", 0) is NODOM
        assert truth_status(t, "~P(P)", 0, GLOBAL) is NODOM


def test_not_a_sentence():
    with pytest.raises(NotASentence):
        truth_status(builtin("classical-enumerator"), "PP", 5)
    with pytest.raises(NotASentence):
        truth_status(builtin("classical-enumerator"), "P(P(PP))", 5)


def test_positive_open_then_holds():
    m = mini_branching()
    # P(P) freezes at n = 7 on branch A; the 0P0 after it only at n = 9.
    assert truth_status(m, "P(P)", 6) is NODOM
    assert truth_status(m, "P(P)", 7) is OPEN
    assert truth_status(m, "P(P)", 8) is OPEN
    assert truth_status(m, "P(P)", 9) is HS
    assert truth_status(m, "~P(P)", 8) is HS


def test_global_semantics_differs_on_branching():
    t = builtin("branching-printer")
    assert truth_status(t, "~P(PP)", 20, PATH_LOCAL) is HS
    assert truth_status(t, "~P(PP)", 20, GLOBAL) is VIOL
    report = machine_report(t, 20, 6, GLOBAL)
    assert report.cannot_be_valid
    assert report.consistent_so_far


def test_bad_semantics():
    with pytest.raises(SemanticsError):
        truth_status(builtin("branching-printer"), "P(PP)", 3, "modal")
    with pytest.raises(SemanticsError):
        machine_report(builtin("branching-printer"), 3, 4)


def test_reports():
    ce = machine_report(builtin("classical-enumerator"), 20, 6)
    assert ce.valid_so_far and ce.consistent_so_far
    assert ce.completeness_coverage > 0
    assert "P(PP)" in ce.printable_sentences

    inv = machine_report(builtin("invalid-printer"), 20, 6)
    assert inv.cannot_be_valid and not inv.valid_so_far
    viol = inv.verdict("~P(PP)")
    assert viol.status is VIOL and viol.witnesses

    br = machine_report(builtin("branching-printer"), 20, 6)
    assert br.consistent_so_far and br.valid_so_far
    assert br.verdict("P(PP)").probability == pytest.approx(0.5, abs=1e-12)
    assert br.verdict("~P(PP)").probability == pytest.approx(0.5, abs=1e-12)
    assert "consistent; P(PP) and ~P(PP) both printable on disjoint paths" in br.summary()


def test_report_json_roundtrip():
    r = machine_report(builtin("invalid-printer"), 20, 6)
    doc = json.loads(r.to_json())
    assert doc["flags"]["cannot_be_valid"] is True
    statuses = {e["sentence"]: e["status"] for e in doc["sentences"]}
    assert statuses["~P(PP)"] == "violated"
    assert r.to_json() == machine_report(builtin("invalid-printer"), 20, 6).to_json()


def test_inconsistent_machine_flagged():
    t = periodic_printer("0P(P)0~P(P)", name="contradiction")
    r = machine_report(t, 20, 6)
    assert not r.consistent_so_far
    assert r.cannot_be_valid and not r.valid_so_far
    w = r.inconsistency_witnesses[0]
    assert (w["positive"], w["negative"]) == ("P(P)", "~P(P)")


def test_violated_is_monotone(any_builtin):
    seen = set()
    for n in range(0, 21):
        r = machine_report(any_builtin, n, 6)
        now = {v.sentence for v in r.violated()}
        assert seen <= now
        seen = now


def test_printability_nondecreasing(any_builtin):
    words = [w for w in words_up_to(4, any_builtin.mode) if "N" not in w or any_builtin.mode == EXTENDED]
    prev = {w: 0.0 for w in words}
    for n in range(0, 16):
        state = evolve(any_builtin, n)
        for w in words:
            p = printability(any_builtin, w, n, state=state)
            assert p >= prev[w] - 1e-12
            prev[w] = p


@pytest.mark.parametrize("seed", range(8))
def test_path_local_equals_global_on_deterministic(seed):
    tables = [builtin("classical-enumerator"), builtin("invalid-printer"),
              periodic_printer("0P(P)0~P(P)"), random_deterministic(seed)]
    for t in tables:
        for n in (0, 8, 15):
            a = machine_report(t, n, 6, PATH_LOCAL)
            b = machine_report(t, n, 6, GLOBAL)
            assert [v.status for v in a.verdicts] == [v.status for v in b.verdicts]


def _status_from_elements(lhs, rhs, negative):
    if rhs <= EPS_P:
        return NODOM
    if lhs >= rhs - 1e-12:
        return HS
    return VIOL if negative else OPEN


@pytest.mark.parametrize("n", [7, pytest.param(8, marks=pytest.mark.slow)])
def test_truth_elements_match_dense_on_mini(n):
    m = mini_branching()
    psi = dense_oracle_evolve(m, n)
    for word in ("P(P)", "~P(P)", "~P(PP)", "P(~)"):
        form = classify(word)
        for mm in range(0, 4):
            dense = dense_truth_elements(m, word, str(form.target), form.kind.negative, n, mm, psi=psi)
            sparse = truth_matrix_elements(m, word, n, mm)
            assert sparse == pytest.approx(dense, abs=1e-12)
        lhs0, rhs0 = dense_truth_elements(m, word, str(form.target), form.kind.negative, n, 0, psi=psi)
        assert truth_status(m, word, n) is _status_from_elements(lhs0, rhs0, form.kind.negative)


def test_positive_elements_rise_when_target_freezes():
    m = mini_branching()
    values = [truth_matrix_elements(m, "P(P)", 7, mm) for mm in range(4)]
    assert [round(l, 12) for l, _ in values] == [0.0, 0.0, 0.5, 0.5]
    assert all(r == pytest.approx(0.5) for _, r in values)


def test_incompleteness():
    inc = incompleteness_check(builtin("incomplete-liar"), 10)
    assert inc.liar_probability == pytest.approx(1.0)
    assert inc.liar_status is VIOL and inc.cannot_be_valid
    assert incompleteness_check(builtin("incomplete-liar"), 9).liar_status is NODOM
    lifted = builtin("classical-enumerator").with_mode(EXTENDED)
    for n in (0, 5, 20):
        r = incompleteness_check(lifted, n)
        assert r.truthteller_verdict == "unprintable-so-far"
        assert r.liar_probability == 0 and not r.cannot_be_valid
    with pytest.raises(NotExtendedMode):
        incompleteness_check(builtin("classical-enumerator"), 5)


def test_truthteller_verdicts():
    alone = periodic_printer("0PN(~PN)", EXTENDED)
    inc = incompleteness_check(alone, 12)
    assert inc.truthteller_probability == pytest.approx(1.0)
    assert inc.truthteller_verdict == "violated-or-meaningless"
    both = periodic_printer("0PN(~PN)0~PN(~PN)", EXTENDED)
    inc = incompleteness_check(both, 20)
    assert inc.truthteller_verdict == "true-only-alongside-violated-liar"
    assert inc.cannot_be_valid


def test_extended_report_excludes_self_reference_from_max_coverage():
    r = machine_report(builtin("incomplete-liar"), 20, 8)
    assert r.cannot_be_valid
    assert "~PN(~PN)" in r.printable_sentences
    assert r.maximal_completeness_coverage == 0.0
    assert r.verdict("~PN(~PN)").status is VIOL


def test_sentence_enumeration_in_report():
    r = machine_report(builtin("classical-enumerator"), 10, 6)
    expected = {str(f.word) for f in enumerate_sentences(6)}
    assert expected <= {v.sentence for v in r.verdicts}
