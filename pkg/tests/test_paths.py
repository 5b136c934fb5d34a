import json

import pytest

from conftest import machine_set
from qsm.builtins import builtin
from qsm.evolution import add_states, evolve, evolve_iter, initial_state, step
from qsm.oracle import SizeLimit, classical_emulate
from qsm.paths import (all_signatures, build_path_tree, composition_evolve, compositions,
                       enumerate_word_paths, observed_signature, split_step, tree_leaves,
                       tree_to_dot, tree_to_json, verify_pathsum, word_events)


def _diff(a, b):
    keys = set(a.terms) | set(b.terms)
    return max((abs(a.terms.get(k, 0) - b.terms.get(k, 0)) for k in keys), default=0.0)


def test_compositions_count():
    for n in range(1, 9):
        comps = list(compositions(n))
        assert len(comps) == 2 ** (n - 1)
        assert all(sum(c) == n for c in comps)
    assert list(compositions(0)) == [()]
    assert len(list(all_signatures(4))) == 16


def test_split_initial_state(any_builtin):
    s = initial_state(any_builtin)
    assert split_step(s, any_builtin, "zero").terms == step(s, any_builtin).terms
    assert len(split_step(s, any_builtin, "nonzero")) == 0
    with pytest.raises(ValueError):
        split_step(s, any_builtin, "maybe")


def test_split_completeness(any_builtin):
    for s in evolve_iter(any_builtin, 10):
        total = add_states([split_step(s, any_builtin, 0, eps=0.0),
                            split_step(s, any_builtin, 1, eps=0.0)])
        assert _diff(total, step(s, any_builtin, eps=0.0)) <= 1e-14


def test_one_step_split():
    t = builtin("branching-printer")
    total = add_states([composition_evolve(t, 0, [1]).state, composition_evolve(t, 1, [1]).state])
    assert _diff(total, evolve(t, 1)) <= 1e-15


def test_branching_pathsum_n4():
    t = builtin("branching-printer")
    traces = [composition_evolve(t, nu1, h).state for nu1, h in all_signatures(4)]
    assert _diff(add_states(traces), evolve(t, 4)) <= 1e-10


def test_classical_single_composition():
    t = builtin("classical-enumerator")
    n = 9
    tape = classical_emulate(t, n)
    realized = observed_signature(tape)
    for nu1, lengths in all_signatures(n):
        trace = composition_evolve(t, nu1, lengths)
        if (nu1, lengths) == realized:
            assert trace.state.norm2() == pytest.approx(1.0, abs=1e-12)
            assert trace.nu1 == nu1 and trace.lengths == lengths
        else:
            assert len(trace.state) == 0


def test_composition_validation():
    t = builtin("classical-enumerator")
    with pytest.raises(ValueError):
        composition_evolve(t, 0, [0])
    with pytest.raises(ValueError):
        composition_evolve(t, 2, [1])


@pytest.mark.parametrize("table", machine_set(), ids=lambda t: t.name)
def test_verify_pathsum(table):
    for n in range(0, 7):
        check = verify_pathsum(table, n)
        assert check.residual <= 1e-10
        assert check.signature_mismatches == 0


def test_verify_pathsum_limit():
    with pytest.raises(SizeLimit):
        verify_pathsum(builtin("branching-printer"), 9)


def test_word_paths_classical():
    paths = enumerate_word_paths(builtin("classical-enumerator"), 9)
    assert len(paths) == 1
    assert paths[0].words == ("P(PP)", "PP")
    assert paths[0].probability == pytest.approx(1.0)


def test_word_paths_branching():
    t = builtin("branching-printer")
    for n in range(9, 25):
        paths = enumerate_word_paths(t, n)
        assert len(paths) == 2
        assert [p.probability for p in paths] == pytest.approx([0.5, 0.5], abs=1e-12)
        assert all(p.word_count_ok for p in paths)


def test_word_paths_n0(any_builtin):
    paths = enumerate_word_paths(any_builtin, 0)
    assert len(paths) == 1
    c = paths[0].composition
    assert (c.t, c.nu1, c.lengths) == (1, 0, (1,))


def test_word_paths_norm(any_builtin):
    for n in range(0, 15):
        total = sum(p.probability for p in enumerate_word_paths(any_builtin, n))
        assert total == pytest.approx(1.0, abs=1e-10)


def test_word_events():
    assert word_events("0P(PP)0PP0P") == [("P(PP)", 2, 6, 7), ("PP", 8, 9, 10)]
    assert word_events("0PP0") == []


def test_tree_branching():
    t = builtin("branching-printer")
    tree = build_path_tree(evolve(t, 12))
    assert len(tree_leaves(tree)) == 2
    assert tree.probability == pytest.approx(1.0)
    tree20 = build_path_tree(evolve(t, 20))
    leaves = tree_leaves(tree20)
    assert len(leaves) == 2
    assert sorted(l.probability for l in leaves) == pytest.approx([0.5, 0.5])
    first = sorted(c.word for c in tree20.children.values())
    assert first == ["P(PP)", "~P(PP)"]


def test_tree_n0():
    tree = build_path_tree(evolve(builtin("branching-printer"), 0))
    assert tree_leaves(tree) == [tree]
    assert tree_to_dot(tree).count("->") == 0


def test_dot_and_json_parse():
    pydot = pytest.importorskip("pydot")
    tree = build_path_tree(evolve(builtin("branching-printer"), 20))
    graph, = pydot.graph_from_dot_data(tree_to_dot(tree))
    nodes = {n.get_name() for n in graph.get_nodes()} - {"node"}
    edges = [(e.get_source(), e.get_destination()) for e in graph.get_edges()]
    assert len(edges) == len(nodes) - 1
    children = [dst for _, dst in edges]
    assert len(set(children)) == len(children)
    assert set(nodes) - set(children) == {"n0"}
    doc = json.loads(json.dumps(tree_to_json(tree)))
    assert doc["probability"] == pytest.approx(1.0)
