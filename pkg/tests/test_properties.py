"""Hypothesis property tests over randomly generated decorated trees."""

from __future__ import annotations

from hypothesis import given, settings, strategies as st

from rtails.trees import build_tree, enumerate_decorations, enumerate_trees0, enumerate_rt_graphs
from rtails.weights import coeff_c, coeff_c_im
from rtails.strata0 import push_tree, integrate, pair, strata_family


@st.composite
def rooted_tree_with_decoration(draw, n_max=4, cap=2):
    n = draw(st.integers(2, n_max))
    pool = enumerate_trees0(n)
    tree = pool[draw(st.integers(0, len(pool) - 1))]
    decs = enumerate_decorations(tree, cap, leg_bounds={1: 2})
    dec = decs[draw(st.integers(0, len(decs) - 1))]
    return tree, dec


@st.composite
def rt_graph_with_decoration(draw, n_max=4, cap=2):
    n = draw(st.integers(1, n_max))
    pool = enumerate_rt_graphs(n)
    graph = pool[draw(st.integers(0, len(pool) - 1))]
    decs = enumerate_decorations(graph, cap)
    dec = decs[draw(st.integers(0, len(decs) - 1))]
    return graph, dec


@settings(max_examples=60, deadline=None)
@given(rooted_tree_with_decoration(), st.integers(1, 4), st.integers(1, 2))
def test_dp_matches_brute_rooted(td, i, m):
    tree, dec = td
    assert coeff_c_im(tree, dec, i, m) == coeff_c_im(tree, dec, i, m, method="brute")


@settings(max_examples=40, deadline=None)
@given(rt_graph_with_decoration())
def test_dp_matches_brute_rt(gd):
    graph, dec = gd
    assert coeff_c(graph, dec) == coeff_c(graph, dec, method="brute")


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 6), st.data())
def test_pair_symmetric_on_complementary_strata(n, data):
    amb = frozenset(range(1, n + 1))
    dim = n - 3
    c = data.draw(st.integers(0, dim))
    fam1 = strata_family(amb, c)
    fam2 = strata_family(amb, dim - c)
    S = fam1[data.draw(st.integers(0, len(fam1) - 1))]
    T = fam2[data.draw(st.integers(0, len(fam2) - 1))]
    assert pair(push_tree(S), T) == pair(push_tree(T), S)


@settings(max_examples=30, deadline=None)
@given(rooted_tree_with_decoration(n_max=3, cap=1))
def test_integrate_invariant_under_canonical_rebuild(td):
    tree, dec = td
    rebuilt, dec2 = build_tree([list(ls) for ls in tree.legs], list(tree.edges), half_exp=dec.half_dict(), leg_exp=dec.leg_dict())
    assert (rebuilt, dec2) == (tree, dec)
    assert integrate(push_tree(tree, dec)) == integrate(push_tree(rebuilt, dec2))
