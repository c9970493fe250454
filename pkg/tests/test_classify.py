import itertools

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import adjacency_graph, graphs
from lpa import classify as cl
from lpa import graph as gc
from lpa.graph import make_graph
from lpa.zoo import by_name, line, rose, toeplitz


def count_paths(g, v, w):
    """Brute-force enumeration of edge paths v -> w in an acyclic graph."""
    if v == w:
        return 1
    return sum(count_paths(g, e.dst, w) for e in g.edges if e.src == v)


def hs_oracle(g):
    out = set()
    for k in range(len(g.vertices) + 1):
        for s in map(set, itertools.combinations(g.vertices, k)):
            hered = all(e.dst in s for e in g.edges if e.src in s)
            sat = all(v in s or not g.out_edges[v] or any(e.dst not in s for e in g.out_edges[v])
                      for v in g.vertices)
            if hered and sat:
                out.add(frozenset(s))
    return out


def matrix_over_rose(n, m):
    """A line of n - 1 vertices feeding a vertex with m loops: M_n(L(1, m))."""
    us = [f"u{i}" for i in range(1, n)]
    vs = us + ["v"]
    edges = [(f"f{i}", vs[i - 1], vs[i]) for i in range(1, n)]
    edges += [(f"e{i}", "v", "v") for i in range(1, m + 1)]
    return make_graph(vs, edges)


@pytest.mark.parametrize("family", ["A", "B", "D"])
@pytest.mark.parametrize("n", range(2, 7))
def test_acyclic_families(family, n):
    g = by_name(f"{family}{n}")
    sinks = [w for w in g.vertices if not g.out_edges[w]]
    expected = [sum(count_paths(g, v, w) for v in g.vertices) for w in sinks]
    assert cl.acyclic_structure(g) == expected == [n]
    assert cl.dichotomy(g) == cl.Dichotomy("MatrixAlgebra", n)


def test_acyclic_two_sinks():
    g = make_graph(["a", "b", "c"], [("e", "a", "b"), ("f", "a", "c"), ("g", "a", "c")])
    assert cl.acyclic_structure(g) == [2, 3]
    assert cl.dichotomy(g).kind == "NotSimple"


def test_acyclic_structure_rejects_cycles():
    with pytest.raises(cl.ClassifyError):
        cl.acyclic_structure(rose(2))


def test_toeplitz():
    g = toeplitz()
    assert not cl.is_simple(g)
    assert len(cl.graded_ideals(g)) == 3
    fams = {f.H: f.cycles for f in cl.ideal_families(g)}
    assert [c.edges for c in fams[frozenset({"w"})]] == [("e",)]
    assert fams[frozenset()] == () and fams[frozenset({"v", "w"})] == ()
    b = cl.predicate_battery(g)
    assert b.prime and b.primitive and not b.exchange and not b.simple and not b.pis
    assert str(cl.gk_dimension(g)) == "Polynomial(2)"
    assert cl.chain_conditions(g) == cl.ChainConditions(dcc=False, acc=True)


@pytest.mark.parametrize("g,expected", [
    (rose(1), "Polynomial(1)"),
    (line(4), "Polynomial(0)"),
    (rose(2), "Exponential"),
    # loop -> loop: d1 = 2, d2 = 1
    (make_graph(["v", "w"], [("e", "v", "v"), ("f", "w", "w"), ("g", "v", "w")]), "Polynomial(3)"),
    # loop -> loop -> sink: d1 = 2, d2 = 2
    (make_graph(["v", "w", "z"], [("e", "v", "v"), ("f", "w", "w"), ("g", "v", "w"),
                                  ("h", "w", "z")]), "Polynomial(4)"),
    (make_graph(["v", "w", "x"], [("e", "v", "v"), ("f", "w", "w"), ("g", "x", "x"),
                                  ("a", "v", "w"), ("b", "w", "x")]), "Polynomial(5)"),
    (make_graph(["v", "w"], [("e", "v", "w"), ("f", "w", "v")]), "Polynomial(1)"),
])
def test_gk_dimension(g, expected):
    assert str(cl.gk_dimension(g)) == expected


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=3, max_mult=2))
def test_gk_exponential_iff_cycles_meet(g):
    h = nx.MultiDiGraph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from((e.src, e.dst) for e in g.edges)
    vcycles = list(nx.simple_cycles(nx.DiGraph(h)))
    edge_cycles = []
    for vc in vcycles:
        mult = 1
        for a, b in zip(vc, vc[1:] + vc[:1]):
            mult *= h.number_of_edges(a, b)
        edge_cycles += [set(vc)] * mult
    meet = any(a & b for a, b in itertools.combinations(edge_cycles, 2))
    assert cl.gk_dimension(g).exponential == meet


@settings(max_examples=200, deadline=None)
@given(graphs(max_n=3, max_mult=2))
def test_simple_matches_oracle(g):
    cofinal = hs_oracle(g) == {frozenset(), frozenset(g.vertices)}
    assert cl.is_simple(g) == (gc.condition_L(g) and cofinal)
    assert len(cl.graded_ideals(g)) == len(hs_oracle(g))  # row-finite: no breaking vertices


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=3, max_mult=2))
def test_cycles_for_oracle(g):
    for fam in cl.ideal_families(g):
        for c in gc.cycles(g):
            on = set(c.edges)
            expected = (not set(c.vertices) & fam.H and all(
                e.dst in fam.H for e in g.edges if e.src in c.vertices and e.id not in on))
            assert (c in fam.cycles) == expected


def test_omega_graded_ideals():
    g = by_name("OMEGA")
    pairs = cl.graded_ideals(g)
    assert len(pairs) == len(gc.enumerate_hereditary_saturated(g)) + 1
    assert cl.GradedIdealPair(frozenset({"w1"}), frozenset({"v"})) in pairs
    assert not cl.is_simple(g)
    with pytest.raises(cl.ClassifyError):
        cl.gk_dimension(g)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("p", [0, 2, 3, 5])
def test_lie_bracket_matrix_algebras(n, p):
    # [M_n(K), M_n(K)] = sl_n(K) is simple exactly when char K does not divide n
    expected = cl.LieVerdict.NOT_SIMPLE if p and n % p == 0 else cl.LieVerdict.SIMPLE
    assert cl.lie_bracket_simple(line(n), p) is expected


def test_lie_bracket_inapplicable():
    assert cl.lie_bracket_simple(rose(3)) is cl.LieVerdict.INAPPLICABLE
    assert cl.lie_bracket_simple(toeplitz()) is cl.LieVerdict.INAPPLICABLE


def test_center():
    assert cl.center_description(rose(3)) is cl.Center.SCALARS
    assert cl.center_description(toeplitz()) is cl.Center.UNKNOWN


def test_compare_verdicts():
    assert cl.compare(by_name("EX3"), rose(4)).verdict is cl.Verdict.ISOMORPHIC
    v = cl.compare(by_name("E2"), by_name("E4"))
    assert v.verdict is cl.Verdict.OPEN_KP and (v.det_e, v.det_f) == (-1, 1)
    assert cl.compare(rose(2), rose(4)).verdict is cl.Verdict.NOT_MORITA
    assert cl.compare(toeplitz(), rose(2)).verdict is cl.Verdict.INAPPLICABLE
    assert cl.compare(by_name("OMEGA"), rose(2)).verdict is cl.Verdict.INAPPLICABLE
    # M_2(L(1,4)) = L(1,4) since gcd(2, 3) = 1; M_3(L(1,4)) is only Morita equivalent
    assert cl.compare(matrix_over_rose(2, 4), rose(4)).verdict is cl.Verdict.ISOMORPHIC
    m = cl.compare(matrix_over_rose(3, 4), rose(4))
    assert m.verdict is cl.Verdict.MORITA and m.pointed_iso is not None


def test_cuntz_splice_flips_det():
    g = by_name("R2-splice@v")
    v = cl.compare(rose(2), g)
    assert v.verdict is cl.Verdict.OPEN_KP and v.det_e == -v.det_f


def test_singular_count():
    assert cl.singular_count(toeplitz()) == 1
    assert cl.singular_count(by_name("OMEGA")) == 3
    assert cl.singular_count(adjacency_graph([[0, 1], [1, 0]])) == 0
