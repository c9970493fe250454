import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_acyclic_graph, random_essential_graph
from lpa import symbolic as sy
from lpa.graph import make_graph
from lpa.zoo import by_name, rose, toeplitz


def random_path(rng, g, max_len):
    v = rng.choice(g.vertices)
    es = []
    for _ in range(rng.randint(0, max_len)):
        outs = g.out_edges[v]
        if not outs:
            break
        e = rng.choice(outs)
        es.append(e.id)
        v = e.dst
    return es, v


def random_word(rng, g, length):
    letters = [("v", v) for v in g.vertices]
    letters += [("e", e.id) for e in g.edges] + [("g", e.id) for e in g.edges]
    return [rng.choice(letters) for _ in range(length)]


def random_element(rng, alg, terms=3, max_len=2):
    x = alg.zero()
    for _ in range(rng.randint(1, terms)):
        a, r = random_path(rng, alg.graph, max_len)
        b, r2 = random_path(rng, alg.graph, max_len)
        if r == r2:
            x = x + alg.monomial(a, b, r) * rng.randint(-2, 2)
    return x


def count_paths_into(g, w):
    n = 0
    stack = list(g.vertices)
    while stack:
        v = stack.pop()
        if v == w:
            n += 1
        stack.extend(e.dst for e in g.out_edges[v])
    return n


# -- relations ------------------------------------------------------------------

@pytest.mark.parametrize("name", ["R2", "R3", "T", "E2", "EX3", "A3"])
def test_cuntz_krieger_relations(name):
    alg = sy.Lpa(by_name(name))
    g = alg.graph
    for e in g.edges:
        for f in g.edges:
            got = alg.ghost(e.id) * alg.edge(f.id)
            assert got == (alg.vertex(e.dst) if e.id == f.id else alg.zero())
    for v in g.vertices:
        if g.out_edges[v]:
            total = alg.zero()
            for e in g.out_edges[v]:
                total = total + alg.edge(e.id) * alg.ghost(e.id)
            assert total == alg.vertex(v)
    assert alg.one() * alg.one() == alg.one()


def test_small_identities():
    alg = sy.Lpa(rose(2))
    p = alg.vertex("v") - alg.parse("e1.e1*")
    assert p * p == alg.parse("e2.e2*")
    assert str(alg.parse("e1.e1* + e2.e2*")) == "v"
    t = sy.Lpa(toeplitz())
    assert (t.ghost("e") * t.edge("f")).is_zero
    assert str(t.parse("3*e.f - 1/2*w")) == "-1/2*w + 3*e.f"


def test_char2():
    alg = sy.Lpa(rose(2), 2)
    assert (alg.vertex("v") * 2).is_zero
    assert alg.parse("e1.e1*") == alg.vertex("v") + alg.parse("e2.e2*")


def test_paths_ghost_times_path_is_range():
    # 100 random paths in each of 5 random graphs
    rng = random.Random(11)
    for _ in range(5):
        g = random_essential_graph(rng, rng.randint(1, 4), max_mult=2)
        alg = sy.Lpa(g)
        for _ in range(100):
            es, r = random_path(rng, g, 5)
            a = alg.path(es, r)
            assert a.star() * a == alg.vertex(r)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_ring_axioms(seed):
    rng = random.Random(seed)
    g = random_essential_graph(rng, rng.randint(1, 3))
    alg = sy.Lpa(g)
    x, y, z = (random_element(rng, alg) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x * y).star() == y.star() * x.star()
    assert alg.one() * x == x == x * alg.one()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_rewriter_confluence(seed):
    rng = random.Random(seed)
    g = random_essential_graph(rng, rng.randint(1, 3))
    alg = sy.Lpa(g)
    raw = [(alg.field(rng.randint(-3, 3)), random_word(rng, g, rng.randint(0, 5)))
           for _ in range(rng.randint(1, 3))]
    direct = alg.element_from_words(raw)
    assert alg.normal_form(raw) == direct
    for k in range(3):
        assert alg.normal_form(raw, random.Random(seed * 7 + k)) == direct


def test_normal_forms_are_normal():
    rng = random.Random(5)
    for _ in range(20):
        g = random_essential_graph(rng, rng.randint(1, 3))
        alg = sy.Lpa(g)
        x = random_element(rng, alg, terms=4, max_len=3)
        assert all(alg.is_normal(m) for m in (x * x.star()).terms)


def test_normal_basis_counts_named():
    assert len(sy.normal_basis(sy.Lpa(by_name("A3")), 3)) == 9
    assert len(sy.normal_basis(sy.Lpa(by_name("D3")), 3)) == 9


def test_normal_basis_dimension_acyclic():
    rng = random.Random(3)
    for _ in range(25):
        g = random_acyclic_graph(rng, rng.randint(1, 5))
        sinks = [w for w in g.vertices if not g.out_edges[w]]
        expected = sum(count_paths_into(g, w) ** 2 for w in sinks)
        assert len(sy.normal_basis(sy.Lpa(g), len(g.vertices))) == expected


# -- matrices and fixtures --------------------------------------------------------

@pytest.mark.parametrize("name", sy.FIXTURES)
@pytest.mark.parametrize("p", [0, 2])
def test_fixture_sets(name, p):
    fx = sy.load_fixture(sy.fixture_text(name), p)
    rep = sy.verify_dagger(fx.xs, fx.ys)
    assert rep.ok and rep.checks == 26
    assert str(rep) == "all 26 relation checks pass"
    for x, y in zip(fx.X, fx.Y):
        assert x.star() == y


def test_fixture_literal_roles_fail():
    fx = sy.load_fixture(sy.fixture_text("set1_d3_n5"))
    assert not sy.verify_dagger(fx.X, fx.Y).ok


def test_fixture_sets_differ_in_fifth_matrix():
    a = sy.load_fixture(sy.fixture_text("set1_d3_n5"))
    b = sy.load_fixture(sy.fixture_text("set2_d3_n5"))
    same = [x == y for x, y in zip(a.X, b.X)]
    assert same == [True, True, True, True, False]


def test_dagger_for_rose_columns():
    # x_i = e_i placed in a 1x1 matrix is (dagger) for L(1, n) itself
    alg = sy.Lpa(rose(3))
    xs = [sy.LpaMatrix(alg, [[alg.edge(f"e{i}")]]) for i in (1, 2, 3)]
    ys = [m.star() for m in xs]
    assert sy.verify_dagger(xs, ys).ok


def test_parse_errors():
    alg = sy.Lpa(rose(2))
    with pytest.raises(sy.SymbolicError):
        alg.parse("e1.q")
    with pytest.raises(sy.SymbolicError):
        alg.parse("v*")
    with pytest.raises(sy.SymbolicError):
        sy.parse_matrix(alg, "[e1, e2]")
    with pytest.raises(sy.SymbolicError):
        sy.Lpa(by_name("OMEGA"))
    with pytest.raises(sy.SymbolicError):
        alg.path(["e1"]) * sy.Lpa(make_graph(["v"], [("e1", "v", "v")])).vertex("v")
