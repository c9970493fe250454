import itertools
import random

from hypothesis import strategies as st

from lpa.graph import from_adjacency


def adjacency_graph(matrix):
    return from_adjacency(matrix)


def random_matrix(rng: random.Random, n: int, max_mult: int = 2, density: float = 0.5):
    return [[rng.randint(1, max_mult) if rng.random() < density else 0 for _ in range(n)]
            for _ in range(n)]


def random_graph(rng: random.Random, n: int, max_mult: int = 2, density: float = 0.5):
    return from_adjacency(random_matrix(rng, n, max_mult, density))


def random_essential_graph(rng: random.Random, n: int, max_mult: int = 2, density: float = 0.4):
    """Every vertex emits and receives at least one edge."""
    while True:
        m = random_matrix(rng, n, max_mult, density)
        if all(any(row) for row in m) and all(any(m[i][j] for i in range(n)) for j in range(n)):
            return from_adjacency(m)


def random_acyclic_graph(rng: random.Random, n: int, max_mult: int = 2, density: float = 0.5):
    m = [[rng.randint(1, max_mult) if i < j and rng.random() < density else 0 for j in range(n)]
         for i in range(n)]
    return from_adjacency(m)


@st.composite
def adjacency(draw, max_n: int = 4, max_mult: int = 2):
    n = draw(st.integers(1, max_n))
    return [[draw(st.integers(0, max_mult)) for _ in range(n)] for _ in range(n)]


@st.composite
def graphs(draw, max_n: int = 4, max_mult: int = 2):
    return from_adjacency(draw(adjacency(max_n, max_mult)))


def small_matrices_up_to_iso(n: int, max_mult: int):
    """All n x n matrices with entries 0..max_mult, one per vertex relabelling class."""
    seen = set()
    perms = list(itertools.permutations(range(n)))
    for flat in itertools.product(range(max_mult + 1), repeat=n * n):
        m = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
        key = min(tuple(tuple(m[p[i]][p[j]] for j in range(n)) for i in range(n)) for p in perms)
        if key in seen:
            continue
        seen.add(key)
        yield [list(r) for r in key]


def pytest_terminal_summary(terminalreporter):
    acc = __import__("sys").modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[i])
