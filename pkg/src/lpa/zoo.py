"""Named graphs that recur throughout the theory, and a lookup by name."""
from __future__ import annotations

import re

from .graph import Graph, GraphError, cuntz_splice, make_graph


def rose(n: int) -> Graph:
    """R_n: one vertex with n loops."""
    return make_graph(["v"], [(f"e{i}", "v", "v") for i in range(1, n + 1)])


def line(n: int) -> Graph:
    """A_n: v1 -> v2 -> ... -> vn."""
    vs = [f"v{i}" for i in range(1, n + 1)]
    return make_graph(vs, [(f"e{i}", vs[i - 1], vs[i]) for i in range(1, n)])


def star_in(n: int) -> Graph:
    """B_n: w1, ..., w_{n-1} each with one edge into the sink v."""
    ws = [f"w{i}" for i in range(1, n)]
    return make_graph(ws + ["v"], [(f"e{i}", w, "v") for i, w in enumerate(ws, 1)])


def parallel(n: int) -> Graph:
    """D_n: n - 1 parallel edges v -> w."""
    return make_graph(["v", "w"], [(f"e{i}", "v", "w") for i in range(1, n)])


def toeplitz() -> Graph:
    return make_graph(["v", "w"], [("e", "v", "v"), ("f", "v", "w")])


def e2() -> Graph:
    return make_graph(
        ["u", "v"],
        [("a", "u", "u"), ("b", "u", "v"), ("c", "v", "v"), ("d", "v", "u")],
    )


def e4() -> Graph:
    """The Cuntz splice of E_2 at v, with the new vertices renamed x, y."""
    return make_graph(
        ["u", "v", "x", "y"],
        [
            ("a", "u", "u"), ("b", "u", "v"), ("c", "v", "v"), ("d", "v", "u"),
            ("g1", "v", "x"), ("g2", "x", "v"), ("g3", "x", "x"),
            ("g4", "x", "y"), ("g5", "y", "x"), ("g6", "y", "y"),
        ],
    )


def three_vertex_example() -> Graph:
    """Three-vertex graph whose algebra shares K_0 data and det with L(1,4)."""
    return make_graph(
        ["a", "b", "c"],
        [
            ("ab", "a", "b"), ("ac", "a", "c"), ("bc", "b", "c"),
            ("cc", "c", "c"), ("ca", "c", "a"), ("cb", "c", "b"),
        ],
    )


def omega_example() -> Graph:
    """v emits infinitely many edges to w1 and two edges to w2."""
    return make_graph(
        ["v", "w1", "w2"], [("f1", "v", "w2"), ("f2", "v", "w2")], [("v", "w1")]
    )


_FAMILIES = {"R": rose, "A": line, "B": star_in, "D": parallel}
_NAMED = {
    "T": toeplitz, "TOEPLITZ": toeplitz, "E2": e2, "E4": e4,
    "EX3": three_vertex_example, "OMEGA": omega_example,
}


def by_name(name: str) -> Graph:
    """``R4``, ``A3``, ``B5``, ``D2``, ``E2``, ``E4``, ``T``, ``EX3``, ``OMEGA``,
    optionally suffixed ``-splice@<vertex>``."""
    base, _, splice_at = name.partition("-splice@")
    key = base.upper()
    if key in _NAMED:
        g = _NAMED[key]()
    else:
        m = re.fullmatch(r"([RABD])(\d+)", key)
        if not m:
            raise GraphError(f"unknown built-in graph {name!r}")
        g = _FAMILIES[m.group(1)](int(m.group(2)))
    return cuntz_splice(g, splice_at) if splice_at else g
