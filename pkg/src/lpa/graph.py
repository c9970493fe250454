"""Directed multigraphs with finitely many vertices.

A graph carries named edges (each with a source and a range) plus optional
*omega bundles*: an ordered vertex pair ``(v, w)`` standing for countably
infinitely many anonymous parallel edges ``v -> w``.  Named edges and an omega
bundle may share a pair; the pair then has infinite multiplicity while the
named edges stay addressable for paths and cycles.

Everything here is a pure function of an immutable :class:`Graph`.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs or invalid graph arguments."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class GuardError(GraphError):
    """Raised when an exhaustive enumeration would exceed the vertex guard."""


DEFAULT_VERTEX_GUARD = 20


def vertex_guard() -> int:
    raw = os.environ.get("LPA_GUARD_VERTICES")
    return int(raw) if raw else DEFAULT_VERTEX_GUARD


class Edge(NamedTuple):
    id: str
    src: str
    dst: str


_ID = re.compile(r"^[^\s{}\[\],;|*+]+$")
_COMMENT = re.compile(r"(^|\s)#.*")


def _check_id(name: str) -> bool:
    return bool(_ID.match(name))


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()
    omega: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        object.__setattr__(self, "omega", frozenset(tuple(p) for p in self.omega))
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex id")
        if not self.vertices:
            raise GraphError("a graph needs at least one vertex")
        vs = set(self.vertices)
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise GraphError(f"duplicate edge id {e.id!r}")
            if e.id in vs:
                raise GraphError(f"edge id {e.id!r} clashes with a vertex id")
            seen.add(e.id)
            if e.src not in vs or e.dst not in vs:
                raise GraphError(f"edge {e.id!r} has an undeclared endpoint")
        for v, w in self.omega:
            if v not in vs or w not in vs:
                raise GraphError(f"omega bundle {v}->{w} has an undeclared endpoint")

    # -- lookups -----------------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def in_edges(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.dst].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def omega_out(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {v: set() for v in self.vertices}
        for v, w in self.omega:
            out[v].add(w)
        return {v: frozenset(ws) for v, ws in out.items()}

    @cached_property
    def successors(self) -> dict[str, frozenset[str]]:
        """Vertices reachable in one step, via named edges or omega bundles."""
        return {
            v: frozenset(e.dst for e in self.out_edges[v]) | self.omega_out[v]
            for v in self.vertices
        }

    @cached_property
    def descendants(self) -> dict[str, frozenset[str]]:
        return {v: frozenset(_bfs(self.successors, v)) for v in self.vertices}

    @property
    def is_row_finite(self) -> bool:
        return not self.omega

    def edge(self, eid: str) -> Edge:
        try:
            return self.edge_map[eid]
        except KeyError:
            raise GraphError(f"unknown edge {eid!r}") from None

    def check_vertex(self, *vs: str) -> None:
        for v in vs:
            if v not in self.index:
                raise GraphError(f"unknown vertex {v!r}")

    def multiplicity(self, v: str, w: str) -> int | None:
        """Number of edges v -> w; ``None`` stands for infinitely many."""
        if (v, w) in self.omega:
            return None
        return sum(1 for e in self.out_edges[v] if e.dst == w)

    def fresh_vertex(self, stem: str) -> str:
        taken = set(self.vertices) | set(self.edge_map)
        name = stem
        while name in taken:
            name += "'"
        return name

    def fresh_edge(self, stem: str) -> str:
        return self.fresh_vertex(stem)

    def to_text(self) -> str:
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"edge {e.id} {e.src} {e.dst}" for e in self.edges]
        lines += [f"omega {v} {w}" for v, w in sorted(self.omega, key=self._pair_key)]
        return "\n".join(lines) + "\n"

    def _pair_key(self, pair: tuple[str, str]) -> tuple[int, int]:
        return self.index[pair[0]], self.index[pair[1]]

    def summary(self) -> dict:
        return {
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "omega_bundles": [list(p) for p in sorted(self.omega, key=self._pair_key)],
        }


def _bfs(succ: dict[str, Iterable[str]], start: str) -> list[str]:
    seen = {start}
    order = [start]
    stack = [start]
    while stack:
        u = stack.pop()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                order.append(w)
                stack.append(w)
    return order


def make_graph(vertices: Sequence[str], edges: Iterable[tuple[str, str, str]] = (),
               omega: Iterable[tuple[str, str]] = ()) -> Graph:
    return Graph(tuple(vertices), tuple(Edge(*e) for e in edges), frozenset(omega))


def from_adjacency(matrix: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> Graph:
    """Graph whose edge count i -> j is ``matrix[i][j]``; edges named e1, e2, ..."""
    n = len(matrix)
    names = list(names) if names else [f"v{i + 1}" for i in range(n)]
    edges = []
    k = 0
    for i in range(n):
        for j in range(n):
            for _ in range(matrix[i][j]):
                k += 1
                edges.append((f"e{k}", names[i], names[j]))
    return make_graph(names, edges)


# -- parsing -----------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse the line format ``vertex <id>``, ``edge <id> <src> <dst>``,
    ``omega <src> <dst>``.  A ``#`` at the start of a token opens a comment
    (ids such as ``v#2`` are fine) and ``;`` separates statements on a line."""
    vertices: list[str] = []
    vseen: dict[str, int] = {}
    edges: list[Edge] = []
    eseen: dict[str, int] = {}
    omega: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw)
        for stmt in line.split(";"):
            toks = stmt.split()
            if not toks:
                continue
            kind, args = toks[0], toks[1:]
            if kind == "vertex":
                if len(args) != 1:
                    raise ParseError(lineno, "expected 'vertex <id>'")
                (v,) = args
                if not _check_id(v):
                    raise ParseError(lineno, f"bad vertex id {v!r}")
                if v in vseen:
                    raise ParseError(lineno, f"duplicate vertex {v!r} (first at line {vseen[v]})")
                vseen[v] = lineno
                vertices.append(v)
            elif kind == "edge":
                if len(args) != 3:
                    raise ParseError(lineno, "expected 'edge <id> <src> <dst>'")
                eid, s, r = args
                if not _check_id(eid):
                    raise ParseError(lineno, f"bad edge id {eid!r}")
                if eid in eseen:
                    raise ParseError(lineno, f"duplicate edge {eid!r} (first at line {eseen[eid]})")
                eseen[eid] = lineno
                edges.append(Edge(eid, s, r))
            elif kind == "omega":
                if len(args) != 2:
                    raise ParseError(lineno, "malformed omega declaration, expected 'omega <src> <dst>'")
                pair = (args[0], args[1])
                if pair in omega:
                    raise ParseError(lineno, f"duplicate omega bundle {pair[0]}->{pair[1]}")
                omega[pair] = lineno
            else:
                raise ParseError(lineno, f"unknown statement {kind!r}")
    if not vertices:
        raise ParseError(1, "no vertices declared")
    for e in edges:
        for end in (e.src, e.dst):
            if end not in vseen:
                raise ParseError(eseen[e.id], f"edge {e.id!r} refers to undeclared vertex {end!r}")
        if e.id in vseen:
            raise ParseError(eseen[e.id], f"edge id {e.id!r} clashes with a vertex id")
    for (v, w), lineno in omega.items():
        for end in (v, w):
            if end not in vseen:
                raise ParseError(lineno, f"omega bundle refers to undeclared vertex {end!r}")
    return Graph(tuple(vertices), tuple(edges), frozenset(omega))


# -- vertex classes and reachability -----------------------------------------

class VertexClasses(NamedTuple):
    sinks: frozenset[str]
    sources: frozenset[str]
    regular: frozenset[str]
    infinite_emitters: frozenset[str]

    @property
    def singular(self) -> frozenset[str]:
        return self.sinks | self.infinite_emitters


def vertex_classes(g: Graph) -> VertexClasses:
    sinks, sources, regular, infinite = set(), set(), set(), set()
    has_in = {w for _, w in g.omega} | {e.dst for e in g.edges}
    for v in g.vertices:
        if g.omega_out[v]:
            infinite.add(v)
        elif g.out_edges[v]:
            regular.add(v)
        else:
            sinks.add(v)
        if v not in has_in:
            sources.add(v)
    return VertexClasses(frozenset(sinks), frozenset(sources), frozenset(regular), frozenset(infinite))


def reaches(g: Graph, v: str, w: str) -> bool:
    """``v >= w``: some path (possibly of length 0) runs from v to w."""
    g.check_vertex(v, w)
    return w in g.descendants[v]


def is_hereditary(g: Graph, xs: Iterable[str]) -> bool:
    xs = set(xs)
    return all(g.descendants[v] <= xs for v in xs)


def is_saturated(g: Graph, xs: Iterable[str]) -> bool:
    xs = set(xs)
    regular = vertex_classes(g).regular
    return all(
        v in xs
        for v in regular
        if all(e.dst in xs for e in g.out_edges[v])
    )


def hereditary_saturated_closure(g: Graph, s: Iterable[str]) -> frozenset[str]:
    s = list(s)
    g.check_vertex(*s)
    xs: set[str] = set()
    for v in s:
        xs |= g.descendants[v]
    regular = vertex_classes(g).regular
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v in regular and v not in xs and all(e.dst in xs for e in g.out_edges[v]):
                # descendants of v already lie in xs, so heredity is kept
                xs.add(v)
                changed = True
    return frozenset(xs)


def _set_key(g: Graph, xs: frozenset[str]) -> tuple:
    return (len(xs), sorted(g.index[v] for v in xs))


def enumerate_hereditary_saturated(g: Graph) -> list[frozenset[str]]:
    """All hereditary saturated subsets, sorted by size then vertex order."""
    guard = vertex_guard()
    if len(g.vertices) > guard:
        raise GuardError(f"{len(g.vertices)} vertices exceeds the enumeration guard of {guard}")
    # every such set is reached from the empty set by closing one vertex at a time
    found = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for xs in frontier:
            for v in g.vertices:
                if v not in xs:
                    ys = hereditary_saturated_closure(g, xs | {v})
                    if ys not in found:
                        found.add(ys)
                        nxt.append(ys)
        frontier = nxt
    return sorted(found, key=lambda xs: _set_key(g, xs))


# -- paths and cycles --------------------------------------------------------

@dataclass(frozen=True)
class Path:
    edges: tuple[str, ...]
    base: str  # source vertex; for a length-0 path the vertex itself

    def __len__(self) -> int:
        return len(self.edges)


def make_path(g: Graph, edges: Sequence[str], base: str | None = None) -> Path:
    edges = tuple(edges)
    if not edges:
        if base is None:
            raise GraphError("a length-0 path needs a base vertex")
        g.check_vertex(base)
        return Path((), base)
    es = [g.edge(x) for x in edges]
    for a, b in zip(es, es[1:]):
        if a.dst != b.src:
            raise GraphError(f"edges {a.id} and {b.id} do not compose")
    if base is not None and base != es[0].src:
        raise GraphError("base vertex does not match the first edge")
    return Path(edges, es[0].src)


def path_range(g: Graph, p: Path) -> str:
    return g.edge(p.edges[-1]).dst if p.edges else p.base


@dataclass(frozen=True)
class Cycle:
    """A cycle stored from its lexicographically smallest vertex id."""
    edges: tuple[str, ...]
    vertices: tuple[str, ...]  # source vertices s(e_1), ..., s(e_n)

    def __len__(self) -> int:
        return len(self.edges)


def cycles(g: Graph) -> list[Cycle]:
    """Every cycle built from named edges, each listed once in canonical rotation."""
    out: list[Cycle] = []
    for start in sorted(g.vertices):
        path_e: list[str] = []
        path_v: list[str] = [start]
        on_path = {start}

        def extend(u: str):
            for e in g.out_edges[u]:
                if e.dst == start:
                    out.append(Cycle(tuple(path_e + [e.id]), tuple(path_v)))
                elif e.dst > start and e.dst not in on_path:
                    path_e.append(e.id)
                    path_v.append(e.dst)
                    on_path.add(e.dst)
                    extend(e.dst)
                    on_path.discard(e.dst)
                    path_v.pop()
                    path_e.pop()

        extend(start)
    out.sort(key=lambda c: (c.vertices[0], len(c), c.vertices, c.edges))
    return out


def canonical_cycle(g: Graph, edges: Sequence[str]) -> Cycle:
    """Rotate a closed simple edge sequence into canonical form."""
    es = [g.edge(x) for x in edges]
    n = len(es)
    for i in range(n):
        if es[i].dst != es[(i + 1) % n].src:
            raise GraphError("edge sequence is not closed")
    srcs = [e.src for e in es]
    if len(set(srcs)) != n:
        raise GraphError("edge sequence repeats a vertex")
    k = srcs.index(min(srcs))
    rot = es[k:] + es[:k]
    return Cycle(tuple(e.id for e in rot), tuple(e.src for e in rot))


def has_cycle(g: Graph) -> bool:
    """Whether the vertex adjacency (omega bundles included) contains a closed walk."""
    state: dict[str, int] = {}

    def visit(u: str) -> bool:
        state[u] = 1
        for w in g.successors[u]:
            s = state.get(w, 0)
            if s == 1 or (s == 0 and visit(w)):
                return True
        state[u] = 2
        return False

    return any(state.get(v, 0) == 0 and visit(v) for v in g.vertices)


def exits(g: Graph, c: Cycle | Path) -> list[str]:
    """Named exits of a path; an omega bundle at a vertex of the path also exits it."""
    out = []
    for eid in c.edges:
        e = g.edge(eid)
        out.extend(f.id for f in g.out_edges[e.src] if f.id != eid)
    return out


def has_exit(g: Graph, c: Cycle | Path) -> bool:
    if exits(g, c):
        return True
    return any(g.omega_out[g.edge(eid).src] for eid in c.edges)


def _with_omega_doubled(g: Graph) -> Graph:
    """Row-finite stand-in replacing each omega bundle by two named parallel edges."""
    if not g.omega:
        return g
    edges = list(g.edges)
    for k, (v, w) in enumerate(sorted(g.omega, key=g._pair_key)):
        for j in (1, 2):
            edges.append(Edge(g.fresh_edge(f"__omega{k}_{j}"), v, w))
    return Graph(g.vertices, tuple(edges))


def simple_closed_paths_based_at(g: Graph, v: str, limit: int | None = None,
                                 max_length: int | None = None) -> Iterator[tuple[str, ...]]:
    """Simple closed paths based at v (no return to v before the end), shortest first.

    There may be infinitely many; ``max_length`` defaults to 2|E^0|, which is
    enough to see a second one whenever one exists.  Branches that can no
    longer return to v are pruned.
    """
    g.check_vertex(v)
    if max_length is None:
        max_length = 2 * len(g.vertices)
    count = 0
    frontier: list[tuple[tuple[str, ...], str]] = [((), v)]
    for _ in range(max_length):
        nxt = []
        for path, u in frontier:
            for e in g.out_edges[u]:
                p = path + (e.id,)
                if e.dst == v:
                    yield p
                    count += 1
                    if limit is not None and count >= limit:
                        return
                elif v in g.descendants[e.dst]:
                    nxt.append((p, e.dst))
        frontier = nxt
        if not frontier:
            return


def condition_L(g: Graph) -> bool:
    return all(has_exit(g, c) for c in cycles(g))


def condition_K(g: Graph) -> bool:
    h = _with_omega_doubled(g)
    return all(
        len(list(simple_closed_paths_based_at(h, v, limit=2))) != 1
        for v in h.vertices
    )


def is_downward_directed(g: Graph) -> bool:
    d = g.descendants
    return all(d[v] & d[w] for v, w in combinations(g.vertices, 2))


def is_cofinal(g: Graph) -> bool:
    """Only the trivial hereditary saturated subsets exist."""
    full = frozenset(g.vertices)
    return all(hereditary_saturated_closure(g, [v]) == full for v in g.vertices)


def breaking_vertices(g: Graph, h: Iterable[str]) -> frozenset[str]:
    h = frozenset(h)
    g.check_vertex(*h)
    if not is_hereditary(g, h):
        raise GraphError("breaking vertices need a hereditary set")
    out = set()
    for v in g.vertices:
        if v in h or not g.omega_out[v]:
            continue
        if any(w not in h for w in g.omega_out[v]):
            continue  # infinitely many edges leave H
        escaping = sum(1 for e in g.out_edges[v] if e.dst not in h)
        if escaping > 0:
            out.add(v)
    return frozenset(out)


def cuntz_splice(g: Graph, v: str) -> Graph:
    """Attach two new vertices at v: v <-> v1 <-> v2 with a loop at each of v1, v2."""
    g.check_vertex(v)
    v1 = g.fresh_vertex(f"{v}_s1")
    v2 = Graph(g.vertices + (v1,), g.edges).fresh_vertex(f"{v}_s2")
    tmp = Graph(g.vertices + (v1, v2), g.edges)
    names = []
    for stem in ("a", "b", "c", "d", "l1", "l2"):
        name = tmp.fresh_edge(f"{v}_s{stem}")
        names.append(name)
        tmp = Graph(tmp.vertices, tmp.edges + (Edge(name, v, v),))
    a, b, c, d, l1, l2 = names
    new_edges = (
        Edge(a, v, v1), Edge(b, v1, v), Edge(c, v1, v2),
        Edge(d, v2, v1), Edge(l1, v1, v1), Edge(l2, v2, v2),
    )
    return Graph(g.vertices + (v1, v2), g.edges + new_edges, g.omega)


def induced_subgraph(g: Graph, keep: Iterable[str]) -> Graph:
    keep = set(keep)
    return Graph(
        tuple(v for v in g.vertices if v in keep),
        tuple(e for e in g.edges if e.src in keep and e.dst in keep),
        frozenset((v, w) for v, w in g.omega if v in keep and w in keep),
    )
