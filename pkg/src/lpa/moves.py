"""Flow-equivalence moves on row-finite graphs.

Out-splits, in-splits and expansions, their inverses, and source elimination.
Every move preserves coker(I - A_E) and det(I - A_E); ``invariants_preserved``
checks this on each application and ``move_search`` looks for short move
sequences between two graphs.

Split copies of a vertex v are named ``v#1``, ``v#2``, ...; a vertex or edge
with a single copy keeps its name.
"""
from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

from .graph import Edge, Graph, GraphError, vertex_classes
from .ktheory import FgAbelianGroup, det_i_minus_a, group_iso, incidence_matrix, k0


class MoveError(GraphError):
    pass


class MoveKind(str, enum.Enum):
    OUT_SPLIT = "outsplit"
    OUT_AMALGAMATE = "outamalgamate"
    IN_SPLIT = "insplit"
    IN_AMALGAMATE = "inamalgamate"
    EXPAND = "expand"
    CONTRACT = "contract"
    SOURCE_ELIMINATE = "eliminate"


Partition = Mapping[str, Sequence[Sequence[str]]]


@dataclass(frozen=True)
class MoveSpec:
    kind: MoveKind
    vertex: str | None = None
    edge: str | None = None
    partition: tuple[tuple[str, tuple[tuple[str, ...], ...]], ...] = ()
    merge: tuple[str, str] | None = None  # the two vertices an amalgamation joins

    @staticmethod
    def split(kind: MoveKind, partition: Partition) -> "MoveSpec":
        items = tuple((v, tuple(tuple(b) for b in blocks)) for v, blocks in partition.items())
        return MoveSpec(kind, partition=items)

    def partition_dict(self) -> dict[str, list[list[str]]]:
        return {v: [list(b) for b in blocks] for v, blocks in self.partition}

    def to_script(self) -> str:
        k = self.kind
        if k in (MoveKind.OUT_SPLIT, MoveKind.IN_SPLIT):
            parts = " ".join(
                f"{v} {{{'|'.join(','.join(b) for b in blocks)}}}" for v, blocks in self.partition)
            return f"{k.value} {parts}"
        if k in (MoveKind.OUT_AMALGAMATE, MoveKind.IN_AMALGAMATE):
            return f"{k.value} {self.vertex} {self.merge[0]} {self.merge[1]}"
        if k is MoveKind.CONTRACT:
            return f"{k.value} {self.vertex} {self.edge}"
        return f"{k.value} {self.vertex}"

    def __str__(self) -> str:
        return self.to_script()


# -- helpers -----------------------------------------------------------------

def _require_row_finite(g: Graph) -> None:
    if g.omega:
        raise MoveError("moves are defined for graphs without infinite emitters")


def _copy(name: str, i: int, m: int) -> str:
    return f"{name}#{i}" if m > 1 else name


def _check_partition(edges: Sequence[Edge], blocks: Sequence[Sequence[str]], v: str, what: str):
    ids = [e.id for e in edges]
    flat = [x for b in blocks for x in b]
    if any(not b for b in blocks):
        raise MoveError(f"empty block in the partition of {what}({v})")
    if sorted(flat) != sorted(ids) or len(set(flat)) != len(flat):
        raise MoveError(f"blocks for {v} do not partition {what}({v}) = {{{','.join(ids)}}}")


def _normalize_partition(g: Graph, p: Partition, incoming: bool) -> dict[str, list[list[str]]]:
    what = "r^-1" if incoming else "s^-1"
    edges_at = g.in_edges if incoming else g.out_edges
    for v in p:
        g.check_vertex(v)
    out = {}
    for v in g.vertices:
        es = edges_at[v]
        if not es:
            if p.get(v):
                raise MoveError(f"{what}({v}) is empty and cannot be partitioned")
            continue
        blocks = [list(b) for b in p.get(v, [[e.id for e in es]])]
        _check_partition(es, blocks, v, what)
        out[v] = blocks
    return out


def _build(vertices: list[str], edges: list[tuple[str, str, str]]) -> Graph:
    try:
        return Graph(tuple(vertices), tuple(Edge(*e) for e in edges))
    except GraphError as exc:
        raise MoveError(f"move produces clashing names: {exc}") from None


# -- splits ------------------------------------------------------------------

def out_split(g: Graph, p: Partition) -> Graph:
    """Out-split graph: e in block i of s^-1(s(e)) gives edges e^j : s(e)^i -> r(e)^j."""
    _require_row_finite(g)
    part = _normalize_partition(g, p, incoming=False)
    m = {v: len(part.get(v, ())) for v in g.vertices}
    block_of = {eid: i for v, blocks in part.items() for i, b in enumerate(blocks, 1) for eid in b}
    vertices = []
    for v in g.vertices:
        vertices += [_copy(v, i, m[v]) for i in range(1, max(m[v], 1) + 1)]
    edges = []
    for e in g.edges:
        src = _copy(e.src, block_of[e.id], m[e.src])
        mr = m[e.dst]
        for j in range(1, max(mr, 1) + 1):
            edges.append((_copy(e.id, j, mr), src, _copy(e.dst, j, mr)))
    return _build(vertices, edges)


def in_split(g: Graph, p: Partition) -> Graph:
    """In-split graph: e in block i of r^-1(r(e)) gives edges e_j : s(e)_j -> r(e)_i."""
    _require_row_finite(g)
    part = _normalize_partition(g, p, incoming=True)
    m = {v: len(part.get(v, ())) for v in g.vertices}
    block_of = {eid: i for v, blocks in part.items() for i, b in enumerate(blocks, 1) for eid in b}
    vertices = []
    for v in g.vertices:
        vertices += [_copy(v, i, m[v]) for i in range(1, max(m[v], 1) + 1)]
    edges = []
    for e in g.edges:
        dst = _copy(e.dst, block_of[e.id], m[e.dst])
        ms = m[e.src]
        for j in range(1, max(ms, 1) + 1):
            edges.append((_copy(e.id, j, ms), _copy(e.src, j, ms), dst))
    return _build(vertices, edges)


def _stem(eid: str) -> str:
    return re.sub(r"#\d+$", "", eid)


def _pair_by(left: Sequence[Edge], right: Sequence[Edge], key) -> list[tuple[Edge, Edge]]:
    a = sorted(left, key=lambda e: (key(e), e.id))
    b = sorted(right, key=lambda e: (key(e), e.id))
    if [key(e) for e in a] != [key(e) for e in b]:
        return []
    return list(zip(a, b))


def _amalgamate(g: Graph, new: str, x: str, y: str, incoming_pairs: bool) -> Graph:
    """Shared body of both amalgamations.

    For an out-amalgamation x and y must receive edges from the same sources
    (with multiplicity); y's in-edges are then dropped.  For an in-amalgamation
    they must emit edges to the same ranges and y's out-edges are dropped.
    """
    _require_row_finite(g)
    g.check_vertex(x, y)
    if x == y:
        raise MoveError("amalgamation needs two distinct vertices")
    if incoming_pairs:
        lx, ly = g.in_edges[x], g.in_edges[y]
        key = lambda e: e.src  # noqa: E731
        what, other = "in-edges", g.out_edges
    else:
        lx, ly = g.out_edges[x], g.out_edges[y]
        key = lambda e: e.dst  # noqa: E731
        what, other = "out-edges", g.in_edges
    if not other[x] or not other[y]:
        raise MoveError(f"{x} and {y} must both have edges on the side being split")
    pairs = _pair_by(lx, ly, key)
    if len(lx) != len(ly) or len(pairs) != len(lx):
        raise MoveError(f"{what} of {x} and {y} do not match up; not a split image")
    taken = (set(g.vertices) | set(g.edge_map)) - {x, y}
    if new in taken:
        raise MoveError(f"name {new!r} already in use")
    dropped = {b.id for _, b in pairs}
    rename = {}
    for a, b in pairs:
        stem = _stem(a.id)
        if stem == _stem(b.id) and stem not in taken and stem != a.id:
            rename[a.id] = stem
    merge = lambda v: new if v in (x, y) else v  # noqa: E731
    vertices = []
    for v in g.vertices:
        if v == x:
            vertices.append(new)
        elif v != y:
            vertices.append(v)
    edges = [
        (rename.get(e.id, e.id), merge(e.src), merge(e.dst))
        for e in g.edges if e.id not in dropped
    ]
    return _build(vertices, edges)


def out_amalgamate(g: Graph, new: str, x: str, y: str) -> Graph:
    """Inverse of an out-split of one vertex into x and y."""
    return _amalgamate(g, new, x, y, incoming_pairs=True)


def in_amalgamate(g: Graph, new: str, x: str, y: str) -> Graph:
    """Inverse of an in-split of one vertex into x and y."""
    return _amalgamate(g, new, x, y, incoming_pairs=False)


# -- expansion, contraction, source elimination -------------------------------

def expand(g: Graph, v: str) -> Graph:
    """Add v* and f: v -> v*; the old out-edges of v now leave from v*."""
    _require_row_finite(g)
    g.check_vertex(v)
    star = g.fresh_vertex(f"{v}'")
    tmp = Graph(g.vertices + (star,), g.edges)
    f = tmp.fresh_edge(f"{v}_f")
    edges = [(e.id, star if e.src == v else e.src, e.dst) for e in g.edges]
    return _build(list(g.vertices) + [star], edges + [(f, v, star)])


def contraction_target(g: Graph, v: str, f: str) -> str:
    """Return v* if (v, f) has the shape produced by expanding at v, else raise."""
    _require_row_finite(g)
    g.check_vertex(v)
    e = g.edge(f)
    if e.src != v:
        raise MoveError(f"edge {f} does not start at {v}")
    if len(g.out_edges[v]) != 1:
        raise MoveError(f"{v} must emit exactly one edge to be contracted")
    star = e.dst
    if star == v:
        raise MoveError(f"{f} is a loop")
    if len(g.in_edges[star]) != 1:
        raise MoveError(f"{star} must receive only the edge {f}")
    return star


def contract(g: Graph, v: str, f: str) -> Graph:
    star = contraction_target(g, v, f)
    vertices = [u for u in g.vertices if u != star]
    edges = [(e.id, v if e.src == star else e.src, v if e.dst == star else e.dst)
             for e in g.edges if e.id != f]
    return _build(vertices, edges)


def source_eliminate(g: Graph, v: str) -> Graph:
    _require_row_finite(g)
    g.check_vertex(v)
    if g.in_edges[v]:
        raise MoveError(f"{v} is not a source")
    if len(g.vertices) < 2:
        raise MoveError("cannot eliminate the last vertex")
    vertices = [u for u in g.vertices if u != v]
    edges = [tuple(e) for e in g.edges if e.src != v]
    return _build(vertices, edges)


# -- dispatch and scripts ----------------------------------------------------

def apply_move(g: Graph, m: MoveSpec) -> Graph:
    k = m.kind
    if k is MoveKind.OUT_SPLIT:
        return out_split(g, m.partition_dict())
    if k is MoveKind.IN_SPLIT:
        return in_split(g, m.partition_dict())
    if k is MoveKind.OUT_AMALGAMATE:
        return out_amalgamate(g, m.vertex, *m.merge)
    if k is MoveKind.IN_AMALGAMATE:
        return in_amalgamate(g, m.vertex, *m.merge)
    if k is MoveKind.EXPAND:
        return expand(g, m.vertex)
    if k is MoveKind.CONTRACT:
        return contract(g, m.vertex, m.edge)
    if k is MoveKind.SOURCE_ELIMINATE:
        return source_eliminate(g, m.vertex)
    raise MoveError(f"unknown move {k}")


_BLOCKS = re.compile(r"(\S+?)\s*\{([^}]*)\}")


def parse_move(line: str) -> MoveSpec:
    toks = line.split(None, 1)
    if not toks:
        raise MoveError("empty move")
    try:
        kind = MoveKind(toks[0])
    except ValueError:
        raise MoveError(f"unknown move {toks[0]!r}") from None
    rest = toks[1] if len(toks) > 1 else ""
    if kind in (MoveKind.OUT_SPLIT, MoveKind.IN_SPLIT):
        part: dict[str, list[list[str]]] = {}
        pos = 0
        for mt in _BLOCKS.finditer(rest):
            if rest[pos:mt.start()].strip():
                raise MoveError(f"cannot parse {rest[pos:mt.start()].strip()!r}")
            pos = mt.end()
            blocks = [[x.strip() for x in b.split(",") if x.strip()] for b in mt.group(2).split("|")]
            part[mt.group(1)] = blocks
        if rest[pos:].strip() or not part:
            raise MoveError(f"expected '<vertex> {{e1,e2|e3}}' groups in {line!r}")
        return MoveSpec.split(kind, part)
    args = rest.split()
    want = {MoveKind.OUT_AMALGAMATE: 3, MoveKind.IN_AMALGAMATE: 3, MoveKind.CONTRACT: 2}.get(kind, 1)
    if len(args) != want:
        raise MoveError(f"{kind.value} takes {want} argument(s)")
    if kind in (MoveKind.OUT_AMALGAMATE, MoveKind.IN_AMALGAMATE):
        return MoveSpec(kind, vertex=args[0], merge=(args[1], args[2]))
    if kind is MoveKind.CONTRACT:
        return MoveSpec(kind, vertex=args[0], edge=args[1])
    return MoveSpec(kind, vertex=args[0])


def parse_script(text: str) -> list[MoveSpec]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = re.sub(r"(^|\s)#.*", "", raw).strip()
        if not line:
            continue
        try:
            out.append(parse_move(line))
        except MoveError as exc:
            raise MoveError(f"line {lineno}: {exc}") from None
    return out


# -- invariants --------------------------------------------------------------

@dataclass
class InvariantReport:
    move: str
    k0_before: FgAbelianGroup
    k0_after: FgAbelianGroup
    det_before: int
    det_after: int

    @property
    def group_preserved(self) -> bool:
        return group_iso(self.k0_before, self.k0_after)

    @property
    def det_preserved(self) -> bool:
        return self.det_before == self.det_after

    @property
    def ok(self) -> bool:
        return self.group_preserved and self.det_preserved

    def to_json(self) -> dict:
        strip = lambda k: str(k).split(";")[0]  # noqa: E731
        return {
            "move": self.move,
            "coker_before": strip(self.k0_before), "coker_after": strip(self.k0_after),
            "det_before": self.det_before, "det_after": self.det_after,
            "preserved": self.ok,
        }


def invariants_preserved(g: Graph, m: MoveSpec, after: Graph | None = None) -> InvariantReport:
    if after is None:
        after = apply_move(g, m)
    return InvariantReport(str(m), k0(g), k0(after), det_i_minus_a(g), det_i_minus_a(after))


# -- isomorphism by canonical labelling -----------------------------------------

CANONICAL_VERTEX_CAP = 8


def canonical_form(g: Graph) -> tuple:
    """Least adjacency matrix over vertex orderings compatible with degree data."""
    _require_row_finite(g)
    n = len(g.vertices)
    if n > CANONICAL_VERTEX_CAP:
        raise MoveError(f"canonical labelling is limited to {CANONICAL_VERTEX_CAP} vertices")
    a = incidence_matrix(g)
    sig = [(sum(a[i]), sum(r[i] for r in a), a[i][i], tuple(sorted(a[i])),
            tuple(sorted(r[i] for r in a))) for i in range(n)]
    groups: dict = {}
    for i in range(n):
        groups.setdefault(sig[i], []).append(i)
    keys = sorted(groups)
    best = None
    for combo in product(*[permutations(groups[k]) for k in keys]):
        order = [i for part in combo for i in part]
        flat = tuple(a[i][j] for i in order for j in order)
        if best is None or flat < best:
            best = flat
    return tuple(keys), best


def isomorphic(g: Graph, h: Graph) -> bool:
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return False
    return canonical_form(g) == canonical_form(h)


# -- bounded search ----------------------------------------------------------

MAX_SEARCH_DEPTH = 4
SPLIT_EDGE_CAP = 5


def _set_partitions(items: list[str]) -> Iterable[list[list[str]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def _nontrivial_partitions(edges: Sequence[Edge]) -> list[list[list[str]]]:
    ids = [e.id for e in edges]
    if len(ids) < 2 or len(ids) > SPLIT_EDGE_CAP:
        return []
    out = []
    for p in _set_partitions(ids):
        if len(p) >= 2:
            order = {x: k for k, x in enumerate(ids)}
            blocks = sorted((sorted(b, key=order.get) for b in p), key=lambda b: order[b[0]])
            out.append(blocks)
    return out


def candidate_moves(g: Graph, vertex_cap: int = CANONICAL_VERTEX_CAP) -> list[MoveSpec]:
    moves: list[MoveSpec] = []
    n = len(g.vertices)
    if n < vertex_cap:
        moves += [MoveSpec(MoveKind.EXPAND, vertex=v) for v in g.vertices]
    for v in g.vertices:
        if len(g.out_edges[v]) == 1:
            f = g.out_edges[v][0].id
            try:
                contraction_target(g, v, f)
            except MoveError:
                continue
            moves.append(MoveSpec(MoveKind.CONTRACT, vertex=v, edge=f))
    if n >= 2:
        sources = vertex_classes(g).sources
        moves += [MoveSpec(MoveKind.SOURCE_ELIMINATE, vertex=v) for v in g.vertices if v in sources]
    for v in g.vertices:
        for blocks in _nontrivial_partitions(g.out_edges[v]):
            if n + len(blocks) - 1 <= vertex_cap:
                moves.append(MoveSpec.split(MoveKind.OUT_SPLIT, {v: blocks}))
        for blocks in _nontrivial_partitions(g.in_edges[v]):
            if n + len(blocks) - 1 <= vertex_cap:
                moves.append(MoveSpec.split(MoveKind.IN_SPLIT, {v: blocks}))
    for x, y in ((x, y) for i, x in enumerate(g.vertices) for y in g.vertices[i + 1:]):
        new = _stem(x) if _stem(x) == _stem(y) and _stem(x) != x else f"{x}_{y}"
        for kind in (MoveKind.OUT_AMALGAMATE, MoveKind.IN_AMALGAMATE):
            m = MoveSpec(kind, vertex=new, merge=(x, y))
            try:
                apply_move(g, m)
            except MoveError:
                continue
            moves.append(m)
    moves.sort(key=str)
    return moves


@dataclass
class SearchResult:
    found: bool
    moves: list[MoveSpec] = field(default_factory=list)
    reason: str = ""
    explored: int = 0

    @property
    def status(self) -> str:
        return "SequenceFound" if self.found else "NotFoundWithinDepth"

    def to_json(self) -> dict:
        return {"status": self.status, "moves": [str(m) for m in self.moves],
                "reason": self.reason, "explored": self.explored}


def move_search(e: Graph, f: Graph, depth: int, vertex_cap: int = CANONICAL_VERTEX_CAP) -> SearchResult:
    """Breadth-first search for a move sequence turning e into a graph isomorphic to f.

    Moves at each step are tried in string order, so the sequence returned is
    the lexicographically least among the shortest ones the search can see.
    """
    _require_row_finite(e)
    _require_row_finite(f)
    ke, kf = k0(e), k0(f)
    de, df = det_i_minus_a(e), det_i_minus_a(f)
    if not group_iso(ke, kf) or de != df:
        return SearchResult(False, reason=(
            f"invariants differ: coker {str(ke).split(';')[0]} vs {str(kf).split(';')[0]}, "
            f"det {de} vs {df}"))
    capped = depth > MAX_SEARCH_DEPTH
    depth = min(depth, MAX_SEARCH_DEPTH)
    target = canonical_form(f)
    if canonical_form(e) == target:
        return SearchResult(True, [], explored=1)
    seen = {canonical_form(e)}
    frontier: deque[tuple[Graph, list[MoveSpec]]] = deque([(e, [])])
    explored = 1
    for _ in range(depth):
        nxt: deque = deque()
        for g, path in frontier:
            for m in candidate_moves(g, vertex_cap):
                h = apply_move(g, m)
                c = canonical_form(h)
                if c in seen:
                    continue
                seen.add(c)
                explored += 1
                if c == target:
                    return SearchResult(True, path + [m], explored=explored)
                nxt.append((h, path + [m]))
        frontier = nxt
        if not frontier:
            break
    reason = f"no sequence of length <= {depth}"
    if capped:
        reason += f" (depth capped at {MAX_SEARCH_DEPTH})"
    return SearchResult(False, reason=reason, explored=explored)


def replay(g: Graph, moves: Sequence[MoveSpec]) -> Graph:
    for m in moves:
        g = apply_move(g, m)
    return g
