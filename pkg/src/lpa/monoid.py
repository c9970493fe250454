"""The graph monoid M_E and bounded word-problem searches.

M_E is the free commutative monoid on the vertices modulo a_v = sum a_{r(e)}
over s^{-1}(v), one relation per regular vertex.  Equality is decided by a
breadth-first search over rewrites, confined to vectors whose coordinate sum
stays below a caller-supplied bound, so a negative answer is only ever a
bounded one.
"""
from __future__ import annotations

import enum
import random
import re
from collections import Counter
from dataclasses import dataclass
from itertools import product
from math import gcd, lcm
from typing import Iterable, Sequence

from .graph import Graph, GraphError, vertex_classes
from .classify import is_purely_infinite_simple
from .ktheory import k0

Vec = tuple[int, ...]


class MonoidError(GraphError):
    pass


class WordResult(str, enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL_WITHIN_BOUND = "NotEqualWithinBound"


@dataclass(frozen=True)
class MonoidPresentation:
    generators: tuple[str, ...]
    relations: tuple[tuple[str, Vec], ...]  # (v, right-hand side as a vector)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def unit(self, v: str) -> Vec:
        i = self.generators.index(v)
        return tuple(int(j == i) for j in range(self.rank))

    def rewrite_rules(self) -> list[tuple[Vec, Vec]]:
        """Both orientations of every relation."""
        out = []
        for v, rhs in self.relations:
            lhs = self.unit(v)
            out.append((lhs, rhs))
            out.append((rhs, lhs))
        return out

    def format(self, x: Sequence[int]) -> str:
        return format_element(self.generators, x)

    def parse(self, text: str) -> Vec:
        return parse_element(self.generators, text)

    def __str__(self) -> str:
        lines = [f"generators: {', '.join(self.generators)}"]
        for v, rhs in self.relations:
            lines.append(f"  {v} = {self.format(rhs)}")
        return "\n".join(lines)


def presentation(g: Graph) -> MonoidPresentation:
    regular = vertex_classes(g).regular
    idx = g.index
    rels = []
    for v in g.vertices:
        if v in regular:
            rhs = [0] * len(g.vertices)
            for e in g.out_edges[v]:
                rhs[idx[e.dst]] += 1
            rels.append((v, tuple(rhs)))
    return MonoidPresentation(g.vertices, tuple(rels))


def format_element(gens: Sequence[str], x: Sequence[int]) -> str:
    terms = [v if c == 1 else f"{c}*{v}" for v, c in zip(gens, x) if c]
    return " + ".join(terms) if terms else "0"


_TERM = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?(\S+?)\s*$")


def parse_element(gens: Sequence[str], text: str) -> Vec:
    """Parse ``2*v1 + v3`` (or ``0``) into a coefficient vector."""
    out = [0] * len(gens)
    text = text.strip()
    if text == "0":
        return tuple(out)
    index = {v: i for i, v in enumerate(gens)}
    for chunk in text.split("+"):
        m = _TERM.match(chunk)
        if not m or m.group(2) not in index:
            raise MonoidError(f"cannot parse monoid term {chunk.strip()!r}")
        out[index[m.group(2)]] += int(m.group(1) or 1)
    return tuple(out)


# -- bounded word problem ----------------------------------------------------

def _neighbours(x: Vec, rules: list[tuple[Vec, Vec]], bound: int) -> Iterable[Vec]:
    total = sum(x)
    for lhs, rhs in rules:
        if all(a >= b for a, b in zip(x, lhs)):
            if total - sum(lhs) + sum(rhs) > bound:
                continue
            yield tuple(a - b + c for a, b, c in zip(x, lhs, rhs))


def equal_bounded(p: MonoidPresentation, x: Sequence[int], y: Sequence[int],
                  bound: int) -> WordResult:
    x, y = tuple(x), tuple(y)
    if len(x) != p.rank or len(y) != p.rank or min(x + y, default=0) < 0:
        raise MonoidError("elements must be nonnegative vectors over the generators")
    if bound < max(sum(x), sum(y)):
        raise MonoidError(f"bound {bound} is below the size of the inputs")
    if x == y:
        return WordResult.EQUAL
    rules = p.rewrite_rules()
    seen = [{x}, {y}]
    frontier = [[x], [y]]
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        nxt = []
        for z in frontier[side]:
            for w in _neighbours(z, rules, bound):
                if w in seen[1 - side]:
                    return WordResult.EQUAL
                if w not in seen[side]:
                    seen[side].add(w)
                    nxt.append(w)
        frontier[side] = nxt
    return WordResult.NOT_EQUAL_WITHIN_BOUND


def bounded_vectors(n: int, bound: int) -> list[Vec]:
    """All nonnegative n-vectors with coordinate sum <= bound, graded by sum."""
    out: list[Vec] = []

    def rec(prefix: list[int], left: int):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for c in range(left + 1):
            prefix.append(c)
            rec(prefix, left - c)
            prefix.pop()

    rec([], bound)
    out.sort(key=lambda v: (sum(v), v))
    return out


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller (sum, lex) representative as root
            if (sum(rb), rb) < (sum(ra), ra):
                ra, rb = rb, ra
            self.parent[rb] = ra


def bounded_classes(p: MonoidPresentation, bound: int) -> dict[Vec, Vec]:
    """Map each vector of size <= bound to the least member of its bounded class."""
    rules = p.rewrite_rules()
    uf = _UnionFind()
    vecs = bounded_vectors(p.rank, bound)
    for x in vecs:
        uf.find(x)
        for y in _neighbours(x, rules, bound):
            uf.union(x, y)
    return {x: uf.find(x) for x in vecs}


# -- the nonzero part of V(L) as a group --------------------------------------

@dataclass
class GroupCheckReport:
    order: int
    expected_order: int
    element_orders: dict[int, int]
    expected_element_orders: dict[int, int]
    unit_order: int
    expected_unit_order: int
    representatives: list[str]
    closed: bool
    ok: bool
    problem: str | None = None

    def to_json(self) -> dict:
        return {
            "order": self.order, "expected_order": self.expected_order,
            "element_orders": {str(k): v for k, v in sorted(self.element_orders.items())},
            "expected_element_orders": {str(k): v for k, v in sorted(self.expected_element_orders.items())},
            "unit_order": self.unit_order, "expected_unit_order": self.expected_unit_order,
            "representatives": self.representatives, "closed": self.closed,
            "ok": self.ok, "problem": self.problem,
        }


def _cyclic_orders(torsion: Sequence[int]) -> Counter:
    """Number of elements of each order in Z/t_1 + ... + Z/t_k."""
    counts: Counter = Counter()
    for x in product(*[range(t) for t in torsion]):
        o = 1
        for xi, t in zip(x, torsion):
            o = lcm(o, t // gcd(xi, t))
        counts[o] += 1
    return counts


def _element_order_mod(xs: Sequence[int], torsion: Sequence[int]) -> int:
    o = 1
    for xi, t in zip(xs, torsion):
        o = lcm(o, t // gcd(xi, t))
    return o


def group_without_zero_check(g: Graph, bound: int) -> GroupCheckReport:
    """Within ``bound``, check that the nonzero classes of M_E form a group matching K_0."""
    if not is_purely_infinite_simple(g):
        raise MonoidError("group check needs a purely infinite simple graph")
    group = k0(g)
    if not group.is_finite:
        raise MonoidError("K_0 is infinite; the bounded check needs a finite group")
    p = presentation(g)
    classes = bounded_classes(p, bound)
    zero = (0,) * p.rank
    # representatives come from the lower half so that sums of two stay in range
    half = bound // 2
    reps = sorted({r for x, r in classes.items() if x != zero and sum(x) <= half},
                  key=lambda v: (sum(v), v))

    def cls(x: Vec) -> Vec | None:
        return classes.get(x)

    # Cayley table on representatives; sums must stay within the bound
    closed = True
    table: dict[tuple[Vec, Vec], Vec] = {}
    for a in reps:
        for b in reps:
            s = tuple(i + j for i, j in zip(a, b))
            c = cls(s)
            if c is None:
                closed = False
                continue
            table[a, b] = c
    problem = None
    identity = None
    if closed:
        for e in reps:
            if all(table[e, a] == a for a in reps):
                identity = e
                break
        if identity is None:
            problem = "no identity element among nonzero classes"
        elif not all(any(table[a, b] == identity for b in reps) for a in reps):
            problem = "some nonzero class has no inverse"
    else:
        problem = f"bound {bound} too small to close the table"

    orders: Counter = Counter()
    unit_order = 0
    if identity is not None and problem is None:
        for a in reps:
            k, x = 1, a
            while x != identity:
                x = table[x, a]
                k += 1
            orders[k] += 1
        table_keys = set(reps)
        one = tuple(1 for _ in p.generators)
        d_rep = cls(one)
        if d_rep is None or d_rep not in table_keys:
            problem = "the unit class exceeds the bound"
        else:
            k, x = 1, d_rep
            while x != identity:
                x = table[x, d_rep]
                k += 1
            unit_order = k
    expected_orders = dict(_cyclic_orders(group.torsion))
    expected_unit = _element_order_mod(group.unit_class, group.torsion)
    ok = (
        problem is None
        and len(reps) == group.order
        and dict(orders) == expected_orders
        and unit_order == expected_unit
    )
    if problem is None and not ok:
        problem = "class structure does not match K_0"
    return GroupCheckReport(
        order=len(reps), expected_order=group.order,
        element_orders=dict(orders), expected_element_orders=expected_orders,
        unit_order=unit_order, expected_unit_order=expected_unit,
        representatives=[p.format(r) for r in reps], closed=closed, ok=ok, problem=problem,
    )


# -- refinement and separativity probes ---------------------------------------

@dataclass
class ProbeReport:
    kind: str
    samples: int
    checked: int
    violations: list[str]
    inconclusive: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "kind": self.kind, "samples": self.samples, "checked": self.checked,
            "violations": self.violations, "inconclusive": self.inconclusive,
            "ok": self.ok,
        }


def _random_vec(rng: random.Random, n: int, size: int) -> Vec:
    x = [0] * n
    for _ in range(rng.randint(0, size)):
        x[rng.randrange(n)] += 1
    return tuple(x)


def _random_walk(p: MonoidPresentation, x: Vec, steps: int, bound: int,
                 rng: random.Random) -> Vec:
    rules = p.rewrite_rules()
    for _ in range(steps):
        nb = list(_neighbours(x, rules, bound))
        if not nb:
            break
        x = rng.choice(nb)
    return x


def _add(x: Vec, y: Vec) -> Vec:
    return tuple(i + j for i, j in zip(x, y))


def _below_multiple(classes: dict[Vec, Vec], c: Vec, a: Vec, n_max: int) -> bool:
    """Is c <= n*a for some 1 <= n <= n_max, i.e. c + z = n*a for some z?"""
    for n in range(1, n_max + 1):
        na = tuple(n * x for x in a)
        if na not in classes:
            return False
        target = classes[na]
        for z in bounded_vectors(len(c), sum(na)):
            s = _add(c, z)
            if classes.get(s) == target:
                return True
    return False


def separativity_probe(p: MonoidPresentation, samples: int, bound: int,
                       seed: int = 0, size: int = 2) -> ProbeReport:
    """Sample a, c and take b from a rewrite of a + c; whenever a + c = b + c,
    c <= n a and c <= n b, separativity forces a = b.

    A pair not joined within ``bound`` is re-checked at twice the bound before
    it is reported, since the connecting rewrites may pass through larger
    elements than a, b themselves.
    """
    rng = random.Random(seed)
    classes = bounded_classes(p, bound)
    violations, checked, inconclusive = [], 0, 0
    for _ in range(samples):
        a = _random_vec(rng, p.rank, size)
        c = _random_vec(rng, p.rank, size)
        ac = _add(a, c)
        if sum(ac) > bound:
            inconclusive += 1
            continue
        w = _random_walk(p, ac, rng.randint(0, 4), bound, rng)
        b = tuple(x - y for x, y in zip(w, c)) if all(x >= y for x, y in zip(w, c)) else a
        if not (_below_multiple(classes, c, a, 3) and _below_multiple(classes, c, b, 3)):
            inconclusive += 1
            continue
        checked += 1
        if (classes[a] != classes[b]
                and equal_bounded(p, a, b, 2 * bound) is not WordResult.EQUAL):
            violations.append(f"a={p.format(a)}, b={p.format(b)}, c={p.format(c)}")
    return ProbeReport("separativity", samples, checked, violations, inconclusive)


def _split_pairs(x: Vec) -> Iterable[tuple[Vec, Vec]]:
    for left in product(*[range(c + 1) for c in x]):
        yield tuple(left), tuple(c - l for c, l in zip(x, left))


def refinement_probe(p: MonoidPresentation, samples: int, bound: int,
                     seed: int = 0, size: int = 2, budget: int = 20000) -> ProbeReport:
    """Sample a1 + a2 = b1 + b2 and search for c_ij with a_i = c_i1 + c_i2 and
    b_j = c_1j + c_2j.

    Any refinement splits some representative of a1 and of a2, so ranging over
    the bounded classes of a1, a2 is exhaustive up to the bound.  A sample with
    no refinement after a complete search is a violation; running out of
    budget counts as inconclusive.
    """
    rng = random.Random(seed)
    classes = bounded_classes(p, bound)
    members: dict[Vec, list[Vec]] = {}
    for x, r in classes.items():
        members.setdefault(r, []).append(x)
    violations, checked, inconclusive = [], 0, 0
    for _ in range(samples):
        a1 = _random_vec(rng, p.rank, size)
        a2 = _random_vec(rng, p.rank, size)
        s = _add(a1, a2)
        if sum(s) > bound:
            inconclusive += 1
            continue
        w = _random_walk(p, s, rng.randint(0, 4), bound, rng)
        b1, b2 = rng.choice(list(_split_pairs(w)))
        t1, t2 = classes[b1], classes[b2]
        checks, found = 0, False
        for x1 in members[classes[a1]]:
            for c11, c12 in _split_pairs(x1):
                for x2 in members[classes[a2]]:
                    for c21, c22 in _split_pairs(x2):
                        checks += 1
                        s1, s2 = _add(c11, c21), _add(c12, c22)
                        if classes.get(s1) == t1 and classes.get(s2) == t2:
                            found = True
                            break
                        if checks > budget:
                            break
                    if found or checks > budget:
                        break
                if found or checks > budget:
                    break
            if found or checks > budget:
                break
        if found:
            checked += 1
        elif checks > budget:
            inconclusive += 1
        else:
            violations.append(
                f"{p.format(a1)} + {p.format(a2)} = {p.format(b1)} + {p.format(b2)}")
    return ProbeReport("refinement", samples, checked, violations, inconclusive)
