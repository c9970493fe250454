"""Ring-theoretic verdicts about L_K(E), read off the graph.

Each function here implements one graph-theoretic characterization: simplicity,
pure infiniteness, primeness, the ideal lattice, chain conditions, growth,
Lie-bracket simplicity, and the K-theoretic comparison of two purely infinite
simple algebras.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .graph import (
    Cycle, Graph, GraphError, breaking_vertices, condition_K, condition_L, cycles,
    enumerate_hereditary_saturated, has_cycle, is_cofinal, is_downward_directed,
    vertex_classes,
)
from .ktheory import (
    FgAbelianGroup, Tri, det_i_minus_a, group_iso, incidence_matrix, k0,
    pointed_iso_exists, rank,
)


class ClassifyError(GraphError):
    pass


# -- finite acyclic graphs ---------------------------------------------------

def paths_into(g: Graph, w: str) -> dict[str, int]:
    """For every vertex v, the number of paths from v to w (trivial path included)."""
    memo: dict[str, int] = {}

    def count(v: str, depth: int = 0) -> int:
        if v in memo:
            return memo[v]
        if depth > len(g.vertices):
            raise ClassifyError("graph has a cycle")
        n = int(v == w) + sum(count(e.dst, depth + 1) for e in g.out_edges[v])
        memo[v] = n
        return n

    return {v: count(v) for v in g.vertices}


def acyclic_structure(g: Graph) -> list[int]:
    """N_i for each sink w_i (declared order): L_K(E) is the sum of the M_{N_i}(K)."""
    if g.omega:
        raise ClassifyError("acyclic structure needs a graph without infinite emitters")
    if has_cycle(g):
        raise ClassifyError("acyclic structure needs an acyclic graph")
    sinks = vertex_classes(g).sinks
    return [sum(paths_into(g, w).values()) for w in g.vertices if w in sinks]


# -- simplicity --------------------------------------------------------------

@dataclass(frozen=True)
class GradedIdealPair:
    H: frozenset[str]
    S: frozenset[str]

    def to_json(self, g: Graph) -> dict:
        order = g.index.__getitem__
        return {"H": sorted(self.H, key=order), "S": sorted(self.S, key=order)}


def graded_ideals(g: Graph) -> list[GradedIdealPair]:
    """Admissible pairs (H, S): H hereditary saturated, S a subset of B_H."""
    out = []
    for h in enumerate_hereditary_saturated(g):
        b = sorted(breaking_vertices(g, h), key=g.index.__getitem__)
        for k in range(len(b) + 1):
            for s in combinations(b, k):
                out.append(GradedIdealPair(h, frozenset(s)))
    return out


def is_simple(g: Graph) -> bool:
    if not condition_L(g):
        return False
    if g.is_row_finite:
        return is_cofinal(g)
    return len(graded_ideals(g)) == 2


def is_purely_infinite_simple(g: Graph) -> bool:
    return is_simple(g) and has_cycle(g)


@dataclass(frozen=True)
class Dichotomy:
    kind: str  # "MatrixAlgebra" | "PIS" | "NotSimple"
    n: int | None = None

    def __str__(self) -> str:
        if self.kind == "MatrixAlgebra":
            return f"MatrixAlgebra({self.n})"
        return self.kind


def dichotomy(g: Graph) -> Dichotomy:
    if not is_simple(g):
        return Dichotomy("NotSimple")
    if has_cycle(g):
        return Dichotomy("PIS")
    (n,) = acyclic_structure(g)  # cofinal and acyclic: exactly one sink
    return Dichotomy("MatrixAlgebra", n)


@dataclass(frozen=True)
class Battery:
    prime: bool
    primitive: bool
    exchange: bool
    simple: bool
    pis: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def predicate_battery(g: Graph) -> Battery:
    dd = is_downward_directed(g)
    simple = is_simple(g)
    return Battery(
        prime=dd,
        # countable separation is automatic with finitely many vertices
        primitive=dd and condition_L(g),
        exchange=condition_K(g),
        simple=simple,
        pis=simple and has_cycle(g),
    )


class Center(str, enum.Enum):
    SCALARS = "ScalarMultiplesOfUnit"
    ZERO = "Zero"  # only for infinitely many vertices, which never occurs here
    UNKNOWN = "Unknown"


def center_description(g: Graph) -> Center:
    if g.is_row_finite and is_simple(g):
        return Center.SCALARS
    return Center.UNKNOWN


# -- ideals of row-finite graphs ---------------------------------------------

@dataclass(frozen=True)
class IdealFamily:
    H: frozenset[str]
    cycles: tuple[Cycle, ...]  # each carries a polynomial parameter p_c(x), not enumerated

    @property
    def has_nongraded(self) -> bool:
        return bool(self.cycles)


def cycles_for(g: Graph, h: frozenset[str], all_cycles: list[Cycle] | None = None) -> tuple[Cycle, ...]:
    """C_H: cycles disjoint from H all of whose exits range into H."""
    out = []
    for c in all_cycles if all_cycles is not None else cycles(g):
        if set(c.vertices) & h:
            continue
        on_c = set(c.edges)
        if all(f.dst in h for v in c.vertices for f in g.out_edges[v] if f.id not in on_c):
            out.append(c)
    return tuple(out)


def ideal_families(g: Graph) -> list[IdealFamily]:
    if not g.is_row_finite:
        raise ClassifyError("ideal families are described for row-finite graphs only")
    cs = cycles(g)
    return [IdealFamily(h, cycles_for(g, h, cs)) for h in enumerate_hereditary_saturated(g)]


@dataclass(frozen=True)
class ChainConditions:
    dcc: bool
    acc: bool


def chain_conditions(g: Graph) -> ChainConditions:
    if not g.is_row_finite:
        raise ClassifyError("chain conditions are described for row-finite graphs only")
    return ChainConditions(dcc=condition_K(g), acc=True)


# -- growth ------------------------------------------------------------------

@dataclass(frozen=True)
class GKDimension:
    exponential: bool
    value: int | None = None
    d1: int | None = None
    d2: int | None = None

    def __str__(self) -> str:
        return "Exponential" if self.exponential else f"Polynomial({self.value})"


def gk_dimension(g: Graph) -> GKDimension:
    if g.omega:
        raise ClassifyError("GK dimension is computed for finite graphs only")
    cs = cycles(g)
    vsets = [frozenset(c.vertices) for c in cs]
    for i, j in combinations(range(len(cs)), 2):
        if vsets[i] & vsets[j]:
            return GKDimension(True)
    if not cs:
        return GKDimension(False, 0, 0, 0)
    n = len(cs)
    reach = [[i != j and any(vsets[j] & g.descendants[v] for v in vsets[i]) for j in range(n)]
             for i in range(n)]
    if any(reach[i][j] and reach[j][i] for i in range(n) for j in range(n)):
        return GKDimension(True)  # unreachable for disjoint cycles; kept as a guard
    with_exit = [bool([f for v in c.vertices for f in g.out_edges[v] if f.id not in c.edges])
                 for c in cs]

    def longest(allowed: list[bool]) -> int:
        @lru_cache(maxsize=None)
        def from_(i: int) -> int:
            return 1 + max((from_(j) for j in range(n) if reach[i][j] and allowed[j]), default=0)
        return max((from_(i) for i in range(n) if allowed[i]), default=0)

    d1 = longest([True] * n)
    d2 = longest(with_exit)
    return GKDimension(False, max(2 * d1 - 1, 2 * d2), d1, d2)


# -- Lie bracket -------------------------------------------------------------

class LieVerdict(str, enum.Enum):
    SIMPLE = "Simple"
    NOT_SIMPLE = "NotSimple"
    INAPPLICABLE = "Inapplicable"


def bracket_rows(g: Graph) -> list[list[int]]:
    """B_i = (row i of A_E) - e_i, or zero for a sink."""
    a = incidence_matrix(g)
    sinks = vertex_classes(g).sinks
    out = []
    for i, v in enumerate(g.vertices):
        if v in sinks:
            out.append([0] * len(a))
        else:
            out.append([x - int(i == j) for j, x in enumerate(a[i])])
    return out


def lie_bracket_simple(g: Graph, characteristic: int = 0) -> LieVerdict:
    if g.omega or len(g.vertices) < 2 or not is_simple(g):
        return LieVerdict.INAPPLICABLE
    b = bracket_rows(g)
    ones = [1] * len(g.vertices)
    in_span = rank(b, characteristic) == rank(b + [ones], characteristic)
    return LieVerdict.NOT_SIMPLE if in_span else LieVerdict.SIMPLE


# -- classification ----------------------------------------------------------

class Verdict(str, enum.Enum):
    ISOMORPHIC = "Isomorphic"
    MORITA = "MoritaEquivalent"
    NOT_MORITA = "NotMoritaEquivalent"
    OPEN_KP = "OpenKP"
    INAPPLICABLE = "Inapplicable"


@dataclass
class ClassificationVerdict:
    verdict: Verdict
    k0_e: FgAbelianGroup | None = None
    k0_f: FgAbelianGroup | None = None
    det_e: int | None = None
    det_f: int | None = None
    pointed_iso: Tri | None = None
    reason: str = ""
    basis: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "k0_e": self.k0_e.to_json() if self.k0_e else None,
            "k0_f": self.k0_f.to_json() if self.k0_f else None,
            "det_e": self.det_e,
            "det_f": self.det_f,
            "pointed_iso": self.pointed_iso.value if self.pointed_iso else None,
            "reason": self.reason,
            "basis": self.basis,
        }


def compare(e: Graph, f: Graph) -> ClassificationVerdict:
    for name, g in (("E", e), ("F", f)):
        if g.omega:
            return ClassificationVerdict(Verdict.INAPPLICABLE, reason=f"{name} has infinite emitters")
        if not is_purely_infinite_simple(g):
            return ClassificationVerdict(
                Verdict.INAPPLICABLE, reason=f"L_K({name}) is not purely infinite simple")
    ke, kf = k0(e), k0(f)
    de, df = det_i_minus_a(e), det_i_minus_a(f)
    if not group_iso(ke, kf):
        return ClassificationVerdict(
            Verdict.NOT_MORITA, ke, kf, de, df, Tri.NO,
            reason="K_0 groups differ", basis=["K_0 is a Morita invariant"])
    pointed = pointed_iso_exists(ke, kf)
    if de != df:
        return ClassificationVerdict(
            Verdict.OPEN_KP, ke, kf, de, df, pointed,
            reason="K_0 groups agree but det(I - A) differ",
            basis=["algebraic Kirchberg-Phillips question"])
    if pointed is Tri.YES:
        return ClassificationVerdict(
            Verdict.ISOMORPHIC, ke, kf, de, df, pointed,
            reason="pointed K_0 and det(I - A) agree",
            basis=["restricted algebraic Kirchberg-Phillips theorem"])
    return ClassificationVerdict(
        Verdict.MORITA, ke, kf, de, df, pointed,
        reason="K_0 and det(I - A) agree; unit classes not matched",
        basis=["Franks' flow-equivalence classification"])


def singular_count(g: Graph) -> int:
    return len(vertex_classes(g).singular)
