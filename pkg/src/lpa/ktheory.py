"""Exact integer linear algebra and the Grothendieck group K_0.

Matrices are plain lists of rows of Python ints; nothing in here touches
floating point.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Sequence

from .graph import Graph, GraphError

IntMatrix = list[list[int]]


class KTheoryError(GraphError):
    pass


# -- matrix helpers ----------------------------------------------------------

def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    if a and len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def transpose(a: Sequence[Sequence[int]]) -> IntMatrix:
    return [list(r) for r in zip(*a)]


def format_matrix(a: Sequence[Sequence[int]]) -> str:
    return "\n".join(" ".join(str(x) for x in row) for row in a)


def incidence_matrix(g: Graph) -> IntMatrix:
    """A_E with A_E[i][j] = number of edges v_i -> v_j, in declared vertex order."""
    if g.omega:
        raise KTheoryError("K-theory matrix undefined for infinite emitters")
    n = len(g.vertices)
    a = [[0] * n for _ in range(n)]
    for e in g.edges:
        a[g.index[e.src]][g.index[e.dst]] += 1
    return a


def i_minus(a: Sequence[Sequence[int]]) -> IntMatrix:
    n = len(a)
    return [[int(i == j) - a[i][j] for j in range(n)] for i in range(n)]


# -- determinant -------------------------------------------------------------

def det(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) elimination with row pivoting."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


# -- Smith normal form -------------------------------------------------------

def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular U, V and diagonal D with U*m*V == D.

    The diagonal is nonnegative with d_1 | d_2 | ...; zeros come last.  The
    pivot is always an entry of least nonzero absolute value.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    d = [list(r) for r in m]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row_dst += q * row_src
        if q:
            d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
            u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):
        if q:
            for row in d:
                row[dst] += q * row[src]
            for row in v:
                row[dst] += q * row[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = d[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                return u, d, v
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = d[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // p))
                    dirty |= d[i][t] != 0
            for j in range(t + 1, cols):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // p))
                    dirty |= d[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i][j] % p),
                None,
            )
            if bad is not None:
                add_row(bad, t, 1)
                continue
            if p < 0:
                d[t] = [-x for x in d[t]]
                u[t] = [-x for x in u[t]]
            break
    return u, d, v


def diagonal(d: Sequence[Sequence[int]]) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


# -- finitely generated abelian groups ---------------------------------------

@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^free_rank + Z/t_1 + ... + Z/t_k with t_1 | ... | t_k, each t_i >= 2.

    ``unit_class`` lists torsion coordinates (reduced mod t_i) followed by free
    coordinates.
    """
    free_rank: int
    torsion: tuple[int, ...]
    unit_class: tuple[int, ...]

    def __post_init__(self):
        t = self.torsion
        if any(x < 2 for x in t) or any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"invalid invariant factors {t}")
        if len(self.unit_class) != len(t) + self.free_rank:
            raise ValueError("unit class has the wrong number of coordinates")
        if any(not 0 <= x < d for x, d in zip(self.unit_class, t)):
            raise ValueError("torsion coordinates must be reduced")

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        return prod(self.torsion) if self.is_finite else None

    @property
    def unit_is_zero(self) -> bool:
        return not any(self.unit_class)

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        group = " ⊕ ".join(parts) if parts else "0"
        if not self.unit_class:
            unit = "0"
        elif len(self.unit_class) == 1:
            unit = str(self.unit_class[0])
        else:
            unit = "(" + ", ".join(map(str, self.unit_class)) + ")"
        return f"{group}; [1] ↦ {unit}"

    def to_json(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "unit_class": list(self.unit_class),
            "text": str(self),
        }


def cokernel(m: Sequence[Sequence[int]], point: Sequence[int] | None = None) -> FgAbelianGroup:
    """Z^rows / m Z^cols, with ``point`` (a vector in Z^rows) carried along."""
    rows = len(m)
    u, d, _ = smith_normal_form(m)
    diag = diagonal(d) + [0] * (rows - min(rows, len(m[0]) if rows else 0))
    point = list(point) if point is not None else [0] * rows
    image = [sum(x * y for x, y in zip(row, point)) for row in u]
    torsion, t_coords, free_coords = [], [], []
    for di, c in zip(diag, image):
        if di == 1:
            continue
        if di == 0:
            free_coords.append(c)
        else:
            torsion.append(di)
            t_coords.append(_normalize_cyclic(c % di, di))
    free_coords = [abs(c) for c in free_coords]
    return FgAbelianGroup(len(free_coords), tuple(torsion), tuple(t_coords + free_coords))


def _normalize_cyclic(x: int, n: int) -> int:
    # x and gcd(x, n) generate the same subgroup, so some unit mod n maps one to the other
    return gcd(x, n) % n


def k0(g: Graph) -> FgAbelianGroup:
    """coker (I - A_E)^T with the image of (1, ..., 1).

    Column v of (I - A_E)^T is e_v - sum_{s(e)=v} e_{r(e)}, i.e. the relation
    a_v = sum a_{r(e)}.  Without sinks this is K_0(L_K(E)) with [1]; a sink
    column e_w kills a_w, so with sinks it is the flow invariant only and
    :func:`k0_regular` gives K_0.
    """
    a = incidence_matrix(g)
    return cokernel(transpose(i_minus(a)), [1] * len(a))


def k0_regular(g: Graph) -> FgAbelianGroup:
    """K_0(L_K(E)) with [1]: one relation per regular vertex, sinks left free."""
    a = incidence_matrix(g)
    n = len(a)
    cols = [i for i, v in enumerate(g.vertices) if g.out_edges[v]]
    m = [[int(i == j) - a[j][i] for j in cols] for i in range(n)]
    if not cols:
        m = [[0] for _ in range(n)]
    return cokernel(m, [1] * n)


def det_i_minus_a(g: Graph) -> int:
    return det(i_minus(incidence_matrix(g)))


def group_iso(a: FgAbelianGroup, b: FgAbelianGroup) -> bool:
    return a.free_rank == b.free_rank and a.torsion == b.torsion


class Tri(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


POINTED_ORDER_BOUND = 10_000


def _unit_group_generators(n: int) -> list[int]:
    if n <= 2:
        return []
    units = [x for x in range(2, n) if gcd(x, n) == 1]
    gens: list[int] = []
    span = {1}
    for x in units:
        if x in span:
            continue
        gens.append(x)
        frontier = list(span)
        while frontier:
            y = frontier.pop()
            for gg in gens:
                z = y * gg % n
                if z not in span:
                    span.add(z)
                    frontier.append(z)
        if len(span) == len(units) + 1:
            break
    return gens


def automorphism_generators(torsion: Sequence[int]):
    """Maps on coordinate vectors generating Aut(Z/t_1 + ... + Z/t_k)."""
    k = len(torsion)
    gens = []
    for i, n in enumerate(torsion):
        for c in _unit_group_generators(n):
            gens.append(("scale", i, c))
    for i in range(k):
        for j in range(k):
            if i != j:
                ti, tj = torsion[i], torsion[j]
                # g_i -> g_i + x g_j is a homomorphism iff t_j | t_i * x
                x = tj // gcd(ti, tj)
                gens.append(("shear", i, j, x))
    return gens


def apply_automorphism(gen, vec: Sequence[int], torsion: Sequence[int]) -> tuple[int, ...]:
    out = list(vec)
    if gen[0] == "scale":
        _, i, c = gen
        out[i] = out[i] * c % torsion[i]
    else:
        # the coordinate vector sum y_m g_m maps to ... + y_i (g_i + x g_j)
        _, i, j, x = gen
        out[j] = (out[j] + x * vec[i]) % torsion[j]
    return tuple(out)


def aut_orbit(vec: Sequence[int], torsion: Sequence[int]) -> set[tuple[int, ...]]:
    gens = automorphism_generators(torsion)
    start = tuple(x % t for x, t in zip(vec, torsion))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for gen in gens:
            y = apply_automorphism(gen, x, torsion)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def pointed_iso_exists(a: FgAbelianGroup, b: FgAbelianGroup,
                       bound: int = POINTED_ORDER_BOUND) -> Tri:
    """Is there an isomorphism a -> b carrying a.unit_class to b.unit_class?"""
    if not group_iso(a, b):
        return Tri.NO
    if a.unit_is_zero or b.unit_is_zero:
        return Tri.YES if a.unit_is_zero and b.unit_is_zero else Tri.NO
    if not a.is_finite or a.order > bound:
        return Tri.UNKNOWN
    orbit = aut_orbit(a.unit_class, a.torsion)
    return Tri.YES if tuple(b.unit_class) in orbit else Tri.NO


def rank(m: Sequence[Sequence[int]], characteristic: int = 0) -> int:
    """Rank over Q (characteristic 0) or over F_p."""
    if characteristic:
        p = characteristic
        rows = [[x % p for x in row] for row in m]
        inv = lambda x: pow(x, -1, p)  # noqa: E731
    else:
        rows = [[Fraction(x) for x in row] for row in m]
        inv = lambda x: 1 / x  # noqa: E731
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        k = inv(rows[r][c])
        rows[r] = [x * k for x in rows[r]]
        if characteristic:
            rows[r] = [x % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
                if characteristic:
                    rows[i] = [x % p for x in rows[i]]
        r += 1
    return r
