"""Exact arithmetic in L_K(E) for row-finite E, over Q or a prime field.

Elements are linear combinations of monomials alpha beta^* with
r(alpha) = r(beta).  A monomial is in normal form unless alpha and beta both
end in the designated edge gamma_u of some vertex u (the first edge u emits);
such a monomial is rewritten with (CK2),

    alpha' gamma gamma^* beta'^*  ->  alpha' beta'^* - sum_{e != gamma} alpha' e (beta' e)^*,

which strictly shortens the offending pair.  Products are computed directly on
monomials with (CK1).  A second, word-level rewriter (``normal_form``) reduces
arbitrary words in v, e, e^* and is used to cross-check the direct route.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .graph import Graph, GraphError, vertex_classes

Mono = tuple[tuple[str, ...], tuple[str, ...], str]  # (alpha, beta, r(alpha) = r(beta))


class SymbolicError(GraphError):
    pass


class Field:
    """Q when ``p == 0``, else F_p."""

    def __init__(self, p: int = 0):
        if p and (p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1))):
            raise SymbolicError(f"{p} is not prime")
        self.p = p

    def __call__(self, x) -> Fraction | int:
        if self.p:
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        return Fraction(x)

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(self.p)

    def __repr__(self) -> str:
        return f"F_{self.p}" if self.p else "Q"


class Lpa:
    """The algebra L_K(E) for a fixed row-finite graph and field."""

    def __init__(self, g: Graph, characteristic: int = 0):
        if g.omega:
            raise SymbolicError("symbolic arithmetic needs a row-finite graph")
        self.graph = g
        self.field = Field(characteristic)
        self.regular = vertex_classes(g).regular
        # designated edge of each regular vertex: the first it emits
        self.designated = {v: g.out_edges[v][0].id for v in g.vertices if g.out_edges[v]}
        self._reduce = lru_cache(maxsize=None)(self._reduce_mono)

    # -- basic pieces ---------------------------------------------------------

    def src(self, path: Sequence[str], v: str) -> str:
        return self.graph.edge_map[path[0]].src if path else v

    def element(self, terms: dict) -> "LpaElement":
        return LpaElement(self, {m: c for m, c in terms.items() if c})

    def zero(self) -> "LpaElement":
        return LpaElement(self, {})

    def vertex(self, v: str) -> "LpaElement":
        self.graph.check_vertex(v)
        return LpaElement(self, {((), (), v): self.field(1)})

    def one(self) -> "LpaElement":
        return LpaElement(self, {((), (), v): self.field(1) for v in self.graph.vertices})

    def edge(self, e: str) -> "LpaElement":
        ed = self.graph.edge(e)
        return LpaElement(self, {((e,), (), ed.dst): self.field(1)})

    def ghost(self, e: str) -> "LpaElement":
        ed = self.graph.edge(e)
        return LpaElement(self, {((), (e,), ed.dst): self.field(1)})

    def path(self, edges: Sequence[str], base: str | None = None) -> "LpaElement":
        edges = tuple(edges)
        if not edges:
            return self.vertex(base)
        es = [self.graph.edge(x) for x in edges]
        if any(a.dst != b.src for a, b in zip(es, es[1:])):
            raise SymbolicError("edges do not form a path")
        return LpaElement(self, {(edges, (), es[-1].dst): self.field(1)})

    def scalar(self, c) -> "LpaElement":
        return self.one() * self.field(c)

    def monomial(self, alpha: Sequence[str], beta: Sequence[str], v: str | None = None) -> "LpaElement":
        """alpha beta^* as an element (normalized); v is needed only if both are trivial."""
        alpha, beta = tuple(alpha), tuple(beta)
        ranges = {self.graph.edge(p[-1]).dst for p in (alpha, beta) if p}
        if v is not None:
            ranges.add(v)
        if len(ranges) != 1:
            raise SymbolicError("alpha and beta must share their range")
        (r,) = ranges
        return self.path(alpha, r) * self.path(beta, r).star()

    # -- normal forms ---------------------------------------------------------

    def _reduce_mono(self, m: Mono) -> tuple[tuple[Mono, int], ...]:
        alpha, beta, v = m
        if alpha and beta and alpha[-1] == beta[-1]:
            gamma = alpha[-1]
            u = self.graph.edge_map[gamma].src
            if self.designated.get(u) == gamma:
                out: dict[Mono, int] = {}
                for mm, c in self._reduce((alpha[:-1], beta[:-1], u)):
                    out[mm] = out.get(mm, 0) + c
                for e in self.graph.out_edges[u]:
                    if e.id != gamma:
                        mm = (alpha[:-1] + (e.id,), beta[:-1] + (e.id,), e.dst)
                        out[mm] = out.get(mm, 0) - 1
                return tuple((mm, c) for mm, c in out.items() if c)
        return ((m, 1),)

    def is_normal(self, m: Mono) -> bool:
        return self._reduce(m) == ((m, 1),)

    def mono_product(self, m1: Mono, m2: Mono) -> Mono | None:
        """(alpha1 beta1^*)(alpha2 beta2^*) via (CK1), before (CK2) reduction."""
        a1, b1, v1 = m1
        a2, b2, v2 = m2
        if self.src(b1, v1) != self.src(a2, v2):
            return None
        if a2[: len(b1)] == b1:
            return (a1 + a2[len(b1):], b2, v2)
        if b1[: len(a2)] == a2:
            return (a1, b2 + b1[len(a2):], v1)
        return None

    def multiply(self, x: "LpaElement", y: "LpaElement") -> "LpaElement":
        self._check(x)
        self._check(y)
        out: dict[Mono, object] = {}
        for m1, c1 in x.terms.items():
            for m2, c2 in y.terms.items():
                m = self.mono_product(m1, m2)
                if m is None:
                    continue
                c = c1 * c2
                for mm, k in self._reduce(m):
                    out[mm] = self.field(out.get(mm, 0) + k * c)
        return self.element(out)

    def _check(self, x: "LpaElement") -> None:
        if x.alg is not self and (x.alg.graph != self.graph or x.alg.field != self.field):
            raise SymbolicError("elements live in different algebras")

    def normal_form(self, raw: Iterable[tuple[object, Sequence[tuple[str, str]]]],
                    rng: random.Random | None = None) -> "LpaElement":
        """Reduce a combination of words by rewriting adjacent letters.

        A word is a sequence of letters ("v", name), ("e", name) or ("g", name),
        the last meaning e^*.  With ``rng`` the redex to rewrite is picked at
        random instead of leftmost, to probe confluence.
        """
        return _WordRewriter(self).run(raw, rng)

    # -- parsing and printing ---------------------------------------------------

    def parse(self, text: str) -> "LpaElement":
        return self.element_from_words(self.parse_words(text))

    def parse_words(self, text: str) -> list:
        """Words with resolved letters, usable with :meth:`normal_form`."""
        return _resolve(self, parse_words(text, self.field))

    def element_from_words(self, raw) -> "LpaElement":
        total = self.zero()
        for c, word in raw:
            x = self.scalar(c)
            for kind, name in word:
                if kind == "v":
                    x = x * self.vertex(name)
                elif kind == "e":
                    x = x * self.edge(name)
                else:
                    x = x * self.ghost(name)
            total = total + x
        return total

    def classify_name(self, name: str) -> str:
        if name in self.graph.index:
            return "v"
        if name in self.graph.edge_map:
            return "e"
        raise SymbolicError(f"unknown vertex or edge {name!r}")


def mono_key(m: Mono) -> tuple:
    return (len(m[0]) + len(m[1]), m[0], m[1], m[2])


def format_mono(m: Mono) -> str:
    alpha, beta, v = m
    parts = list(alpha) + [f"{e}*" for e in reversed(beta)]
    return ".".join(parts) if parts else v


class LpaElement:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: Lpa, terms: dict):
        self.alg = alg
        self.terms = terms

    # arithmetic
    def __add__(self, other: "LpaElement") -> "LpaElement":
        self.alg._check(other)
        f = self.alg.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = f(out.get(m, 0) + c)
        return self.alg.element(out)

    def __neg__(self) -> "LpaElement":
        f = self.alg.field
        return self.alg.element({m: f(-c) for m, c in self.terms.items()})

    def __sub__(self, other: "LpaElement") -> "LpaElement":
        return self + (-other)

    def __mul__(self, other) -> "LpaElement":
        if isinstance(other, LpaElement):
            return self.alg.multiply(self, other)
        f = self.alg.field
        k = f(other)
        return self.alg.element({m: f(c * k) for m, c in self.terms.items()})

    def __rmul__(self, other) -> "LpaElement":
        return self * other

    def __eq__(self, other) -> bool:
        if not isinstance(other, LpaElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def star(self) -> "LpaElement":
        return self.alg.element({(b, a, v): c for (a, b, v), c in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for m in sorted(self.terms, key=mono_key):
            c = self.terms[m]
            if not self.alg.field.p and c < 0:
                sign, c = "-", -c
            else:
                sign = "+"
            body = format_mono(m)
            term = body if c == 1 else f"{c}*{body}"
            out.append((sign, term))
        first_sign, first = out[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, term in out[1:]:
            s += f" {sign} {term}"
        return s

    __repr__ = __str__


# -- word-level rewriting -------------------------------------------------------

class _WordRewriter:
    def __init__(self, alg: Lpa):
        self.alg = alg
        self.g = alg.graph

    def _pair(self, x, y):
        """Rewrite the adjacent letters x y: None (no redex) or a list of (coef, letters)."""
        g = self.g
        kx, nx = x
        ky, ny = y
        em = g.edge_map
        if kx == "v" and ky == "v":
            return [(1, [x])] if nx == ny else []
        if kx == "v":
            ok = em[ny].src == nx if ky == "e" else em[ny].dst == nx
            return [(1, [y])] if ok else []
        if ky == "v":
            ok = em[nx].dst == ny if kx == "e" else em[nx].src == ny
            return [(1, [x])] if ok else []
        if kx == "e" and ky == "e":
            return None if em[nx].dst == em[ny].src else []
        if kx == "g" and ky == "g":
            # e^* f^* = (f e)^*
            return None if em[ny].dst == em[nx].src else []
        if kx == "g" and ky == "e":
            return [(1, [("v", em[nx].dst)])] if nx == ny else []
        # e f^*
        if em[nx].dst != em[ny].dst:
            return []
        u = em[nx].src
        if nx == ny and self.alg.designated.get(u) == nx:
            out = [(1, [("v", u)])]
            out += [(-1, [("e", e.id), ("g", e.id)]) for e in g.out_edges[u] if e.id != nx]
            return out
        return None

    def _redexes(self, word):
        out = []
        for i in range(len(word) - 1):
            r = self._pair(word[i], word[i + 1])
            if r is not None:
                out.append((i, r))
        return out

    def run(self, raw, rng: random.Random | None) -> LpaElement:
        f = self.alg.field
        todo: dict[tuple, object] = {}
        for c, word in raw:
            # the empty word is the unit, i.e. the sum of all vertices
            ws = [tuple(word)] if word else [(("v", v),) for v in self.g.vertices]
            for w in ws:
                todo[w] = f(todo.get(w, 0) + f(c))
        done: dict[Mono, object] = {}
        while todo:
            word, c = todo.popitem()
            if not c:
                continue
            reds = self._redexes(word)
            if not reds:
                m = self._to_mono(word)
                done[m] = f(done.get(m, 0) + c)
                continue
            i, rep = rng.choice(reds) if rng else reds[0]
            for k, letters in rep:
                w2 = word[:i] + tuple(letters) + word[i + 2:]
                todo[w2] = f(todo.get(w2, 0) + c * k)
        return self.alg.element(done)

    def _to_mono(self, word) -> Mono:
        if len(word) == 1 and word[0][0] == "v":
            return ((), (), word[0][1])
        alpha = tuple(n for k, n in word if k == "e")
        ghosts = [n for k, n in word if k == "g"]
        beta = tuple(reversed(ghosts))
        v = self.g.edge_map[alpha[-1]].dst if alpha else self.g.edge_map[beta[-1]].dst
        return (alpha, beta, v)


# -- parsing ----------------------------------------------------------------------

_COEF = re.compile(r"^(\d+)(?:/(\d+))?$")


def _split_terms(text: str) -> list[tuple[int, str]]:
    """Split on '+' and on '-' at the start of a term or after whitespace."""
    terms: list[tuple[int, str]] = []
    sign, buf = 1, ""
    i = 0
    text = text.strip()
    while i < len(text):
        ch = text[i]
        at_start = not buf.strip()
        if ch == "+" or (ch == "-" and (at_start or text[i - 1].isspace())):
            if buf.strip():
                terms.append((sign, buf.strip()))
                sign = 1
            if ch == "-":
                sign = -sign
            buf = ""
        else:
            buf += ch
        i += 1
    if buf.strip():
        terms.append((sign, buf.strip()))
    elif text and not terms:
        raise SymbolicError(f"cannot parse {text!r}")
    return terms


def parse_words(text: str, field: Field | None = None, names=None):
    """``3*e1.e2.f* - 1/2*v`` -> [(3, [e1, e2, f*]), (-1/2, [v])].

    Letters come back as ("?", name) or ("g", name); :meth:`Lpa.parse_words`
    resolves the names against a graph.
    """
    field = field or Field(0)
    out = []
    for sign, term in _split_terms(text):
        coef = Fraction(sign)
        body = term
        head, star, rest = term.partition("*")
        m = _COEF.match(head.strip())
        if m and star and rest.strip():
            coef *= Fraction(int(m.group(1)), int(m.group(2) or 1))
            body = rest
        elif _COEF.match(term.strip()):
            m = _COEF.match(term.strip())
            coef *= Fraction(int(m.group(1)), int(m.group(2) or 1))
            body = ""
        letters = []
        for factor in (body.split(".") if body.strip() else []):
            factor = factor.strip()
            if not factor:
                raise SymbolicError(f"empty factor in {term!r}")
            if factor.endswith("*"):
                letters.append(("g", factor[:-1].strip()))
            else:
                letters.append(("?", factor))
        out.append((field(coef), letters))
    return out


def _resolve(alg: Lpa, raw):
    out = []
    for c, letters in raw:
        word = []
        for k, n in letters:
            if k == "g":
                if n not in alg.graph.edge_map:
                    raise SymbolicError(f"{n!r} is not an edge")
                word.append(("g", n))
            else:
                word.append((alg.classify_name(n), n))
        out.append((c, word))
    return out


# -- paths and bases ------------------------------------------------------------

def paths(g: Graph, max_length: int) -> list[tuple[tuple[str, ...], str, str]]:
    """(edges, source, range) for every path of length <= max_length."""
    out = [((), v, v) for v in g.vertices]
    frontier = list(out)
    for _ in range(max_length):
        nxt = []
        for es, s, r in frontier:
            for e in g.out_edges[r]:
                nxt.append((es + (e.id,), s, e.dst))
        out += nxt
        frontier = nxt
    return out


def normal_basis(alg: Lpa, max_length: int) -> list[Mono]:
    """Normal monomials alpha beta^* with |alpha|, |beta| <= max_length."""
    by_range: dict[str, list[tuple[str, ...]]] = {}
    for es, _s, r in paths(alg.graph, max_length):
        by_range.setdefault(r, []).append(es)
    out = []
    for v, ps in by_range.items():
        for a in ps:
            for b in ps:
                m = (a, b, v)
                if alg.is_normal(m):
                    out.append(m)
    return sorted(out, key=mono_key)


# -- matrices -------------------------------------------------------------------------

@dataclass
class LpaMatrix:
    alg: Lpa
    rows: list[list[LpaElement]]

    def __post_init__(self):
        n = len(self.rows)
        if n == 0 or any(len(r) != n for r in self.rows):
            raise SymbolicError("matrices must be square and nonempty")

    @property
    def size(self) -> int:
        return len(self.rows)

    @staticmethod
    def identity(alg: Lpa, n: int) -> "LpaMatrix":
        return LpaMatrix(alg, [[alg.one() if i == j else alg.zero() for j in range(n)]
                               for i in range(n)])

    @staticmethod
    def zeros(alg: Lpa, n: int) -> "LpaMatrix":
        return LpaMatrix(alg, [[alg.zero() for _ in range(n)] for _ in range(n)])

    def __mul__(self, other: "LpaMatrix") -> "LpaMatrix":
        return mat_multiply(self, other)

    def __add__(self, other: "LpaMatrix") -> "LpaMatrix":
        if other.size != self.size:
            raise SymbolicError("dimension mismatch")
        return LpaMatrix(self.alg, [[a + b for a, b in zip(r, s)]
                                    for r, s in zip(self.rows, other.rows)])

    def __eq__(self, other) -> bool:
        return isinstance(other, LpaMatrix) and self.rows == other.rows

    def star(self) -> "LpaMatrix":
        """Conjugate transpose: entries starred and transposed."""
        n = self.size
        return LpaMatrix(self.alg, [[self.rows[j][i].star() for j in range(n)] for i in range(n)])

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"


def mat_multiply(a: LpaMatrix, b: LpaMatrix) -> LpaMatrix:
    if a.size != b.size:
        raise SymbolicError("dimension mismatch")
    n = a.size
    alg = a.alg
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = alg.zero()
            for k in range(n):
                x, y = a.rows[i][k], b.rows[k][j]
                if x.terms and y.terms:
                    acc = acc + x * y
            row.append(acc)
        rows.append(row)
    return LpaMatrix(alg, rows)


def parse_matrix(alg: Lpa, text: str) -> LpaMatrix:
    """``[[e1, 0, 0], [e2, 0, 0], [e3, 0, 0]]``; ``1`` is the unit."""
    s = text.strip()
    if not (s.startswith("[[") and s.endswith("]]")):
        raise SymbolicError(f"matrix must look like [[a, b], [c, d]]: {text!r}")
    rows = [r.strip().strip("[]") for r in s[1:-1].split("],")]
    out = []
    for r in rows:
        out.append([alg.parse(x.strip()) if x.strip() != "0" else alg.zero()
                    for x in r.split(",")])
    return LpaMatrix(alg, out)


@dataclass
class DaggerReport:
    n: int
    size: int
    checks: int
    passed: int
    failure: str | None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_json(self) -> dict:
        return {"n": self.n, "size": self.size, "checks": self.checks,
                "passed": self.passed, "ok": self.ok, "failure": self.failure}

    def __str__(self) -> str:
        if self.ok:
            return f"all {self.checks} relation checks pass"
        return f"{self.passed}/{self.checks} relation checks pass; first failure: {self.failure}"


def verify_dagger(xs: Sequence[LpaMatrix], ys: Sequence[LpaMatrix]) -> DaggerReport:
    """Check y_i x_j = delta_ij 1 for all i, j and sum_i x_i y_i = 1."""
    if len(xs) != len(ys) or not xs:
        raise SymbolicError("need two nonempty lists of the same length")
    size = xs[0].size
    if any(m.size != size for m in list(xs) + list(ys)):
        raise SymbolicError("dimension mismatch")
    alg = xs[0].alg
    ident = LpaMatrix.identity(alg, size)
    zero = LpaMatrix.zeros(alg, size)
    n = len(xs)
    passed, failure = 0, None
    for i in range(n):
        for j in range(n):
            got = ys[i] * xs[j]
            want = ident if i == j else zero
            if got == want:
                passed += 1
            elif failure is None:
                failure = f"Y{i + 1}*X{j + 1} = {got}"
    total = zero
    for x, y in zip(xs, ys):
        total = total + x * y
    if total == ident:
        passed += 1
    elif failure is None:
        failure = f"sum X_i*Y_i = {total}"
    return DaggerReport(n, size, n * n + 1, passed, failure)


@dataclass
class MatrixFixture:
    """Matrices X_1..X_n, Y_1..Y_n over L(E) read from a fixture file.

    ``xs``/``ys`` are the lists in the x- and y-roles of (dagger); when the
    substitution sends the x-letters to ghost edges the roles are exchanged,
    since then X_i Y_j = delta_ij 1 is the relation e^* e = delta r(e).
    """
    graph_name: str
    alg: Lpa
    X: list[LpaMatrix]
    Y: list[LpaMatrix]
    swapped: bool

    @property
    def xs(self) -> list[LpaMatrix]:
        return self.Y if self.swapped else self.X

    @property
    def ys(self) -> list[LpaMatrix]:
        return self.X if self.swapped else self.Y


def load_fixture(text: str, characteristic: int = 0) -> MatrixFixture:
    """Fixture format: ``graph <name>``, optional ``let x = e*`` letter
    substitutions (x3 becomes e3*), then ``X1 = [[...]]`` ... ``Yn = [[...]]``."""
    from .zoo import by_name

    graph_name = None
    subst: dict[str, str] = {}
    mats: dict[str, str] = {}
    for raw in text.splitlines():
        line = re.sub(r"(^|\s)#.*", "", raw).strip()
        if not line:
            continue
        if line.startswith("graph "):
            graph_name = line.split(None, 1)[1].strip()
            continue
        m = re.fullmatch(r"let\s+([A-Za-z])\s*=\s*([A-Za-z])(\*?)", line)
        if m:
            subst[m.group(1)] = m.group(2) + "{}" + m.group(3)
            continue
        name, eq, body = line.partition("=")
        if not eq:
            raise SymbolicError(f"cannot parse fixture line {raw!r}")
        mats[name.strip()] = body.strip()
    if graph_name is None:
        raise SymbolicError("fixture lacks a 'graph' line")
    if subst:
        letters = "".join(subst)
        pat = re.compile(rf"\b([{letters}])(\d+)\b")
        mats = {k: pat.sub(lambda mt: subst[mt.group(1)].format(mt.group(2)), v)
                for k, v in mats.items()}
    alg = Lpa(by_name(graph_name), characteristic)
    n = sum(1 for k in mats if k.startswith("X"))
    try:
        xs = [parse_matrix(alg, mats[f"X{i}"]) for i in range(1, n + 1)]
        ys = [parse_matrix(alg, mats[f"Y{i}"]) for i in range(1, n + 1)]
    except KeyError as exc:
        raise SymbolicError(f"fixture is missing matrix {exc.args[0]}") from None
    swapped = subst.get("x", "e{}").endswith("*")
    return MatrixFixture(graph_name, alg, xs, ys, swapped)


def fixture_text(name: str) -> str:
    from importlib.resources import files

    return files("lpa").joinpath("data").joinpath(f"{name}.txt").read_text()


FIXTURES = ("set1_d3_n5", "set2_d3_n5")
