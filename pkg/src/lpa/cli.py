"""Command-line front end.

Every command builds a JSON-able report first; the text output is rendered
from that report.  Graph arguments are a file path, ``-`` for stdin, or
``@NAME`` for a built-in graph (``@R4``, ``@E2``, ``@T``, ``@A3-splice@v3``...).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from . import classify as cl
from . import graph as gc
from . import ktheory as kt
from . import monoid as mn
from . import moves as mv
from . import numtheory as nt
from . import symbolic as sy
from .zoo import by_name


# -- input helpers -------------------------------------------------------------

def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    return Path(arg).read_text()


def load_graph(arg: str) -> gc.Graph:
    if arg.startswith("@"):
        return by_name(arg[1:])
    return gc.parse_graph(_read(arg))


def _names(g: gc.Graph, xs) -> list[str]:
    return sorted(xs, key=g.index.__getitem__)


def _set(xs: list[str]) -> str:
    return "{" + ", ".join(xs) + "}"


def _b(x: bool) -> str:
    return "true" if x else "false"


def _count(n: int, one: str, many: str) -> str:
    return f"{n} {one if n == 1 else many}"


# -- analyze -------------------------------------------------------------------

def _structure(n_list: list[int]) -> str:
    return "L ≅ " + " ⊕ ".join(f"M_{n}(K)" for n in n_list)


def cmd_analyze(args) -> dict:
    g = load_graph(args.graph)
    vc = gc.vertex_classes(g)
    rep: dict = {
        "command": "analyze",
        "graph": g.summary(),
        "vertex_classes": {
            "sinks": _names(g, vc.sinks), "sources": _names(g, vc.sources),
            "regular": _names(g, vc.regular),
            "infinite_emitters": _names(g, vc.infinite_emitters),
        },
        "singular_count": cl.singular_count(g),
        "conditions": {
            "L": gc.condition_L(g), "K": gc.condition_K(g),
            "cofinal": gc.is_cofinal(g), "downward_directed": gc.is_downward_directed(g),
        },
        "cycles": [list(c.edges) for c in gc.cycles(g)],
    }
    lattice = gc.enumerate_hereditary_saturated(g)
    rep["hereditary_saturated"] = [_names(g, h) for h in lattice]
    bat = cl.predicate_battery(g)
    rep["battery"] = bat.to_json()
    dic = cl.dichotomy(g)
    rep["dichotomy"] = str(dic)
    if g.is_row_finite and not gc.has_cycle(g):
        rep["structure"] = _structure(cl.acyclic_structure(g))
    elif dic.kind == "PIS":
        rep["structure"] = "purely infinite simple"
    else:
        rep["structure"] = None
    rep["gk_dimension"] = str(cl.gk_dimension(g)) if g.is_row_finite else None
    if g.is_row_finite:
        cc = cl.chain_conditions(g)
        rep["chain_conditions"] = {"dcc": cc.dcc, "acc": cc.acc}
    else:
        rep["chain_conditions"] = None
    rep["center"] = cl.center_description(g).value
    pairs = cl.graded_ideals(g)
    rep["graded_ideals"] = [p.to_json(g) for p in pairs]
    if g.is_row_finite:
        rep["ideal_families"] = [
            {"H": _names(g, f.H), "cycles": [list(c.edges) for c in f.cycles]}
            for f in cl.ideal_families(g)
        ]
        rep["k0"] = kt.k0_regular(g).to_json()
        rep["coker"] = kt.k0(g).to_json()
        rep["det"] = kt.det_i_minus_a(g)
    else:
        rep["ideal_families"] = None
    rep["lie_bracket"] = {"char0": cl.lie_bracket_simple(g, 0).value,
                          "char2": cl.lie_bracket_simple(g, 2).value}
    rep["basis"] = {
        "simple": "cofinal (or only trivial graded-ideal pairs) and Condition (L)",
        "purely_infinite_simple": "simple and contains a cycle",
        "prime": "downward directed",
        "primitive": "downward directed and Condition (L)",
        "exchange": "Condition (K)",
        "dcc": "Condition (K)",
        "gk_dimension": "max(2 d1 - 1, 2 d2) over chains of disjoint cycles",
        "structure": "path counts into sinks (finite acyclic graphs)",
    }
    return rep


def render_analyze(r: dict) -> str:
    g = r["graph"]
    vc = r["vertex_classes"]
    lines = [
        f"graph: {_count(g['vertices'], 'vertex', 'vertices')}, {_count(g['edges'], 'edge', 'edges')}"
        + (f", omega bundles {g['omega_bundles']}" if g["omega_bundles"] else ""),
        f"sinks: {_set(vc['sinks'])}; sources: {_set(vc['sources'])}; "
        f"regular: {_set(vc['regular'])}; infinite emitters: {_set(vc['infinite_emitters'])}",
        f"singular vertices: {r['singular_count']}",
        f"cycles: {len(r['cycles'])}" + (
            " (" + ", ".join(".".join(c) for c in r["cycles"]) + ")" if r["cycles"] else ""),
        f"condition (L): {_b(r['conditions']['L'])}",
        f"condition (K): {_b(r['conditions']['K'])}",
        f"cofinal: {_b(r['conditions']['cofinal'])}",
        f"downward directed: {_b(r['conditions']['downward_directed'])}",
        f"hereditary saturated subsets ({len(r['hereditary_saturated'])}): "
        + ", ".join(_set(h) for h in r["hereditary_saturated"]),
        f"prime: {_b(r['battery']['prime'])}",
        f"primitive: {_b(r['battery']['primitive'])}",
        f"exchange: {_b(r['battery']['exchange'])}",
        f"simple: {_b(r['battery']['simple'])}",
        f"purely infinite simple: {_b(r['battery']['pis'])}",
        f"dichotomy: {r['dichotomy']}",
    ]
    if r["structure"]:
        lines.append(f"structure: {r['structure']}")
    if r["gk_dimension"]:
        lines.append(f"GK dimension: {r['gk_dimension']}")
    if r["chain_conditions"]:
        lines.append(f"chain conditions: dcc {_b(r['chain_conditions']['dcc'])}, "
                     f"acc {_b(r['chain_conditions']['acc'])}")
    lines.append(f"center: {r['center']}")
    lines.append(f"graded ideals: {len(r['graded_ideals'])}")
    for p in r["graded_ideals"]:
        lines.append(f"  H = {_set(p['H'])}, S = {_set(p['S'])}")
    if r["ideal_families"] is not None:
        fams = [f for f in r["ideal_families"] if f["cycles"]]
        lines.append(f"non-graded ideal families: {len(fams)}")
        for f in fams:
            cs = ", ".join(".".join(c) for c in f["cycles"])
            lines.append(f"  H = {_set(f['H'])}: C_H = {{{cs}}}")
    if "k0" in r:
        lines.append(f"K_0: {r['k0']['text']}")
        lines.append(f"coker(I - A)^T: {r['coker']['text']}; det(I - A) = {r['det']}")
    lines.append(f"Lie bracket algebra: {r['lie_bracket']['char0']} (char 0), "
                 f"{r['lie_bracket']['char2']} (char 2)")
    return "\n".join(lines)


# -- k0 / compare ----------------------------------------------------------------

def cmd_k0(args) -> dict:
    g = load_graph(args.graph)
    a = kt.incidence_matrix(g)
    u, d, v = kt.smith_normal_form(kt.transpose(kt.i_minus(a)))
    grp = kt.k0(g)
    return {
        "command": "k0", "graph": g.summary(), "vertices": list(g.vertices),
        "incidence_matrix": a, "smith_diagonal": kt.diagonal(d),
        "k0": grp.to_json(), "k0_regular": kt.k0_regular(g).to_json(),
        "det": kt.det_i_minus_a(g),
    }


def render_k0(r: dict) -> str:
    return "\n".join([
        "A_E =",
        *("  " + " ".join(str(x) for x in row) for row in r["incidence_matrix"]),
        f"Smith diagonal of (I - A_E)^T: {r['smith_diagonal']}",
        f"{r['k0']['text']}; det = {r['det']}",
    ] + ([f"with sinks kept free (K_0 of the algebra): {r['k0_regular']['text']}"]
         if r["k0_regular"] != r["k0"] else []))


def cmd_compare(args) -> dict:
    e, f = load_graph(args.e), load_graph(args.f)
    v = cl.compare(e, f)
    return {"command": "compare", **v.to_json()}


def render_compare(r: dict) -> str:
    lines = []
    if r["det_e"] is not None:
        lines.append(f"verdict: {r['verdict']}; det {r['det_e']} vs {r['det_f']}")
        lines.append(f"K_0(E): {r['k0_e']['text']}")
        lines.append(f"K_0(F): {r['k0_f']['text']}")
        lines.append(f"pointed isomorphism: {r['pointed_iso']}")
    else:
        lines.append(f"verdict: {r['verdict']}")
    lines.append(f"reason: {r['reason']}")
    if r["basis"]:
        lines.append(f"basis: {'; '.join(r['basis'])}")
    return "\n".join(lines)


# -- moves -------------------------------------------------------------------------

def cmd_move_apply(args) -> dict:
    g = load_graph(args.graph)
    script = args.script if args.inline else _read(args.script)
    specs = mv.parse_script(script)
    steps = []
    for m in specs:
        h = mv.apply_move(g, m)
        inv = mv.invariants_preserved(g, m, h)
        steps.append(inv.to_json())
        g = h
    return {"command": "move apply", "steps": steps,
            "all_preserved": all(s["preserved"] for s in steps),
            "result": g.to_text()}


def render_move_apply(r: dict) -> str:
    lines = []
    for s in r["steps"]:
        lines.append(f"{s['move']}: coker {s['coker_before']} -> {s['coker_after']}, "
                     f"det {s['det_before']} -> {s['det_after']}, "
                     f"{'preserved' if s['preserved'] else 'NOT preserved'}")
    lines.append("result:")
    lines.append(r["result"].rstrip())
    return "\n".join(lines)


def cmd_move_search(args) -> dict:
    e, f = load_graph(args.e), load_graph(args.f)
    res = mv.move_search(e, f, args.depth)
    return {"command": "move search", "depth": args.depth, **res.to_json()}


def render_move_search(r: dict) -> str:
    if r["status"] == "SequenceFound":
        body = ["SequenceFound"] + [f"  {m}" for m in r["moves"]]
        if not r["moves"]:
            body.append("  (graphs already isomorphic)")
        return "\n".join(body)
    return f"NotFoundWithinDepth: {r['reason']}"


# -- monoid ------------------------------------------------------------------------

def cmd_monoid(args) -> dict:
    g = load_graph(args.graph)
    p = mn.presentation(g)
    rep: dict = {
        "command": "monoid",
        "generators": list(p.generators),
        "relations": [{"vertex": v, "rhs": p.format(rhs)} for v, rhs in p.relations],
        "queries": [],
    }
    for q in args.query or []:
        lhs, eq, rhs = q.partition("=")
        if not eq:
            raise mn.MonoidError(f"query must look like 'x = y': {q!r}")
        x, y = p.parse(lhs), p.parse(rhs)
        bound = args.bound if args.bound is not None else max(4 * max(sum(x), sum(y)), 8)
        res = mn.equal_bounded(p, x, y, bound)
        rep["queries"].append({"query": f"{p.format(x)} = {p.format(y)}",
                               "bound": bound, "result": res.value})
    if args.group_check:
        bound = args.bound if args.bound is not None else 12
        rep["group_check"] = mn.group_without_zero_check(g, bound).to_json()
    if args.probe:
        bound = args.bound if args.bound is not None else 8
        rep["probes"] = [
            mn.separativity_probe(p, args.samples, bound, seed=args.seed).to_json(),
            mn.refinement_probe(p, args.samples, bound, seed=args.seed).to_json(),
        ]
    return rep


def render_monoid(r: dict) -> str:
    lines = [f"generators: {', '.join(r['generators'])}"]
    lines.append("relations:" if r["relations"] else "relations: none (free monoid)")
    for rel in r["relations"]:
        lines.append(f"  {rel['vertex']} = {rel['rhs']}")
    for q in r["queries"]:
        lines.append(f"{q['query']}: {q['result']} (bound {q['bound']})")
    if "group_check" in r:
        gc_ = r["group_check"]
        status = "ok" if gc_["ok"] else f"FAILED ({gc_['problem']})"
        lines.append(f"nonzero classes: {gc_['order']} (|K_0| = {gc_['expected_order']}), "
                     f"unit order {gc_['unit_order']}: {status}")
        lines.append("  representatives: " + ", ".join(gc_["representatives"]))
    for pr in r.get("probes", []):
        lines.append(f"{pr['kind']} probe: {pr['checked']} checked, "
                     f"{len(pr['violations'])} violations, {pr['inconclusive']} inconclusive")
    return "\n".join(lines)


# -- verify-dagger / partition ---------------------------------------------------------

def cmd_verify_dagger(args) -> dict:
    name = args.fixture
    if name in sy.FIXTURES:
        text = sy.fixture_text(name)
    elif name.startswith("@") and name[1:] in sy.FIXTURES:
        text = sy.fixture_text(name[1:])
    else:
        text = _read(name)
    fx = sy.load_fixture(text, args.char)
    rep = sy.verify_dagger(fx.xs, fx.ys)
    return {"command": "verify-dagger", "fixture": name, "graph": fx.graph_name,
            "characteristic": args.char, "roles_swapped": fx.swapped,
            **rep.to_json(), "summary": str(rep)}


def render_verify_dagger(r: dict) -> str:
    return f"{r['fixture']} over L({r['graph']}): {r['summary']}"


def cmd_partition(args) -> dict:
    p = nt.partition(args.d, args.r)
    rep = {"command": "partition", **p.to_json(),
           "i_r_inverse_check": nt.i_r_inverse_check(args.d, args.r)}
    if args.extend is not None:
        s1, s2 = nt.extend_partition(args.d, args.extend, args.r)
        rep["extension"] = {"n": args.extend, "S1": list(s1), "S2": list(s2)}
    return rep


def render_partition(r: dict) -> str:
    j = lambda xs: ",".join(map(str, xs))  # noqa: E731
    lines = [
        f"d = {r['d']}, r = {r['r']}, s = {r['s']}, i_r = {r['i_r']}",
        f"Sigma  = {j(r['sigma'])}",
        f"Sigma1 = {j(r['sigma1'])}",
        f"Sigma2 = {j(r['sigma2'])}",
        f"S1 = {{{j(r['S1'])}}}, S2 = {{{j(r['S2'])}}}",
        f"i_r * (r - 1) = 1 mod d: {_b(r['i_r_inverse_check'])}",
    ]
    if "extension" in r:
        x = r["extension"]
        lines.append(f"extension to n = {x['n']}: {{{j(x['S1'])}}} ⊔ {{{j(x['S2'])}}}")
    return "\n".join(lines)


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpa", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit the JSON report")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, render, **kw) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kw)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                       help="emit the JSON report")
        p.set_defaults(fn=fn, render=render)
        return p

    p = add("analyze", cmd_analyze, render_analyze, help="full structural report for one graph")
    p.add_argument("graph")
    p = add("k0", cmd_k0, render_k0, help="K_0 with the unit class, and det(I - A)")
    p.add_argument("graph")
    p = add("compare", cmd_compare, render_compare, help="classification verdict for two graphs")
    p.add_argument("e")
    p.add_argument("f")

    p_move = sub.add_parser("move", help="flow-equivalence moves")
    msub = p_move.add_subparsers(dest="move_command", required=True)
    p = msub.add_parser("apply", help="apply a move script and check invariants")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    p.add_argument("graph")
    p.add_argument("script", help="script file, '-' for stdin, or the script itself with --inline")
    p.add_argument("--inline", action="store_true", help="treat SCRIPT as the script text")
    p.set_defaults(fn=cmd_move_apply, render=render_move_apply)
    p = msub.add_parser("search", help="bounded search for a move sequence")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    p.add_argument("e")
    p.add_argument("f")
    p.add_argument("--depth", type=int, default=2)
    p.set_defaults(fn=cmd_move_search, render=render_move_search)

    p = add("monoid", cmd_monoid, render_monoid, help="graph monoid presentation and queries")
    p.add_argument("graph")
    p.add_argument("--query", "-q", action="append", help="equality query such as 'v = 3*v'")
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--group-check", action="store_true",
                   help="check that the nonzero classes form a group matching K_0")
    p.add_argument("--probe", action="store_true", help="run separativity/refinement probes")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = add("verify-dagger", cmd_verify_dagger, render_verify_dagger,
            help="check the Leavitt relations for a matrix fixture")
    p.add_argument("fixture", help=f"one of {', '.join(sy.FIXTURES)} or a fixture file")
    p.add_argument("--char", type=int, default=0, help="0 for Q, or a prime p")

    p = add("partition", cmd_partition, render_partition, help="residue partitions of {1..d}")
    p.add_argument("d", type=int)
    p.add_argument("r", type=int)
    p.add_argument("--extend", type=int, default=None, metavar="N")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    fn: Callable = args.fn
    try:
        report = fn(args)
    except (gc.GraphError, nt.PartitionError, OSError) as exc:
        origin = "io" if isinstance(exc, OSError) else type(exc).__module__.rsplit(".", 1)[-1]
        print(f"lpa {args.command}: error ({origin}): {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2))
    else:
        print(args.render(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
