"""Command line front end: ``vlab <subcommand> ...``.

Exit status: 0 success or true verdict, 1 false verdict, 2 input error,
3 iteration cap reached.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .cantor import format_nodeset, format_point, parse_address, parse_nodeset, parse_point
from .demonstrative import (
    DemonstrativeGroup,
    check_demonstrative,
    direct_product,
    free_product_embed,
    make_cyclic,
    make_symmetric,
    move_node,
    pingpong_check,
    subgroup,
)
from .element import (
    Element,
    apply,
    compose,
    format_element,
    invert,
    parse_element,
    power,
    support_closure,
)
from .errors import IterationCapError, ParseError, PreconditionError
from .refute import random_instance, run_refutation
from .revealing import flow_graph, important_points, make_revealing, order_of
from . import zz_words as zz

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _emit(args, text: str, data) -> None:
    if args.json:
        payload = {"schema": 1, "command": args.cmd}
        payload.update(data if isinstance(data, dict) else {"result": data})
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _order_text(k) -> str:
    return "infinite" if k is None else str(k)


# ---------------------------------------------------------------- element ops

def cmd_reduce(args):
    u = parse_element(args.element)
    _emit(args, format_element(u), format_element(u))


def cmd_mul(args):
    out = Element.identity()
    for text in args.elements:
        out = compose(out, parse_element(text))
    _emit(args, format_element(out), format_element(out))


def cmd_inv(args):
    u = invert(parse_element(args.element))
    _emit(args, format_element(u), format_element(u))


def cmd_pow(args):
    u = power(parse_element(args.element), args.k)
    _emit(args, format_element(u), format_element(u))


def cmd_eq(args):
    same = parse_element(args.u) == parse_element(args.v)
    _emit(args, "true" if same else "false", same)
    return EXIT_OK if same else EXIT_FALSE


def cmd_order(args):
    k = order_of(parse_element(args.element))
    _emit(args, _order_text(k), _order_text(k))


def cmd_apply(args):
    x = apply(parse_element(args.element), parse_point(args.point))
    _emit(args, format_point(x), format_point(x))


def cmd_support(args):
    ns = support_closure(parse_element(args.element))
    _emit(args, format_nodeset(ns), format_nodeset(ns))


def cmd_reveal(args):
    p = make_revealing(parse_element(args.element))
    addr = lambda a: a or "e"  # noqa: E731
    data = {
        "pairs": [[addr(d), addr(r)] for d, r in p.pairs],
        "common_tree_leaves": [addr(a) for a in p.common_tree_leaves],
        "neutral": [addr(a) for a in p.neutral],
        "rep_components": [
            {"root": addr(c.root), "leaves": [addr(a) for a in c.leaves],
             "repeller": addr(c.repeller), "return_length": c.return_length}
            for c in p.rep_components
        ],
        "att_components": [
            {"root": addr(c.root), "leaves": [addr(a) for a in c.leaves],
             "attractor": addr(c.attractor), "return_length": c.return_length}
            for c in p.att_components
        ],
        "chains": [[addr(a) for a in (ch.source, *ch.neutrals, ch.sink)] for ch in p.chains],
        "cycles": [[addr(a) for a in cyc] for cyc in p.cycles],
    }
    lines = ["pair " + ", ".join(f"{d}->{r}" for d, r in data["pairs"]),
             "common " + " ".join(data["common_tree_leaves"]),
             "neutral " + " ".join(data["neutral"])]
    for c in data["rep_components"]:
        lines.append(f"repelling root {c['root']} leaves {' '.join(c['leaves'])} "
                     f"repeller {c['repeller']} return {c['return_length']}")
    for c in data["att_components"]:
        lines.append(f"attracting root {c['root']} leaves {' '.join(c['leaves'])} "
                     f"attractor {c['attractor']} return {c['return_length']}")
    for ch in data["chains"]:
        lines.append("chain " + " - ".join(ch))
    for cyc in data["cycles"]:
        lines.append("cycle " + " ".join(cyc))
    _emit(args, "\n".join(line.rstrip() for line in lines), data)


def cmd_important(args):
    pts = important_points(parse_element(args.element))
    rows = [{"point": format_point(ip.point), "kind": ip.kind, "basin": ip.basin or "e",
             "log2_slope": ip.log2_slope} for ip in pts]
    text = "\n".join(f"{r['point']} {r['kind']} basin {r['basin']} slope {r['log2_slope']}"
                     for r in rows)
    _emit(args, text, {"points": rows})


def cmd_flow(args):
    fg = flow_graph(parse_element(args.element))
    if args.dot:
        sys.stdout.write(fg.to_dot())
        return EXIT_OK
    comps = [{"basins": [b or "e" for b in bs], "support": format_nodeset(ns)}
             for bs, ns in fg.components]
    text = "\n".join(f"component {' '.join(c['basins'])} support {c['support']}" for c in comps)
    _emit(args, text, {"components": comps})


# --------------------------------------------------------------- demonstrative

_GROUP_RE = re.compile(r"(Z|S)(\d*)")


def parse_group(text: str) -> DemonstrativeGroup:
    """``Zk`` cyclic of order k, ``Z`` infinite cyclic, ``Sn`` symmetric; ``x`` for products."""
    parts = text.strip().split("x")
    groups = []
    offset = 0
    for part in parts:
        m = _GROUP_RE.fullmatch(part)
        if not m or (m.group(1) == "S" and not m.group(2)):
            raise ParseError("expected Zk, Z or Sn", text, offset)
        if m.group(1) == "Z":
            groups.append(make_cyclic(int(m.group(2)) if m.group(2) else None))
        else:
            groups.append(make_symmetric(int(m.group(2))))
        offset += len(part) + 1
    out = groups[-1]
    for G in reversed(groups[:-1]):
        out = direct_product(G, out)
    return out


def _group_data(G: DemonstrativeGroup) -> dict:
    data = G.summary()
    data["elements"] = [format_element(g) for g in G.elements]
    return data


def _group_text(G: DemonstrativeGroup) -> str:
    lines = [f"{G.name} {G.kind} node {G.node or 'e'}"]
    lines += [format_element(g) for g in G.elements]
    if G.generator is not None:
        lines.append(f"generator {format_element(G.generator)}")
    return "\n".join(lines)


def cmd_demo_check(args):
    gens = [parse_element(t) for t in args.elements]
    node = parse_address(args.node)
    base = DemonstrativeGroup((Element.identity(),), node)
    G = subgroup(base, gens)
    G = DemonstrativeGroup(G.elements, node, parse_element(args.generator) if args.generator else None)
    v = check_demonstrative(G)
    _emit(args, "true" if v else f"false: {v.diagnostic}",
          {"verdict": v.ok, "diagnostic": v.diagnostic})
    return EXIT_OK if v else EXIT_FALSE


def cmd_make(args):
    if args.what == "cyclic":
        G = make_cyclic(None if args.arg in ("inf", "infinite", "Z") else int(args.arg))
    elif args.what == "sym":
        G = make_symmetric(int(args.arg))
    elif args.what == "product":
        G = direct_product(parse_group(args.arg), parse_group(args.extra))
    else:
        G = move_node(parse_group(args.arg), parse_address(args.extra))
    v = check_demonstrative(G)
    data = _group_data(G)
    data["demonstrative"] = v.ok
    _emit(args, _group_text(G), data)
    return EXIT_OK if v else EXIT_FALSE


def cmd_pingpong(args):
    G, H = parse_group(args.g), parse_group(args.h)
    if args.x1 or args.x2:
        X1 = parse_nodeset(args.x1 or "{1}")
        X2 = parse_nodeset(args.x2 or "{0}")
        cert = pingpong_check(move_node(G, "0"), move_node(H, "1"), X1, X2, args.radius)
        data = cert.to_dict()
    else:
        fp = free_product_embed(G, H, samples=args.samples, seed=args.seed)
        if fp.certificate is None:
            data = {"route": fp.route, "verdict": True,
                    "generators": [format_element(g) for g in fp.generators]}
        else:
            data = fp.certificate.to_dict()
            data["route"] = fp.route
            data["sampled_words"] = fp.sampled_words
            data["identity_words"] = len(fp.failures)
            data["verdict"] = data["verdict"] and not fp.failures
    ok = data["verdict"]
    text = f"verdict {'true' if ok else 'false'}"
    if data.get("witness"):
        text += f"\nwitness {data['witness']}"
    if "sampled_words" in data:
        text += f"\nsampled {data['sampled_words']} words, {data['identity_words']} trivial"
    if data.get("route") == "dihedral-search":
        text += "\ninvolutions " + " ".join(data["generators"])
    _emit(args, text, data)
    return EXIT_OK if ok else EXIT_FALSE


# --------------------------------------------------------------------- words

def _triples(text: str) -> list[tuple[int, int, int]]:
    out = []
    offset = 0
    for chunk in text.split(";"):
        try:
            x, y, z = (int(v) for v in chunk.split(","))
        except ValueError:
            raise ParseError("expected x,y,z triples separated by ';'", text, offset) from None
        out.append((x, y, z))
        offset += len(chunk) + 1
    return out


def cmd_zz(args):
    if args.op == "reduce":
        w = zz.parse_word(args.word)
        _emit(args, str(w), str(w))
    elif args.op == "commutator":
        w = zz.abc_commutator(_triples(args.word))
        _emit(args, str(w), str(w))
    else:
        w = zz.parse_word(args.word)
        if len(args.ijk) != 3:
            raise _Usage("zz tail needs WORD I J K")
        form = zz.ends_in_form_star_star(w, *args.ijk)
        _emit(args, form or "none", form)
        return EXIT_OK if form else EXIT_FALSE
    return EXIT_OK


# -------------------------------------------------------------------- refute

def cmd_refute(args):
    if args.seed is not None:
        _, a, b, c = random_instance(args.seed)
    elif len(args.elements) == 3:
        a, b, c = (parse_element(t) for t in args.elements)
    else:
        raise _Usage("refute needs three elements or --seed")
    cert = run_refutation(a, b, c)
    data = cert.to_dict()
    data["input"] = [format_element(u) for u in (a, b, c)]
    text = (f"kind {cert.kind}\nword {cert.witness_word}\n"
            f"element {format_element(cert.witness_element)}\norder {_order_text(cert.order)}")
    _emit(args, text, data)


# ------------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    p = _Parser(prog="vlab", description="Exact computation in Thompson's group V.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("reduce", cmd_reduce, "canonical form").add_argument("element")
    add("mul", cmd_mul, "product, left to right").add_argument("elements", nargs="+")
    add("inv", cmd_inv, "inverse").add_argument("element")
    sp = add("pow", cmd_pow, "integer power")
    sp.add_argument("element")
    sp.add_argument("k", type=int)
    sp = add("eq", cmd_eq, "word problem")
    sp.add_argument("u")
    sp.add_argument("v")
    add("order", cmd_order, "order or 'infinite'").add_argument("element")
    sp = add("apply", cmd_apply, "image of a point pre(period)")
    sp.add_argument("element")
    sp.add_argument("point")
    add("reveal", cmd_reveal, "revealing pair").add_argument("element")
    add("important", cmd_important, "repelling and attracting fixed points").add_argument("element")
    sp = add("flow", cmd_flow, "flow graph")
    sp.add_argument("element")
    sp.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
    add("support", cmd_support, "closure of the support").add_argument("element")
    sp = add("demo-check", cmd_demo_check, "check a demonstrative subgroup")
    sp.add_argument("elements", nargs="*", help="generators of a finite group")
    sp.add_argument("--node", default="0")
    sp.add_argument("--generator", help="infinite-order generator commuting with the rest")
    sp = add("make", cmd_make, "build demonstrative groups")
    sp.add_argument("what", choices=["cyclic", "sym", "product", "move"])
    sp.add_argument("arg")
    sp.add_argument("extra", nargs="?")
    sp = add("pingpong", cmd_pingpong, "free product of two groups")
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("--x1")
    sp.add_argument("--x2")
    sp.add_argument("--radius", type=int, default=20)
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp = add("zz", cmd_zz, "words in Z^2 * Z")
    sp.add_argument("op", choices=["reduce", "commutator", "tail"])
    sp.add_argument("word")
    sp.add_argument("ijk", nargs="*", type=int)
    sp = add("refute", cmd_refute, "torsion witness for a commuting pair and a third element")
    sp.add_argument("elements", nargs="*")
    sp.add_argument("--seed", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd is None:
            raise _Usage("a subcommand is required")
        if args.cmd == "make" and args.what in ("product", "move") and args.extra is None:
            raise _Usage(f"make {args.what} needs two arguments")
        status = args.func(args)
    except _Usage as e:
        print(f"vlab: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except IterationCapError as e:
        print(f"vlab: cap reached: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, PreconditionError, ValueError) as e:
        print(f"vlab: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if status is None else status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
