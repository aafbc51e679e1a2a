"""Command-line entry point.

Subcommands: parse, realize, translate, canon, check, lint, export.
Exit codes: 0 success, 1 check/lint/engine failure, 2 usage, 3 model load
error. CONSPEC_MODEL_PATH supplies the default --model.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import ConspecError, ModelLoadError, TreelineParseError
from .model import ModelBundle, load_corpus, load_model
from .network import (
    ConceptNetwork,
    Node,
    canonicalize,
    equal,
    node_paths,
    resolve_anchors,
    to_json_dict,
)
from .parser import parse_text
from .realizer import realize
from .transfer import load_pair, translate
from .treeline import parse_document, parse_network, print_network

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_LOAD = 3


def _read_input(target: str | None) -> str:
    if target is None or target == "-":
        return sys.stdin.read()
    return Path(target).read_text(encoding="utf-8")


def _load(args) -> ModelBundle:
    path = args.model or os.environ.get("CONSPEC_MODEL_PATH")
    if not path:
        raise ModelLoadError("no model: pass --model or set CONSPEC_MODEL_PATH")
    model = load_model(path)
    if getattr(args, "beam", None):
        model.pragmas.beam = args.beam
    if getattr(args, "tau", None) is not None:
        model.pragmas.tau = args.tau
    return model


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(net: ConceptNetwork) -> str:
    """Graphviz description of a network: specification edges point
    parent -> child, capsule bodies render as clusters, resolved references
    as dashed edges."""
    paths = node_paths(net)
    names = {pid: f"n{i}" for i, pid in enumerate(paths)}
    lines = ["digraph network {", "  rankdir=TB;", "  node [shape=ellipse];"]
    edges: list[str] = []

    def walk(node: Node, cluster: list[str]) -> None:
        name = names[id(node)]
        if node.is_capsule:
            cluster.append(f'  subgraph cluster_{name} {{ label=""; style=dashed;')
            cluster.append(f'    {name} [label="( )", shape=point];')
            for r in node.capsule.roots:
                walk(r, cluster)
                edges.append(f"  {name} -> {names[id(r)]} [style=dotted, arrowhead=none];")
            cluster.append("  }")
        else:
            label = node.concept.text()
            if node.anchor:
                label = node.anchor.text() + label
            cluster.append(f'  {name} [label="{_dot_escape(label)}"];')
        for s in node.specifiers:
            walk(s, cluster)
            edges.append(f"  {name} -> {names[id(s)]};")
        if node.ref is not None:
            edges.append(f"  {name} -> {names[id(node.ref)]} [style=dashed, color=gray];")

    body: list[str] = []
    for r in net.roots:
        walk(r, body)
    lines.extend(body)
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines)


def _cmd_canon(args) -> int:
    text = _read_input(args.input)
    code = EXIT_OK
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        net = canonicalize(parse_network(line))
        if args.dot:
            print(to_dot(net))
        elif args.json:
            print(json.dumps(to_json_dict(net), ensure_ascii=False))
        else:
            print(print_network(net))
    return code


def _cmd_export(args) -> int:
    text = _read_input(args.input)
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        net = resolve_anchors(canonicalize(parse_network(line)))
        if args.json:
            print(json.dumps(to_json_dict(net), ensure_ascii=False))
        else:
            print(to_dot(net))
    return EXIT_OK


def _print_ranked(rows, args, as_network: bool) -> None:
    shown = rows if args.all else rows[:1]
    for value, score, trace in shown:
        text = print_network(value) if as_network else value
        if args.json and as_network:
            text = json.dumps(to_json_dict(value), ensure_ascii=False)
        if args.all:
            print(f"{score:.6f}\t{text}")
        else:
            print(text)
        if args.trace:
            for entry in trace:
                print(f"  # {entry}", file=sys.stderr)


def _cmd_parse(args) -> int:
    model = _load(args)
    text = _read_input(args.input).strip()
    ranked = parse_text(model, text)
    _print_ranked(ranked, args, as_network=True)
    return EXIT_OK


def _cmd_realize(args) -> int:
    model = _load(args)
    text = _read_input(args.input).strip()
    net = parse_network(text)
    ranked = realize(model, net)
    _print_ranked([(s, sc, [e for step in tr for e in step]) for s, sc, tr in ranked], args, as_network=False)
    return EXIT_OK


def _cmd_translate(args) -> int:
    pair = load_pair(args.pair)
    if getattr(args, "beam", None):
        pair.source_model.pragmas.beam = args.beam
        pair.receptor_model.pragmas.beam = args.beam
    if getattr(args, "tau", None) is not None:
        pair.source_model.pragmas.tau = args.tau
        pair.receptor_model.pragmas.tau = args.tau
    text = _read_input(args.input).strip()
    ranked = translate(pair, text)
    _print_ranked(ranked, args, as_network=False)
    return EXIT_OK


def _cmd_check(args) -> int:
    model = _load(args)
    corpus = load_corpus(args.corpus)
    failures = 0
    print(f"{'status':6}  {'parse':5}  {'realize':7}  surface")
    for surface, net, _raw in corpus:
        want = canonicalize(net)
        parse_ok = realize_ok = False
        try:
            parses = parse_text(model, surface)
            parse_ok = any(equal(n, want) for n, _, _ in parses[:3])
        except ConspecError:
            parse_ok = False
        try:
            outs = realize(model, want)
            realize_ok = surface in [s for s, _, _ in outs[:3]]
        except ConspecError:
            realize_ok = False
        ok = parse_ok and realize_ok
        failures += 0 if ok else 1
        print(f"{'pass' if ok else 'FAIL':6}  {str(parse_ok):5}  {str(realize_ok):7}  {surface}")
    print(f"{len(corpus) - failures}/{len(corpus)} lines pass")
    return EXIT_OK if failures == 0 else EXIT_FAIL


def _cmd_lint(args) -> int:
    from .lexicon import Lexicon
    from .treeline import DeclareStmt, DefinitionStmt, NetworkStmt, RuleStmt

    path = args.model or os.environ.get("CONSPEC_MODEL_PATH")
    if not path:
        raise ModelLoadError("no model: pass --model or set CONSPEC_MODEL_PATH")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelLoadError(f"cannot read model: {exc}", str(path)) from exc
    problems: list[str] = []
    errors: list[TreelineParseError] = []
    doc = parse_document(text, collect_errors=errors)
    for exc in errors:
        problems.append(f"error: {exc}")
    problems.extend(f"note: {l}" for l in doc.lints)
    registry = Lexicon()
    nets: list[ConceptNetwork] = []
    for stmt in doc.statements:
        if isinstance(stmt, DeclareStmt):
            registry.stemless_registry[stmt.label] = stmt.description
        elif isinstance(stmt, DefinitionStmt):
            nets.append(stmt.body)
        elif isinstance(stmt, RuleStmt):
            nets.append(stmt.lhs)
        elif isinstance(stmt, NetworkStmt):
            nets.append(stmt.network)
    for label in registry.undeclared_stemless(nets):
        problems.append(f"warning: undeclared stemless label {{{label}}}")
    try:
        model = load_model(path)
    except ModelLoadError as exc:
        problems.append(f"error: {exc}")
        model = None
    if model is not None:
        if args.corpus:
            used: set[str] = set()
            for surface, net, _raw in load_corpus(args.corpus):
                try:
                    for _, _, trace in realize(model, canonicalize(net)):
                        for step in trace:
                            for entry in step:
                                if entry.startswith("rule:"):
                                    used.add(entry.split("@")[0].removeprefix("rule:"))
                except ConspecError:
                    pass
            for rule in model.rules:
                if rule.rule_id not in used:
                    problems.append(f"warning: unused rule {rule.rule_id} (line {rule.line})")
        else:
            problems.append("note: unused-rule check skipped (no --corpus)")
    for p in problems:
        print(p)
    hard = [p for p in problems if p.startswith(("error:", "warning:"))]
    return EXIT_FAIL if hard else EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conspec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        p.add_argument("input", nargs="?", default="-", help="file or - for stdin")
        if model:
            p.add_argument("--model", help="model file (default: $CONSPEC_MODEL_PATH)")
        p.add_argument("--all", action="store_true", help="print the full ranked list")
        p.add_argument("--json", action="store_true", help="emit the JSON graph export")
        p.add_argument("--trace", action="store_true", help="print derivation traces to stderr")
        p.add_argument("--beam", type=int, help="beam width override")
        p.add_argument("--tau", type=float, help="match threshold override")

    p = sub.add_parser("canon", help="print canonical tree-line")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--dot", action="store_true", help="emit a DOT graph instead")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_canon)

    p = sub.add_parser("export", help="export a network as DOT (default) or JSON")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--dot", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_export)

    p = sub.add_parser("parse", help="parse surface text into networks")
    common(p)
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("realize", help="realize a tree-line network as text")
    common(p)
    p.set_defaults(fn=_cmd_realize)

    p = sub.add_parser("translate", help="translate text through a language pair")
    common(p, model=False)
    p.add_argument("--pair", required=True, help="pair file")
    p.set_defaults(fn=_cmd_translate)

    p = sub.add_parser("check", help="run a corpus regression")
    p.add_argument("--model", help="model file (default: $CONSPEC_MODEL_PATH)")
    p.add_argument("--corpus", required=True)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("lint", help="report model problems")
    p.add_argument("--model", help="model file (default: $CONSPEC_MODEL_PATH)")
    p.add_argument("--corpus", help="corpus for the unused-rule check")
    p.set_defaults(fn=_cmd_lint)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_arg_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except ModelLoadError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except TreelineParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ConspecError as exc:
        stage = f" [stage={exc.stage}]" if exc.stage else ""
        print(f"error{stage}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
