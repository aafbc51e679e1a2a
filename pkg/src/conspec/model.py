"""Model loading: a lexicon, a realization rule set, and pragmas, as one bundle.

Model files use the tree-line statement format (see treeline). Loading is
atomic: the bundle is fully built and validated before being returned, so a
reload that fails leaves the previous bundle untouched.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ModelLoadError, TreelineParseError
from .lexicon import Definition, Lexicon
from .network import Concept, ConceptNetwork
from .rules import DEFAULT_BEAM, DEFAULT_TAU, Rule, RuleSet, build_rule
from .similarity import DEFAULT_ALPHA
from .treeline import (
    DeclareStmt,
    DefinitionStmt,
    NetworkStmt,
    PragmaStmt,
    RuleStmt,
    TreelineDocument,
    parse_document,
)


@dataclass
class Pragmas:
    alpha: float = DEFAULT_ALPHA
    tau: float = DEFAULT_TAU
    beam: int = DEFAULT_BEAM
    orthography: bool = False


@dataclass
class ModelBundle:
    lexicon: Lexicon
    rules: RuleSet
    pragmas: Pragmas
    path: str = "<inline>"
    content_hash: str = ""
    document: TreelineDocument | None = None
    lints: list[str] = field(default_factory=list)

    def rule_by_id(self, rule_id: str) -> Rule | None:
        for rule in self.rules:
            if rule.rule_id == rule_id:
                return rule
        return None


_BOOL = {"on": True, "true": True, "off": False, "false": False}


def _apply_pragma(pragmas: Pragmas, stmt: PragmaStmt, path: str) -> None:
    try:
        if stmt.key == "alpha":
            pragmas.alpha = float(stmt.value)
        elif stmt.key == "tau":
            pragmas.tau = float(stmt.value)
        elif stmt.key == "beam":
            pragmas.beam = int(stmt.value)
        elif stmt.key == "orthography":
            pragmas.orthography = _BOOL[stmt.value.lower()]
        else:
            raise ModelLoadError(f"unknown pragma {stmt.key!r}", path, stmt.line)
    except (ValueError, KeyError):
        raise ModelLoadError(
            f"bad value {stmt.value!r} for pragma {stmt.key!r}", path, stmt.line
        ) from None


def load_model_text(text: str, path: str = "<inline>") -> ModelBundle:
    try:
        doc = parse_document(text)
    except TreelineParseError as exc:
        raise ModelLoadError(str(exc.args[0]), path, exc.line) from exc
    definitions: dict[Concept, Definition] = {}
    declares: dict[str, str] = {}
    surface_forms: dict[Concept, list[str]] = {}
    pragmas = Pragmas()
    rules: list[Rule] = []
    for stmt in doc.statements:
        if isinstance(stmt, DefinitionStmt):
            definitions[stmt.name] = Definition(stmt.name, stmt.body, stmt.line)
        elif isinstance(stmt, DeclareStmt):
            declares[stmt.label] = stmt.description
        elif isinstance(stmt, PragmaStmt):
            _apply_pragma(pragmas, stmt, path)
        elif isinstance(stmt, RuleStmt):
            rid = f"r{len(rules) + 1}"
            rules.append(build_rule(stmt.lhs, stmt.rhs, rid, stmt.line, path))
        elif isinstance(stmt, NetworkStmt):
            continue  # bare networks are allowed in model files but carry no behavior
        else:
            raise ModelLoadError(
                f"{type(stmt).__name__} not allowed in a model file (pair files take"
                " transfer rules and map entries)",
                path,
                stmt.line,
            )
    lex = Lexicon(definitions=definitions, surface_forms=surface_forms)
    lex.stemless_registry.update(declares)
    lints = list(doc.lints)
    nets = [d.body for d in definitions.values()]
    for rule in rules:
        nets.append(rule.lhs)
    for label in lex.undeclared_stemless(nets):
        lints.append(f"undeclared stemless label {{{label}}}")
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return ModelBundle(lex, RuleSet(rules), pragmas, path, digest, doc, lints)


def load_model(path: str | Path) -> ModelBundle:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelLoadError(f"cannot read model: {exc}", str(path)) from exc
    return load_model_text(text, str(path))


def load_corpus(path: str | Path) -> list[tuple[str, ConceptNetwork, str]]:
    """Corpus file: ``surface<TAB>tree-line`` per line, # comments allowed."""
    from .treeline import parse_network

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelLoadError(f"cannot read corpus: {exc}", str(path)) from exc
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise ModelLoadError("corpus line needs surface<TAB>tree-line", str(path), lineno)
        try:
            net = parse_network(fields[1])
        except TreelineParseError as exc:
            raise ModelLoadError(str(exc.args[0]), str(path), lineno) from exc
        rows.append((fields[0], net, fields[1]))
    return rows
