"""Translation: parse source text, transfer the network, realize receptor text.

A language pair bundles two loaded models with transfer rules and a bilingual
concept map. Pair files::

    source: english.cn
    receptor: sov.cn
    set identity-map on          # optional: concepts fall through unchanged
    trust > [{past}, {agent} > he, {theme} > John] => (shinji > [{agent} > kare, {theme} > Jon]) > {ta}
    map he -> kare

Transfer operates on anchor-resolved canonical networks so co-reference
survives into the receptor language.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ConspecError,
    ModelLoadError,
    TreelineParseError,
    UnparseableTextError,
    UnrealizableFragmentError,
    UntranslatableConceptError,
)
from .model import ModelBundle, load_model
from .network import canonicalize, resolve_anchors
from .parser import parse_text
from .realizer import realize
from .rules import (
    ConceptMap,
    TransferRuleSet,
    build_transfer_rule,
    transfer_scored,
)
from .treeline import MapStmt, PragmaStmt, TransferRuleStmt, parse_document


@dataclass
class LanguagePair:
    source_model: ModelBundle
    receptor_model: ModelBundle
    transfer_rules: TransferRuleSet
    concept_map: ConceptMap
    path: str = "<inline>"
    lints: list[str] = field(default_factory=list)


def load_pair_text(text: str, path: str = "<inline>", base_dir: str | Path = ".") -> LanguagePair:
    base = Path(base_dir)
    source: ModelBundle | None = None
    receptor: ModelBundle | None = None
    rest: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("source:") or line.startswith("receptor:"):
            key, _, value = line.partition(":")
            target = (base / value.strip()).resolve()
            model = load_model(target)
            if key == "source":
                source = model
            else:
                receptor = model
            rest.append("")
        else:
            rest.append(raw)
    if source is None or receptor is None:
        raise ModelLoadError("pair file needs 'source:' and 'receptor:' lines", path)
    try:
        doc = parse_document("\n".join(rest))
    except TreelineParseError as exc:
        raise ModelLoadError(str(exc.args[0]), path, exc.line) from exc
    cmap = ConceptMap()
    for stmt in doc.statements:
        if isinstance(stmt, MapStmt):
            cmap.entries[stmt.src] = stmt.dst
        elif isinstance(stmt, PragmaStmt):
            if stmt.key == "identity-map":
                cmap.identity = stmt.value.lower() in ("on", "true")
            else:
                raise ModelLoadError(f"unknown pair pragma {stmt.key!r}", path, stmt.line)
    trules = []
    for stmt in doc.statements:
        if isinstance(stmt, TransferRuleStmt):
            rid = f"t{len(trules) + 1}"
            trules.append(build_transfer_rule(stmt.src, stmt.dst, cmap, rid, stmt.line, path))
    lints: list[str] = []
    registries = set(source.lexicon.stemless_registry) | set(receptor.lexicon.stemless_registry)
    for rule in trules:
        for net in (rule.src, rule.dst):
            for c in net.concepts():
                if c.stemless and c.label not in registries:
                    lints.append(f"transfer rule {rule.rule_id}: undeclared stemless {{{c.label}}}")
    pair = LanguagePair(source, receptor, TransferRuleSet(trules), cmap, path, lints)
    return pair


def load_pair(path: str | Path) -> LanguagePair:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelLoadError(f"cannot read pair file: {exc}", str(path)) from exc
    return load_pair_text(text, str(path), path.parent)


def _staged(exc: ConspecError, stage: str) -> ConspecError:
    return exc.with_stage(stage)


def translate(
    pair: LanguagePair, text: str, *, parse_cap: int = 4
) -> list[tuple[str, float, list[str]]]:
    """Ranked (text, score, trace) translations; score is the stage product.

    Stage errors propagate tagged with the failing stage; a stage only fails
    when every surviving candidate fails there.
    """
    src = pair.source_model
    try:
        parses = parse_text(src, text)
    except UnparseableTextError as exc:
        raise _staged(exc, "parse")
    transfer_error: ConspecError | None = None
    realize_error: ConspecError | None = None
    results: dict[str, tuple[str, float, list[str]]] = {}
    for net, p_score, p_trace in parses[:parse_cap]:
        prepared = resolve_anchors(canonicalize(net))
        try:
            receptor_nets = transfer_scored(
                pair.transfer_rules,
                pair.concept_map,
                prepared,
                src.lexicon,
                alpha=src.pragmas.alpha,
                tau=src.pragmas.tau,
                beam=src.pragmas.beam,
            )
        except UntranslatableConceptError as exc:
            transfer_error = exc
            continue
        for receptor_net, t_score in receptor_nets:
            try:
                realized = realize(pair.receptor_model, receptor_net)
            except UnrealizableFragmentError as exc:
                realize_error = exc
                continue
            for out_text, r_score, r_trace in realized:
                score = p_score * t_score * r_score
                trace = (
                    [f"parse:{e}" for e in p_trace]
                    + [f"transfer:score={t_score:.6g}"]
                    + [f"realize:{e}" for step in r_trace for e in step]
                )
                prev = results.get(out_text)
                if prev is None or score > prev[1]:
                    results[out_text] = (out_text, score, trace)
    if not results:
        if transfer_error is not None:
            raise _staged(transfer_error, "transfer")
        if realize_error is not None:
            raise _staged(realize_error, "realize")
        raise _staged(UnparseableTextError(f"no translation of {text!r}"), "parse")
    return sorted(results.values(), key=lambda r: (-r[1], len(r[0]), r[0]))
