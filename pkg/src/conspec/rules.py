"""Realization and transfer rules: storage, matching, application.

A realization rule pairs a network pattern (lhs) with an ordered sequence of
parts (rhs): quoted surface literals and sub-patterns that point back into
the lhs. Rules are bidirectional: forward they rewrite a network region into
a part sequence (realization), backward they rebuild the lhs around matched
fragments (parsing).

Matching is exact or analogical. The lhs embeds prefix-closed into the
target: every lhs node maps to a distinct target node, and unmatched target
children ("remainders") are absorbed into the rhs part that owns their
matched parent, so a determiner or adverb hanging off a matched noun flows
into that part's fragment instead of blocking the rule. A match is rejected
when a remainder hangs under a dropped lhs node (silent content loss).

Transfer rules rewrite source-language regions into receptor-language
templates. A dst node is a slot when the bilingual map (or label identity)
links it to a src pattern node; slots fill with the transfer of whatever
matched that src node, remainders included. Consumed (matched) nodes are
never rematched, so transfer terminates: every application strictly shrinks
the untransferred region and the match set is finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ModelLoadError, UntranslatableConceptError
from .lexicon import Lexicon
from .network import (
    Concept,
    ConceptNetwork,
    Node,
    canonical_key,
    canonicalize,
)
from .similarity import (
    DEFAULT_ALPHA,
    Alignment,
    align_networks,
    rule_node_sim,
)

DEFAULT_TAU = 0.5
DEFAULT_BEAM = 16

REALIZE = "realize"
PARSE = "parse"


# ---------------------------------------------------------------------------
# Rule construction
# ---------------------------------------------------------------------------


def _exact_sim(a: Concept, b: Concept) -> float:
    return 1.0 if a == b else 0.0


def _iter_with_nodes(net: ConceptNetwork):
    yield from net.iter_nodes()


def _find_embeddings(pattern: ConceptNetwork, lhs: ConceptNetwork) -> list[Alignment]:
    """All exact prefix embeddings of a (single-root) pattern into lhs."""
    out = []
    for anchor_node in _iter_with_nodes(lhs):
        target = ConceptNetwork((anchor_node,))
        got = align_networks(pattern, target, _exact_sim, total=False)
        if got is not None:
            out.append(got)
    return out


@dataclass
class Literal:
    text: str


@dataclass
class PatternPart:
    pattern: ConceptNetwork  # standalone view, parsed from the rule text
    to_lhs: dict[Node, Node]  # pattern node -> lhs node
    lhs_nodes: set[int] = field(default_factory=set)  # id(lhs node)

    @property
    def lhs_root(self) -> Node:
        return self.to_lhs[self.pattern.roots[0]]


@dataclass
class Rule:
    lhs: ConceptNetwork
    parts: list[Literal | PatternPart]
    rule_id: str
    line: int = 0

    def pattern_parts(self) -> list[PatternPart]:
        return [p for p in self.parts if isinstance(p, PatternPart)]

    def part_of_lhs_node(self, node: Node) -> PatternPart | None:
        for part in self.parts:
            if isinstance(part, PatternPart) and id(node) in part.lhs_nodes:
                return part
        return None


def build_rule(
    lhs: ConceptNetwork,
    rhs: list[tuple[str, object]],
    rule_id: str,
    line: int = 0,
    path: str = "<inline>",
) -> Rule:
    parts: list[Literal | PatternPart] = []
    used: set[int] = set()
    for kind, value in rhs:
        if kind == "lit":
            parts.append(Literal(str(value)))
            continue
        pattern: ConceptNetwork = value  # type: ignore[assignment]
        if len(pattern.roots) != 1:
            raise ModelLoadError("rule part must be a single chain", path, line)
        embeddings = _find_embeddings(pattern, lhs)
        if not embeddings:
            from .treeline import print_network

            raise ModelLoadError(
                f"rule part {print_network(pattern)!r} does not occur in the rule pattern",
                path,
                line,
            )
        if len(embeddings) > 1:
            from .treeline import print_network

            raise ModelLoadError(
                f"rule part {print_network(pattern)!r} is ambiguous in the rule pattern"
                " (annotate senses to disambiguate)",
                path,
                line,
            )
        binding = embeddings[0].binding
        ids = {id(t) for t in binding.values()}
        if ids & used:
            raise ModelLoadError("rule parts overlap on the pattern", path, line)
        used |= ids
        parts.append(PatternPart(pattern, dict(binding), ids))
    return Rule(lhs, parts, rule_id, line)


@dataclass
class RuleSet:
    rules: list[Rule] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


@dataclass
class Match:
    rule: Rule
    binding: dict[Node, Node]  # lhs node -> target node
    score: float
    # remainder target subtrees routed to the part that absorbed them
    absorbed: dict[int, list[Node]] = field(default_factory=dict)  # part index -> subtrees

    @property
    def exact(self) -> bool:
        return self.score == 1.0


def match_rule_realize(
    rule: Rule,
    lex: Lexicon,
    net: ConceptNetwork,
    *,
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
) -> Match | None:
    """Match the rule pattern against the network's root region."""
    got = align_networks(rule.lhs, net, rule_node_sim(lex, alpha), total=False)
    if got is None:
        return None
    score = got.score
    if score < tau:
        return None
    for lhs_node, s in got.sims.items():
        # an analogue must survive into the output: substitution on a node
        # the rhs drops would vanish silently (suppletions stay exact-only)
        if s < 1.0 and rule.part_of_lhs_node(lhs_node) is None:
            return None
    absorbed: dict[int, list[Node]] = {}
    for t_child, lhs_owner in got.remainders:
        part = rule.part_of_lhs_node(lhs_owner)
        if part is None:
            return None  # remainder under a dropped node: content would vanish
        absorbed.setdefault(rule.parts.index(part), []).append(t_child)
    return Match(rule, got.binding, score, absorbed)


def match_rules(
    rules: RuleSet,
    lex: Lexicon,
    net: ConceptNetwork,
    direction: str = REALIZE,
    *,
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
) -> list[Match]:
    """All matches with score >= tau, best score first, declaration order on ties.

    Realize matches rule patterns against the network's root region. Parse
    treats the network as one built fragment and matches it against rules
    whose part sequence is a single sub-pattern (the chart parser drives
    longer sequences through its span tiling).
    """
    out: list[tuple[float, int, Match]] = []
    for idx, rule in enumerate(rules):
        if direction == REALIZE:
            m = match_rule_realize(rule, lex, net, alpha=alpha, tau=tau)
        else:
            if len(rule.parts) != 1 or not isinstance(rule.parts[0], PatternPart):
                continue
            got = match_part(rule.parts[0], lex, net, alpha=alpha)
            m = None
            if got is not None and got[0].score >= tau:
                m = Match(rule, dict(got[1]), got[0].score)
        if m is not None:
            out.append((-m.score, idx, m))
    out.sort(key=lambda item: (item[0], item[1]))
    return [m for _, _, m in out]


def match_part(
    part: PatternPart,
    lex: Lexicon,
    fragment: ConceptNetwork,
    *,
    alpha: float = DEFAULT_ALPHA,
) -> tuple[Alignment, dict[Node, Node]] | None:
    """Reverse-match a part pattern against a built fragment's root region.

    Returns the alignment plus the composed lhs-node -> fragment-node map.
    Fragment remainders stay attached (the whole fragment is substituted).
    """
    got = align_networks(part.pattern, fragment, rule_node_sim(lex, alpha), total=False)
    if got is None:
        return None
    lhs_to_frag = {part.to_lhs[p]: f for p, f in got.binding.items()}
    return got, lhs_to_frag


# ---------------------------------------------------------------------------
# Forward application: fragments for each rhs part
# ---------------------------------------------------------------------------


def realize_parts(rule: Rule, match: Match) -> list[str | ConceptNetwork]:
    """Rewrite a matched region into the rule's part sequence.

    Literals pass through; each sub-pattern part becomes the fragment of the
    target induced by its matched nodes plus any absorbed remainders,
    preserving the target's own concepts (which may be analogues).
    """
    t_of: dict[int, Node] = {id(l): t for l, t in match.binding.items()}
    part_of_t: dict[int, int] = {}
    for i, part in enumerate(rule.parts):
        if isinstance(part, PatternPart):
            for lhs_id in part.lhs_nodes:
                part_of_t[id(t_of[lhs_id])] = i
    absorbed_at: dict[int, list[Node]] = {}
    for i, subtrees in match.absorbed.items():
        for sub in subtrees:
            absorbed_at.setdefault(id(sub), []).append(i)

    def build(t: Node, part_idx: int) -> Node:
        kept: list[Node] = []
        for child in t.specifiers:
            if part_of_t.get(id(child)) == part_idx:
                kept.append(build(child, part_idx))
            elif part_idx in absorbed_at.get(id(child), ()):  # remainder: verbatim
                kept.append(child)
        capsule = None
        if t.is_capsule:
            roots = [build(r, part_idx) for r in t.capsule.roots if part_of_t.get(id(r)) == part_idx]
            capsule = ConceptNetwork(tuple(roots)) if roots else None
            if capsule is None:
                # body fully consumed elsewhere; degenerate, keep original body
                capsule = t.capsule
        return Node(concept=t.concept, capsule=capsule, anchor=t.anchor, specifiers=tuple(kept))

    out: list[str | ConceptNetwork] = []
    for i, part in enumerate(rule.parts):
        if isinstance(part, Literal):
            out.append(part.text)
        else:
            root_t = t_of[id(part.lhs_root)]
            out.append(ConceptNetwork((build(root_t, i),)))
    return out


# ---------------------------------------------------------------------------
# Reverse application: rebuild the lhs around matched fragments
# ---------------------------------------------------------------------------


def instantiate_reverse(rule: Rule, fragments: list[ConceptNetwork | None], lex: Lexicon, alpha: float) -> tuple[ConceptNetwork, float] | None:
    """Build an lhs instance from fragments matched to each pattern part.

    ``fragments[i]`` is the fragment for parts[i] (None for literals, which
    the caller has already verified). Returns (network, match score) or None
    when some part fails to match its fragment. Uncovered lhs nodes (role
    markers, capsule shells, {implied} insertions) are copied in verbatim.
    """
    part_frag: dict[int, tuple[dict[Node, Node], ConceptNetwork]] = {}
    product, count = 1.0, 0
    for i, part in enumerate(rule.parts):
        if isinstance(part, Literal):
            continue
        fragment = fragments[i]
        got = match_part(part, lex, fragment, alpha=alpha)
        if got is None:
            return None
        alignment, lhs_to_frag = got
        product *= alignment.product
        count += alignment.count
        part_frag[i] = (lhs_to_frag, fragment)

    lhs_part_idx: dict[int, int] = {}
    for i, part in enumerate(rule.parts):
        if isinstance(part, PatternPart):
            for lhs_id in part.lhs_nodes:
                lhs_part_idx[lhs_id] = i

    def build_lhs(l: Node) -> Node:
        i = lhs_part_idx.get(id(l))
        if i is not None:
            lhs_to_frag, _fragment = part_frag[i]
            return graft(lhs_to_frag[l], l, lhs_to_frag, i)
        capsule = None
        if l.is_capsule:
            capsule = ConceptNetwork(tuple(build_lhs(r) for r in l.capsule.roots))
        return Node(
            concept=l.concept,
            capsule=capsule,
            anchor=l.anchor,
            specifiers=tuple(build_lhs(s) for s in l.specifiers),
        )

    def graft(f: Node, l: Node, lhs_to_frag: dict[Node, Node], part_idx: int) -> Node:
        # fragment node f is aligned with lhs node l; fragment remainders stay
        frag_of = {id(lhs_to_frag[c]): c for c in l.specifiers if lhs_to_frag.get(c) is not None}
        kept: list[Node] = []
        for child in f.specifiers:
            lc = frag_of.get(id(child))
            if lc is not None:
                kept.append(graft(child, lc, lhs_to_frag, part_idx))
            else:
                kept.append(child)  # fragment remainder, verbatim
        # lhs children outside the part are inserted from the pattern
        for lc in l.specifiers:
            if lhs_part_idx.get(id(lc)) != part_idx and lhs_to_frag.get(lc) is None:
                kept.append(build_lhs(lc))
        capsule = None
        if f.is_capsule:
            body_of = {id(lhs_to_frag[r]): r for r in l.capsule.roots if lhs_to_frag.get(r) is not None}
            roots = []
            for fr in f.capsule.roots:
                lr = body_of.get(id(fr))
                roots.append(graft(fr, lr, lhs_to_frag, part_idx) if lr is not None else fr)
            capsule = ConceptNetwork(tuple(roots))
        return Node(concept=f.concept, capsule=capsule, anchor=f.anchor, specifiers=tuple(kept))

    net = ConceptNetwork(tuple(build_lhs(r) for r in rule.lhs.roots))
    score = product ** (1.0 / count) if count else 1.0
    return net, score


# ---------------------------------------------------------------------------
# Transfer
# ---------------------------------------------------------------------------


@dataclass
class ConceptMap:
    entries: dict[Concept, Concept] = field(default_factory=dict)
    identity: bool = False

    def lookup(self, concept: Concept) -> Concept | None:
        got = self.entries.get(concept)
        if got is not None:
            return got
        if self.identity:
            return concept
        return None


@dataclass
class TransferRule:
    src: ConceptNetwork
    dst: ConceptNetwork
    rule_id: str
    line: int = 0
    # dst node -> src node it is a slot for (filled at load)
    slots: dict[Node, Node] = field(default_factory=dict)


def build_transfer_rule(
    src: ConceptNetwork,
    dst: ConceptNetwork,
    cmap: ConceptMap,
    rule_id: str,
    line: int = 0,
    path: str = "<inline>",
) -> TransferRule:
    if len(dst.roots) != 1 or len(src.roots) != 1:
        raise ModelLoadError("transfer rules must have single-root sides", path, line)
    src_nodes = list(src.iter_nodes())
    slots: dict[Node, Node] = {}
    for d in dst.iter_nodes():
        if d.is_capsule:
            continue
        candidates = [
            s
            for s in src_nodes
            if not s.is_capsule
            and (cmap.lookup(s.concept) == d.concept or s.concept == d.concept)
        ]
        if len(candidates) > 1:
            raise ModelLoadError(
                f"transfer slot {d.concept.text()} is ambiguous in the source pattern",
                path,
                line,
            )
        if candidates:
            slots[d] = candidates[0]
    return TransferRule(src, dst, rule_id, line, slots)


@dataclass
class TransferRuleSet:
    rules: list[TransferRule] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


@dataclass
class _TransferMatch:
    rule: TransferRule
    anchor: Node  # node in the net where the src pattern root aligned
    binding: dict[Node, Node]  # src node -> net node
    score: float
    region: frozenset[int]  # id() of aligned net nodes
    absorbed: dict[int, list[Node]]  # id(src slot node) -> remainder subtrees


def _collect_transfer_matches(
    trules: TransferRuleSet,
    lex: Lexicon,
    net: ConceptNetwork,
    alpha: float,
    tau: float,
) -> list[_TransferMatch]:
    sim = rule_node_sim(lex, alpha)
    out: list[_TransferMatch] = []
    for rule in trules:
        slot_src_ids = {id(s) for s in rule.slots.values()}
        for node in net.iter_nodes():
            got = align_networks(rule.src, ConceptNetwork((node,)), sim, total=False)
            if got is None or got.score < tau:
                continue
            if any(
                s < 1.0 and id(p) not in slot_src_ids for p, s in got.sims.items()
            ):
                continue  # analogue on a slotless src node would vanish
            absorbed: dict[int, list[Node]] = {}
            ok = True
            for t_child, src_owner in got.remainders:
                if id(src_owner) not in slot_src_ids:
                    ok = False  # remainder under a non-slot node would vanish
                    break
                absorbed.setdefault(id(src_owner), []).append(t_child)
            if not ok:
                continue
            region = frozenset(id(t) for t in got.binding.values())
            out.append(_TransferMatch(rule, node, dict(got.binding), got.score, region, absorbed))
    out.sort(key=lambda m: (-m.score, m.rule.rule_id, id(m.anchor)))
    return out


def _select_match_sets(matches: list[_TransferMatch], beam: int) -> list[tuple[_TransferMatch, ...]]:
    """Fork a hypothesis per overlapping alternative; apply disjoint sets together."""
    selections: list[tuple[_TransferMatch, ...]] = []
    seen: set[frozenset[int]] = set()

    def overlap(a: _TransferMatch, b: _TransferMatch) -> bool:
        return bool(a.region & b.region)

    def go(remaining: list[_TransferMatch], chosen: list[_TransferMatch]):
        if len(selections) >= beam * 4:
            return
        if not remaining:
            key = frozenset(id(m) for m in chosen)
            if key not in seen:
                seen.add(key)
                selections.append(tuple(chosen))
            return
        head = remaining[0]
        rivals = [m for m in remaining if overlap(m, head)]
        for pick in [head] + [m for m in rivals if m is not head]:
            rest = [m for m in remaining if m is not pick and not overlap(m, pick)]
            go(rest, chosen + [pick])

    go(matches, [])
    return selections


def _transfer_concept(concept: Concept, cmap: ConceptMap) -> Concept:
    got = cmap.lookup(concept)
    if got is None:
        raise UntranslatableConceptError(concept.text())
    return got


def transfer_scored(
    trules: TransferRuleSet,
    cmap: ConceptMap,
    net: ConceptNetwork,
    lexicon: Lexicon,
    *,
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
    beam: int = DEFAULT_BEAM,
) -> list[tuple[ConceptNetwork, float]]:
    """All receptor networks with scores, best first, deduplicated by equal()."""
    matches = _collect_transfer_matches(trules, lexicon, net, alpha, tau)
    selections = _select_match_sets(matches, beam) if matches else [()]
    results: dict[tuple, tuple[ConceptNetwork, float]] = {}
    errors: list[UntranslatableConceptError] = []
    for selection in selections:
        match_at = {id(m.anchor): m for m in selection}
        try:
            nets_scores = _apply_selection(net, match_at, cmap)
        except UntranslatableConceptError as exc:
            errors.append(exc)
            continue
        score = 1.0
        for m in selection:
            score *= m.score
        for built, sub_score in nets_scores:
            out_net = canonicalize(built)
            key = canonical_key(out_net)
            total = score * sub_score
            prev = results.get(key)
            if prev is None or total > prev[1]:
                results[key] = (out_net, total)
    if not results:
        if errors:
            raise errors[0]
        raise UntranslatableConceptError(
            ", ".join(sorted({c.text() for c in net.concepts()}))
        )
    ranked = sorted(results.values(), key=lambda item: (-item[1], canonical_key(item[0])))
    return ranked[: beam]


def _apply_selection(
    net: ConceptNetwork,
    match_at: dict[int, _TransferMatch],
    cmap: ConceptMap,
) -> list[tuple[ConceptNetwork, float]]:
    """Rebuild the net applying each selected match at its anchor.

    Returns a list because slot fills could in principle bifurcate; with
    disjoint selections each slot fill is deterministic, so this returns one
    network. Kept as a list for the score plumbing.
    """

    def convert(node: Node) -> Node:
        m = match_at.get(id(node))
        if m is not None:
            return build_dst(m.rule.dst.roots[0], m)
        capsule = None
        if node.is_capsule:
            capsule = ConceptNetwork(tuple(convert(r) for r in node.capsule.roots))
            return Node(capsule=capsule, anchor=node.anchor, specifiers=tuple(convert(s) for s in node.specifiers))
        return Node(
            concept=_transfer_concept(node.concept, cmap),
            anchor=node.anchor,
            specifiers=tuple(convert(s) for s in node.specifiers),
        )

    def build_dst(d: Node, m: _TransferMatch) -> Node:
        spec = [build_dst(s, m) for s in d.specifiers]
        if d.is_capsule:
            body = ConceptNetwork(tuple(build_dst(r, m) for r in d.capsule.roots))
            return Node(capsule=body, anchor=d.anchor, specifiers=tuple(spec))
        src = m.rule.slots.get(d)
        if src is None:
            return Node(concept=d.concept, anchor=d.anchor, specifiers=tuple(spec))
        t = m.binding[src]
        concept = _transfer_concept(t.concept, cmap) if not t.is_capsule else None
        extra: list[Node] = []
        for sub in m.absorbed.get(id(src), ()):  # remainders travel into the slot
            extra.append(convert(sub))
        if t.is_capsule:
            body = ConceptNetwork(tuple(convert(r) for r in t.capsule.roots))
            return Node(capsule=body, anchor=t.anchor, specifiers=tuple(extra + spec))
        return Node(concept=concept, anchor=t.anchor, specifiers=tuple(extra + spec))

    rebuilt = ConceptNetwork(tuple(convert(r) for r in net.roots))
    return [(rebuilt, 1.0)]


def apply_transfer(
    trules: TransferRuleSet,
    cmap: ConceptMap,
    net: ConceptNetwork,
    lexicon: Lexicon,
    *,
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
    beam: int = DEFAULT_BEAM,
) -> list[ConceptNetwork]:
    """Receptor networks for a source network, best first (see transfer_scored)."""
    return [n for n, _ in transfer_scored(trules, cmap, net, lexicon, alpha=alpha, tau=tau, beam=beam)]
