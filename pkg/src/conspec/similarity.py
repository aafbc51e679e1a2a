"""Concept and subnetwork similarity for analogical rule selection.

concept_sim compares two concepts through their definition-ancestor sets.
network_sim finds the best structure-preserving alignment between two
networks; its score is the geometric mean of the aligned concept
similarities. Exact matches score 1; anything involving substitution is
capped by the alpha discount so exact rules always dominate analogues.

The alignment engine here is shared with the rules module, which plugs in a
richer node scorer (is_a pre-test) and allows prefix alignments that leave
target remainders attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable

from .lexicon import Lexicon, ancestors, is_a
from .network import Concept, ConceptNetwork, Node

DEFAULT_ALPHA = 0.9

NodeSim = Callable[[Concept, Concept], float]


def concept_sim(lex: Lexicon, a: Concept, b: Concept, alpha: float = DEFAULT_ALPHA) -> float:
    """Definition-overlap similarity in [0, 1]; 1 iff identical."""
    if a == b:
        return 1.0
    aa = ancestors(lex, a) - {a, b}
    bb = ancestors(lex, b) - {a, b}
    union = aa | bb
    if not union:
        return 0.0
    return alpha * len(aa & bb) / len(union)


def pure_node_sim(lex: Lexicon, alpha: float = DEFAULT_ALPHA) -> NodeSim:
    """network_sim scorer: stemless concepts are grammatical operators and
    must match exactly; everything else scores concept_sim."""

    def sim(pattern: Concept, target: Concept) -> float:
        if pattern == target:
            return 1.0
        if pattern.stemless or target.stemless:
            return 0.0
        return concept_sim(lex, pattern, target, alpha)

    return sim


def rule_node_sim(lex: Lexicon, alpha: float = DEFAULT_ALPHA) -> NodeSim:
    """Rule-matching scorer: is_a is tested before falling back to
    similarity, so a rule written over a definition-level concept (a rule
    over {verb}, or over tool) applies to anything defined beneath it."""

    def sim(pattern: Concept, target: Concept) -> float:
        if pattern == target:
            return 1.0
        if is_a(lex, target, pattern):
            return alpha
        if pattern.stemless or target.stemless:
            return 0.0
        return concept_sim(lex, pattern, target, alpha)

    return sim


@dataclass
class Alignment:
    """A structure-preserving map of pattern nodes onto target nodes."""

    product: float
    count: int
    binding: dict[Node, Node] = field(default_factory=dict)
    sims: dict[Node, float] = field(default_factory=dict)  # pattern node -> sim
    # (target child subtree, pattern node owning its matched parent)
    remainders: list[tuple[Node, Node]] = field(default_factory=list)

    @property
    def score(self) -> float:
        if self.count == 0:
            return 1.0
        return self.product ** (1.0 / self.count)


def _combine(parts: list[Alignment]) -> Alignment:
    out = Alignment(1.0, 0)
    for p in parts:
        out.product *= p.product
        out.count += p.count
        out.binding.update(p.binding)
        out.sims.update(p.sims)
        out.remainders.extend(p.remainders)
    return out


def _align_node(pattern: Node, target: Node, sim: NodeSim, total: bool, memo) -> Alignment | None:
    key = (id(pattern), id(target))
    if key in memo:
        return memo[key]
    result = _align_node_uncached(pattern, target, sim, total, memo)
    memo[key] = result
    return result


def _align_node_uncached(
    pattern: Node, target: Node, sim: NodeSim, total: bool, memo
) -> Alignment | None:
    if pattern.is_capsule != target.is_capsule:
        return None
    pa = (pattern.anchor.direction, pattern.anchor.depth) if pattern.anchor else None
    ta = (target.anchor.direction, target.anchor.depth) if target.anchor else None
    if pa != ta:
        return None
    parts: list[Alignment] = []
    if pattern.is_capsule:
        proots, troots = pattern.capsule.roots, target.capsule.roots
        if len(proots) != len(troots):
            return None
        for p, t in zip(proots, troots):
            sub = _align_node(p, t, sim, total, memo)
            if sub is None:
                return None
            parts.append(sub)
        self_part = Alignment(1.0, 0, {pattern: target})
    else:
        s = sim(pattern.concept, target.concept)
        if s <= 0.0:
            return None
        self_part = Alignment(s, 1, {pattern: target}, {pattern: s})
    children = _align_children(pattern, target, sim, total, memo)
    if children is None:
        return None
    return _combine([self_part, children] + parts)


def _align_children(
    pattern: Node, target: Node, sim: NodeSim, total: bool, memo
) -> Alignment | None:
    pc, tc = pattern.specifiers, target.specifiers
    if total and len(pc) != len(tc):
        return None
    if len(pc) > len(tc):
        return None
    if not pc:
        out = Alignment(1.0, 0)
        out.remainders = [(t, pattern) for t in tc]
        return out
    options: list[list[Alignment | None]] = [
        [_align_node(p, t, sim, total, memo) for t in tc] for p in pc
    ]
    best: Alignment | None = None
    for assign in permutations(range(len(tc)), len(pc)):
        picked = []
        ok = True
        for i, j in enumerate(assign):
            sub = options[i][j]
            if sub is None:
                ok = False
                break
            picked.append(sub)
        if not ok:
            continue
        combined = _combine(picked)
        leftover = [tc[j] for j in range(len(tc)) if j not in assign]
        combined.remainders.extend((t, pattern) for t in leftover)
        if best is None or combined.product > best.product:
            best = combined
    return best


def align_networks(
    pattern: ConceptNetwork,
    target: ConceptNetwork,
    sim: NodeSim,
    *,
    total: bool,
) -> Alignment | None:
    """Best alignment of the pattern onto the target's root region.

    Root lists are paired index-wise (root order is significant). With
    ``total`` every target node must be matched (a bijection); otherwise the
    pattern must embed prefix-closed and unmatched target children are
    returned as remainders tagged with the pattern node that absorbed them.
    """
    if len(pattern.roots) != len(target.roots):
        return None
    memo: dict = {}
    parts = []
    for p, t in zip(pattern.roots, target.roots):
        sub = _align_node(p, t, sim, total, memo)
        if sub is None:
            return None
        parts.append(sub)
    return _combine(parts)


def network_sim(
    lex: Lexicon,
    pattern: ConceptNetwork,
    target: ConceptNetwork,
    alpha: float = DEFAULT_ALPHA,
) -> tuple[float, dict[Node, Node]]:
    """Best-alignment similarity between two networks.

    Returns (score, binding). Score 0 with an empty binding when no valid
    alignment exists. The maximum is exact: every structure-preserving
    bijection is considered (networks here are desk-scale).
    """
    got = align_networks(pattern, target, pure_node_sim(lex, alpha), total=True)
    if got is None or got.product <= 0.0:
        return 0.0, {}
    return got.score, got.binding
