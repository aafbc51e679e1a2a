"""Parsing: generation run in reverse.

segment() recovers token sequences (known surface forms plus affix literals
drawn from rule right-hand sides) that re-join to the input exactly.
parse_text() then runs a bottom-up chart over each segmentation: a rule whose
part sequence tiles a span rebuilds its pattern around the matched fragments,
exactly or analogically. Complete parses are canonicalized, deduplicated, and
ranked by derivation score.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnparseableTextError
from .model import ModelBundle
from .network import ConceptNetwork, Node, canonical_key, canonicalize
from .realizer import join_affixes, strip_orthography
from .rules import Literal, PatternPart, instantiate_reverse
from .treeline import print_network


@dataclass
class Vocabulary:
    surfaces: dict[str, list] = field(default_factory=dict)  # surface -> [Concept]
    literals: set[str] = field(default_factory=set)  # every rule literal
    affixes: set[str] = field(default_factory=set)  # marker-carrying literals

    def knows(self, token: str) -> bool:
        return token in self.surfaces or token in self.literals

    def max_words(self) -> int:
        longest = 1
        for s in self.surfaces:
            longest = max(longest, s.count(" ") + 1)
        return longest


def build_vocabulary(model: ModelBundle) -> Vocabulary:
    vocab = Vocabulary()
    concepts = set()
    for rule in model.rules:
        for part in rule.parts:
            if isinstance(part, Literal):
                vocab.literals.add(part.text)
                t = part.text
                if (t.startswith("+") or t.startswith("-") or t.endswith("+")) and len(t) > 1:
                    vocab.affixes.add(t)
        for node in rule.lhs.iter_nodes():
            if node.concept is not None:
                concepts.add(node.concept)
    for name in model.lexicon.definitions:
        concepts.add(name)
    for concept in concepts:
        if concept.stemless:
            continue
        for surface in model.lexicon.surfaces(concept):
            vocab.surfaces.setdefault(surface, []).append(concept)
    return vocab


def _decompose(word: str, vocab: Vocabulary, limit: int = 3) -> list[list[str]]:
    """Affix splits of one word: [stem, op, ...] sequences that re-join to it."""
    out: list[list[str]] = []
    seen: set[tuple[str, int]] = set()

    def undo(cur: str, ops: list[str], depth: int) -> None:
        if depth > limit or (cur, depth) in seen:
            return
        seen.add((cur, depth))
        if ops and cur in vocab.surfaces:
            out.append([cur] + ops)
        for affix in vocab.affixes:
            if affix.startswith("+"):
                tail = affix[1:]
                if cur.endswith(tail) and len(cur) > len(tail):
                    undo(cur[: -len(tail)], [affix] + ops, depth + 1)
            elif affix.startswith("-"):
                undo(cur + affix[1:], [affix] + ops, depth + 1)
            elif affix.endswith("+"):
                head = affix[:-1]
                if cur.startswith(head) and len(cur) > len(head):
                    undo(cur[len(head) :], ops + [affix], depth + 1)

    undo(word, [], 0)
    return [seq for seq in out if join_affixes(seq) == word]


def segment(model: ModelBundle, text: str) -> list[list[str]]:
    """All token sequences covering the text; whitespace-only splits first.

    Every token is a known surface form or a known rule literal; each
    sequence re-joins to the input exactly. With orthography on, terminal
    punctuation is stripped and a lowercased sentence-initial variant is
    tried as a fallback (proper nouns keep their case).
    """
    if model.pragmas.orthography:
        core, _ = strip_orthography(text)
        try:
            return _segment_raw(model, core)
        except UnparseableTextError:
            lowered = core[:1].lower() + core[1:]
            if lowered == core:
                raise
            return _segment_raw(model, lowered)
    return _segment_raw(model, text)


def _segment_raw(model: ModelBundle, text: str) -> list[list[str]]:
    words = text.split()
    if not words:
        raise UnparseableTextError("empty input")
    vocab = build_vocabulary(model)
    span = vocab.max_words()

    table: dict[int, list[tuple[list[str], int]]] = {len(words): [([], 0)]}

    def seg(i: int) -> list[tuple[list[str], int]]:
        if i in table:
            return table[i]
        options: list[tuple[list[str], int]] = []
        for j in range(min(len(words), i + span), i, -1):
            token = " ".join(words[i:j])
            if vocab.knows(token):
                for rest, splits in seg(j):
                    options.append(([token] + rest, splits))
        for decomp in _decompose(words[i], vocab):
            for rest, splits in seg(i + 1):
                options.append((decomp + rest, splits + 1))
        table[i] = options
        return options

    results = seg(0)
    if not results:
        prefix = []
        for w in words:
            if not vocab.knows(w) and not _decompose(w, vocab):
                break
            prefix.append(w)
        raise UnparseableTextError(
            f"no segmentation of {text!r}; longest known prefix: {' '.join(prefix)!r}",
            best_spans=[" ".join(prefix)] if prefix else [],
        )
    ordered = sorted(results, key=lambda r: (r[1], len(r[0])))
    out, seen = [], set()
    for tokens, _ in ordered:
        key = tuple(tokens)
        if key not in seen:
            seen.add(key)
            out.append(tokens)
    return out[:32]


@dataclass
class _Item:
    net: ConceptNetwork
    score: float
    trace: list[str]
    unary: int = 0  # consecutive same-span rule applications (cycle guard)


def _chart_parse(model: ModelBundle, tokens: list[str], vocab: Vocabulary):
    n = len(tokens)
    beam = model.pragmas.beam
    lits: dict[tuple[int, int], str] = {(i, i + 1): tokens[i] for i in range(n)}
    frags: dict[tuple[int, int], dict[tuple, _Item]] = {
        (i, j): {} for i in range(n) for j in range(i + 1, n + 1)
    }

    def add(i: int, j: int, item: _Item) -> bool:
        cell = frags[(i, j)]
        key = canonical_key(item.net)
        prev = cell.get(key)
        if prev is not None:
            if prev.score >= item.score:
                return False
            cell[key] = item
            return True
        if len(cell) >= beam:
            worst_key, worst = min(cell.items(), key=lambda kv: kv[1].score)
            if worst.score >= item.score:
                return False  # cannot displace anything: keeps the loop finite
            del cell[worst_key]
        cell[key] = item
        return True

    for i, token in enumerate(tokens):
        for concept in vocab.surfaces.get(token, ()):  # shift: token -> concept
            net = ConceptNetwork((Node(concept=concept),))
            add(i, i + 1, _Item(net, 1.0, [f"shift:{token}"]))

    MAX_UNARY = 2

    def apply_rules_over(i: int, j: int) -> None:
        changed = True
        while changed:
            changed = False
            for rule in model.rules:
                for tiling in _tilings(rule, i, j):
                    same_span = tiling == [(i, j)]
                    for combo in _part_combos(rule, tiling, frags, beam):
                        items, score, trace = combo
                        picked = [it for it in items if it is not None]
                        unary = 0
                        if same_span and picked:
                            unary = picked[0].unary + 1
                            if unary > MAX_UNARY:
                                continue
                        nets = [None if it is None else it.net for it in items]
                        got = instantiate_reverse(rule, nets, model.lexicon, model.pragmas.alpha)
                        if got is None:
                            continue
                        built, match_score = got
                        if match_score < model.pragmas.tau:
                            continue
                        item = _Item(
                            canonicalize(built),
                            score * match_score,
                            trace + [f"rule:{rule.rule_id}@{i}:{j}"],
                            unary,
                        )
                        if add(i, j, item):
                            changed = True

    def _tilings(rule, i: int, j: int):
        parts = rule.parts
        out: list[list[tuple[int, int]]] = []

        def go(idx: int, at: int, acc: list[tuple[int, int]]):
            if idx == len(parts):
                if at == j:
                    out.append(list(acc))
                return
            part = parts[idx]
            if isinstance(part, Literal):
                if lits.get((at, at + 1)) == part.text:
                    go(idx + 1, at + 1, acc + [(at, at + 1)])
                return
            for end in range(at + 1, j + 1):
                if frags[(at, end)]:
                    go(idx + 1, end, acc + [(at, end)])

        go(0, i, [])
        return out

    def _part_combos(rule, tiling, frags_table, cap):
        slots: list[list[_Item | None]] = []
        for part, (a, b) in zip(rule.parts, tiling):
            if isinstance(part, Literal):
                slots.append([None])
            else:
                ranked = sorted(frags_table[(a, b)].values(), key=lambda it: -it.score)
                slots.append(list(ranked[:cap]))
        from itertools import islice, product as iter_product

        combos = []
        for picked in islice(iter_product(*slots), cap * 4):
            score = 1.0
            trace: list[str] = []
            for it in picked:
                if it is not None:
                    score *= it.score
                    trace.extend(it.trace)
            combos.append((list(picked), score, trace))
        return combos

    for width in range(1, n + 1):
        for i in range(0, n - width + 1):
            apply_rules_over(i, i + width)
    return frags


def parse_text(model: ModelBundle, text: str) -> list[tuple[ConceptNetwork, float, list[str]]]:
    """Ranked (network, score, trace) parses of surface text, best first.

    With orthography on, a stripped terminal '?' or '!' prefers parses whose
    network carries the matching concept (falling back to all parses when
    none does, since punctuation may be rule-encoded only partially).
    """
    punct = None
    if model.pragmas.orthography:
        _, punct = strip_orthography(text)
    vocab = build_vocabulary(model)
    segmentations = segment(model, text)
    results: dict[tuple, tuple[ConceptNetwork, float, list[str]]] = {}
    best_partial: list[str] = []
    for tokens in segmentations:
        frags = _chart_parse(model, tokens, vocab)
        n = len(tokens)
        complete = frags[(0, n)] if n else {}
        for key, item in complete.items():
            prev = results.get(key)
            if prev is None or item.score > prev[1]:
                results[key] = (item.net, item.score, item.trace)
        if not complete:
            spans = [
                (j - i, i, j)
                for (i, j), cell in frags.items()
                if cell
            ]
            if spans:
                w, i, j = max(spans)
                best_partial.append(" ".join(tokens[i:j]))
    if not results:
        raise UnparseableTextError(
            f"no complete parse of {text!r}", best_spans=sorted(set(best_partial))
        )
    ranked = sorted(
        results.values(), key=lambda r: (-r[1], print_network(r[0]))
    )
    if punct in ("?", "!"):
        wanted = punct
        marked = [
            r
            for r in ranked
            if any(c.stemless and c.label == wanted for c in r[0].concepts())
        ]
        if marked:
            ranked = marked
    return ranked
