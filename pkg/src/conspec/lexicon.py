"""Definition lexicon, stemless registry, and the ancestor ontology.

Definitions express a concept as a network of other concepts (girl = human >
[young, female]). The chain of definition heads (Anne -> girl -> human) is the
ontology behind is_a and similarity. Lexicons are immutable after load;
reloads build a fresh object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ModelLoadError
from .network import Concept, ConceptNetwork, Node

# The registry shipped by default: exactly the stemless labels Table-style
# model corpora use. User models extend it with `declare {label} "..."` lines.
DEFAULT_STEMLESS: dict[str, str] = {
    "past": "past tense",
    "present": "present tense",
    "future": "future tense",
    "past cont.": "past continuous tense",
    "present continuous": "present continuous tense",
    "agent": "agent role",
    "theme": "theme role",
    "recipient": "recipient role",
    "object 1": "first object role",
    "object 2": "second object role",
    "implied": "marks a concept implied rather than surfaced",
    "plural": "plurality",
    "?": "question",
    "!": "exclamation / strong emphasis",
    "emphasis": "emphasis",
    "topic": "topicalization focus",
    "re": "reification of a concept instance",
    "seq": "discourse sequence link",
    "quote": "quoted content",
    "more than": "comparative degree",
    "how": "manner placeholder",
    "verb": "event-concept category",
    "have": "possession macro",
}

# Predefined {have} macro so possessives can be written tersely.
_HAVE_BODY_TEXT = "(have > [<<{agent}, >>{theme}])"


@dataclass(frozen=True)
class Definition:
    name: Concept
    body: ConceptNetwork
    line: int = 0


@dataclass
class Lexicon:
    definitions: dict[Concept, Definition] = field(default_factory=dict)
    stemless_registry: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_STEMLESS))
    surface_forms: dict[Concept, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if Concept("have", True) not in self.definitions:
            from .treeline import parse_network

            self.definitions[Concept("have", True)] = Definition(
                Concept("have", True), parse_network(_HAVE_BODY_TEXT)
            )
        self._check_cycles()

    def _check_cycles(self) -> None:
        # expansion must terminate: no definition may reach itself
        WHITE, GRAY, BLACK = 0, 1, 2
        color: dict[Concept, int] = {}

        def edges(name: Concept) -> list[Concept]:
            body = self.definitions[name].body
            return [c for c in body.concepts() if c in self.definitions]

        def visit(name: Concept, trail: list[Concept]) -> None:
            color[name] = GRAY
            for nxt in edges(name):
                if color.get(nxt, WHITE) == GRAY:
                    cycle = trail[trail.index(nxt) :] if nxt in trail else trail
                    names = " -> ".join(c.text() for c in cycle + [nxt])
                    raise ModelLoadError(
                        f"definition cycle: {names}",
                        line=self.definitions[nxt].line or None,
                    )
                if color.get(nxt, WHITE) == WHITE:
                    visit(nxt, trail + [nxt])
            color[name] = BLACK

        for name in self.definitions:
            if color.get(name, WHITE) == WHITE:
                visit(name, [name])

    # -- queries ------------------------------------------------------------

    def definition(self, concept: Concept) -> Definition | None:
        return self.definitions.get(concept)

    def surfaces(self, concept: Concept) -> list[str]:
        """Surface strings for a concept; defaults to its label."""
        forms = self.surface_forms.get(concept)
        if forms:
            return forms
        return [concept.label]

    def undeclared_stemless(self, nets: list[ConceptNetwork]) -> list[str]:
        out = []
        for net in nets:
            for c in net.concepts():
                if c.stemless and c.label not in self.stemless_registry:
                    if c.label not in out:
                        out.append(c.label)
        return out


def _body_head(body: ConceptNetwork) -> Concept:
    node = body.roots[0]
    while node.is_capsule:
        node = node.capsule.roots[0]
    return node.concept


def ancestors(lex: Lexicon, concept: Concept) -> set[Concept]:
    """The definition-head chain from the concept up, plus the concept itself."""
    out = {concept}
    cur = concept
    while True:
        defn = lex.definition(cur)
        if defn is None:
            return out
        cur = _body_head(defn.body)
        if cur in out:  # cycle guard; load-time check makes this unreachable
            return out
        out.add(cur)


def is_a(lex: Lexicon, concept: Concept, category: Concept) -> bool:
    return category in ancestors(lex, concept)


def _substitute(node: Node, lex: Lexicon) -> tuple[Node, ...]:
    spec = tuple(n for s in node.specifiers for n in _substitute(s, lex))
    if node.is_capsule:
        body_roots = tuple(n for r in node.capsule.roots for n in _substitute(r, lex))
        return (Node(capsule=ConceptNetwork(body_roots), anchor=node.anchor, specifiers=spec),)
    defn = lex.definition(node.concept)
    if defn is None:
        return (Node(concept=node.concept, anchor=node.anchor, specifiers=spec),)
    body_roots = tuple(_copy_node(r) for r in defn.body.roots)
    if not spec and node.anchor is None:
        # bare occurrence: splice the body in directly
        return body_roots
    root = body_roots[0]
    if len(body_roots) == 1 and not root.specifiers:
        if root.is_capsule:
            # single capsule-root body ({have} macro): merge in place
            return (
                Node(
                    capsule=root.capsule,
                    anchor=node.anchor or root.anchor,
                    specifiers=spec,
                ),
            )
        return (Node(concept=root.concept, anchor=node.anchor or root.anchor, specifiers=spec),)
    # specified occurrence of a multi-node body: encapsulate to keep grouping
    return (Node(capsule=ConceptNetwork(body_roots), anchor=node.anchor, specifiers=spec),)


def _copy_node(node: Node) -> Node:
    capsule = None
    if node.is_capsule:
        capsule = ConceptNetwork(tuple(_copy_node(r) for r in node.capsule.roots))
    return Node(
        concept=node.concept,
        capsule=capsule,
        anchor=node.anchor,
        specifiers=tuple(_copy_node(s) for s in node.specifiers),
    )


def expand(lex: Lexicon, concept: Concept, depth: int) -> ConceptNetwork:
    """Substitute definition bodies for the concept, ``depth`` levels deep.

    Depth 0 returns the bare concept; primitives return themselves at any
    depth. A multi-node body replaces its concept as an encapsulation whose
    head is the body's first root, so (girl > imaginative) expanded once more
    becomes (human > [young, female]) > imaginative with head human.
    """
    net = ConceptNetwork((Node(concept=concept),))
    for _ in range(depth):
        net = ConceptNetwork(tuple(n for r in net.roots for n in _substitute(r, lex)))
    return net
