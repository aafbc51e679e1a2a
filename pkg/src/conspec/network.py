"""Core concept-network model.

A network is a rooted multi-tree. Each node carries either a concept or an
encapsulated sub-network (a "capsule"), an ordered list of specifier children,
and optionally an external-anchor annotation that reaches across capsule
boundaries. Semantics of an edge: the child further specifies (narrows) its
parent.

Networks are immutable after construction by convention: nothing in this
package mutates a node once it is part of a returned network, so networks are
safe to share between threads. ``resolve_anchors`` wires the single mutable
slot (``Node.ref``) exactly once on freshly built nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import MalformedNetworkError

UP = "up"
DOWN = "down"

# Characters that can never appear in a concept label.
STRUCTURAL_CHARS = set(">[](){},=<'#")


@dataclass(frozen=True)
class Concept:
    """An atomic unit of meaning: a stem, or a stemless operator like {past}.

    ``sense`` discriminates homographs; unannotated concepts are sense 1.
    """

    label: str
    stemless: bool = False
    sense: int = 1

    def __post_init__(self):
        if not self.label:
            raise MalformedNetworkError("concept label must be nonempty")
        bad = STRUCTURAL_CHARS.intersection(self.label)
        if bad:
            raise MalformedNetworkError(
                f"concept label {self.label!r} contains structural character {sorted(bad)[0]!r}"
            )

    def text(self) -> str:
        base = self.label if self.sense == 1 else f"{self.label}#{self.sense}"
        return "{" + base + "}" if self.stemless else base

    def __repr__(self) -> str:
        return f"Concept({self.text()})"


@dataclass(frozen=True)
class Anchor:
    """External-anchor annotation: `>>` (up) possibly repeated, or `<<` (down)."""

    direction: str  # UP or DOWN
    depth: int = 1

    def text(self) -> str:
        return ">>" * self.depth if self.direction == UP else "<<"


class Node:
    """One tree node: a concept or a capsule, plus its specifiers.

    ``ref`` is the resolved target of this node's anchor (shared object, not a
    copy), populated by ``resolve_anchors``; it is ignored by equality and
    printing, which work on the anchor annotation itself.
    """

    __slots__ = ("concept", "capsule", "anchor", "specifiers", "ref")

    def __init__(
        self,
        concept: Concept | None = None,
        capsule: "ConceptNetwork | None" = None,
        anchor: Anchor | None = None,
        specifiers: tuple["Node", ...] = (),
    ):
        if (concept is None) == (capsule is None):
            raise MalformedNetworkError("node must hold exactly one of concept or capsule")
        self.concept = concept
        self.capsule = capsule
        self.anchor = anchor
        self.specifiers = tuple(specifiers)
        self.ref: Node | None = None

    @property
    def is_capsule(self) -> bool:
        return self.capsule is not None

    def head_concept(self) -> Concept:
        """The concept this node exposes: itself, or the capsule head."""
        if self.concept is not None:
            return self.concept
        return self.capsule.roots[0].head_concept()

    def __repr__(self) -> str:
        from .treeline import print_network  # local import to avoid a cycle

        return f"Node({print_network(ConceptNetwork((self,)))})"


class ConceptNetwork:
    """A rooted multi-tree of specification edges (usually one root)."""

    __slots__ = ("roots",)

    def __init__(self, roots: tuple[Node, ...] | list[Node]):
        roots = tuple(roots)
        if not roots:
            raise MalformedNetworkError("network must have at least one root")
        self.roots = roots

    def iter_nodes(self) -> Iterator[Node]:
        """All nodes, depth-first, descending into capsule bodies."""
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            yield node
            if node.is_capsule:
                stack.extend(reversed(node.capsule.roots))
            stack.extend(reversed(node.specifiers))

    def size(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def concepts(self) -> list[Concept]:
        """Multiset of concepts in the network (capsule shells excluded)."""
        return [n.concept for n in self.iter_nodes() if n.concept is not None]

    def __repr__(self) -> str:
        from .treeline import print_network

        return f"ConceptNetwork({print_network(self)!r})"


def single(concept: Concept) -> ConceptNetwork:
    """Network consisting of one bare concept."""
    return ConceptNetwork((Node(concept=concept),))


# ---------------------------------------------------------------------------
# Canonical form and equality
# ---------------------------------------------------------------------------
#
# Specifier order is meaningless, so equality compares order-normalized keys.
# The total order on sibling specifiers: stemless concepts first, then plain
# concepts, then capsules; within a kind, leaves before branches, then label,
# sense, anchor, and the children's keys. Root lists are order-significant
# (the first root of a capsule body is its head) and are never reordered.

_ANCHOR_NONE = ("", 0)


def _node_key(node: Node):
    ak = (node.anchor.direction, node.anchor.depth) if node.anchor else _ANCHOR_NONE
    leaf = 0 if not node.specifiers else 1
    kids = tuple(sorted(_node_key(s) for s in node.specifiers))
    if node.concept is not None:
        kind = 0 if node.concept.stemless else 1
        return (kind, leaf, node.concept.label, node.concept.sense, ak, kids)
    body = tuple(_node_key(r) for r in node.capsule.roots)
    return (2, leaf, body, ak, kids)


def _network_key(net: ConceptNetwork):
    return tuple(_node_key(r) for r in net.roots)


def _canonical_node(node: Node) -> Node:
    spec = tuple(sorted((_canonical_node(s) for s in node.specifiers), key=_node_key))
    capsule = None
    if node.is_capsule:
        capsule = ConceptNetwork(tuple(_canonical_node(r) for r in node.capsule.roots))
    return Node(concept=node.concept, capsule=capsule, anchor=node.anchor, specifiers=spec)


def canonicalize(net: ConceptNetwork) -> ConceptNetwork:
    """Order-normalize a network; idempotent.

    Also validates that every anchor annotation resolves to exactly one node,
    raising MalformedNetworkError otherwise. Any previously wired reference
    edges are dropped (canonicalize, then resolve).
    """
    _resolve(net, assign=False)
    return ConceptNetwork(tuple(_canonical_node(r) for r in net.roots))


def equal(a: ConceptNetwork, b: ConceptNetwork) -> bool:
    """Structural equality up to specifier order.

    Purely structural: anchor-open networks (definition bodies like the
    possession macro, whose anchors resolve only once substituted into a
    host) compare fine; canonicalize is where resolvability is enforced.
    """
    return _network_key(a) == _network_key(b)


def canonical_key(net: ConceptNetwork):
    """Hashable identity usable for dedup; equal() iff keys match."""
    return _network_key(net)


# ---------------------------------------------------------------------------
# External-anchor resolution
# ---------------------------------------------------------------------------
#
# An up anchor on node X crosses the boundary of X's innermost enclosing
# capsule; each crossed capsule node that itself carries an up prefix relays
# the reference outward by its own depth (the doubled ">>" spelling). When the
# crossing count is spent, the target is the node that capsule specifies (its
# parent). A down anchor resolves to the single node that specifies the
# innermost enclosing capsule from outside.


def _resolve(net: ConceptNetwork, assign: bool) -> None:
    # frames: innermost-last list of (capsule_node, parent_of_capsule or None)
    def walk(nodes: tuple[Node, ...], parent: Node | None, frames) -> None:
        for node in nodes:
            if node.anchor is not None and not node.is_capsule:
                target = _target(node, frames)
                if assign:
                    node.ref = target
            if node.anchor is not None and node.is_capsule and node.anchor.direction == DOWN:
                raise MalformedNetworkError("'<<' cannot prefix an encapsulation")
            if node.is_capsule:
                walk(node.capsule.roots, None, frames + [(node, parent)])
            walk(node.specifiers, node, frames)

    walk(net.roots, None, [])


def _target(node: Node, frames) -> Node:
    anchor = node.anchor
    if not frames:
        raise MalformedNetworkError(
            f"anchor {anchor.text()} on {node.head_concept().text()} has no enclosing encapsulation"
        )
    if anchor.direction == DOWN:
        if anchor.depth != 1:
            raise MalformedNetworkError("'<<' anchors deeper than one boundary are not supported")
        capsule_node, _parent = frames[-1]
        outside = capsule_node.specifiers
        if len(outside) != 1:
            raise MalformedNetworkError(
                f"'<<' anchor needs exactly one specifier on the enclosing encapsulation, found {len(outside)}"
            )
        return outside[0]
    remaining = anchor.depth
    idx = len(frames) - 1
    while True:
        capsule_node, parent = frames[idx]
        remaining -= 1
        if capsule_node.anchor is not None and capsule_node.anchor.direction == UP:
            remaining += capsule_node.anchor.depth  # relay
        if remaining == 0:
            if parent is None:
                raise MalformedNetworkError(
                    f"anchor {anchor.text()} resolves to an encapsulation with no parent"
                )
            return parent
        idx -= 1
        if idx < 0:
            raise MalformedNetworkError(
                f"anchor {anchor.text()} crosses more boundaries than exist"
            )


def _rebuild(node: Node, mapping: dict[int, Node]) -> Node:
    capsule = None
    if node.is_capsule:
        capsule = ConceptNetwork(tuple(_rebuild(r, mapping) for r in node.capsule.roots))
    new = Node(
        concept=node.concept,
        capsule=capsule,
        anchor=node.anchor,
        specifiers=tuple(_rebuild(s, mapping) for s in node.specifiers),
    )
    mapping[id(node)] = new
    return new


def resolve_anchors(net: ConceptNetwork) -> ConceptNetwork:
    """Return a copy of the network with reference edges wired.

    Each anchored node's ``ref`` points at its resolved node (shared, not
    copied), so co-reference is detectable downstream. The anchor annotation
    is kept so printing and equality still see the written structure.
    """
    mapping: dict[int, Node] = {}
    fresh = ConceptNetwork(tuple(_rebuild(r, mapping) for r in net.roots))
    _resolve(fresh, assign=True)
    return fresh


# ---------------------------------------------------------------------------
# Paths and JSON export
# ---------------------------------------------------------------------------
#
# A path is a tuple of steps from the network: ("r", i) picks root i, ("s", i)
# specifier i, ("b", i) capsule-body root i. Paths identify nodes in fixtures
# and in the JSON export's resolved-reference entries.


def node_paths(net: ConceptNetwork) -> dict[int, tuple]:
    """Map id(node) -> path for every node in the network."""
    paths: dict[int, tuple] = {}

    def walk(node: Node, path: tuple) -> None:
        paths[id(node)] = path
        if node.is_capsule:
            for i, r in enumerate(node.capsule.roots):
                walk(r, path + (("b", i),))
        for i, s in enumerate(node.specifiers):
            walk(s, path + (("s", i),))

    for i, r in enumerate(net.roots):
        walk(r, (("r", i),))
    return paths


def anchor_resolutions(net: ConceptNetwork) -> list[tuple[tuple, tuple]]:
    """(anchor node path, resolved target path) pairs, in document order.

    The network must have been produced by resolve_anchors.
    """
    paths = node_paths(net)
    out = []
    for node in net.iter_nodes():
        if node.ref is not None:
            out.append((paths[id(node)], paths[id(node.ref)]))
    return out


def to_json_dict(net: ConceptNetwork) -> dict:
    """Nested-graph export; format documented in docs/formats.md."""
    paths = node_paths(net)

    def conv(node: Node) -> dict:
        d: dict = {}
        if node.concept is not None:
            d["label"] = node.concept.label
            d["stemless"] = node.concept.stemless
            d["sense"] = node.concept.sense
        else:
            d["capsule"] = {"roots": [conv(r) for r in node.capsule.roots]}
        if node.anchor is not None:
            d["anchor"] = {"dir": node.anchor.direction, "depth": node.anchor.depth}
        if node.ref is not None:
            d["ref"] = [list(step) for step in paths[id(node.ref)]]
        d["specifiers"] = [conv(s) for s in node.specifiers]
        return d

    return {"roots": [conv(r) for r in net.roots]}


def map_concepts(net: ConceptNetwork, fn: Callable[[Concept], Concept]) -> ConceptNetwork:
    """Rebuild the network applying ``fn`` to every concept."""

    def conv(node: Node) -> Node:
        capsule = None
        concept = None
        if node.is_capsule:
            capsule = ConceptNetwork(tuple(conv(r) for r in node.capsule.roots))
        else:
            concept = fn(node.concept)
        return Node(
            concept=concept,
            capsule=capsule,
            anchor=node.anchor,
            specifiers=tuple(conv(s) for s in node.specifiers),
        )

    return ConceptNetwork(tuple(conv(r) for r in net.roots))
