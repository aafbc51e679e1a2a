import pytest

from conspec.errors import ModelLoadError
from conspec.lexicon import DEFAULT_STEMLESS, Definition, Lexicon, ancestors, expand, is_a
from conspec.network import Concept, equal
from conspec.treeline import parse_network, print_network


def make_lexicon(pairs: dict[str, str]) -> Lexicon:
    defs = {}
    for name, body in pairs.items():
        c = Concept(name.strip("{}"), name.startswith("{"))
        defs[c] = Definition(c, parse_network(body))
    return Lexicon(definitions=defs)


@pytest.fixture
def anne_lex() -> Lexicon:
    return make_lexicon(
        {
            "Anne": "girl > imaginative",
            "girl": "human > [young, female]",
            "trust": "{verb}",
            "jump": "{verb}",
            "pitchfork": "fork > [(move > [>>{theme}, {plural}]) > hay]",
            "fork": "tool > prong > {plural}",
        }
    )


class TestExpand:
    def test_depth_one(self, anne_lex):
        out = expand(anne_lex, Concept("Anne"), 1)
        assert print_network(out) == "girl > imaginative"

    def test_depth_two_encapsulates_with_head(self, anne_lex):
        # hand-composed: the girl definition slots under imaginative as a capsule
        out = expand(anne_lex, Concept("Anne"), 2)
        assert equal(out, parse_network("(human > [young, female]) > imaginative"))
        assert out.roots[0].is_capsule
        assert out.roots[0].head_concept().label == "human"

    def test_primitive_fixed_point(self, anne_lex):
        for depth in (0, 1, 5):
            out = expand(anne_lex, Concept("human"), depth)
            assert print_network(out) == "human"

    def test_depth_zero_no_expansion(self, anne_lex):
        assert print_network(expand(anne_lex, Concept("Anne"), 0)) == "Anne"

    def test_have_macro_merges_in_place(self):
        lex = Lexicon()
        net = parse_network("dog > {have} > John")
        expanded = lex_expand_network(lex, net)
        assert equal(expanded, parse_network("dog > (have > [<<{agent}, >>{theme}]) > John"))


def lex_expand_network(lex, net):
    from conspec.lexicon import _substitute

    from conspec.network import ConceptNetwork

    return ConceptNetwork(tuple(n for r in net.roots for n in _substitute(r, lex)))


class TestAncestors:
    def test_anne_chain(self, anne_lex):
        got = {c.label for c in ancestors(anne_lex, Concept("Anne"))}
        assert got == {"Anne", "girl", "human"}

    def test_pitchfork_inherits_tool(self, anne_lex):
        got = {c.label for c in ancestors(anne_lex, Concept("pitchfork"))}
        assert "tool" in got

    def test_undefined_primitive(self, anne_lex):
        assert ancestors(anne_lex, Concept("x")) == {Concept("x")}

    def test_monotone_under_unrelated_additions(self, anne_lex):
        before = ancestors(anne_lex, Concept("Anne"))
        bigger = make_lexicon(
            {
                "Anne": "girl > imaginative",
                "girl": "human > [young, female]",
                "swallow": "bird > fast",
            }
        )
        assert before <= ancestors(bigger, Concept("Anne"))


class TestIsA:
    def test_anne_is_human(self, anne_lex):
        assert is_a(anne_lex, Concept("Anne"), Concept("human"))

    def test_antisymmetric(self, anne_lex):
        assert not is_a(anne_lex, Concept("human"), Concept("Anne"))

    def test_jump_is_verb(self, anne_lex):
        assert is_a(anne_lex, Concept("jump"), Concept("verb", True))


class TestRegistry:
    def test_default_registry_labels(self):
        lex = Lexicon()
        expected = {
            "past", "present", "future", "past cont.", "present continuous",
            "agent", "theme", "recipient", "object 1", "object 2", "implied",
            "plural", "?", "!", "emphasis", "topic", "re", "seq", "quote",
            "more than", "how", "verb", "have",
        }
        assert set(lex.stemless_registry) == expected
        assert set(DEFAULT_STEMLESS) == expected

    def test_undeclared_stemless_reported(self):
        lex = Lexicon()
        nets = [parse_network("x > {ta}"), parse_network("y > {past}")]
        assert lex.undeclared_stemless(nets) == ["ta"]


class TestCycles:
    def test_direct_cycle_rejected_citing_both(self):
        with pytest.raises(ModelLoadError) as exc:
            make_lexicon({"a": "b", "b": "a"})
        msg = str(exc.value)
        assert "a" in msg and "b" in msg

    def test_self_cycle_rejected(self):
        with pytest.raises(ModelLoadError):
            make_lexicon({"a": "a > x"})


class TestHaveMacroIntegration:
    def test_expansion_resolves_possessive_coreference(self):
        from conspec.network import anchor_resolutions, canonicalize, resolve_anchors
        from conspec.treeline import parse_network

        lex = Lexicon()
        net = parse_network("(dog > {have} > John) > hungry > {present}")
        expanded = lex_expand_network(lex, net)
        assert equal(
            expanded,
            parse_network("(dog > (have > [<<{agent}, >>{theme}]) > John) > hungry > {present}"),
        )
        resolved = resolve_anchors(canonicalize(expanded))
        refs = sorted(
            n.ref.head_concept().label for n in resolved.iter_nodes() if n.ref is not None
        )
        assert refs == ["John", "dog"]
        assert len(anchor_resolutions(resolved)) == 2
