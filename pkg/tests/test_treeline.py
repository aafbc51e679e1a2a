import random
import string
from importlib import resources

import pytest

from conspec.errors import TreelineParseError
from conspec.network import canonicalize, equal
from conspec.treeline import (
    DeclareStmt,
    DefinitionStmt,
    MapStmt,
    NetworkStmt,
    PragmaStmt,
    RuleStmt,
    TransferRuleStmt,
    parse_document,
    parse_network,
    print_network,
)

from .gen import gen_network


def construction_rows() -> list[tuple[str, str, str]]:
    text = resources.files("conspec.data").joinpath("construction_corpus.tsv").read_text()
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        rows.append((fields[0], fields[1], fields[2]))
    return rows


class TestParseNetwork:
    def test_simple_chain(self):
        n = parse_network("Anne > quiet > {past}")
        anne = n.roots[0]
        assert anne.concept.label == "Anne"
        quiet = anne.specifiers[0]
        assert quiet.concept.label == "quiet"
        assert quiet.specifiers[0].concept.stemless

    def test_event_proposition(self):
        n = parse_network(
            "approach > [{past}, {agent} > Anne, {theme} > (teacher > stern) > the, reluctantly]"
        )
        root = n.roots[0]
        assert root.concept.label == "approach"
        assert len(root.specifiers) == 4
        theme = root.specifiers[2]
        capsule = theme.specifiers[0]
        assert capsule.is_capsule
        assert capsule.capsule.roots[0].concept.label == "teacher"
        assert capsule.specifiers[0].concept.label == "the"

    def test_single_concept(self):
        n = parse_network("x")
        assert n.roots[0].concept.label == "x"
        assert not n.roots[0].specifiers

    def test_bracket_group_attaches_and_chain_continues(self):
        n = parse_network("{re} > [Fred, (plumber > the)] > {present}")
        re_node = n.roots[0]
        labels = []
        for s in re_node.specifiers:
            labels.append("(capsule)" if s.is_capsule else s.concept.label)
        assert labels == ["Fred", "(capsule)", "present"]

    def test_multiword_labels(self):
        n = parse_network("pick up > [{future}, {agent} > Mary]")
        assert n.roots[0].concept.label == "pick up"

    def test_sense_annotation(self):
        n = parse_network("bank#2 > steep")
        assert n.roots[0].concept.sense == 2
        assert print_network(n) == "bank#2 > steep"

    @pytest.mark.parametrize(
        "bad",
        [
            "",
            "a >",
            "a > [b, c",
            "a > (b",
            ">>x",
            "a > [, b]",
            "a > 'lit'",
            "[a, b]",
            "a > b)",
            "<<<<x",
            "a >>> b",
        ],
    )
    def test_parse_errors_have_position(self, bad):
        with pytest.raises(TreelineParseError) as exc:
            parse_network(bad)
        assert exc.value.line >= 1 and exc.value.col >= 1

    def test_anchor_depth_two_single_item(self):
        n = parse_network("a > ((b > >>>>x))")
        inner = n.roots[0].specifiers[0].capsule.roots[0].capsule.roots[0]
        anchored = inner.specifiers[0]
        assert anchored.anchor.depth == 2


class TestPrintNetwork:
    def test_relative_clause_network(self):
        text = (
            "bark > [{past}, {agent} > dog > (eat > [{past}, >>{agent},"
            " {theme} > (butter > peanut) > the]), happily]"
        )
        assert print_network(parse_network(text)) == text

    def test_single_stemless(self):
        assert print_network(parse_network("{past}")) == "{past}"

    def test_round_trip_generated(self):
        rng = random.Random(23)
        for _ in range(300):
            n = gen_network(rng)
            assert equal(parse_network(print_network(n)), n)

    def test_round_trip_multiroot(self):
        n = parse_network("a > b, c > d")
        assert len(n.roots) == 2
        assert equal(parse_network(print_network(n)), n)


class TestConstructionCorpus:
    def test_all_rows_parse_canonicalize_roundtrip(self):
        rows = construction_rows()
        assert len(rows) >= 45
        for _, _, treeline in rows:
            net = parse_network(treeline)
            canon = canonicalize(net)
            reparsed = parse_network(print_network(canon))
            assert equal(reparsed, net)
            # re-canonicalizing is a fixed point
            assert print_network(canonicalize(canon)) == print_network(canon)

    def test_reification_pair_collapses(self):
        rows = [t for c, _, t in construction_rows() if c == "Reification"]
        assert len(rows) == 2
        assert equal(parse_network(rows[0]), parse_network(rows[1]))

    def test_copula_seem_pair_collapses(self):
        rows = [t for c, s, t in construction_rows() if c == "Copula" and "seem" in s.lower()]
        assert len(rows) == 2
        assert equal(parse_network(rows[0]), parse_network(rows[1]))


class TestParseDocument:
    def test_definition_statement(self):
        doc = parse_document("girl = human > [young, female]")
        (stmt,) = doc.statements
        assert isinstance(stmt, DefinitionStmt)
        assert stmt.name.label == "girl"
        assert print_network(stmt.body) == "human > [young, female]"

    def test_rule_statement(self):
        doc = parse_document("trust > {past} <=> [trust, '+ed']")
        (stmt,) = doc.statements
        assert isinstance(stmt, RuleStmt)
        assert print_network(stmt.lhs) == "trust > {past}"
        assert stmt.rhs[0][0] == "pat"
        assert stmt.rhs[1] == ("lit", "+ed")

    def test_empty_document(self):
        assert parse_document("").statements == []

    def test_mixed_statement_kinds(self):
        text = "\n".join(
            [
                "# a comment",
                "set alpha 0.9",
                "declare {past} \"past tense\"",
                "jump = {verb}",
                "trust > {past} <=> [trust, '+ed']",
                "trust > {past} => (shinji) > {ta}",
                "map he -> kare",
                "Anne > quiet > {past}",
            ]
        )
        doc = parse_document(text)
        kinds = [type(s).__name__ for s in doc.statements]
        assert kinds == [
            "PragmaStmt",
            "DeclareStmt",
            "DefinitionStmt",
            "RuleStmt",
            "TransferRuleStmt",
            "MapStmt",
            "NetworkStmt",
        ]
        assert doc.of_kind(PragmaStmt)[0].value == "0.9"
        assert doc.of_kind(DeclareStmt)[0].description == "past tense"
        assert doc.of_kind(MapStmt)[0].dst.label == "kare"

    def test_duplicate_definition_cites_both_lines(self):
        text = "a = b\n\na = c"
        with pytest.raises(TreelineParseError) as exc:
            parse_document(text)
        assert "1" in str(exc.value) and "3" in str(exc.value)

    def test_lenient_mode_collects_errors(self):
        errors = []
        doc = parse_document("a = b\na = c\nx > [", collect_errors=errors)
        assert len(errors) == 2
        assert len(doc.of_kind(DefinitionStmt)) == 2

    def test_either_or_normalized_with_lint(self):
        doc = parse_document("either...or > [a, b]")
        (stmt,) = doc.statements
        assert isinstance(stmt, NetworkStmt)
        assert stmt.network.roots[0].concept.label == "either or"
        assert any("either" in l for l in doc.lints)

    def test_comment_with_sense_not_comment(self):
        doc = parse_document("bank#2 = slope")
        (stmt,) = doc.statements
        assert stmt.name.sense == 2


class TestFuzz:
    def test_parser_never_panics(self):
        rng = random.Random(5)
        alphabet = "ab {}[]()><,='#" + string.ascii_lowercase[:4]
        for _ in range(1500):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
            try:
                parse_network(text)
            except TreelineParseError:
                pass
