import pytest

from treewilf.grammar import build_grammar
from treewilf.oracle import count_avoiders, count_avoiders_by_leaves, enumerate_trees
from treewilf.series import solve_truncated, to_operad_series
from treewilf.systems import (
    AlgebraicSystem,
    ImproperSystemError,
    Monomial,
    OccurrenceAutomaton,
    SystemSizeError,
    cs_system,
    enumeration_system,
    occurrence_state_count,
    stamp_system,
)
from treewilf.trees import (
    Alphabet,
    PatternSet,
    Tree,
    catalan,
    enumerate_binary_patterns,
    height,
    is_rooted_subtree,
    parse_polish,
    truncate,
)

BIN = Alphabet.binary()
MIXED = Alphabet(labels=(("m", 2), ("w", 3), ("x", 0)), free_end="x")
X = Tree("x")


def odd_coefficients(series, top):
    return [series.coefficient(n) for n in range(1, top + 1, 2)]


class TestCsSystem:
    def test_catalan_shape_and_solution(self):
        system = cs_system(build_grammar(BIN, PatternSet(BIN, ())))
        assert system.unknowns == ("H[x]",)
        assert system.to_text() == (
            "vars: x\n"
            "H[x] = x + x*H[x]*H[x]\n"
            "target = H[x]\n"
        )
        _, target = solve_truncated(system, 9)
        assert odd_coefficients(target, 9) == [1, 1, 2, 5, 14]

    def test_left_comb_solution(self):
        system = cs_system(build_grammar(BIN, PatternSet.from_words(["mmxxx"])))
        assert system.n_unknowns == 3
        _, target = solve_truncated(system, 9)
        assert odd_coefficients(target, 9) == [1, 1, 1, 1, 1]

    def test_single_node_pattern(self):
        system = cs_system(build_grammar(BIN, PatternSet.from_words(["mxx"])))
        _, target = solve_truncated(system, 5)
        assert target.nonzero_items() == [((1,), 1)]

    def test_weight_validation(self):
        g = build_grammar(BIN, PatternSet(BIN, ()))
        with pytest.raises(ValueError):
            cs_system(g, weights={"m": (0,), "x": (0,)})
        with pytest.raises(ValueError):
            cs_system(g, weights={"m": (1, 1), "x": (1, 1)})

    def test_improper_grammar_rejected(self):
        from treewilf.grammar import Grammar, Rule

        bad = Grammar(
            alphabet=BIN,
            patterns=PatternSet(BIN, ()),
            d=0,
            nonterminals=(X,),
            rules=(Rule(None, (X,)), Rule(X, (X,))),
        )
        with pytest.raises(ImproperSystemError):
            cs_system(bad)

    def test_two_variable_weights(self):
        # mark internal nodes with a second variable: coefficient of x^l y^i
        # counts binary trees with l leaves and i internal nodes
        g = build_grammar(BIN, PatternSet(BIN, ()))
        system = cs_system(g, weights={"m": (0, 1), "x": (1, 0)}, weight_vars=("x", "y"))
        _, target = solve_truncated(system, 6)
        for leaves in range(1, 7):
            assert target.coefficient(leaves, leaves - 1) == catalan(leaves - 1)

    def test_degenerate_pattern_empty_language(self):
        ps = PatternSet.from_words(["x"], allow_degenerate=True)
        system = cs_system(build_grammar(BIN, ps))
        assert system.n_unknowns == 0
        _, target = solve_truncated(system, 5)
        assert target.is_zero()


class TestStampSystem:
    def test_left_comb_is_geometric(self):
        system = stamp_system(BIN, PatternSet.from_words(["mmxxx"]))
        _, target = solve_truncated(system, 8)
        assert [target.coefficient(n) for n in range(1, 9)] == [1] * 8

    def test_empty_pattern_set_catalan(self):
        system = stamp_system(BIN, PatternSet(BIN, ()))
        assert system.n_unknowns == 1
        _, target = solve_truncated(system, 6)
        assert [target.coefficient(n) for n in range(1, 7)] == [1, 1, 2, 5, 14, 42]

    def test_unknowns_are_low_stamps(self):
        ps = PatternSet.from_words(["mmxxmxx"])  # height 2 pattern
        system = stamp_system(BIN, ps)
        assert system.unknowns == ("Y[mxx]", "Y[x]")

    @pytest.mark.parametrize("leaves", [2, 3, 4])
    def test_matches_oracle_by_leaves(self, leaves):
        for pattern in enumerate_binary_patterns(leaves):
            ps = PatternSet(BIN, (pattern,))
            system = stamp_system(BIN, ps)
            _, target = solve_truncated(system, 5)
            expected = count_avoiders_by_leaves(BIN, ps, 8)
            for n in range(1, 6):
                assert target.coefficient(n) == expected.get(n, 0)

    def test_mixed_alphabet_matches_oracle(self):
        ps = PatternSet(MIXED, (parse_polish("mmxxx", MIXED), parse_polish("wxmxxx", MIXED)))
        system = stamp_system(MIXED, ps)
        _, target = solve_truncated(system, 5)
        expected = count_avoiders_by_leaves(MIXED, ps, 6)
        for n in range(1, 6):
            assert target.coefficient(n) == expected.get(n, 0)

    def test_degenerate_pattern_empty(self):
        ps = PatternSet.from_words(["x"], allow_degenerate=True)
        system = stamp_system(BIN, ps)
        assert system.n_unknowns == 0

    def test_equivalence_with_grammar_system(self):
        for pattern in enumerate_binary_patterns(4):
            ps = PatternSet(BIN, (pattern,))
            _, stamp_target = solve_truncated(stamp_system(BIN, ps), 20)
            _, cs_target = solve_truncated(cs_system(build_grammar(BIN, ps)), 41)
            assert to_operad_series(cs_target).restrict(20) == stamp_target


class TestOccurrenceAutomaton:
    @pytest.mark.parametrize("word", ["mxx", "mmxxx", "mxmxmxx", "mmxxmxx"])
    def test_state_tracks_embeddings(self, word):
        pattern = parse_polish(word, BIN)
        auto = OccurrenceAutomaton(pattern)
        for tree in enumerate_trees(BIN, 5):
            mask = auto.state_of(tree)
            for i, sub in enumerate(auto.subs):
                assert bool((mask >> i) & 1) == is_rooted_subtree(sub, tree)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            OccurrenceAutomaton(X)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            OccurrenceAutomaton(parse_polish("wxxx", MIXED))


class TestEnumerationSystem:
    def test_single_node_pattern_marks_every_internal(self):
        system = enumeration_system(parse_polish("mxx", BIN))
        _, target = solve_truncated(system, 11)
        for i in range(6):
            assert target.coefficient(2 * i + 1, i) == catalan(i)

    def test_left_comb_small_coefficients(self):
        system = enumeration_system(parse_polish("mmxxx", BIN))
        _, target = solve_truncated(system, 5)
        assert target.coefficient(5, 0) == 1
        assert target.coefficient(5, 1) == 1

    def test_y0_slice_is_avoidance(self):
        for pattern in enumerate_binary_patterns(4):
            system = enumeration_system(pattern)
            _, target = solve_truncated(system, 13)
            ps = PatternSet(BIN, (pattern,))
            expected = count_avoiders(BIN, ps, 6)
            for n in range(1, 14, 2):
                assert target.coefficient(n, 0) == expected.get(n, 0)

    @pytest.mark.parametrize("leaves", [2, 3, 4, 5])
    def test_reduced_equals_truncation_states(self, leaves):
        for pattern in enumerate_binary_patterns(leaves):
            reduced = enumeration_system(pattern, reduced=True)
            literal = enumeration_system(pattern, reduced=False)
            _, rt = solve_truncated(reduced, 13)
            _, lt = solve_truncated(literal, 13)
            assert rt == lt

    def test_truncation_state_space_matches_bounded_height(self):
        pattern = parse_polish("mmxxmxx", BIN)  # height 2
        literal = enumeration_system(pattern, reduced=False)
        # states: all binary trees of height <= 1
        assert literal.unknowns == ("F[mxx]", "F[x]")

    def test_truncation_states_budget(self):
        comb7 = parse_polish("m" * 6 + "x" * 7, BIN)  # height 6
        with pytest.raises(SystemSizeError):
            enumeration_system(comb7, reduced=False)
        # the reduced construction handles the same pattern easily
        assert occurrence_state_count(comb7) <= 16

    def test_root_occurrence_depends_only_on_truncations(self):
        for pattern in enumerate_binary_patterns(4):
            d = height(pattern)
            for tree in enumerate_trees(BIN, 6):
                if tree.is_free_end():
                    continue
                joined = Tree("m", tuple(truncate(c, d - 1) for c in tree.children))
                assert is_rooted_subtree(pattern, tree) == is_rooted_subtree(pattern, joined)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            enumeration_system(X)


class TestProperness:
    def test_zero_weight_single_factor_rejected(self):
        system = AlgebraicSystem(
            weight_vars=("x",),
            unknowns=("A", "B"),
            equations=(
                (Monomial(1, (1,), ()), Monomial(1, (0,), (1,))),
                (Monomial(1, (1,), ()),),
            ),
            target=((1, 0),),
        )
        with pytest.raises(ImproperSystemError):
            system.validate_proper()

    def test_constant_monomial_rejected(self):
        system = AlgebraicSystem(
            weight_vars=("x",),
            unknowns=("A",),
            equations=(((Monomial(1, (0,), ())),),),
            target=((1, 0),),
        )
        with pytest.raises(ImproperSystemError):
            system.validate_proper()

    def test_zero_weight_two_factors_allowed(self):
        system = stamp_system(BIN, PatternSet.from_words(["mmxxx"]))
        system.validate_proper()

    def test_export_merges_duplicate_bodies(self):
        system = cs_system(build_grammar(BIN, PatternSet(BIN, ())))
        text = system.to_text()
        assert text.count("H[x] =") == 1
