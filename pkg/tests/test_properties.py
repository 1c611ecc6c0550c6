"""
Property-based tests for the transformations and grid measures

Random formulas are prenexed and renamed and must keep their truth value
on a small standard-closed model. Generated normal forms are fixed points
of the S_st translation, normalization is idempotent, and substitution and
the DSL round-trip. The grid measure and ⊂_al laws are checked on random
subsets of the grid.
"""
import unittest
import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import given, settings, strategies as st

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from stnf.core.alpha import alpha_equiv
from stnf.core.dsl import parse_dsl, render_document
from stnf.core.errors import StuckError
from stnf.core.formulas import And, ExistsSt, ForallSt, Implies, Not, Or, Pred, atom
from stnf.core.standardness import NormalForm, infer_standard
from stnf.core.substitution import FreshNames, rename_apart, substitute
from stnf.core.terms import App, NumLit, Plus, Var
from stnf.core.types import BASE, TYPE1
from stnf.lab.checks import check_equiv
from stnf.lab.measure import (almost_subset_eval, full_grid, grid_measure_eval, st_preimage,
                              st_preimage2)
from stnf.lab.model import FiniteModel, GridSet
from stnf.normalizer.engine import normalize
from stnf.normalizer.prenex import prenex_st
from stnf.normalizer.s_st import s_st_fixed_point_check

M = 3
GRID_INDICES = list(range(2 ** M + 1))

x, y, w = Var("x", BASE), Var("y", BASE), Var("w", BASE)


def tiny() -> FiniteModel:
    return FiniteModel(name="tiny", N=2, s=1, M=2, L=1)


@st.composite
def terms(draw, variables):
    base = draw(st.one_of(st.sampled_from(variables), st.integers(0, 2).map(NumLit)))
    return Plus(base, NumLit(1)) if draw(st.booleans()) and not isinstance(base, NumLit) else base


@st.composite
def internal_formulas(draw, variables, depth=2):
    if depth == 0 or draw(st.booleans()):
        pred = draw(st.sampled_from([Pred.EQ, Pred.LE, Pred.LT]))
        return atom(pred, draw(terms(variables)), draw(terms(variables)))
    kind = draw(st.sampled_from([Not, And, Or, Implies]))
    if kind is Not:
        return Not(draw(internal_formulas(variables, depth - 1)))
    return kind(draw(internal_formulas(variables, depth - 1)),
                draw(internal_formulas(variables, depth - 1)))


@st.composite
def external_formulas(draw):
    """標準量化子を2つ含む、w を自由に持つ式"""
    left = draw(st.sampled_from([ForallSt, ExistsSt]))(x, draw(internal_formulas([x, w])))
    right = draw(st.sampled_from([ForallSt, ExistsSt]))(y, draw(internal_formulas([y, w])))
    formula = draw(st.sampled_from([And, Or, Implies]))(left, right)
    return Not(formula) if draw(st.booleans()) else formula


@st.composite
def grid_sets(draw):
    indices = draw(st.sets(st.sampled_from(GRID_INDICES)))
    return GridSet(sum(1 << i for i in indices), M)


@st.composite
def normal_forms(draw):
    """(∀^st x̄)(∃^st ȳ)φ、各ブロック0〜2個"""
    univ = [Var(f"x{i}", BASE) for i in range(draw(st.integers(0, 2)))]
    exist = [Var(f"y{i}", BASE) for i in range(draw(st.integers(0, 2)))]
    matrix = draw(internal_formulas(univ + exist + [w]))
    return NormalForm(tuple(univ), tuple(exist), matrix)


@st.composite
def standardness_terms(draw, depth=2):
    f = Var("f", TYPE1)
    if depth == 0 or draw(st.booleans()):
        return draw(terms([x, y, w]))
    if draw(st.booleans()):
        return App(f, draw(standardness_terms(depth - 1)))
    return Plus(draw(standardness_terms(depth - 1)), draw(standardness_terms(depth - 1)))


@st.composite
def sized_grid_sets(draw, M):
    indices = draw(st.sets(st.integers(0, 2 ** M)))
    return GridSet(sum(1 << i for i in indices), M)


class TestTransformationProperties(unittest.TestCase):
    """Truth is preserved by prenexing and renaming."""

    @settings(max_examples=40, deadline=None)
    @given(formula=external_formulas())
    def test_prenex_preserves_truth(self, formula):
        """冠頭化は真偽を保つ"""
        result = check_equiv(formula, prenex_st(formula), tiny())
        self.assertTrue(result.equivalent, result.to_json())

    @settings(max_examples=40, deadline=None)
    @given(formula=external_formulas())
    def test_rename_apart_is_alpha_equivalent(self, formula):
        """改名は α 同値"""
        self.assertTrue(alpha_equiv(rename_apart(formula, FreshNames()), formula))

    @settings(max_examples=40, deadline=None)
    @given(formula=external_formulas())
    def test_prenex_is_idempotent(self, formula):
        """冠頭化は冪等"""
        once = prenex_st(formula)
        self.assertTrue(alpha_equiv(prenex_st(once), once))


class TestMeasureProperties(unittest.TestCase):
    """Laws of the grid measure on G_3."""

    @given(data=st.data())
    def test_measure_is_additive_on_disjoint_sets(self, data):
        """互いに素な集合で測度は加法的"""
        C = data.draw(grid_sets())
        D = data.draw(grid_sets())
        D = GridSet(D.mask & ~C.mask, M)
        union = GridSet(C.mask | D.mask, M)
        self.assertEqual(grid_measure_eval(union), grid_measure_eval(C) + grid_measure_eval(D))

    @given(C=grid_sets())
    def test_almost_subset_is_reflexive(self, C):
        """ほぼ包含は反射的"""
        self.assertTrue(almost_subset_eval(C, C, FiniteModel(N=3, s=1, M=M)))

    @given(C=grid_sets())
    def test_almost_subset_of_superset(self, C):
        """上位集合へのほぼ包含"""
        model = FiniteModel(N=3, s=1, M=M)
        self.assertTrue(almost_subset_eval(C, GridSet(C.mask | 1, M), model))

    @given(C=grid_sets())
    def test_second_preimage_inside_first(self, C):
        """第2の逆像は第1の逆像に含まれる"""
        model = FiniteModel(N=3, s=2, M=M)
        points = C.members()
        first, second = st_preimage(points, model), st_preimage2(points, model)
        self.assertEqual(second.mask & ~first.mask, 0)


class TestNormalFormProperties(unittest.TestCase):
    """Fixed points, idempotence and round-trips."""

    @settings(max_examples=200, deadline=None)
    @given(nf=normal_forms())
    def test_normal_forms_are_translation_fixed_points(self, nf):
        """正規形は S_st 翻訳の不動点"""
        self.assertTrue(s_st_fixed_point_check(nf))

    @settings(max_examples=100, deadline=None)
    @given(nf=normal_forms().filter(lambda nf: nf.univ_st and nf.exist_st))
    def test_corrupted_prefix_is_not_a_fixed_point(self, nf):
        """∃^st を ∀^st の前に出した接頭辞は不動点でない"""
        first, rest = nf.exist_st[0], nf.exist_st[1:]
        corrupted = ExistsSt(first, NormalForm(nf.univ_st, rest, nf.matrix).render())
        self.assertFalse(s_st_fixed_point_check(corrupted))

    @settings(max_examples=40, deadline=None)
    @given(formula=external_formulas())
    def test_normalize_is_idempotent(self, formula):
        """正規形をもう一度正規化しても変わらない"""
        try:
            nf, _ = normalize(formula)
        except StuckError:
            return
        again, derivation = normalize(nf.render())
        self.assertEqual(derivation.steps, [])
        self.assertTrue(alpha_equiv(again.render(), nf.render()))

    @settings(max_examples=60, deadline=None)
    @given(formula=external_formulas())
    def test_substitute_and_back(self, formula):
        """新しい変数への代入と逆代入で元に戻る"""
        fresh = Var("w_fresh", BASE)
        there = substitute(formula, w, fresh)
        self.assertNotIn(w, there.free_vars())
        self.assertTrue(alpha_equiv(substitute(there, fresh, w), formula))

    @settings(max_examples=60, deadline=None)
    @given(formula=external_formulas())
    def test_render_then_parse(self, formula):
        """出力した DSL を読み戻すと α 同値"""
        self.assertTrue(alpha_equiv(parse_dsl(render_document(formula)), formula))

    @settings(max_examples=100, deadline=None)
    @given(t=standardness_terms(), assumed=st.sets(st.sampled_from([x, y, w, Var("f", TYPE1)])),
           extra=st.sets(st.sampled_from([x, y, w, Var("f", TYPE1)])))
    def test_infer_standard_is_monotone(self, t, assumed, extra):
        """仮定を増やしても標準性の導出は失われない"""
        if infer_standard(t, frozenset(assumed)):
            self.assertTrue(infer_standard(t, frozenset(assumed | extra)))


class TestMeasureLawsAcrossScales(unittest.TestCase):
    """Grid measure laws for M up to 6."""

    def test_empty_and_full(self):
        """空集合は0、G_M は (2^M+1)/2^M"""
        for scale in range(1, 7):
            with self.subTest(M=scale):
                self.assertEqual(grid_measure_eval(GridSet(0, scale)), 0)
                self.assertEqual(grid_measure_eval(full_grid(scale)),
                                 Fraction(2 ** scale + 1, 2 ** scale))

    @given(data=st.data())
    def test_monotone_and_additive(self, data):
        """部分集合で単調、互いに素な和で加法的"""
        scale = data.draw(st.integers(1, 6))
        C = data.draw(sized_grid_sets(scale))
        D = data.draw(sized_grid_sets(scale))
        inside = GridSet(C.mask & D.mask, scale)
        self.assertLessEqual(grid_measure_eval(inside), grid_measure_eval(C))
        disjoint = GridSet(D.mask & ~C.mask, scale)
        union = GridSet(C.mask | disjoint.mask, scale)
        self.assertEqual(grid_measure_eval(union),
                         grid_measure_eval(C) + grid_measure_eval(disjoint))


if __name__ == "__main__":
    unittest.main()
