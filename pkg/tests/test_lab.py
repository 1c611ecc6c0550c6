"""
Test suite for the finite-model lab

Covers model validation, sort enumeration, the evaluator, exact grid
measures, equivalence checking and witness extraction.
"""
import itertools
import unittest
import sys
from fractions import Fraction
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from stnf.core.dsl import parse_dsl
from stnf.core.errors import (BudgetExceededError, IllTypedError, NotValidError,
                              SortTooLargeError)
from stnf.core.formulas import (Exists, Forall, ForallSt, ExistsSt, Not, Pred, StAtom, approx_formula,
                                atom, exists_in, forall_in)
from stnf.core.standardness import as_normal_form
from stnf.core.terms import App, GridRat, Lam, NumLit, Plus, Var
from stnf.core.types import BASE, GRIDSET, REAL, TYPE1, Arrow, Seq, arrow
from stnf.lab.checks import check_equiv, extract_witnesses
from stnf.lab.evaluator import evaluate
from stnf.lab.lowering import lower_level_two, unidealize
from stnf.lab.measure import (almost_subset_eval, full_grid, grid_measure_eval, grid_set,
                              loeb_zero_oracle, st_preimage, st_preimage2)
from stnf.lab.model import FiniteModel, FuncValue, default_models, hac_complete_model, open_model

CONFIG = Path(__file__).parent.parent / "config"

x, y = Var("x", BASE), Var("y", BASE)


def tiny() -> FiniteModel:
    return FiniteModel(name="tiny", N=2, s=1, M=2, L=1)


class TestFiniteModel(unittest.TestCase):
    """Model validation and sort enumeration."""

    def test_rejects_bad_scales(self):
        """不正なスケールを拒否する"""
        cases = [
            dict(N=2, s=2, M=3),
            dict(N=3, s=2, M=2),
            dict(N=3, s=1, M=7),
        ]
        for params in cases:
            with self.subTest(params=params):
                with self.assertRaises(ValueError):
                    FiniteModel(**params)

    def test_rejects_bad_standard_functions(self):
        """不正な標準関数表を拒否する"""
        cases = [
            [[0, 0, 0]],
            [[0, 1, 2], [1, 0, 0]],
            [[0, 1, 2], [2, 2, 2]],
        ]
        for tables in cases:
            with self.subTest(tables=tables):
                with self.assertRaises(ValueError):
                    FiniteModel(N=2, s=1, M=2, F1_standard=tables)

    def test_loads_json_with_table_indices(self):
        """関数表の添字つき JSON を読む"""
        model = FiniteModel.model_validate_json((CONFIG / "models" / "small.json").read_text())
        self.assertEqual(model.F1_standard, [(0, 1, 2, 3), (0, 0, 0, 0)])

    def test_domain_sizes(self):
        """定義域の大きさ"""
        model = tiny()
        cases = [
            (BASE, False, 3), (BASE, True, 2),
            (REAL, False, 5), (REAL, True, 3),
            (GRIDSET, False, 32), (GRIDSET, True, 8),
            (Seq(BASE), True, 4),
            (TYPE1, False, 5), (TYPE1, True, 2),
        ]
        for type_, standard, size in cases:
            with self.subTest(type_=str(type_), standard=standard):
                self.assertEqual(len(model.domain(type_, standard)), size)

    def test_standard_sequences(self):
        """標準列の列挙"""
        model = tiny()
        self.assertTrue(model.is_standard((0, 1), Seq(BASE)))
        self.assertFalse(model.is_standard((0, 0), Seq(BASE)))
        self.assertFalse(model.is_standard((2,), Seq(BASE)))
        self.assertFalse(open_model().is_standard((0, 1), Seq(BASE)))

    def test_level_two_sort_too_large(self):
        """水準2の定義域は列挙しない"""
        with self.assertRaises(SortTooLargeError):
            tiny().domain(arrow(TYPE1, BASE))

    def test_budget_limits_domain(self):
        """予算を超える定義域は拒否する"""
        model = FiniteModel(N=2, s=1, M=2, budget=10)
        with self.assertRaises(BudgetExceededError):
            model.domain(GRIDSET)

    def test_hac_completeness(self):
        """HAC 完全性の判定"""
        self.assertTrue(hac_complete_model().hac_complete)
        self.assertFalse(tiny().hac_complete)


class TestEvaluator(unittest.TestCase):
    """Truth values on finite models."""

    def test_standardness_predicate(self):
        """st 述語の評価"""
        model = FiniteModel(N=6, s=5, M=6)
        self.assertTrue(evaluate(StAtom(NumLit(3)), model))
        self.assertFalse(evaluate(StAtom(NumLit(6)), model))

    def test_infinitesimal_closeness(self):
        """無限小の近さの評価"""
        model = FiniteModel(N=3, s=2, M=3)
        close = approx_formula(GridRat(1, NumLit(3)), GridRat(2, NumLit(3)))
        far = approx_formula(GridRat(0, NumLit(3)), GridRat(4, NumLit(3)))
        self.assertTrue(evaluate(close, model))
        self.assertFalse(evaluate(far, model))

    def test_successor_leaves_standard_part(self):
        """後者関数は標準部分を出る"""
        # x = s needs y = s + 1, which is not standard
        model = FiniteModel(N=10, s=4, M=5)
        formula = parse_dsl("(forall-st (x 0) (exists-st (y 0) (= y (+ x 1))))")
        self.assertFalse(evaluate(formula, model))
        self.assertTrue(evaluate(parse_dsl("(forall-st (x 0) (exists-st (y 0) (<= x y)))"), model))

    def test_bounded_quantifier_over_grid_set(self):
        """格子集合上の有界量化子"""
        model = tiny()
        e, B = Var("e", REAL), Var("B", GRIDSET)
        formula = forall_in(e, B, atom(Pred.LE, e, GridRat(1, NumLit(1))), GRIDSET)
        self.assertTrue(evaluate(formula, model, {"B": grid_set([0, Fraction(1, 4)], 2)}))
        self.assertFalse(evaluate(formula, model, {"B": full_grid(2)}))

    def test_lambda_application(self):
        """λ 項の適用"""
        term = App(Lam(x, Plus(x, NumLit(1))), NumLit(1))
        self.assertTrue(evaluate(atom(Pred.EQ, term, NumLit(2)), tiny()))

    def test_unbound_variable(self):
        """未束縛の変数はエラー"""
        with self.assertRaises(IllTypedError):
            evaluate(atom(Pred.EQ, x, NumLit(0)), tiny())

    def test_budget(self):
        """評価の予算"""
        with self.assertRaises(BudgetExceededError):
            evaluate(Forall(x, atom(Pred.EQ, x, x)), tiny(), budget=2)


h = Var("h", Arrow(Arrow(REAL, BASE), BASE))
g = Var("g", Arrow(REAL, BASE))
W = Var("W", Seq(Arrow(REAL, BASE)))
h_of_g = App(h, g)
g_at_zero = App(g, GridRat(0, NumLit(0)))


def standard_functionals(model: FiniteModel):
    """(R→0)→0 の標準要素: 標準な引数上の全写像"""
    args = model.domain(Arrow(REAL, BASE), standard=True)
    results = model.domain(BASE, standard=True)
    return [FuncValue(tuple(zip(args, values)), 0)
            for values in itertools.product(results, repeat=len(args))]


class TestLevelTwoQuantifiers(unittest.TestCase):
    """Standard quantifiers over level-two functionals."""

    def brute_force(self, formula, model):
        values = [evaluate(formula.body, model, {"h": value}) for value in standard_functionals(model)]
        return all(values) if formula.universal else any(values)

    def test_agrees_with_enumerated_functionals(self):
        """水準2の量化は関数表の全列挙と同じ真偽を返す"""
        model = tiny()
        cases = {
            "forall_eq": ForallSt(h, ExistsSt(g, atom(Pred.EQ, h_of_g, g_at_zero))),
            "forall_le": ForallSt(h, ExistsSt(g, atom(Pred.LE, h_of_g, g_at_zero))),
            "exists_ge": ExistsSt(h, ForallSt(g, atom(Pred.LE, g_at_zero, h_of_g))),
            "negated": ForallSt(h, Not(ForallSt(g, atom(Pred.LT, h_of_g, g_at_zero)))),
            "idealized": ForallSt(h, ExistsSt(W, exists_in(g, W, atom(Pred.LE, h_of_g, g_at_zero)))),
        }
        for name, formula in cases.items():
            with self.subTest(case=name):
                self.assertEqual(evaluate(formula, model), self.brute_force(formula, model))

    def test_known_values(self):
        """h(g) = g(0) は h を選べば崩せるが h(g) ≤ g(0) は崩せない"""
        model = tiny()
        self.assertFalse(evaluate(ForallSt(h, ExistsSt(g, atom(Pred.EQ, h_of_g, g_at_zero))), model))
        self.assertTrue(evaluate(ForallSt(h, ExistsSt(g, atom(Pred.LE, h_of_g, g_at_zero))), model))

    def test_unidealize_opens_positive_ranges(self):
        """正の位置の有界 ∃ の範囲だけに現れる列は ∃^st に戻る"""
        body = ExistsSt(W, exists_in(g, W, atom(Pred.LE, h_of_g, g_at_zero)))
        self.assertEqual(unidealize(body), ExistsSt(g, atom(Pred.LE, h_of_g, g_at_zero)))
        negative = ExistsSt(W, Not(exists_in(g, W, atom(Pred.LE, h_of_g, g_at_zero))))
        self.assertEqual(unidealize(negative), negative)

    def test_unsupported_shapes(self):
        """書き換えられない形は SortTooLarge"""
        k = Var("k", BASE)
        cases = {
            "internal": Forall(h, ExistsSt(g, atom(Pred.LE, h_of_g, g_at_zero))),
            "opposite": ForallSt(h, Exists(k, ForallSt(g, atom(Pred.LE, h_of_g, k)))),
            "free_argument": ForallSt(h, atom(Pred.LE, h_of_g, g_at_zero)),
        }
        for name, formula in cases.items():
            with self.subTest(case=name):
                with self.assertRaises(SortTooLargeError):
                    evaluate(formula, tiny(), {"g": FuncValue((), 0)})

    def test_requires_standard_closed_model(self):
        """標準的に閉じていないモデルでは書き換えない"""
        with self.assertRaises(SortTooLargeError):
            lower_level_two(ForallSt(h, ExistsSt(g, atom(Pred.LE, h_of_g, g_at_zero))), open_model())


class TestMeasure(unittest.TestCase):
    """Exact grid measure and the preimages."""

    def test_grid_measure(self):
        """格子測度の計算"""
        points = [0, Fraction(1, 8), Fraction(2, 8)]
        self.assertEqual(grid_measure_eval(grid_set(points, 3)), Fraction(3, 8))
        self.assertEqual(grid_measure_eval(full_grid(3)), Fraction(9, 8))

    def test_almost_subset(self):
        """ほぼ包含の判定"""
        model = FiniteModel(N=3, s=2, M=4)
        self.assertTrue(almost_subset_eval(grid_set([0, Fraction(1, 16)], 4), grid_set([0], 4),
                                           model))
        lower_half = grid_set([Fraction(i, 16) for i in range(8)], 4)
        self.assertFalse(almost_subset_eval(full_grid(4), lower_half, model))

    def test_standard_part_preimage(self):
        """標準部分の逆像"""
        model = FiniteModel(N=3, s=2, M=3)
        preimage = st_preimage([Fraction(1, 2)], model)
        self.assertEqual(preimage.members(), [Fraction(i, 8) for i in range(2, 7)])
        self.assertEqual(st_preimage([Fraction(1, 8)], model).mask, 0)

    def test_second_preimage_is_smaller(self):
        """第2の逆像は第1の逆像に含まれる"""
        model = FiniteModel(N=3, s=2, M=3)
        cases = [
            [],
            [Fraction(1, 2)],
            [0, 1],
            [Fraction(i, 8) for i in range(2, 7)],
            full_grid(3),
        ]
        for points in cases:
            with self.subTest(points=str(points)):
                first, second = st_preimage(points, model), st_preimage2(points, model)
                self.assertEqual(second.mask & ~first.mask, 0)

    def test_oracle_on_extremes(self):
        """空集合と全体でのオラクル"""
        model = FiniteModel(N=3, s=1, M=3)
        self.assertTrue(loeb_zero_oracle([], model))
        self.assertFalse(loeb_zero_oracle(full_grid(3), model))


class TestChecks(unittest.TestCase):
    """Equivalence checking and witness extraction."""

    def test_formula_and_negation_differ(self):
        """式とその否定は同値でない"""
        formula = ForallSt(x, ExistsSt(y, atom(Pred.LE, x, y)))
        result = check_equiv(formula, Not(formula), tiny())
        self.assertFalse(result.equivalent)
        self.assertEqual(result.to_json()["status"], "Counterexample")

    def test_equivalent_over_free_variable(self):
        """自由変数を動かして同値を確かめる"""
        result = check_equiv(atom(Pred.LE, x, NumLit(1)), atom(Pred.LT, x, NumLit(2)), tiny())
        self.assertTrue(result.equivalent)
        self.assertEqual(result.checked, 3)

    def test_counterexample_assignment(self):
        """最初の反例の割り当て"""
        result = check_equiv(atom(Pred.LE, x, NumLit(1)), atom(Pred.LT, x, NumLit(1)), tiny())
        self.assertEqual(result.counterexample, {"x": 1})
        self.assertEqual(result.values, (True, False))

    def test_assignment_budget(self):
        """割り当て数の予算"""
        with self.assertRaises(BudgetExceededError):
            check_equiv(atom(Pred.LE, x, NumLit(1)), atom(Pred.LT, x, NumLit(2)), tiny(),
                        budget=1)

    def test_extract_identity_witnesses(self):
        """恒等写像の証人表"""
        model = FiniteModel(N=4, s=3, M=4)
        nf = as_normal_form(parse_dsl("(forall-st (x 0) (exists-st (y 0) (>= y x)))"))
        table = extract_witnesses(nf, model)
        self.assertEqual(table.entries, {(i,): [(i,)] for i in range(4)})
        self.assertTrue(table.satisfies(nf, model))
        self.assertTrue(table.is_minimal(nf, model))
        self.assertEqual(len(table.render_disjunction(nf)), 4)

    def test_extract_across_models(self):
        """既定の全モデルで証人表が条件を満たし極小"""
        sources = [
            "(forall-st (x 0) (exists-st (y 0) (>= y x)))",
            "(forall-st ((x 0) (z 0)) (exists-st (y 0) (and (<= x y) (<= z y))))",
            "(forall-st (x 0) (exists-st ((y 0) (v 0)) (= (+ y v) x)))",
            "(exists-st (y 0) (forall (v 0) (<= 0 (+ v y))))",
        ]
        for model in default_models():
            standard = len(model.domain(BASE, standard=True))
            for source in sources:
                with self.subTest(model=model.name, formula=source):
                    nf = as_normal_form(parse_dsl(source))
                    table = extract_witnesses(nf, model)
                    self.assertEqual(len(table.entries), standard ** len(nf.univ_st))
                    self.assertTrue(table.satisfies(nf, model))
                    self.assertTrue(table.is_minimal(nf, model))
                    self.assertEqual(len(table.render_disjunction(nf)), len(table.entries))

    def test_extract_requires_validity(self):
        """偽の正規形からは抽出しない"""
        model = FiniteModel(N=4, s=3, M=4)
        nf = as_normal_form(parse_dsl("(forall-st (x 0) (exists-st (y 0) (< x y)))"))
        with self.assertRaises(NotValidError):
            extract_witnesses(nf, model)


if __name__ == "__main__":
    unittest.main()
