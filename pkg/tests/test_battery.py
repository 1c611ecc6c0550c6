"""
Test suite for the rule soundness battery

Random rule instances are checked on small standard-closed models; the
negative control shows Idealize failing once standardness is not closed.
"""
import unittest
import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from stnf.core.formulas import Pred, atom
from stnf.core.terms import NumLit, Var
from stnf.core.types import BASE
from stnf.lab.battery import (CAVEAT, BatteryReport, BatteryRequest, BatteryRunner,
                              FormulaGenerator, RuleStats, check_instance, negative_control,
                              run_battery)
from stnf.lab.checks import check_equiv
from stnf.lab.model import FiniteModel, default_models, hac_complete_model
from stnf.normalizer.derivation import RuleName

CONFIG = Path(__file__).parent.parent / "config"


def tiny() -> FiniteModel:
    return FiniteModel(name="tiny", N=2, s=1, M=2, L=1)


class TestFormulaGenerator(unittest.TestCase):
    """Random instance generation."""

    def test_same_seed_same_instances(self):
        """同じシードなら同じ適用例"""
        first = list(FormulaGenerator(3).instances(2))
        second = list(FormulaGenerator(3).instances(2))
        self.assertEqual(first, second)

    def test_every_rule_family_is_generated(self):
        """全規則族の適用例が生成される"""
        rules = {rule for rule, _, _ in FormulaGenerator(0).instances(1)}
        for expected in (RuleName.PRENEX_ST, RuleName.IDEALIZE, RuleName.HERBRANDIZE,
                         RuleName.MAX_COLLAPSE, RuleName.SKOLEMIZE_ANTECEDENT):
            with self.subTest(rule=expected.value):
                self.assertIn(expected, rules)

    def test_rewrites_change_the_formula(self):
        """Idealize の適用例は式を変える"""
        for rule, before, after in FormulaGenerator(1).instances(1):
            if rule is RuleName.IDEALIZE:
                with self.subTest(rule=rule.value):
                    self.assertNotEqual(before, after)

    def test_external_inputs_are_external(self):
        """正規化の入力は外延的"""
        generator = FormulaGenerator(5)
        for _ in range(5):
            formula = generator.external()
            with self.subTest(formula=str(formula)):
                self.assertFalse(formula.is_internal())


class TestBatteryReport(unittest.TestCase):
    """Aggregation and merging."""

    def test_rule_stats_add(self):
        """規則ごとの集計の加算"""
        self.assertEqual(RuleStats(1, 0, 2) + RuleStats(3, 1, 0), RuleStats(4, 1, 2))

    def test_merge_sums_and_keeps_smallest_counterexample(self):
        """併合は件数を足し最小の反例を残す"""
        left, right = BatteryReport(models=["a"]), BatteryReport(models=["b"])
        left.add(RuleName.IDEALIZE, "passed")
        right.add(RuleName.IDEALIZE, "passed")
        right.add(RuleName.IDEALIZE, "failed")
        left.add_counterexample(RuleName.IDEALIZE, {"size": 9, "model": "a"})
        right.add_counterexample(RuleName.IDEALIZE, {"size": 4, "model": "b"})
        merged = left.merge(right)
        self.assertEqual(merged.models, ["a", "b"])
        stats = merged.stats[RuleName.IDEALIZE.value]
        self.assertEqual((stats.passed, stats.failed), (2, 1))
        self.assertEqual(merged.counterexamples[RuleName.IDEALIZE.value]["model"], "b")
        self.assertFalse(merged.all_passed)
        self.assertTrue(left.all_passed)

    def test_json_carries_caveat(self):
        """報告 JSON に注意書きが入る"""
        report = BatteryReport(models=["tiny"])
        report.add(RuleName.PRENEX_ST, "passed")
        payload = report.to_json()
        self.assertEqual(payload["caveat"], CAVEAT)
        self.assertTrue(payload["all_passed"])
        self.assertEqual(payload["rules"][RuleName.PRENEX_ST.value],
                         {"passed": 1, "failed": 0, "skipped": 0})

    def test_skolemize_skipped_without_hac(self):
        """HAC 完全でないモデルでは Skolem 化を省略"""
        report = BatteryReport()
        formula = atom(Pred.EQ, Var("x", BASE), NumLit(0))
        check_instance(RuleName.SKOLEMIZE_ANTECEDENT, formula, formula, tiny(), report)
        self.assertEqual(report.stats[RuleName.SKOLEMIZE_ANTECEDENT.value].skipped, 1)

    def test_failed_instance_records_counterexample(self):
        """失敗した適用例は反例を記録する"""
        report = BatteryReport()
        x = Var("x", BASE)
        check_instance(RuleName.IDEALIZE, atom(Pred.LE, x, NumLit(1)), atom(Pred.LT, x, NumLit(1)),
                       tiny(), report)
        entry = report.counterexamples[RuleName.IDEALIZE.value]
        self.assertEqual(entry["model"], "tiny")
        self.assertEqual(entry["status"], "Counterexample")


class TestBatteryRun(unittest.TestCase):
    """End-to-end battery runs."""

    def test_rules_sound_on_small_models(self):
        """小さなモデルで全規則が健全"""
        instances = list(FormulaGenerator(7).instances(1))
        report = run_battery([tiny(), hac_complete_model()], instances, workers=2)
        self.assertTrue(report.all_passed, report.counterexamples)
        self.assertEqual(sorted(report.models), ["hac", "tiny"])

    @pytest.mark.slow
    def test_normalizer_steps_sound_on_default_models(self):
        """既定モデルで正規化の各ステップが健全"""
        generator = FormulaGenerator(11)
        instances = list(generator.normalize_steps(3))
        report = run_battery(default_models(), instances)
        self.assertTrue(report.all_passed, report.counterexamples)

    def test_negative_control_breaks_idealize(self):
        """標準的に閉じていないモデルで Idealize が破れる"""
        before, after, model = negative_control()
        self.assertFalse(model.standard_closed)
        self.assertFalse(check_equiv(before, after, model).equivalent)

    def test_empty_instance_list(self):
        """適用例が空でも報告を返す"""
        report = run_battery([tiny()], [])
        self.assertEqual(report.models, ["tiny"])
        self.assertTrue(report.all_passed)

    def test_load_request(self):
        """設定ファイルは標準的に閉じた5つのモデルで各規則100件"""
        request = BatteryRequest.load(CONFIG / "battery.json")
        self.assertEqual(request.seed, 7)
        self.assertEqual(request.count, 100)
        self.assertEqual([m.name for m in request.models], ["tiny", "small", "wide", "deep", "hac"])
        self.assertTrue(all(m.standard_closed for m in request.models))
        self.assertTrue(request.models[4].hac_complete)
        self.assertEqual(BatteryRequest.load(None).count, 5)
        self.assertEqual(len(BatteryRequest.load(None).models), 5)

    @pytest.mark.slow
    def test_configured_scale(self):
        """設定どおりの規模で全規則が健全"""
        request = BatteryRequest.load(CONFIG / "battery.json")
        report = BatteryRunner(request).run()
        self.assertTrue(report.all_passed, report.counterexamples)
        self.assertEqual(len(report.models), 5)
        for rule in (RuleName.PRENEX_ST, RuleName.IDEALIZE, RuleName.HERBRANDIZE,
                     RuleName.MAX_COLLAPSE, RuleName.NEGATE_NF, RuleName.SKOLEMIZE_ANTECEDENT,
                     RuleName.ELIM_NONSTANDARD_PARAM):
            with self.subTest(rule=rule.value):
                stats = report.stats[rule.value]
                self.assertGreaterEqual(stats.passed + stats.skipped, request.count * 5)
                self.assertGreaterEqual(stats.passed, request.count)


if __name__ == "__main__":
    unittest.main()
