"""
書き換え規則の健全性バッテリー
規則の適用例を乱数で生成し、全モデルで書き換え前後の同値性を検査する。
健全性は標準的に閉じたモデルに相対的な経験的証拠であり証明ではない。
"""
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table

from ..core.config_manager import get_config
from ..core.errors import BudgetExceededError, ErrorTracker, SortTooLargeError, StuckError
from ..core.formulas import (And, Atom, ExistsSt, Forall, ForallSt, Formula, Implies, Not, Or,
                             Pred, StAtom, atom, exists_in)
from ..core.serialize import formula_to_json
from ..core.terms import NumLit, Plus, Term, Var
from ..core.types import BASE, Seq
from ..normalizer.derivation import RuleName
from ..normalizer.engine import normalize
from ..normalizer.prenex import prenex_st
from ..normalizer.rules import (eliminate_nonstandard_param_steps, herbrandize, idealize,
                                max_collapse, negate_normal_form_steps, skolemize_antecedent)
from .checks import check_equiv
from .model import FiniteModel, default_models, open_model

CAVEAT = "健全性は標準的に閉じたモデル（標準列挙が標準）に相対的な経験的結果です"

Instance = Tuple[RuleName, Formula, Formula]

# 型1の関数を量化する規則は HAC 完全なモデルでのみ妥当
_NEEDS_HAC = {RuleName.SKOLEMIZE_ANTECEDENT}


# ---------------------------------------------------------------- 生成

class FormulaGenerator:
    """内部的な式と規則の適用例の乱数生成"""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def term(self, variables: List[Var]) -> Term:
        choice = self.rng.random()
        if choice < 0.2:
            return NumLit(self.rng.randint(0, 2))
        v = self.rng.choice(variables)
        return Plus(v, NumLit(1)) if choice > 0.85 else v

    def atom(self, variables: List[Var]) -> Atom:
        pred = self.rng.choice([Pred.EQ, Pred.LE, Pred.LT])
        return atom(pred, self.term(variables), self.term(variables))

    def internal(self, variables: List[Var], depth: int = 2) -> Formula:
        if depth <= 0 or self.rng.random() < 0.4:
            return self.atom(variables)
        kind = self.rng.choice(["not", "and", "or", "implies"])
        if kind == "not":
            return Not(self.internal(variables, depth - 1))
        cls = {"and": And, "or": Or, "implies": Implies}[kind]
        return cls(self.internal(variables, depth - 1), self.internal(variables, depth - 1))

    def monotone(self, k: Var, others: List[Var]) -> Formula:
        """k について単調増加な式"""
        base = atom(self.rng.choice([Pred.LE, Pred.LT]), self.term(others), k)
        extra = self.internal(others, 1)
        return self.rng.choice([base, Or(base, extra), And(base, Or(extra, Not(extra)))])

    def instances(self, count: int) -> Iterator[Instance]:
        x, y, u, v = (Var(n, BASE) for n in ("x", "y", "u", "v"))
        for _ in range(count):
            phi = self.internal([u, v])
            yield RuleName.PRENEX_ST, *self._prenex_pair()
            before = Forall(v, ExistsSt(u, phi))
            yield RuleName.IDEALIZE, before, idealize(before)
            before = ForallSt(x, ExistsSt(y, self.internal([x, y])))
            yield RuleName.HERBRANDIZE, before, herbrandize(before)
            K, k = Var("K", Seq(BASE)), Var("k", BASE)
            before = ExistsSt(K, Forall(v, exists_in(k, K, self.monotone(k, [v]))))
            yield RuleName.MAX_COLLAPSE, before, max_collapse(before)
            before = ExistsSt(u, ForallSt(x, self.internal([u, x])))
            for step in negate_normal_form_steps(before).steps:
                yield step.rule, step.before, step.after
            a, l = Var("a", BASE), Var("l", BASE)
            before = Implies(ForallSt(a, ExistsSt(l, self.internal([a, l]))), self.internal([u]))
            yield RuleName.SKOLEMIZE_ANTECEDENT, before, skolemize_antecedent(before)
            M = Var("M", BASE)
            before = Forall(M, Implies(Not(StAtom(M)),
                                       ForallSt(x, ExistsSt(y, self.internal([M, x, y])))))
            for step in eliminate_nonstandard_param_steps(before).steps:
                yield step.rule, step.before, step.after

    def _prenex_pair(self) -> Tuple[Formula, Formula]:
        x, y, w = (Var(n, BASE) for n in ("x", "y", "w"))
        left = self.rng.choice([ForallSt, ExistsSt])(x, self.internal([x, w]))
        right = self.rng.choice([ForallSt, ExistsSt])(y, self.internal([y, w]))
        cls = self.rng.choice([And, Or, Implies])
        before = cls(left, right)
        if self.rng.random() < 0.3:
            before = Not(before)
        return before, prenex_st(before)

    def external(self, depth: int = 2) -> Formula:
        """正規化の入力になる外延的な式"""
        x, y, v = (Var(n, BASE) for n in ("x", "y", "v"))
        body = self.internal([x, y, v], depth)
        shapes = [
            lambda: Forall(v, ForallSt(x, ExistsSt(y, body))),
            lambda: Not(ForallSt(x, ExistsSt(y, body))),
            lambda: Implies(ExistsSt(x, self.internal([x, v])), ForallSt(y, self.internal([y, v]))),
            lambda: Forall(v, Or(ExistsSt(x, self.internal([x, v])), ForallSt(y, self.internal([y])))),
        ]
        return self.rng.choice(shapes)()

    def normalize_steps(self, count: int) -> Iterator[Instance]:
        for _ in range(count):
            formula = self.external()
            try:
                _, derivation = normalize(formula)
            except StuckError:
                continue
            for step in derivation.steps:
                yield step.rule, step.before, step.after


# ---------------------------------------------------------------- 報告

@dataclass
class RuleStats:
    passed: int = 0
    failed: int = 0
    skipped: int = 0

    def __add__(self, other: "RuleStats") -> "RuleStats":
        return RuleStats(self.passed + other.passed, self.failed + other.failed,
                         self.skipped + other.skipped)


@dataclass
class BatteryReport:
    """規則ごとの集計と最小の反例（結合的に併合できる）"""
    stats: Dict[str, RuleStats] = field(default_factory=dict)
    counterexamples: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    models: List[str] = field(default_factory=list)
    errors: ErrorTracker = field(default_factory=ErrorTracker)

    @property
    def all_passed(self) -> bool:
        return all(s.failed == 0 for s in self.stats.values())

    def add(self, rule: RuleName, outcome: str) -> None:
        current = self.stats.get(rule.value, RuleStats())
        delta = RuleStats(**{outcome: 1})
        self.stats[rule.value] = current + delta

    def add_counterexample(self, rule: RuleName, entry: Dict[str, Any]) -> None:
        known = self.counterexamples.get(rule.value)
        if known is None or entry["size"] < known["size"]:
            self.counterexamples[rule.value] = entry

    def merge(self, other: "BatteryReport") -> "BatteryReport":
        merged = BatteryReport(dict(self.stats), dict(self.counterexamples),
                               self.models + other.models, self.errors.merge(other.errors))
        for name, stats in other.stats.items():
            merged.stats[name] = merged.stats.get(name, RuleStats()) + stats
        for name, entry in other.counterexamples.items():
            known = merged.counterexamples.get(name)
            if known is None or entry["size"] < known["size"]:
                merged.counterexamples[name] = entry
        return merged

    def to_json(self) -> Dict[str, Any]:
        return {
            "caveat": CAVEAT,
            "models": self.models,
            "all_passed": self.all_passed,
            "rules": {name: vars(s) for name, s in sorted(self.stats.items())},
            "counterexamples": self.counterexamples,
            "errors": self.errors.get_stats(),
        }


def check_instance(rule: RuleName, before: Formula, after: Formula, model: FiniteModel,
                   report: BatteryReport) -> None:
    """1つの適用例を1つのモデルで検査して報告に加える"""
    if rule in _NEEDS_HAC and not model.hac_complete:
        report.add(rule, "skipped")
        return
    try:
        result = check_equiv(before, after, model)
    except (SortTooLargeError, BudgetExceededError) as e:
        report.errors.record(e, rule=rule.value, model=model.name)
        report.add(rule, "skipped")
        return
    if result.equivalent:
        report.add(rule, "passed")
        return
    report.add(rule, "failed")
    logger.warning(f"{rule.value} の反例: モデル {model.name} {result.counterexample}")
    report.add_counterexample(rule, {
        "model": model.name,
        "size": before.size(),
        "before": formula_to_json(before),
        "after": formula_to_json(after),
        **result.to_json(),
    })


def run_on_model(model: FiniteModel, instances: List[Instance]) -> BatteryReport:
    report = BatteryReport(models=[model.name])
    for rule, before, after in instances:
        check_instance(rule, before, after, model, report)
    logger.info(f"モデル {model.name}: {sum(s.passed for s in report.stats.values())} 件合格")
    return report


# ---------------------------------------------------------------- 実行

class BatteryRequest(BaseModel):
    """バッテリー設定（config/battery.json）"""
    seed: int = 0
    count: int = Field(5, ge=0)
    normalize_count: int = Field(5, ge=0)
    workers: Optional[int] = None
    models: List[FiniteModel] = Field(default_factory=default_models)

    @classmethod
    def load(cls, path: Optional[Path]) -> "BatteryRequest":
        if path is None:
            return cls()
        with open(path, "r", encoding="utf-8") as f:
            return cls.model_validate(json.load(f))


class BatteryRunner:
    """モデルごとにスレッドで検査し、報告を併合する"""

    def __init__(self, request: BatteryRequest):
        self.request = request
        self.console = Console(stderr=True)

    def instances(self) -> List[Instance]:
        generator = FormulaGenerator(self.request.seed)
        instances = list(generator.instances(self.request.count))
        instances.extend(generator.normalize_steps(self.request.normalize_count))
        return instances

    def run(self, instances: Optional[List[Instance]] = None) -> BatteryReport:
        instances = self.instances() if instances is None else instances
        workers = self.request.workers or get_config().workers
        logger.info(f"バッテリー開始: {len(instances)} 件 × {len(self.request.models)} モデル")
        report = BatteryReport()
        if not instances:
            report.models = [m.name for m in self.request.models]
            return report
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda m: run_on_model(m, instances), self.request.models))
        for partial in results:
            report = report.merge(partial)
        return report

    def print_summary(self, report: BatteryReport) -> None:
        table = Table(title="規則ごとの検査結果")
        table.add_column("規則")
        table.add_column("合格", justify="right")
        table.add_column("反例", justify="right")
        table.add_column("省略", justify="right")
        for name, stats in sorted(report.stats.items()):
            table.add_row(name, str(stats.passed), str(stats.failed), str(stats.skipped))
        self.console.print(CAVEAT)
        self.console.print(table)

    def save_report(self, report: BatteryReport, output_path: Optional[Path] = None) -> Path:
        if output_path is None:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            results_dir = Path.cwd() / "results"
            results_dir.mkdir(exist_ok=True)
            output_path = results_dir / f"battery_{timestamp}.json"
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(report.to_json(), f, ensure_ascii=False, indent=2, sort_keys=True)
        logger.info(f"報告を保存しました: {output_path}")
        return output_path


def run_battery(models: List[FiniteModel], instances: List[Instance],
                workers: Optional[int] = None) -> BatteryReport:
    """与えた適用例を全モデルで検査する"""
    request = BatteryRequest(models=models, workers=workers, count=0, normalize_count=0)
    return BatteryRunner(request).run(instances)


def negative_control() -> Tuple[Formula, Formula, FiniteModel]:
    """
    標準的に閉じていないモデルで Idealize が破れる例
    (∀v)(∃^st u)(u = v ∨ (u = s ∧ s < v))
    """
    model = open_model()
    u, v = Var("u", BASE), Var("v", BASE)
    s = NumLit(model.s)
    before = Forall(v, ExistsSt(u, Or(atom(Pred.EQ, u, v),
                                       And(atom(Pred.EQ, u, s), atom(Pred.LT, s, v)))))
    return before, idealize(before), model
