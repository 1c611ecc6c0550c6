"""
導出の記録
各ステップは式全体の書き換え前後と副条件を持ち、隣接ステップは連結する
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Set, Tuple

from ..core.alpha import alpha_equiv
from ..core.formulas import Formula
from ..core.serialize import formula_to_json


class RuleName(Enum):
    PRENEX_ST = "PrenexSt"
    IDEALIZE = "Idealize"
    HERBRANDIZE = "Herbrandize"
    MAX_COLLAPSE = "MaxCollapse"
    SKOLEMIZE_ANTECEDENT = "SkolemizeAntecedent"
    ELIM_NONSTANDARD_PARAM = "ElimNonstandardParam"
    NEGATE_NF = "NegateNF"
    SUBSTITUTE_PROPERTY = "SubstituteProperty"


class Axiom(Enum):
    """規則を正当化する公理"""
    I = "I"
    HAC_INT = "HAC_int"
    CLASSICAL = "classical"


RULE_AXIOMS: Dict[RuleName, Axiom] = {
    RuleName.PRENEX_ST: Axiom.CLASSICAL,
    RuleName.IDEALIZE: Axiom.I,
    RuleName.NEGATE_NF: Axiom.I,
    RuleName.HERBRANDIZE: Axiom.HAC_INT,
    RuleName.SKOLEMIZE_ANTECEDENT: Axiom.HAC_INT,
    RuleName.MAX_COLLAPSE: Axiom.CLASSICAL,
    RuleName.ELIM_NONSTANDARD_PARAM: Axiom.CLASSICAL,
    RuleName.SUBSTITUTE_PROPERTY: Axiom.CLASSICAL,
}


@dataclass(frozen=True)
class Step:
    rule: RuleName
    before: Formula
    after: Formula
    side_conditions: Tuple[str, ...] = ()

    def to_json(self) -> Dict[str, Any]:
        return {
            "rule": self.rule.value,
            "before": formula_to_json(self.before),
            "after": formula_to_json(self.after),
            "side_conditions": list(self.side_conditions),
        }


@dataclass
class Derivation:
    input: Formula
    steps: List[Step] = field(default_factory=list)

    @property
    def output(self) -> Formula:
        return self.steps[-1].after if self.steps else self.input

    @property
    def axioms_used(self) -> Set[Axiom]:
        return {RULE_AXIOMS[s.rule] for s in self.steps}

    @property
    def rules(self) -> List[RuleName]:
        return [s.rule for s in self.steps]

    def record(self, rule: RuleName, before: Formula, after: Formula, *side_conditions: str) -> Step:
        step = Step(rule, before, after, tuple(side_conditions))
        self.steps.append(step)
        return step

    def extend(self, other: "Derivation") -> None:
        self.steps.extend(other.steps)

    def is_chained(self) -> bool:
        """隣接ステップの出力と入力が一致するか"""
        current = self.input
        for step in self.steps:
            if not alpha_equiv(step.before, current):
                return False
            current = step.after
        return True

    def to_json(self) -> Dict[str, Any]:
        return {
            "input": formula_to_json(self.input),
            "steps": [s.to_json() for s in self.steps],
            "axioms_used": sorted(a.value for a in self.axioms_used),
        }
