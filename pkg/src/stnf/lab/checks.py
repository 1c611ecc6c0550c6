"""
経験的な同値性検査と Herbrand 証人の総当たり抽出
"""
import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

from loguru import logger

from ..core.errors import BudgetExceededError, NotValidError
from ..core.formulas import Formula
from ..core.pretty import show
from ..core.standardness import NormalForm
from ..core.terms import Var
from .evaluator import Evaluator
from .model import FiniteModel


def _show(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_show(v) for v in value]
    if isinstance(value, (int, bool)):
        return value
    return str(value)


@dataclass
class EquivResult:
    """同値性検査の結果（反例は最初に見つかった割り当て）"""
    equivalent: bool
    checked: int
    total: int
    counterexample: Optional[Dict[str, Any]] = None
    values: Optional[Tuple[bool, bool]] = None

    def to_json(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "status": "Equivalent" if self.equivalent else "Counterexample",
            "checked": self.checked,
            "total": self.total,
        }
        if self.counterexample is not None:
            result["env"] = {k: _show(v) for k, v in self.counterexample.items()}
            result["values"] = list(self.values)
        return result


def _assignments(free: List[Var], model: FiniteModel) -> Tuple[itertools.product, int]:
    domains = [model.domain(v.type) for v in free]
    total = 1
    for d in domains:
        total *= len(d)
    return itertools.product(*domains), total


def check_equiv(f: Formula, g: Formula, model: FiniteModel,
                env: Optional[Mapping[str, Any]] = None,
                budget: Optional[int] = None) -> EquivResult:
    """
    f と g の真偽が全ての割り当てで一致するかを調べる

    env で与えた変数は固定し、残りの自由変数を定義域全体で列挙する。

    Raises:
        BudgetExceededError: 割り当て数が予算を超えた（検査済み数を報告）
    """
    fixed = dict(env or {})
    free = sorted((v for v in f.free_vars() | g.free_vars() if v.name not in fixed),
                  key=lambda v: v.name)
    assignments, total = _assignments(free, model)
    limit = budget if budget is not None else model.effective_budget
    evaluator = Evaluator(model)
    checked = 0
    for values in assignments:
        if checked >= limit:
            raise BudgetExceededError("割り当て数が予算を超えました", checked=checked, total=total)
        checked += 1
        current = dict(fixed)
        current.update({v.name: value for v, value in zip(free, values)})
        evaluator.checked = 0
        left, right = evaluator.formula(f, current), evaluator.formula(g, current)
        if left != right:
            logger.debug(f"反例: {current}")
            return EquivResult(False, checked, total, current, (left, right))
    return EquivResult(True, checked, total)


@dataclass
class WitnessTable:
    """標準入力 x̄ ごとの証人列 t(x̄)"""
    univ: Tuple[Var, ...]
    exist: Tuple[Var, ...]
    entries: Dict[Tuple[Any, ...], List[Tuple[Any, ...]]] = field(default_factory=dict)

    def satisfies(self, nf: NormalForm, model: FiniteModel,
                  env: Optional[Mapping[str, Any]] = None) -> bool:
        """全ての標準 x̄ で t(x̄) のどれかが母式を満たすか"""
        evaluator = Evaluator(model)
        base = dict(env or {})
        for xs, witnesses in self.entries.items():
            found = False
            for ys in witnesses:
                current = dict(base)
                current.update(zip((v.name for v in self.univ), xs))
                current.update(zip((v.name for v in self.exist), ys))
                if evaluator.formula(nf.matrix, current):
                    found = True
                    break
            if not found:
                return False
        return True

    def is_minimal(self, nf: NormalForm, model: FiniteModel,
                   env: Optional[Mapping[str, Any]] = None) -> bool:
        """どの要素を除いても条件が崩れるか"""
        for xs, witnesses in self.entries.items():
            for i in range(len(witnesses)):
                reduced = WitnessTable(self.univ, self.exist, dict(self.entries))
                reduced.entries[xs] = witnesses[:i] + witnesses[i + 1:]
                if reduced.satisfies(nf, model, env):
                    return False
        return True

    def render_disjunction(self, nf: NormalForm) -> List[str]:
        """各 x̄ の Herbrand 選言 ⋁_{ȳ∈t(x̄)} φ(x̄, ȳ) を文字列で"""
        matrix = show(nf.matrix)
        lines = []
        for xs, witnesses in self.entries.items():
            binding = ", ".join(f"{v.name}:={_show(x)}" for v, x in zip(self.univ, xs))
            disjuncts = []
            for ys in witnesses:
                inner = ", ".join(f"{v.name}:={_show(y)}" for v, y in zip(self.exist, ys))
                disjuncts.append(f"φ[{inner}]" if inner else "φ")
            lines.append(f"[{binding}] " + " ∨ ".join(disjuncts) + f"  where φ = {matrix}")
        return lines

    def to_json(self) -> Dict[str, Any]:
        return {
            "univ": [v.name for v in self.univ],
            "exist": [v.name for v in self.exist],
            "entries": [{"x": _show(xs), "t": [_show(ys) for ys in ws]}
                        for xs, ws in self.entries.items()],
        }


def extract_witnesses(nf: NormalForm, model: FiniteModel,
                      env: Optional[Mapping[str, Any]] = None) -> WitnessTable:
    """
    正規形の Herbrand 証人を総当たりで求める

    各標準 x̄ について列挙順で最初に母式を満たす ȳ を1つ選ぶ（単元なので極小）。

    Raises:
        NotValidError: 正規形がモデルで偽
    """
    base = dict(env or {})
    evaluator = Evaluator(model)
    if not evaluator.formula(nf.render(), base):
        raise NotValidError("正規形がモデルで成り立たないため証人は存在しません")
    table = WitnessTable(nf.univ_st, nf.exist_st)
    univ_domains = [model.domain(v.type, standard=True) for v in nf.univ_st]
    exist_domains = [model.domain(v.type, standard=True) for v in nf.exist_st]
    for xs in itertools.product(*univ_domains):
        current = dict(base)
        current.update(zip((v.name for v in nf.univ_st), xs))
        for ys in itertools.product(*exist_domains):
            current.update(zip((v.name for v in nf.exist_st), ys))
            evaluator.checked = 0
            if evaluator.formula(nf.matrix, current):
                table.entries[tuple(xs)] = [tuple(ys)]
                break
        else:
            raise NotValidError(f"x̄ = {xs} の証人が見つかりません")
    logger.info(f"証人表を抽出しました: {len(table.entries)} 入力")
    return table
