"""
正規化エンジン
式を葉から根へ走査し、各部分式を正規形に揃えながら規則を適用する。
各ステップは式全体の書き換え前後を記録するので導出は連結する。
"""
from typing import Optional, Tuple

from loguru import logger

from ..core.errors import NotMonotoneError, StuckError
from ..core.formulas import (And, Exists, ExistsSt, Forall, ForallSt, Formula, Implies, Not, Or,
                             StAtom, match_bounded)
from ..core.standardness import NormalForm, as_normal_form, classify
from ..core.substitution import FreshNames, bound_names, rename_apart
from ..core.types import BASE, Seq
from .derivation import Derivation, RuleName
from .prenex import prenex_report, prenex_st
from .rules import (eliminate_nonstandard_param_steps, idealize, match_nonstandard_param,
                    max_collapse, negate_normal_form_steps, skolem_side_conditions,
                    skolemize_antecedent,
                    unfold_nonstandard_param)

Path = Tuple[int, ...]


def subformula_at(f: Formula, path: Path) -> Formula:
    for i in path:
        f = f.subformulas()[i]
    return f


def replace_at(f: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    subs = list(f.subformulas())
    subs[path[0]] = replace_at(subs[path[0]], path[1:], new)
    return f.with_subformulas(tuple(subs))


class Normalizer:
    """1回の正規化の状態（名前発行器と導出）"""

    def __init__(self, formula: Formula, collapse: bool = True):
        self.names = FreshNames({v.name for v in formula.free_vars()} | bound_names(formula))
        self.derivation = Derivation(formula)
        self.root = rename_apart(formula, self.names)
        self.collapse = collapse

    def run(self) -> NormalForm:
        if classify(self.root).is_normal:
            return as_normal_form(self.root)
        self._visit(())
        nf = as_normal_form(self.root)
        if nf is None:
            raise StuckError("正規形に到達できませんでした", subformula=self.root)
        logger.info(f"正規化完了: {len(self.derivation.steps)} ステップ")
        return nf

    def _get(self, path: Path) -> Formula:
        return subformula_at(self.root, path)

    def _rewrite(self, path: Path, rule: RuleName, new: Formula, *side: str) -> None:
        before = self.root
        self.root = replace_at(self.root, path, new)
        self.derivation.record(rule, before, self.root, *side)
        logger.debug(f"{rule.value} @ {list(path)}")

    def _visit(self, path: Path) -> None:
        node = self._get(path)
        if node.is_internal():
            return
        matched = match_nonstandard_param(node)
        if matched is not None:
            if as_normal_form(matched[1]) is not None:
                self._replay(path, eliminate_nonstandard_param_steps(node, self.names))
                return
            self._rewrite(path, RuleName.ELIM_NONSTANDARD_PARAM,
                          unfold_nonstandard_param(node, self.names), "¬st(M) ≡ (∀^st r)(M ≠ r)")
            node = self._get(path)
        if isinstance(node, StAtom):
            self._rewrite(path, RuleName.PRENEX_ST, prenex_st(node, self.names),
                          "st(t) ≡ (∃^st r)(r = t)")
            return
        if isinstance(node, (Forall, Exists)) and match_bounded(node):
            # ガードは内部的なので本体だけを正規化する
            self._visit(path + (0, 1))
        else:
            for i in range(len(node.subformulas())):
                self._visit(path + (i,))
        self._combine(path)

    def _combine(self, path: Path) -> None:
        node = self._get(path)
        if as_normal_form(node) is not None:
            return
        if isinstance(node, Not):
            self._prenex(path)
            if as_normal_form(self._get(path)) is None:
                self._negate(path)
        elif isinstance(node, Implies):
            antecedent = as_normal_form(node.left)
            if antecedent is not None and antecedent.univ_st and antecedent.exist_st:
                self._rewrite(path, RuleName.SKOLEMIZE_ANTECEDENT,
                              skolemize_antecedent(node, self.names),
                              *skolem_side_conditions(antecedent))
            self._prenex(path)
        elif isinstance(node, (And, Or, Exists)):
            self._prenex(path)
        elif isinstance(node, ExistsSt):
            self._negate(path)
        elif isinstance(node, Forall):
            self._prenex(path)
            self._idealize_below(path)
        node = self._get(path)
        if as_normal_form(node) is None:
            raise StuckError(f"{type(node).__name__} の下で正規化が止まりました", subformula=node)

    def _prenex(self, path: Path) -> None:
        node = self._get(path)
        report = prenex_report(node, self.names)
        for reason in report.blocked:
            logger.debug(f"冠頭化の停止 @ {list(path)}: {reason}")
        if report.changed:
            self._rewrite(path, RuleName.PRENEX_ST, report.result)

    def _replay(self, path: Path, derivation: Derivation) -> None:
        for step in derivation.steps:
            self._rewrite(path, step.rule, step.after, *step.side_conditions)

    def _negate(self, path: Path) -> None:
        self._replay(path, negate_normal_form_steps(self._get(path), self.names))

    def _idealize_below(self, path: Path) -> None:
        node = self._get(path)
        while isinstance(node, ForallSt):
            path = path + (0,)
            node = node.body
        if not isinstance(node, Forall) or as_normal_form(node) is not None:
            return
        result = idealize(node, self.names)
        self._rewrite(path, RuleName.IDEALIZE, result)
        introduced = []
        while isinstance(result, ExistsSt):
            introduced.append(result.var)
            result = result.body
        if self.collapse and len(introduced) == 1 and introduced[0].type == Seq(BASE):
            try:
                collapsed = max_collapse(self._get(path), self.names)
            except NotMonotoneError as e:
                logger.debug(f"MaxCollapse を見送り: {e.message}")
                return
            self._rewrite(path, RuleName.MAX_COLLAPSE, collapsed, "母式は k について単調")


def normalize(f: Formula, collapse: bool = True) -> Tuple[NormalForm, Derivation]:
    """
    外延的な式を同値な正規形 (∀^st x̄)(∃^st ȳ)φ に変換する

    Raises:
        StuckError: 内部 ∃ の下に ∀^st が残るなど規則が尽きた
    """
    normalizer = Normalizer(f, collapse)
    nf = normalizer.run()
    return nf, normalizer.derivation
