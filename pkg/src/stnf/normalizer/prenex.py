"""
st 量化子の冠頭化
古典論理の冠頭法則が許す範囲で ∀^st / ∃^st を前に出す。
∃^st は内部 ∀ を越えられない（Idealize が必要）、∀^st は内部 ∃ を越えられない。
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple, Type

from ..core.errors import UnsupportedShapeError
from ..core.formulas import (And, Exists, ExistsSt, Forall, ForallSt, Formula,
                             Implies, Not, Or, Quant, StAtom, dual, eq_formula, match_bounded,
                             nest)
from ..core.substitution import FreshNames, bound_names, rename_apart
from ..core.terms import Var
from ..core.typing_rules import typecheck

Prefix = List[Tuple[Type[Quant], Var]]


def merge_prefixes(pa: Prefix, pb: Prefix) -> Prefix:
    """独立な2つの接頭辞を ∀ 優先で併合（各列の相対順序は保つ）"""
    a, b = list(pa), list(pb)
    merged: Prefix = []
    while a or b:
        for universal in (True, False):
            while a and a[0][0].universal == universal:
                merged.append(a.pop(0))
            while b and b[0][0].universal == universal:
                merged.append(b.pop(0))
    return merged


def _dual(prefix: Prefix) -> Prefix:
    return [(dual(cls), v) for cls, v in prefix]


@dataclass
class PrenexReport:
    result: Formula
    changed: bool
    blocked: List[str]


class _Prenexer:
    def __init__(self, names: FreshNames):
        self.names = names
        self.blocked: List[str] = []

    def run(self, f: Formula) -> Tuple[Prefix, Formula]:
        if f.is_internal():
            return [], f
        if isinstance(f, StAtom):
            # st(t) ≡ (∃^st r)(r = t)
            type_ = typecheck(f.term)
            r = self.names.fresh_var("r", type_)
            return [(ExistsSt, r)], eq_formula(r, f.term, type_)
        if isinstance(f, Not):
            prefix, matrix = self.run(f.sub)
            return _dual(prefix), Not(matrix)
        if isinstance(f, (And, Or)):
            pa, ma = self.run(f.left)
            pb, mb = self.run(f.right)
            return merge_prefixes(pa, pb), type(f)(ma, mb)
        if isinstance(f, Implies):
            pa, ma = self.run(f.left)
            pb, mb = self.run(f.right)
            return merge_prefixes(_dual(pa), pb), Implies(ma, mb)
        if isinstance(f, (ForallSt, ExistsSt)):
            prefix, matrix = self.run(f.body)
            return [(type(f), f.var)] + prefix, matrix
        if isinstance(f, (Forall, Exists)):
            return self._internal_quantifier(f)
        raise UnsupportedShapeError(f"冠頭化できない構成: {type(f).__name__}")

    def _internal_quantifier(self, f: Quant) -> Tuple[Prefix, Formula]:
        bounded = match_bounded(f)
        body = bounded[3] if bounded else f.body
        prefix, matrix = self.run(body)
        pulled: Prefix = []
        while prefix and prefix[0][0].universal == f.universal:
            pulled.append(prefix.pop(0))
        if prefix:
            self.blocked.append(
                f"{prefix[0][0].__name__} {prefix[0][1].name} は内部量化子 {f.var.name} の下に残ります")
        inner = nest(prefix, matrix)
        if bounded:
            guard = bounded[2]
            inner = Implies(guard, inner) if isinstance(f, Forall) else And(guard, inner)
        return pulled, type(f)(f.var, inner)


def prenex_report(f: Formula, names: Optional[FreshNames] = None) -> PrenexReport:
    """
    冠頭化と進展の報告

    先に束縛変数を互いに、また自由変数と別名にしてから量化子を動かす。
    """
    names = names or FreshNames()
    names.reserve({v.name for v in f.free_vars()} | bound_names(f))
    prenexer = _Prenexer(names)
    prefix, matrix = prenexer.run(rename_apart(f, names))
    result = nest(prefix, matrix)
    return PrenexReport(result, result != f, prenexer.blocked)


def prenex_st(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    return prenex_report(f, names).result
