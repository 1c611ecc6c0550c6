"""
標準性推論と式の分類
正規形 (∀^st x̄)(∃^st ȳ)φ（φ 内部的）の認識
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import AbstractSet, Optional, Tuple

from .formulas import ExistsSt, Formula, ForallSt, nest
from .terms import App, Term, Var


def infer_standard(t: Term, st_assumptions: AbstractSet[Var] = frozenset()) -> bool:
    """
    標準性の導出可能性（保守的）

    閉項は標準、標準関数の標準引数への適用は標準、仮定された変数は標準。
    自由変数 ȳ を含む項 t は閉項 (λȳ)t を ȳ に適用したものと見なせるので、
    全自由変数が仮定に含まれれば標準。
    False は「導出できない」の意味であり非標準の主張ではない。
    """
    if t.is_closed():
        return True
    if isinstance(t, Var):
        return t in st_assumptions
    if isinstance(t, App):
        if infer_standard(t.fn, st_assumptions) and infer_standard(t.arg, st_assumptions):
            return True
    return t.free_vars() <= set(st_assumptions)


@dataclass(frozen=True)
class NormalForm:
    """(∀^st univ_st)(∃^st exist_st) matrix、matrix は内部的"""
    univ_st: Tuple[Var, ...]
    exist_st: Tuple[Var, ...]
    matrix: Formula

    def __post_init__(self):
        if not self.matrix.is_internal():
            raise ValueError("正規形の母式は内部的でなければなりません")

    def render(self) -> Formula:
        prefix = [(ForallSt, v) for v in self.univ_st] + [(ExistsSt, v) for v in self.exist_st]
        return nest(prefix, self.matrix)

    def free_vars(self):
        return self.render().free_vars()


class Classification(Enum):
    INTERNAL = "internal"
    NORMAL_FORM = "normal_form"
    EXTERNAL_OTHER = "external_other"


@dataclass(frozen=True)
class ClassifyResult:
    kind: Classification
    normal_form: Optional[NormalForm] = field(default=None)

    @property
    def is_normal(self) -> bool:
        return self.kind in (Classification.INTERNAL, Classification.NORMAL_FORM)


def split_prefix(f: Formula) -> Tuple[Tuple[Var, ...], Tuple[Var, ...], Formula]:
    """先頭の ∀^st ブロックと ∃^st ブロックを取り出す"""
    univ, exist = [], []
    while isinstance(f, ForallSt):
        univ.append(f.var)
        f = f.body
    while isinstance(f, ExistsSt):
        exist.append(f.var)
        f = f.body
    return tuple(univ), tuple(exist), f


def as_normal_form(f: Formula) -> Optional[NormalForm]:
    univ, exist, matrix = split_prefix(f)
    if matrix.is_internal():
        return NormalForm(univ, exist, matrix)
    return None


def classify(f: Formula) -> ClassifyResult:
    """Internal / IsNormalForm / ExternalOther の判定"""
    if f.is_internal():
        return ClassifyResult(Classification.INTERNAL, NormalForm((), (), f))
    nf = as_normal_form(f)
    if nf is not None:
        return ClassifyResult(Classification.NORMAL_FORM, nf)
    return ClassifyResult(Classification.EXTERNAL_OTHER)
