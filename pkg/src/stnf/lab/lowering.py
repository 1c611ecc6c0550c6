"""
水準2の標準量化子の書き換え
(Q^st h)ψ の h を、引数を束縛する標準量化子の直下の (Q^st b) に押し込んで水準1以下にする。
標準的に閉じたモデルでは標準な関数空間が標準な引数上の全写像なので、値は同じになる。
"""
from typing import FrozenSet, List, Tuple

from loguru import logger

from ..core.errors import SortTooLargeError
from ..core.formulas import (Atom, Binary, ExistsSt, Forall, ForallSt, Formula, Implies,
                             Not, Quant, StAtom, match_bounded, quantifier)
from ..core.substitution import FreshNames, bound_names
from ..core.terms import App, Term, Var
from ..core.types import Arrow, FinType, Seq, is_type1
from .model import FiniteModel


def lower_level_two(f: Quant, model: FiniteModel) -> Formula:
    """
    (∀^st h)ψ / (∃^st h)ψ（h の型の水準が2以上）を h を含まない同値な式にする

    ψ 中の h は全て同じ相異なる変数の列 ȳ への適用 h(ȳ) で、ȳ は (Q^st h) より
    内側の標準量化子で束縛されていなければならない。

    Raises:
        SortTooLargeError: 書き換えられない形、または標準的に閉じていないモデル
    """
    h = f.var
    if not f.standard:
        raise SortTooLargeError(f"内部量化子の変数 {h.name}: {h.type} は有限モデルで評価できません")
    if not model.standard_closed:
        raise SortTooLargeError(f"標準的に閉じていないモデル {model.name} では {h.name} を書き換えられません")
    body = unidealize(f.body)
    if h not in body.free_vars():
        return body
    target = _application(body, h)
    names = FreshNames({v.name for v in f.free_vars()} | bound_names(f))
    b = names.fresh_var("b", _result_type(h.type, len(_args(target))))
    lowered = _Lowering(h, target, b).push(body, frozenset(_args(target)), f.universal)
    logger.debug(f"水準2の量化子 {h.name} を {b.name}: {b.type} に書き換え")
    return lowered


# ---------------------------------------------------------------- 列の展開

def unidealize(f: Formula) -> Formula:
    """
    (∃^st W)ψ で W が正の位置の有界 ∃ の範囲にしか現れなければ (∃u∈W) を (∃^st u) に戻す

    ∀^st と有界 ∀ についても同様。標準列全体の列挙が標準なモデルで同値。
    """
    if isinstance(f, (Atom, StAtom)):
        return f
    if (isinstance(f, (ExistsSt, ForallSt)) and isinstance(f.var.type, Seq)
            and _only_ranges(f.var, f.body, f.universal, True)):
        return unidealize(_open_ranges(f.body, f.var))
    return f.with_subformulas(tuple(unidealize(s) for s in f.subformulas()))


def _only_ranges(W: Var, f: Formula, universal: bool, positive: bool) -> bool:
    if W not in f.free_vars():
        return True
    bounded = match_bounded(f)
    if bounded is not None and bounded[1] == W:
        return positive and isinstance(f, Forall) == universal and _only_ranges(
            W, bounded[3], universal, positive)
    if isinstance(f, (Atom, StAtom)):
        return False
    if isinstance(f, Not):
        return _only_ranges(W, f.sub, universal, not positive)
    if isinstance(f, Implies):
        return (_only_ranges(W, f.left, universal, not positive)
                and _only_ranges(W, f.right, universal, positive))
    if isinstance(f, Quant):
        return f.var == W or _only_ranges(W, f.body, universal, positive)
    return all(_only_ranges(W, s, universal, positive) for s in f.subformulas())


def _open_ranges(f: Formula, W: Var) -> Formula:
    bounded = match_bounded(f)
    if bounded is not None and bounded[1] == W:
        v, _, _, body = bounded
        cls = ForallSt if isinstance(f, Forall) else ExistsSt
        return cls(v, _open_ranges(body, W))
    if isinstance(f, (Atom, StAtom)) or (isinstance(f, Quant) and f.var == W):
        return f
    return f.with_subformulas(tuple(_open_ranges(s, W) for s in f.subformulas()))


# ---------------------------------------------------------------- 適用の検出

def _chain(t: Term) -> Tuple[Term, List[Term]]:
    args: List[Term] = []
    while isinstance(t, App):
        args.insert(0, t.arg)
        t = t.fn
    return t, args


def _term_applications(t: Term, h: Var, found: List[Term]) -> None:
    if isinstance(t, App):
        head, args = _chain(t)
        if head == h:
            found.append(t)
            for arg in args:
                _term_applications(arg, h, found)
            return
    for sub in t.subterms():
        _term_applications(sub, h, found)


def _formula_terms(f: Formula) -> List[Term]:
    if isinstance(f, Atom):
        return list(f.args)
    if isinstance(f, StAtom):
        return [f.term]
    result: List[Term] = []
    for sub in f.subformulas():
        result.extend(_formula_terms(sub))
    return result


def _application(f: Formula, h: Var) -> Term:
    found: List[Term] = []
    for t in _formula_terms(f):
        _term_applications(t, h, found)
    targets = set(found)
    if len(targets) != 1:
        raise SortTooLargeError(f"{h.name} の適用が一通りではありません（{len(targets)} 通り）")
    target = targets.pop()
    args = _args(target)
    if not all(isinstance(a, Var) for a in args) or len(set(args)) != len(args):
        raise SortTooLargeError(f"{h.name} の引数が相異なる変数ではありません")
    return target


def _args(t: Term) -> List[Var]:
    return _chain(t)[1]


def _result_type(t: FinType, n: int) -> FinType:
    for i in range(n):
        if not isinstance(t, Arrow):
            raise SortTooLargeError(f"{t} に引数を適用できません")
        t = t.cod
        if i < n - 1 and is_type1(t):
            # 途中の値が型1なら標準関数表に制限される
            raise SortTooLargeError(f"部分適用の値の型 {t} は全写像になりません")
    return t


def _replace_term(t: Term, target: Term, b: Var) -> Term:
    if t == target:
        return b
    return t.with_subterms(tuple(_replace_term(s, target, b) for s in t.subterms()))


def _replace(f: Formula, target: Term, b: Var) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_replace_term(t, target, b) for t in f.args))
    if isinstance(f, StAtom):
        return StAtom(_replace_term(f.term, target, b))
    return f.with_subformulas(tuple(_replace(s, target, b) for s in f.subformulas()))


# ---------------------------------------------------------------- 押し込み

class _Lowering:
    """h(ȳ) を b に置き換えながら (Q^st h) を内側へ運ぶ"""

    def __init__(self, h: Var, target: Term, b: Var):
        self.h, self.target, self.b = h, target, b

    def push(self, f: Formula, pending: FrozenSet[Var], universal: bool) -> Formula:
        if self.h not in f.free_vars():
            return f
        if isinstance(f, Not):
            return Not(self.push(f.sub, pending, not universal))
        if isinstance(f, Binary):
            return self._push_binary(f, pending, universal)
        if isinstance(f, Quant):
            return self._push_quant(f, pending, universal)
        raise SortTooLargeError(f"{self.h.name} の引数が束縛される前に原子式に達しました")

    def _push_binary(self, f: Binary, pending: FrozenSet[Var], universal: bool) -> Formula:
        in_left, in_right = self.h in f.left.free_vars(), self.h in f.right.free_vars()
        if in_left and in_right:
            raise SortTooLargeError(f"{self.h.name} が {type(f).__name__} の両辺に現れます")
        if in_left:
            flipped = universal if not isinstance(f, Implies) else not universal
            return type(f)(self.push(f.left, pending, flipped), f.right)
        return type(f)(f.left, self.push(f.right, pending, universal))

    def _push_quant(self, f: Quant, pending: FrozenSet[Var], universal: bool) -> Formula:
        if f.var in pending:
            if not f.standard:
                raise SortTooLargeError(f"引数 {f.var.name} が内部量化子で束縛されています")
            rest = pending - {f.var}
            if rest:
                return type(f)(f.var, self.push(f.body, rest, universal))
            return type(f)(f.var, self._place(f.body, universal))
        if f.universal != universal:
            raise SortTooLargeError(f"{self.h.name} は逆向きの量化子 {f.var.name} を越えられません")
        return type(f)(f.var, self.push(f.body, pending, universal))

    def _place(self, body: Formula, universal: bool) -> Formula:
        replaced = _replace(body, self.target, self.b)
        if self.h in replaced.free_vars():
            raise SortTooLargeError(f"{self.h.name} が適用以外の位置に残ります")
        return quantifier(universal, True)(self.b, replaced)
