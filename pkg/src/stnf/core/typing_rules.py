"""
型検査
項の型推論と式の整合性検査。エラーは位置パスつきで報告する
"""
from typing import Dict, List, Mapping, Optional

from loguru import logger

from .errors import IllTypedError
from .formulas import Atom, Binary, Formula, Not, Pred, Quant, StAtom
from .terms import (App, Concat, EmptySeq, GridRat, Index, InitSeg, Lam, Length,
                    NumLit, Plus, SeqLit, SeqMax, Term, Var)
from .types import BASE, GRIDSET, REAL, Arrow, FinType, Seq

Context = Mapping[str, FinType]


def typecheck(t: Term, context: Optional[Context] = None, location: str = "") -> FinType:
    """
    項の型を返す

    Args:
        t: 対象の項
        context: 自由変数名 → 型
        location: エラー報告用のパス

    Returns:
        一意に決まる型
    """
    ctx: Dict[str, FinType] = dict(context or {})
    return _typeof(t, ctx, location or "term")


def _typeof(t: Term, ctx: Dict[str, FinType], loc: str) -> FinType:
    if isinstance(t, Var):
        declared = ctx.get(t.name)
        if declared is not None and declared != t.type:
            raise IllTypedError(f"変数 {t.name} の型 {t.type} が文脈の {declared} と矛盾", loc)
        return t.type
    if isinstance(t, NumLit):
        return BASE
    if isinstance(t, Lam):
        inner = dict(ctx)
        inner[t.bound.name] = t.bound.type
        return Arrow(t.bound.type, _typeof(t.body, inner, f"{loc}.body"))
    if isinstance(t, App):
        fn_type = _typeof(t.fn, ctx, f"{loc}.fn")
        arg_type = _typeof(t.arg, ctx, f"{loc}.arg")
        if not isinstance(fn_type, Arrow):
            raise IllTypedError(f"関数でない項の適用: {fn_type}", loc)
        if fn_type.dom != arg_type:
            raise IllTypedError(f"引数の型不一致: {fn_type.dom} に {arg_type}", loc)
        return fn_type.cod
    if isinstance(t, EmptySeq):
        return Seq(t.elem)
    if isinstance(t, SeqLit):
        types = [_typeof(e, ctx, f"{loc}.elems[{i}]") for i, e in enumerate(t.elems)]
        if any(ty != types[0] for ty in types):
            raise IllTypedError("列リテラルの要素型が揃っていません", loc)
        return Seq(types[0])
    if isinstance(t, Length):
        _expect_seq(t.seq, ctx, f"{loc}.seq")
        return BASE
    if isinstance(t, Index):
        seq_type = _expect_seq(t.seq, ctx, f"{loc}.seq")
        _expect(t.i, BASE, ctx, f"{loc}.i")
        if isinstance(t.seq, EmptySeq):
            logger.warning(f"空列の添字参照は既定値 0 を返します: {loc}")
        return seq_type.elem
    if isinstance(t, Concat):
        a = _expect_seq(t.a, ctx, f"{loc}.a")
        b = _expect_seq(t.b, ctx, f"{loc}.b")
        if a != b:
            raise IllTypedError(f"連結の型不一致: {a} と {b}", loc)
        return a
    if isinstance(t, InitSeg):
        seq_type = _expect_seq(t.seq, ctx, f"{loc}.seq")
        _expect(t.n, BASE, ctx, f"{loc}.n")
        return seq_type
    if isinstance(t, SeqMax):
        _expect(t.seq, Seq(BASE), ctx, f"{loc}.seq")
        return BASE
    if isinstance(t, GridRat):
        _expect(t.exponent, BASE, ctx, f"{loc}.exponent")
        if isinstance(t.exponent, NumLit) and t.i > 2 ** t.exponent.n:
            raise IllTypedError(f"格子分子 {t.i} が 2^{t.exponent.n} を超えています", loc)
        return REAL
    if isinstance(t, Plus):
        _expect(t.a, BASE, ctx, f"{loc}.a")
        _expect(t.b, BASE, ctx, f"{loc}.b")
        return BASE
    raise IllTypedError(f"未知の項: {type(t).__name__}", loc)


def _expect(t: Term, expected: FinType, ctx: Dict[str, FinType], loc: str) -> None:
    actual = _typeof(t, ctx, loc)
    if actual != expected:
        raise IllTypedError(f"{expected} を期待しましたが {actual}", loc)


def _expect_seq(t: Term, ctx: Dict[str, FinType], loc: str) -> Seq:
    actual = _typeof(t, ctx, loc)
    if not isinstance(actual, Seq):
        raise IllTypedError(f"列型を期待しましたが {actual}", loc)
    return actual


def check_formula(f: Formula, context: Optional[Context] = None, location: str = "formula") -> None:
    """式全体の型検査（失敗時は IllTypedError）"""
    _check(f, dict(context or {}), location)


def _check(f: Formula, ctx: Dict[str, FinType], loc: str) -> None:
    if isinstance(f, Atom):
        types: List[FinType] = [_typeof(a, ctx, f"{loc}.args[{i}]") for i, a in enumerate(f.args)]
        _check_atom(f.pred, types, loc)
    elif isinstance(f, StAtom):
        _typeof(f.term, ctx, f"{loc}.term")
    elif isinstance(f, Not):
        _check(f.sub, ctx, f"{loc}.sub")
    elif isinstance(f, Binary):
        _check(f.left, ctx, f"{loc}.left")
        _check(f.right, ctx, f"{loc}.right")
    elif isinstance(f, Quant):
        inner = dict(ctx)
        inner[f.var.name] = f.var.type
        _check(f.body, inner, f"{loc}.body")
    else:
        raise IllTypedError(f"未知の式: {type(f).__name__}", loc)


def _check_atom(pred: Pred, types: List[FinType], loc: str) -> None:
    arity = {Pred.EQ: 2, Pred.LE: 2, Pred.LT: 2, Pred.IN_SEQ: 2,
             Pred.IN_GRID: 2, Pred.APPROX: 3, Pred.MEASURE_LEQ: 2}[pred]
    if len(types) != arity:
        raise IllTypedError(f"述語 {pred.value} の引数は {arity} 個です", loc)
    if pred in (Pred.EQ, Pred.LE, Pred.LT):
        if types[0] != types[1] or types[0] not in (BASE, REAL):
            raise IllTypedError(f"比較 {pred.value} は同じ基底型 0 または R の間のみ", loc)
    elif pred == Pred.IN_SEQ:
        if types[1] != Seq(types[0]):
            raise IllTypedError(f"列所属の型不一致: {types[0]} ∈ {types[1]}", loc)
    elif pred == Pred.IN_GRID:
        if types != [REAL, GRIDSET]:
            raise IllTypedError("格子所属は R ∈ G の形のみ", loc)
    elif pred == Pred.APPROX:
        if types != [REAL, REAL, REAL]:
            raise IllTypedError("approx の引数は R, R, R", loc)
    elif pred == Pred.MEASURE_LEQ:
        if types != [GRIDSET, REAL]:
            raise IllTypedError("measure<= の引数は G, R", loc)
