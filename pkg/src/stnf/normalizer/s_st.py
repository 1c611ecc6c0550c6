"""
正規形上の S_st 翻訳
正規形は翻訳の不動点になる。∃^st が ∀^st に先行する接頭辞は Herbrand 形に移る。
"""
from typing import List, Optional, Union

from ..core.errors import NotApplicableError
from ..core.formulas import ExistsSt, ForallSt, Formula, exists_in, forall_in, nest
from ..core.alpha import alpha_equiv
from ..core.standardness import NormalForm
from ..core.substitution import FreshNames, bound_names
from ..core.terms import Var
from ..core.types import Seq


def s_st_translate(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    """
    st 量化子だけの接頭辞と内部的な母式からなる式の翻訳

    内側から1つずつ量化子を処理する。(∃^st y) が (∀^st x̄)(∃^st v̄)ψ の前に来たら
    (∀^st X̄)(∃^st y, V̄)(∀x̄∈X̄)(∃v̄∈V̄)ψ に移す。

    Raises:
        NotApplicableError: st 量化子が接続詞の下にある
    """
    names = names or FreshNames({v.name for v in f.free_vars()} | bound_names(f))
    prefix: List[tuple] = []
    matrix = f
    while isinstance(matrix, (ForallSt, ExistsSt)):
        prefix.append((type(matrix), matrix.var))
        matrix = matrix.body
    if not matrix.is_internal():
        raise NotApplicableError("翻訳は st 接頭辞と内部的な母式の形に限られます")

    univ: List[Var] = []
    exist: List[Var] = []
    body = matrix
    for cls, v in reversed(prefix):
        if cls is ForallSt:
            univ.insert(0, v)
        elif univ:
            seqs = [names.fresh_var(w.name.split("_")[0].upper(), Seq(w.type)) for w in exist]
            for w, W in reversed(list(zip(exist, seqs))):
                body = exists_in(w, W, body, W.type)
            bigs = [names.fresh_var(x.name.split("_")[0].upper(), Seq(x.type)) for x in univ]
            for x, X in reversed(list(zip(univ, bigs))):
                body = forall_in(x, X, body, X.type)
            univ = bigs
            exist = [v] + seqs
        else:
            exist.insert(0, v)
    return nest([(ForallSt, x) for x in univ] + [(ExistsSt, y) for y in exist], body)


def s_st_fixed_point_check(nf: Union[NormalForm, Formula]) -> bool:
    """翻訳が入力を（α同値の範囲で）変えないか"""
    f = nf.render() if isinstance(nf, NormalForm) else nf
    try:
        return alpha_equiv(s_st_translate(f), f)
    except NotApplicableError:
        return False
