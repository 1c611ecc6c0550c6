"""
正規化の書き換え規則
各規則は単一の形に対する式変換で、適用できない形には NotApplicableError を送出する。
外延的公理は Idealize / NegateNF が I、Herbrandize / SkolemizeAntecedent が HAC_int。
"""
from typing import Dict, List, Optional, Tuple

from loguru import logger

from ..core.errors import (HoleTypeMismatchError, NotApplicableError, NotMonotoneError)
from ..core.formulas import (And, Atom, Binary, Exists, ExistsSt, Forall, ForallSt, Formula,
                             Implies, Not, Or, Pred, Quant, StAtom, eq_formula, exists_in,
                             forall_in, match_bounded, nest)
from ..core.standardness import NormalForm, as_normal_form, split_prefix
from ..core.substitution import FreshNames, bound_names, rename_apart, substitute
from ..core.terms import GridRat, Plus, Term, Var, apply
from ..core.typing_rules import typecheck
from ..core.types import BASE, FinType, Seq, arrow
from .derivation import Derivation, RuleName
from .prenex import prenex_st


def _names_for(f: Formula, names: Optional[FreshNames]) -> FreshNames:
    if names is None:
        names = FreshNames()
    names.reserve({v.name for v in f.free_vars()} | bound_names(f))
    return names


def _seq_name(v: Var) -> str:
    return v.name.split("_")[0].upper()


# ---------------------------------------------------------------- Idealize

def _peel_internal_universals(f: Formula) -> Tuple[List[Tuple[Var, Optional[Atom]]], Formula]:
    """先頭の内部 ∀（有界も可）を剥がす → [(v, ガード)], 残り"""
    peeled: List[Tuple[Var, Optional[Atom]]] = []
    while isinstance(f, Forall):
        bounded = match_bounded(f)
        if bounded:
            peeled.append((f.var, bounded[2]))
            f = bounded[3]
        else:
            peeled.append((f.var, None))
            f = f.body
    return peeled, f


def idealize(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    """
    (∀v̄)(∃^st ū)φ → (∃^st W̄)(∀v̄)(∃u₁∈W)…(∃uₙ∈W)φ

    同じ型の ∃^st 変数は1つの列を共有する（(∃r,y∈w) の形）。型ごとに列を1つ作る。
    有界 ∀ のガードはその位置に残す。
    """
    names = _names_for(f, names)
    peeled, rest = _peel_internal_universals(f)
    if not peeled:
        raise NotApplicableError("Idealize には内部 ∀ が必要です")
    us: List[Var] = []
    while isinstance(rest, ExistsSt):
        us.append(rest.var)
        rest = rest.body
    if not us:
        raise NotApplicableError("Idealize には ∃^st ブロックが必要です")
    if not rest.is_internal():
        raise NotApplicableError("Idealize の母式が内部的ではありません")
    seqs = shared_sequences(us, names)
    inner = rest
    for u in reversed(us):
        inner = exists_in(u, seqs[u], inner, seqs[u].type)
    for v, guard in reversed(peeled):
        inner = Forall(v, Implies(guard, inner) if guard is not None else inner)
    return nest([(ExistsSt, w) for w in dict.fromkeys(seqs.values())], inner)


def shared_sequences(us: List[Var], names: FreshNames) -> Dict[Var, Var]:
    """各変数 → その型の有限列変数（同じ型は同じ列）"""
    by_type: Dict[FinType, Var] = {}
    for u in us:
        if u.type not in by_type:
            by_type[u.type] = names.fresh_var(_seq_name(u), Seq(u.type))
    return {u: by_type[u.type] for u in us}


# ---------------------------------------------------------------- MaxCollapse

def _term_direction(t: Term, k: Var) -> Optional[int]:
    """t の k に関する単調性: +1 増加、-1 減少、0 定数、None 不明"""
    if k not in t.free_vars():
        return 0
    if t == k:
        return 1
    if isinstance(t, Plus):
        dirs = {_term_direction(t.a, k), _term_direction(t.b, k)}
        if None in dirs or dirs >= {1, -1}:
            return None
        return 1 if 1 in dirs else (-1 if -1 in dirs else 0)
    if isinstance(t, GridRat):
        inner = _term_direction(t.exponent, k)
        return None if inner is None else -inner
    return None


def _atom_direction(a: Atom, k: Var) -> Optional[int]:
    """原子式の真偽が k について増加 (+1) か減少 (-1) か"""
    if k not in a.free_vars():
        return 0
    if a.pred in (Pred.LE, Pred.LT):
        left, right = (_term_direction(t, k) for t in a.args)
        if left in (0, -1) and right in (0, 1):
            return 1
        if left in (0, 1) and right in (0, -1):
            return -1
        return None
    if a.pred == Pred.APPROX:
        if any(k in t.free_vars() for t in a.args[:2]):
            return None
        return _term_direction(a.args[2], k)
    if a.pred == Pred.MEASURE_LEQ:
        if k in a.args[0].free_vars():
            return None
        return _term_direction(a.args[1], k)
    return None


def check_monotone(theta: Formula, k: Var, polarity: int = 1) -> None:
    """
    θ(k) が k について単調増加であることの構文的検査

    Raises:
        NotMonotoneError: 判定できない原子式を含む
    """
    if k not in theta.free_vars():
        return
    if isinstance(theta, Atom):
        direction = _atom_direction(theta, k)
        if direction is None or direction * polarity < 0:
            raise NotMonotoneError(f"{k.name} について単調でない原子式", atom=theta)
        return
    if isinstance(theta, Not):
        check_monotone(theta.sub, k, -polarity)
    elif isinstance(theta, Implies):
        check_monotone(theta.left, k, -polarity)
        check_monotone(theta.right, k, polarity)
    elif isinstance(theta, (And, Or)):
        check_monotone(theta.left, k, polarity)
        check_monotone(theta.right, k, polarity)
    elif isinstance(theta, (Forall, Exists)):
        check_monotone(theta.body, k, polarity)
    else:
        raise NotMonotoneError(f"内部的でない部分式: {type(theta).__name__}", atom=theta)


def _collapse(f: Formula, K: Var, l: Var, polarity: int) -> Formula:
    """(∃k∈K)θ(k) を θ(l) に置き換える"""
    if K not in f.free_vars():
        return f
    bounded = match_bounded(f)
    if bounded and isinstance(f, Exists) and bounded[1] == K:
        k, _, _, theta = bounded
        if polarity < 0:
            raise NotMonotoneError(f"{K.name} の有界 ∃ が負の位置にあります", atom=bounded[2])
        if K in theta.free_vars():
            raise NotMonotoneError(f"{K.name} が入れ子で現れます", atom=bounded[2])
        check_monotone(theta, k)
        return substitute(theta, k, l)
    if isinstance(f, Atom):
        raise NotMonotoneError(f"{K.name} が有界 ∃ の範囲以外に現れます", atom=f)
    if isinstance(f, Not):
        return Not(_collapse(f.sub, K, l, -polarity))
    if isinstance(f, Implies):
        return Implies(_collapse(f.left, K, l, -polarity), _collapse(f.right, K, l, polarity))
    if isinstance(f, Binary):
        return type(f)(_collapse(f.left, K, l, polarity), _collapse(f.right, K, l, polarity))
    if isinstance(f, Quant):
        return type(f)(f.var, _collapse(f.body, K, l, polarity))
    raise NotMonotoneError(f"{K.name} を含む未対応の部分式", atom=f)


def max_collapse(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    """
    (∃^st K⁰*)ψ[(∃k∈K)θ(k)] → (∃^st l⁰)ψ[θ(l)]

    θ が k について単調増加なら K の最大値 l が全ての k の代わりになる。
    """
    names = _names_for(f, names)
    if not (isinstance(f, ExistsSt) and f.var.type == Seq(BASE)):
        raise NotApplicableError("MaxCollapse は (∃^st K:0*) の形にのみ適用できます")
    K = f.var
    l = names.fresh_var("l", BASE)
    return ExistsSt(l, _collapse(f.body, K, l, 1))


# ---------------------------------------------------------------- Herbrandize

def herbrandize(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    """(∀^st x̄)(∃^st ȳ)φ → (∃^st F̄)(∀^st x̄)(∃y₁∈F₁(x̄))…φ"""
    names = _names_for(f, names)
    xs, ys, matrix = split_prefix(f)
    if not xs or not ys or not matrix.is_internal():
        raise NotApplicableError("Herbrandize は (∀^st x̄)(∃^st ȳ)φ の形にのみ適用できます")
    fs = [names.fresh_var("F", arrow(*[x.type for x in xs], Seq(y.type))) for y in ys]
    inner = matrix
    for y, F in reversed(list(zip(ys, fs))):
        inner = exists_in(y, apply(F, *xs), inner, Seq(y.type))
    return nest([(ExistsSt, F) for F in fs] + [(ForallSt, x) for x in xs], inner)


# ---------------------------------------------------------------- SkolemizeAntecedent

def skolemize_antecedent(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    """
    [(∀^st ā)(∃^st l̄)α(ā, l̄) → C] → (∀^st ḡ)[(∀^st ā)α(ā, ḡ(ā)) → C]

    ∃^st ブロックが空なら変更しない。
    """
    names = _names_for(f, names)
    if not isinstance(f, Implies):
        raise NotApplicableError("SkolemizeAntecedent は含意にのみ適用できます")
    antecedent = as_normal_form(f.left)
    if antecedent is None:
        raise NotApplicableError("前件が正規形ではありません")
    if not antecedent.exist_st:
        return f
    clash = sorted(v.name for v in f.right.free_vars()
                   if v in antecedent.univ_st or v in antecedent.exist_st)
    if clash:
        raise NotApplicableError(f"後件が前件の束縛変数 {', '.join(clash)} を含みます")
    alpha = antecedent.matrix
    gs = []
    for l in antecedent.exist_st:
        g = names.fresh_var("g", arrow(*[a.type for a in antecedent.univ_st], l.type))
        alpha = substitute(alpha, l, apply(g, *antecedent.univ_st))
        gs.append(g)
    new_antecedent = nest([(ForallSt, a) for a in antecedent.univ_st], alpha)
    return nest([(ForallSt, g) for g in gs], Implies(new_antecedent, f.right))


def skolem_side_conditions(antecedent: NormalForm) -> Tuple[str, ...]:
    """SkolemizeAntecedent の副条件"""
    args = ", ".join(a.name for a in antecedent.univ_st)
    witnesses = ", ".join(l.name for l in antecedent.exist_st)
    return (
        f"HAC_int: (∀^st {args})(∃^st {witnesses}) の証人を {args} の標準関数で選ぶ",
        "標準関数は標準な引数に標準な値を返す",
        f"後件は {witnesses} を含まない",
    )


# ---------------------------------------------------------------- ElimNonstandardParam

def match_nonstandard_param(f: Formula) -> Optional[Tuple[Var, Formula]]:
    """(∀M)[¬st(M) → B] の認識"""
    if (isinstance(f, Forall) and isinstance(f.body, Implies)
            and isinstance(f.body.left, Not) and isinstance(f.body.left.sub, StAtom)
            and f.body.left.sub.term == f.var):
        return f.var, f.body.right
    return None


def unfold_nonstandard_param(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    """(∀M)[¬st(M) → B] → (∀M)[(∀^st r)(M ≠ r) → B]"""
    names = _names_for(f, names)
    matched = match_nonstandard_param(f)
    if matched is None:
        raise NotApplicableError("(∀M)[¬st(M) → B] の形ではありません")
    M, body = matched
    r = names.fresh_var("r", M.type)
    return Forall(M, Implies(ForallSt(r, Not(eq_formula(M, r, M.type))), body))


def eliminate_nonstandard_param_steps(f: Formula,
                                      names: Optional[FreshNames] = None) -> Derivation:
    """
    非標準パラメータの除去: 展開、冠頭化、Idealize の3段

    B は正規形 (∀^st x̄)(∃^st ȳ)φ でなければならない。
    """
    names = _names_for(f, names)
    matched = match_nonstandard_param(f)
    if matched is None or as_normal_form(matched[1]) is None:
        raise NotApplicableError("(∀M)[¬st(M) → (∀^st x̄)(∃^st ȳ)φ] の形ではありません")
    derivation = Derivation(f)
    unfolded = unfold_nonstandard_param(f, names)
    derivation.record(RuleName.ELIM_NONSTANDARD_PARAM, f, unfolded, "¬st(M) ≡ (∀^st r)(M ≠ r)")
    prenexed = prenex_st(unfolded, names)
    derivation.record(RuleName.PRENEX_ST, unfolded, prenexed)
    univ, rest = _split_leading(prenexed, ForallSt)
    idealized = nest([(ForallSt, x) for x in univ], idealize(rest, names))
    derivation.record(RuleName.IDEALIZE, prenexed, idealized)
    return derivation


def _split_leading(f: Formula, cls: type) -> Tuple[List[Var], Formula]:
    leading = []
    while isinstance(f, cls):
        leading.append(f.var)
        f = f.body
    return leading, f


# ---------------------------------------------------------------- NegateNF

def negate_normal_form_steps(f: Formula, names: Optional[FreshNames] = None) -> Derivation:
    """
    (∃^st ū)(∀^st z̄)(∃^st w̄)φ を正規形に戻す

    ∀^st z̄ を有限列 Z̄ の有界 ∀ に置き換えて前に出し、残る ∃^st w̄ を Idealize する。
    入力が ¬(NF) の場合は先に冠頭化する。
    """
    names = _names_for(f, names)
    derivation = Derivation(f)
    current = f
    if isinstance(current, Not):
        if as_normal_form(current.sub) is None:
            raise NotApplicableError("否定の中が正規形ではありません")
        prenexed = prenex_st(current, names)
        derivation.record(RuleName.PRENEX_ST, current, prenexed)
        current = prenexed
    us, rest = _split_leading(current, ExistsSt)
    tail = as_normal_form(rest)
    if tail is None:
        raise NotApplicableError("(∃^st ū)(∀^st z̄)(∃^st w̄)φ の形ではありません")
    if not tail.univ_st:
        return derivation
    zs, ws = tail.univ_st, tail.exist_st
    big_zs = [names.fresh_var(_seq_name(z), Seq(z.type)) for z in zs]
    body: Formula = nest([(ExistsSt, w) for w in ws], tail.matrix)
    for z, Z in reversed(list(zip(zs, big_zs))):
        body = forall_in(z, Z, body, Z.type)
    moved = nest([(ForallSt, Z) for Z in big_zs] + [(ExistsSt, u) for u in us], body)
    derivation.record(RuleName.NEGATE_NF, current, moved, "標準的に閉じたモデルで妥当")
    if ws:
        idealized = nest([(ForallSt, Z) for Z in big_zs] + [(ExistsSt, u) for u in us],
                         idealize(body, names))
        derivation.record(RuleName.IDEALIZE, moved, idealized)
    return derivation


def negate_normal_form(f: Formula, names: Optional[FreshNames] = None) -> Formula:
    return negate_normal_form_steps(f, names).output


# ---------------------------------------------------------------- SubstituteProperty

def substitute_property(f: Formula, set_var: Var, prop: Formula, hole: Var,
                        names: Optional[FreshNames] = None) -> Formula:
    """
    集合変数 A の所属 (a ∈ A) を点の性質 P(a) で置き換える

    各出現ごとに P の束縛変数を新しい名前にしてから穴 hole に a を代入する。

    Raises:
        HoleTypeMismatchError: 穴と所属元の項の型が異なる
    """
    names = _names_for(f, names)
    names.reserve(bound_names(prop) | {v.name for v in prop.free_vars()})

    def replace(g: Formula) -> Formula:
        if isinstance(g, Atom):
            if g.pred in (Pred.IN_GRID, Pred.IN_SEQ) and g.args[1] == set_var:
                element = g.args[0]
                element_type = typecheck(element)
                if element_type != hole.type:
                    raise HoleTypeMismatchError(
                        f"穴 {hole.name}:{hole.type} に {element_type} の項は入りません")
                return substitute(rename_apart(prop, names), hole, element)
            if set_var in g.free_vars():
                logger.warning(f"{set_var.name} が所属以外の原子式に現れます: {g.pred.value}")
            return g
        subs = g.subformulas()
        if not subs:
            return g
        return g.with_subformulas(tuple(replace(sub) for sub in subs))

    return replace(f)

