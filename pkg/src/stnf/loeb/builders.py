"""
格子上の Loeb 測度に関する式の構成
格子 G_M、格子測度、ほぼ包含、標準部分の逆像（2種）、A₀ / B₀ の雛形、
展開された L*(A) ≈ 0 の式とその正規形を組み立てる。
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Optional, Tuple, Union

from loguru import logger

from ..core.errors import NotApplicableError
from ..core.formulas import (And, Atom, ExistsSt, Forall, ForallSt, Formula, Implies, Not, Pred,
                             approx_formula, approx_leq, atom, conj, exists_in, forall_in,
                             fresh_name, measure_near_zero, verum)
from ..core.standardness import NormalForm, as_normal_form
from ..core.substitution import FreshNames, bound_names, rename_apart, substitute
from ..core.terms import App, GridRat, Term, Var
from ..core.types import BASE, GRIDSET, REAL, Arrow, Seq
from ..lab.measure import grid_set
from ..normalizer.derivation import Derivation, RuleName
from ..normalizer.engine import normalize
from ..normalizer.rules import negate_normal_form, substitute_property


def grid_set_var(name: str) -> Var:
    """G_M の部分集合を表す変数"""
    return Var(name, GRIDSET)


class PropertyKind(Enum):
    EXPLICIT = "explicit"
    NF = "nf"
    NEG_NF = "neg_nf"


@dataclass(frozen=True)
class PointProperty:
    """
    点の性質 a ∈ A

    EXPLICIT は集合変数 A:G への所属 (in-grid a A) で表し、評価時に具体集合を与える。
    NF / NEG_NF は穴 hole を持つ式で、所属の代わりに代入される。
    """
    kind: PropertyKind
    hole: Var
    formula: Formula
    set_var: Optional[Var] = None
    points: Tuple[Fraction, ...] = ()

    @classmethod
    def explicit(cls, points: Iterable[Any] = (), name: str = "A") -> "PointProperty":
        set_var = Var(name, GRIDSET)
        hole = Var("a", REAL)
        return cls(PropertyKind.EXPLICIT, hole, atom(Pred.IN_GRID, hole, set_var), set_var,
                   tuple(Fraction(p) for p in points))

    @classmethod
    def normal_form(cls, nf: Union[NormalForm, Formula], hole: Var) -> "PointProperty":
        formula = nf.render() if isinstance(nf, NormalForm) else nf
        if as_normal_form(formula) is None:
            raise NotApplicableError("性質が正規形ではありません")
        if hole.type != REAL:
            raise NotApplicableError(f"穴 {hole.name} は実数型でなければなりません")
        return cls(PropertyKind.NF, hole, formula)

    @classmethod
    def negated_normal_form(cls, formula: Formula, hole: Var) -> "PointProperty":
        """(∃^st u)(∀^st z)(∃^st w)φ の形の性質"""
        us = []
        rest = formula
        while isinstance(rest, ExistsSt):
            us.append(rest.var)
            rest = rest.body
        if as_normal_form(rest) is None:
            raise NotApplicableError("(∃^st u)(∀^st z)(∃^st w)φ の形ではありません")
        return cls(PropertyKind.NEG_NF, hole, formula)

    @property
    def is_atomic(self) -> bool:
        return self.kind is PropertyKind.EXPLICIT

    def membership(self, t: Term, names: Optional[FreshNames] = None) -> Formula:
        """t ∈ A を表す式"""
        if self.is_atomic:
            return atom(Pred.IN_GRID, t, self.set_var)
        names = names or FreshNames(bound_names(self.formula))
        return substitute(rename_apart(self.formula, names), self.hole, t)

    def negated(self) -> "PointProperty":
        """¬P。正規形の否定は NegateNF で正規形に戻す"""
        if self.is_atomic:
            return PointProperty(PropertyKind.NF, self.hole, Not(self.formula), self.set_var,
                                 self.points)
        negation = Not(self.formula)
        if self.formula.is_internal():
            return PointProperty(PropertyKind.NF, self.hole, negation, self.set_var, self.points)
        renormalized = negate_normal_form(negation)
        kind = PropertyKind.NF if as_normal_form(renormalized) is not None else PropertyKind.NEG_NF
        return PointProperty(kind, self.hole, renormalized, self.set_var, self.points)

    def env(self, model) -> Dict[str, Any]:
        """評価用の割り当て（明示集合を格子集合として与える）"""
        if self.set_var is None:
            return {}
        return {self.set_var.name: grid_set(self.points, model.M)}


# ---------------------------------------------------------------- 基本の式

def grid_measure_atom(B: Var, bound: Term) -> Atom:
    """L*(B) ≤ bound"""
    return atom(Pred.MEASURE_LEQ, B, bound)


SetExpression = Union[Var, Callable[[Term], Formula]]


def _member(D: SetExpression, e: Term) -> Formula:
    if isinstance(D, Var):
        return atom(Pred.IN_GRID, e, D)
    return D(e)


def _subset_difference(E: Var, C: Var, not_in_D: Callable[[Term], Formula], e_name: str) -> Formula:
    """E ⊂ (C ∖ D) := (∀e∈E)(e ∈ C ∧ e ∉ D)"""
    e = Var(e_name, REAL)
    return forall_in(e, E, And(atom(Pred.IN_GRID, e, C), not_in_D(e)), GRIDSET)


def almost_subset_formula(C: Var, D: SetExpression,
                          not_in_D: Optional[Callable[[Term], Formula]] = None) -> Formula:
    """
    C ⊂_al D := (∀E)(E ⊂ (C ∖ D) → L*(E) ≈ 0)

    D が逆像などの式なら not_in_D に否定の形を渡せる。
    """
    avoid = {C.name} | ({D.name} if isinstance(D, Var) else set())
    E = Var(fresh_name("E", avoid), GRIDSET)
    e_name = fresh_name("e", avoid | {E.name})
    negated = not_in_D or (lambda e: Not(_member(D, e)))
    return Forall(E, Implies(_subset_difference(E, C, negated, e_name),
                             measure_near_zero(E, frozenset(avoid | {E.name, e_name}))))


def st_preimage_membership(b: Term, A: PointProperty, names: Optional[FreshNames] = None) -> Formula:
    """b ∈ st⁻¹(A) := (∃^st a ∈ A)(a ≈ b)"""
    avoid = {v.name for v in b.free_vars()} | {A.set_var.name if A.set_var else ""}
    a = Var(fresh_name("a", avoid), REAL)
    return ExistsSt(a, And(A.membership(a, names), approx_formula(a, b, frozenset(avoid | {a.name}))))


def st_preimage_nonmembership(b: Term, A: PointProperty, names: Optional[FreshNames] = None) -> Formula:
    """b ∉ st⁻¹(A) の展開形 (∀^st a ∈ A)(a ≉ b)"""
    avoid = {v.name for v in b.free_vars()} | {A.set_var.name if A.set_var else ""}
    a = Var(fresh_name("a", avoid), REAL)
    return ForallSt(a, Implies(A.membership(a, names),
                               Not(approx_formula(a, b, frozenset(avoid | {a.name})))))


def st_preimage2_membership(b: Term, A: PointProperty, names: Optional[FreshNames] = None) -> Formula:
    """
    第2の逆像: (∃^st a, c)(a ⪅ b ⪅ c ∧ a ≤ c) ∧ (∀^st x)(x ∈ [a, c] → x ∈ A)

    a ≤ c は有限スケールで区間が退化しないための条件。
    """
    avoid = {v.name for v in b.free_vars()} | {A.set_var.name if A.set_var else ""}
    a = Var(fresh_name("a", avoid), REAL)
    c = Var(fresh_name("c", avoid | {a.name}), REAL)
    x = Var(fresh_name("x", avoid | {a.name, c.name}), REAL)
    names_taken = frozenset(avoid | {a.name, c.name, x.name})
    sandwich = conj(approx_leq(a, b, names_taken), approx_leq(b, c, names_taken),
                    atom(Pred.LE, a, c))
    interval = ForallSt(x, Implies(And(atom(Pred.LE, a, x), atom(Pred.LE, x, c)),
                                   A.membership(x, names)))
    return ExistsSt(a, ExistsSt(c, And(sandwich, interval)))


def a0_template(a: Term, E: Var, B: Var, l: Term, A: Optional[PointProperty] = None,
                e_name: str = "e") -> Formula:
    """
    A₀(a, E, B, l) := (∀e∈E)(e ∈ B ∧ |a − e| > 1/l)

    A を与えると a ∈ A の仮定を内側に置いた形 (a ∈ A → |a − e| > 1/l) になる。
    """
    e = Var(e_name, REAL)
    far = Not(atom(Pred.APPROX, a, e, GridRat(1, l)))
    if A is not None:
        far = Implies(A.membership(a), far)
    return forall_in(e, E, And(atom(Pred.IN_GRID, e, B), far), GRIDSET)


def b0_template(B: Var, k: Term, g: Term, b: Term, A: Optional[PointProperty] = None,
                E_name: str = "E", a_name: str = "a") -> Formula:
    """B₀(B, k, g, b) := (∀E)(∃a∈b)(A₀(a, E, B, g(a)) → L*(E) ≤ 1/k)"""
    E = Var(E_name, GRIDSET)
    a = Var(a_name, REAL)
    inner = Implies(a0_template(a, E, B, App(g, a), A), grid_measure_atom(E, GridRat(1, k)))
    return Forall(E, exists_in(a, b, inner, Seq(REAL)))


# ---------------------------------------------------------------- L*(A) ≈ 0

def _atomic_version(A: PointProperty) -> PointProperty:
    return A if A.is_atomic else PointProperty.explicit(name=_placeholder_name(A))


def _placeholder_name(A: PointProperty) -> str:
    taken = {v.name for v in A.formula.free_vars()} | bound_names(A.formula)
    return fresh_name("A", taken)


def _loeb_skeleton(A: PointProperty, variant: int) -> Formula:
    if variant not in (1, 2):
        raise ValueError(f"未知の変種: {variant}")
    B = Var("B", GRIDSET)
    avoid = {"B", "E", "e"} | ({A.set_var.name} if A.set_var else set())

    def outside(e: Term) -> Formula:
        if variant == 1:
            return st_preimage_nonmembership(e, A)
        return Not(st_preimage2_membership(e, A))

    inner = almost_subset_formula(B, lambda e: Not(outside(e)), not_in_D=outside)
    return Forall(B, Implies(inner, measure_near_zero(B, frozenset(avoid | {"k"}), k_name="k'")))


def loeb_zero_formula(A: PointProperty, variant: int = 1) -> Formula:
    """
    展開された L*(A) ≈ 0:
    (∀B)[(∀E)((∀e∈E)(e∈B ∧ e ∉ st⁻¹(A)) → L*(E) ≈ 0) → L*(B) ≈ 0]

    正規形の性質は集合変数の所属として組み立ててから代入する。
    """
    atomic = _atomic_version(A)
    skeleton = _loeb_skeleton(atomic, variant)
    if A.is_atomic:
        return skeleton
    return substitute_property(skeleton, atomic.set_var, A.formula, A.hole)


def loeb_zero_normal_form(A: PointProperty, variant: int = 1,
                          collapse: bool = True) -> Tuple[NormalForm, Derivation]:
    """
    L*(A) ≈ 0 の正規形と導出

    正規形の性質では先頭に SubstituteProperty のステップが入る。
    """
    if A.is_atomic:
        return normalize(loeb_zero_formula(A, variant), collapse)
    atomic = _atomic_version(A)
    skeleton = _loeb_skeleton(atomic, variant)
    substituted = substitute_property(skeleton, atomic.set_var, A.formula, A.hole)
    nf, inner = normalize(substituted, collapse)
    derivation = Derivation(skeleton)
    derivation.record(RuleName.SUBSTITUTE_PROPERTY, skeleton, substituted,
                      f"{atomic.set_var.name} の所属を {A.kind.value} の性質で置換")
    derivation.extend(inner)
    logger.info(f"L*(A) ≈ 0 (変種 {variant}) の正規形: {len(derivation.steps)} ステップ")
    return nf, derivation


def almost_everywhere_formula(prop: PointProperty, variant: int = 1) -> Formula:
    """性質がほとんど至る所で成り立つ: L*({a : ¬P(a)}) ≈ 0"""
    return loeb_zero_formula(prop.negated(), variant)


def continuity_property(f_name: str = "f", hole_name: str = "a") -> PointProperty:
    """
    f の a での非標準連続性 (∀x)(x ≈ a → f(x) ≈ f(a)) を正規形の性質として返す
    """
    f = Var(f_name, Arrow(REAL, REAL))
    a = Var(hole_name, REAL)
    x = Var(fresh_name("x", {f_name, hole_name}), REAL)
    taken = frozenset({f_name, hole_name, x.name})
    prop = Forall(x, Implies(approx_formula(x, a, taken),
                             approx_formula(App(f, x), App(f, a), taken | {"n"})))
    nf, _ = normalize(prop)
    return PointProperty.normal_form(nf, a)


def always(value: bool, hole_name: str = "a") -> PointProperty:
    """恒真（または恒偽）の性質"""
    body = verum() if value else Not(verum())
    return PointProperty(PropertyKind.NF, Var(hole_name, REAL), body)


def display_formulas() -> Dict[str, Formula]:
    """各構成子の代表的な式（フィクスチャ名 → 式）"""
    explicit = PointProperty.explicit()
    B, E = grid_set_var("B"), grid_set_var("E")
    return {
        "preimage_membership": st_preimage_membership(Var("b", REAL), explicit),
        "second_preimage_membership": st_preimage2_membership(Var("b", REAL), explicit),
        "almost_subset": almost_subset_formula(grid_set_var("C"), grid_set_var("D")),
        "a0_template": a0_template(Var("a", REAL), E, B, Var("l", BASE)),
        "b0_template": b0_template(B, Var("k", BASE), Var("g", Arrow(REAL, BASE)),
                                   Var("b", Seq(REAL)), explicit),
        "loeb1_chain": loeb_zero_formula(explicit, 1),
        "loeb2_chain": loeb_zero_formula(explicit, 2),
    }
