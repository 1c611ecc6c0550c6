"""
式の言語：内部結合子・内部量化子・st 相対化量化子・st 述語
"""
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Tuple

from .terms import App, GridRat, Index, Length, NumLit, Term, Var
from .types import BASE, REAL, Arrow, FinType, GridSetType, Seq


class Pred(Enum):
    """原子述語"""
    EQ = "="
    LE = "<="
    LT = "<"
    IN_SEQ = "in"
    IN_GRID = "in-grid"
    APPROX = "approx"          # |a-b| <= eps
    MEASURE_LEQ = "measure<="  # |B|/2^M <= eps


class Formula:
    """式の基底クラス"""

    def subformulas(self) -> Tuple["Formula", ...]:
        return ()

    def with_subformulas(self, subs: Tuple["Formula", ...]) -> "Formula":
        return self

    def is_internal(self) -> bool:
        return all(sub.is_internal() for sub in self.subformulas())

    def free_vars(self) -> FrozenSet[Var]:
        result: FrozenSet[Var] = frozenset()
        for sub in self.subformulas():
            result |= sub.free_vars()
        return result

    def size(self) -> int:
        return 1 + sum(sub.size() for sub in self.subformulas())


@dataclass(frozen=True)
class Atom(Formula):
    pred: Pred
    args: Tuple[Term, ...]

    def free_vars(self):
        result: FrozenSet[Var] = frozenset()
        for arg in self.args:
            result |= arg.free_vars()
        return result


@dataclass(frozen=True)
class StAtom(Formula):
    term: Term

    def is_internal(self):
        return False

    def free_vars(self):
        return self.term.free_vars()


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def subformulas(self):
        return (self.sub,)

    def with_subformulas(self, subs):
        return Not(subs[0])


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula

    def subformulas(self):
        return (self.left, self.right)

    def with_subformulas(self, subs):
        return type(self)(subs[0], subs[1])


class And(Binary):
    pass


class Or(Binary):
    pass


class Implies(Binary):
    pass


@dataclass(frozen=True)
class Quant(Formula):
    var: Var
    body: Formula

    universal = True
    standard = False

    def subformulas(self):
        return (self.body,)

    def with_subformulas(self, subs):
        return type(self)(self.var, subs[0])

    def is_internal(self):
        return not self.standard and self.body.is_internal()

    def free_vars(self):
        return self.body.free_vars() - {self.var}


class Forall(Quant):
    universal = True
    standard = False


class Exists(Quant):
    universal = False
    standard = False


class ForallSt(Quant):
    universal = True
    standard = True


class ExistsSt(Quant):
    universal = False
    standard = True


def quantifier(universal: bool, standard: bool):
    """量化子クラスの選択"""
    if standard:
        return ForallSt if universal else ExistsSt
    return Forall if universal else Exists


def dual(cls):
    return quantifier(not cls.universal, cls.standard)


def atom(pred: Pred, *args: Term) -> Atom:
    return Atom(pred, tuple(args))


def verum() -> Atom:
    return atom(Pred.EQ, NumLit(0), NumLit(0))


def falsum() -> Atom:
    return atom(Pred.EQ, NumLit(0), NumLit(1))


def conj(*parts: Formula) -> Formula:
    """右結合の連言（空なら真）"""
    if not parts:
        return verum()
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = And(part, result)
    return result


def disj(*parts: Formula) -> Formula:
    """右結合の選言（空なら偽）"""
    if not parts:
        return falsum()
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Or(part, result)
    return result


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def nest(quants: Iterable[Tuple[type, Var]], body: Formula) -> Formula:
    """量化子列 [(cls, var), ...] を body に被せる"""
    result = body
    for cls, v in reversed(list(quants)):
        result = cls(v, result)
    return result


def membership_pred(range_type: FinType) -> Pred:
    return Pred.IN_GRID if isinstance(range_type, GridSetType) else Pred.IN_SEQ


def forall_in(v: Var, rng: Term, body: Formula, range_type: Optional[FinType] = None) -> Formula:
    """有界全称 (∀v∈rng)body"""
    pred = membership_pred(range_type) if range_type is not None else (
        Pred.IN_GRID if v.type == REAL else Pred.IN_SEQ)
    return Forall(v, Implies(Atom(pred, (v, rng)), body))


def exists_in(v: Var, rng: Term, body: Formula, range_type: Optional[FinType] = None) -> Formula:
    """有界存在 (∃v∈rng)body"""
    pred = membership_pred(range_type) if range_type is not None else (
        Pred.IN_GRID if v.type == REAL else Pred.IN_SEQ)
    return Exists(v, And(Atom(pred, (v, rng)), body))


def _is_guard(f: Formula, v: Var) -> Optional[Term]:
    if (isinstance(f, Atom) and f.pred in (Pred.IN_SEQ, Pred.IN_GRID)
            and f.args[0] == v and v not in f.args[1].free_vars()):
        return f.args[1]
    return None


def match_bounded(f: Formula) -> Optional[Tuple[Var, Term, Atom, Formula]]:
    """有界量化子 (∀v∈t)φ / (∃v∈t)φ の認識 → (v, t, ガード, φ)"""
    if isinstance(f, Forall) and isinstance(f.body, Implies):
        rng = _is_guard(f.body.left, f.var)
        if rng is not None:
            return f.var, rng, f.body.left, f.body.right
    if isinstance(f, Exists) and isinstance(f.body, And):
        rng = _is_guard(f.body.left, f.var)
        if rng is not None:
            return f.var, rng, f.body.left, f.body.right
    return None


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    taken = set(avoid)
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def eq_formula(x: Term, y: Term, type_: FinType, avoid: FrozenSet[str] = frozenset()) -> Formula:
    """高階型の外延的等号 (∀z̄)(x z̄ =₀ y z̄)"""
    names = set(avoid) | {v.name for v in x.free_vars() | y.free_vars()}
    if type_ == BASE or type_ == REAL:
        return atom(Pred.EQ, x, y)
    if isinstance(type_, GridSetType):
        e = Var(fresh_name("z", names), REAL)
        return Forall(e, iff(atom(Pred.IN_GRID, e, x), atom(Pred.IN_GRID, e, y)))
    if isinstance(type_, Arrow):
        z = Var(fresh_name("z", names), type_.dom)
        return Forall(z, eq_formula(App(x, z), App(y, z), type_.cod, frozenset(names | {z.name})))
    if isinstance(type_, Seq):
        i = Var(fresh_name("i", names), BASE)
        pointwise = Forall(i, Implies(atom(Pred.LT, i, Length(x)),
                                      eq_formula(Index(x, i), Index(y, i), type_.elem,
                                                 frozenset(names | {i.name}))))
        return And(atom(Pred.EQ, Length(x), Length(y)), pointwise)
    raise ValueError(f"未知の型: {type_}")


def approx_formula(a: Term, b: Term, avoid: FrozenSet[str] = frozenset()) -> Formula:
    """a ≈ b := (∀^st n)(|a-b| ≤ 2^-n)"""
    names = set(avoid) | {v.name for v in a.free_vars() | b.free_vars()}
    n = Var(fresh_name("n", names), BASE)
    return ForallSt(n, atom(Pred.APPROX, a, b, GridRat(1, n)))


def approx_leq(a: Term, b: Term, avoid: FrozenSet[str] = frozenset()) -> Formula:
    """a ⪅ b := a < b ∨ a ≈ b"""
    return Or(atom(Pred.LT, a, b), approx_formula(a, b, avoid))


def measure_near_zero(B: Term, avoid: FrozenSet[str] = frozenset(), k_name: str = "k") -> Formula:
    """L*(B) ≈ 0 := (∀^st k)(|L*(B)| ≤ 1/k)"""
    names = set(avoid) | {v.name for v in B.free_vars()}
    k = Var(fresh_name(k_name, names), BASE)
    return ForallSt(k, atom(Pred.MEASURE_LEQ, B, GridRat(1, k)))


