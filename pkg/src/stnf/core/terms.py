"""
Gödel T 風の項（有限列構成子つき）
全ての項は不変オブジェクト
"""
from dataclasses import dataclass
from typing import FrozenSet, Tuple

from .types import BASE, FinType


class Term:
    """項の基底クラス"""

    def subterms(self) -> Tuple["Term", ...]:
        return ()

    def with_subterms(self, subs: Tuple["Term", ...]) -> "Term":
        return self

    def free_vars(self) -> FrozenSet["Var"]:
        result: FrozenSet[Var] = frozenset()
        for sub in self.subterms():
            result |= sub.free_vars()
        return result

    def is_closed(self) -> bool:
        return not self.free_vars()


@dataclass(frozen=True)
class Var(Term):
    name: str
    type: FinType

    def free_vars(self) -> FrozenSet["Var"]:
        return frozenset({self})

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Lam(Term):
    bound: Var
    body: Term

    def subterms(self):
        return (self.body,)

    def with_subterms(self, subs):
        return Lam(self.bound, subs[0])

    def free_vars(self):
        return self.body.free_vars() - {self.bound}


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term

    def subterms(self):
        return (self.fn, self.arg)

    def with_subterms(self, subs):
        return App(subs[0], subs[1])


@dataclass(frozen=True)
class NumLit(Term):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"自然数リテラルは非負: {self.n}")


@dataclass(frozen=True)
class EmptySeq(Term):
    elem: FinType


@dataclass(frozen=True)
class SeqLit(Term):
    elems: Tuple[Term, ...]

    def __post_init__(self):
        if not self.elems:
            raise ValueError("空列には EmptySeq を使ってください")

    def subterms(self):
        return self.elems

    def with_subterms(self, subs):
        return SeqLit(tuple(subs))


@dataclass(frozen=True)
class Length(Term):
    seq: Term

    def subterms(self):
        return (self.seq,)

    def with_subterms(self, subs):
        return Length(subs[0])


@dataclass(frozen=True)
class Index(Term):
    seq: Term
    i: Term

    def subterms(self):
        return (self.seq, self.i)

    def with_subterms(self, subs):
        return Index(subs[0], subs[1])


@dataclass(frozen=True)
class Concat(Term):
    a: Term
    b: Term

    def subterms(self):
        return (self.a, self.b)

    def with_subterms(self, subs):
        return Concat(subs[0], subs[1])


@dataclass(frozen=True)
class InitSeg(Term):
    """先頭 n 要素"""
    seq: Term
    n: Term

    def subterms(self):
        return (self.seq, self.n)

    def with_subterms(self, subs):
        return InitSeg(subs[0], subs[1])


@dataclass(frozen=True)
class SeqMax(Term):
    """max_{i<|s|} s(i)、空列は 0"""
    seq: Term

    def subterms(self):
        return (self.seq,)

    def with_subterms(self, subs):
        return SeqMax(subs[0])


@dataclass(frozen=True)
class GridRat(Term):
    """格子有理数 i/2^M"""
    i: int
    exponent: Term

    def __post_init__(self):
        if self.i < 0:
            raise ValueError(f"格子分子は非負: {self.i}")

    def subterms(self):
        return (self.exponent,)

    def with_subterms(self, subs):
        return GridRat(self.i, subs[0])


@dataclass(frozen=True)
class Plus(Term):
    a: Term
    b: Term

    def subterms(self):
        return (self.a, self.b)

    def with_subterms(self, subs):
        return Plus(subs[0], subs[1])


def apply(fn: Term, *args: Term) -> Term:
    """カリー化された適用 f(a, b) = (f a) b"""
    result = fn
    for arg in args:
        result = App(result, arg)
    return result


def recip(k: Term) -> GridRat:
    """閾値 1/k の符号化（2^-k）"""
    return GridRat(1, k)


def num(n: int) -> NumLit:
    return NumLit(n)


def var(name: str, type_: FinType = BASE) -> Var:
    return Var(name, type_)
