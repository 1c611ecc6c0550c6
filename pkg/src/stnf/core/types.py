"""
有限型の文法
0 | ρ→τ | ρ* に加えて、有限モデル用の基底ソート R（格子実数）と G（格子部分集合）
"""
from dataclasses import dataclass
from typing import Tuple


class FinType:
    """有限型の基底クラス（構造的等価・ハッシュ可能）"""

    def level(self) -> int:
        raise NotImplementedError

    def is_ground(self) -> bool:
        return False


@dataclass(frozen=True)
class Base(FinType):
    """型 0（自然数）"""

    def level(self) -> int:
        return 0

    def is_ground(self) -> bool:
        return True

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Real(FinType):
    """格子実数 i/2^M（有限尺度での型1実数の置き場）"""

    def level(self) -> int:
        return 0

    def is_ground(self) -> bool:
        return True

    def __str__(self) -> str:
        return "R"


@dataclass(frozen=True)
class GridSetType(FinType):
    """G_M の部分集合"""

    def level(self) -> int:
        return 0

    def is_ground(self) -> bool:
        return True

    def __str__(self) -> str:
        return "G"


@dataclass(frozen=True)
class Arrow(FinType):
    dom: FinType
    cod: FinType

    def level(self) -> int:
        return max(self.dom.level() + 1, self.cod.level())

    def __str__(self) -> str:
        return f"(-> {self.dom} {self.cod})"


@dataclass(frozen=True)
class Seq(FinType):
    """有限列の型 ρ*"""
    elem: FinType

    def level(self) -> int:
        return self.elem.level()

    def __str__(self) -> str:
        return f"(* {self.elem})"


BASE = Base()
REAL = Real()
GRIDSET = GridSetType()
TYPE1 = Arrow(BASE, BASE)


def arrow(*types: FinType) -> FinType:
    """右結合の関数型 arrow(a, b, c) = a→(b→c)"""
    if len(types) < 2:
        raise ValueError("arrow には2つ以上の型が必要です")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def uncurry(t: FinType) -> Tuple[Tuple[FinType, ...], FinType]:
    """a→b→c を ((a, b), c) に分解"""
    args = []
    while isinstance(t, Arrow):
        args.append(t.dom)
        t = t.cod
    return tuple(args), t


def is_type1(t: FinType) -> bool:
    return t == TYPE1
