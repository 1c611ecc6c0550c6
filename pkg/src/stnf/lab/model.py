"""
有限スケールのモデル
型0は {0..N}、標準部分は {0..s}。格子 G_M = {i/2^M} 上の実数と部分集合を持つ。
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from loguru import logger
from pydantic import BaseModel, Field, PrivateAttr, model_validator

from ..core.config_manager import get_config
from ..core.errors import BudgetExceededError, SortTooLargeError
from ..core.types import Arrow, Base, FinType, GridSetType, Real, Seq, is_type1

Table = Tuple[int, ...]


@dataclass(frozen=True)
class GridSet:
    """G_M の部分集合（ビット列）"""
    mask: int
    M: int

    def __contains__(self, point: Fraction) -> bool:
        index = point * (2 ** self.M)
        if index.denominator != 1 or not 0 <= index <= 2 ** self.M:
            return False
        return bool(self.mask >> int(index) & 1)

    def indices(self) -> List[int]:
        return [i for i in range(2 ** self.M + 1) if self.mask >> i & 1]

    def members(self) -> List[Fraction]:
        return [Fraction(i, 2 ** self.M) for i in self.indices()]

    def cardinality(self) -> int:
        return bin(self.mask).count("1")

    def measure(self) -> Fraction:
        """格子測度 |B| / 2^M"""
        return Fraction(self.cardinality(), 2 ** self.M)

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.members()) + "}"


@dataclass(frozen=True)
class FuncValue:
    """有限関数の値（表にない引数は既定値）"""
    table: Tuple[Tuple[Any, Any], ...]
    default: Any

    def __call__(self, arg: Any) -> Any:
        for key, value in self.table:
            if key == arg:
                return value
        return self.default

    @classmethod
    def from_table(cls, values: Table) -> "FuncValue":
        return cls(tuple(enumerate(values)), 0)


class FiniteModel(BaseModel):
    """
    有限スケールのモデル

    Attributes:
        N: 型0の最大値
        s: 標準部分の上限（std₀(n) ⇔ n ≤ s）
        M: 格子の指数
        L: 非標準列の最大長
        F1: 型1 (0→0) の関数表
        F1_standard: 標準な関数表（恒等写像を含み合成で閉じる）
        standard_closed: 標準集合の列挙が標準であるか
    """
    name: str = "model"
    N: int = Field(3, ge=1)
    s: int = Field(1, ge=0)
    M: int = Field(2, ge=1)
    L: int = Field(2, ge=0)
    F1: Optional[List[Table]] = None
    F1_standard: Optional[List[Union[int, Table]]] = None
    standard_closed: bool = True
    budget: Optional[int] = None

    _domains: Dict[Tuple[FinType, bool], List[Any]] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _validate(self) -> "FiniteModel":
        if self.s >= self.N:
            raise ValueError(f"s={self.s} は N={self.N} 未満でなければなりません")
        if self.s >= self.M:
            raise ValueError(f"s={self.s} は M={self.M} 未満でなければなりません（M は非標準の格子指数）")
        if self.M > get_config().max_grid_exponent:
            raise ValueError(f"M={self.M} は上限 {get_config().max_grid_exponent} を超えています")
        identity = tuple(range(self.N + 1))
        if self.F1 is None:
            self.F1 = self._default_tables()
        if self.F1_standard is None:
            self.F1_standard = [identity, tuple([0] * (self.N + 1))]
        self.F1 = [tuple(t) for t in self.F1]
        # 整数は F1 への添字
        self.F1_standard = [self.F1[t] if isinstance(t, int) else tuple(t) for t in self.F1_standard]
        for table in self.F1 + self.F1_standard:
            if len(table) != self.N + 1 or any(not 0 <= v <= self.N for v in table):
                raise ValueError(f"関数表は {{0..{self.N}}} 上の全域関数でなければなりません: {table}")
        if len(set(self.F1)) != len(self.F1):
            raise ValueError("F1 に重複した関数表があります")
        for table in self.F1_standard:
            if table not in self.F1:
                self.F1.append(table)
        if identity not in self.F1_standard:
            raise ValueError("標準関数は恒等写像を含まなければなりません")
        standard = set(self.F1_standard)
        for f, g in itertools.product(self.F1_standard, repeat=2):
            if tuple(f[g[i]] for i in range(self.N + 1)) not in standard:
                raise ValueError("標準関数が合成で閉じていません")
        for table in self.F1_standard:
            if any(table[i] > self.s for i in range(self.s + 1)):
                raise ValueError(f"標準関数が標準値を標準値に写しません: {table}")
        return self

    def _default_tables(self) -> List[Table]:
        n = self.N
        return [
            tuple(range(n + 1)),
            tuple([0] * (n + 1)),
            tuple(min(i + 1, n) for i in range(n + 1)),
            tuple(max(i - 1, 0) for i in range(n + 1)),
            tuple([n] * (n + 1)),
        ]

    # ---------------------------------------------------------------- 基本値

    @property
    def effective_budget(self) -> int:
        return self.budget if self.budget is not None else get_config().budget

    @property
    def standard_exponent(self) -> int:
        return self.s

    @property
    def eps_std(self) -> Fraction:
        """≈ を読む精度 1/2^s"""
        return Fraction(1, 2 ** self.s)

    def grid_points(self, exponent: Optional[int] = None) -> List[Fraction]:
        e = self.M if exponent is None else exponent
        return [Fraction(i, 2 ** e) for i in range(2 ** e + 1)]

    def plus(self, a: int, b: int) -> int:
        return min(a + b, self.N)

    def default(self, type_: FinType) -> Any:
        """型の既定値（範囲外の添字、空列の最大値などで使う）"""
        if isinstance(type_, Base):
            return 0
        if isinstance(type_, Real):
            return Fraction(0)
        if isinstance(type_, GridSetType):
            return GridSet(0, self.M)
        if isinstance(type_, Seq):
            return ()
        if isinstance(type_, Arrow):
            return FuncValue((), self.default(type_.cod))
        raise SortTooLargeError(f"未対応の型: {type_}")

    # ---------------------------------------------------------------- 定義域

    def domain(self, type_: FinType, standard: bool = False) -> List[Any]:
        """
        型の全要素（standard=True なら標準要素）

        Raises:
            SortTooLargeError: 水準2以上の型
            BudgetExceededError: 定義域が予算を超える
        """
        if type_.level() >= 2:
            raise SortTooLargeError(f"水準 {type_.level()} の型 {type_} は有限モデルで評価できません")
        key = (type_, standard)
        if key not in self._domains:
            values = self._build_domain(type_, standard)
            if len(values) > self.effective_budget:
                raise BudgetExceededError(f"型 {type_} の定義域が予算を超えます",
                                          checked=0, total=len(values))
            self._domains[key] = values
            logger.debug(f"定義域 {type_} (std={standard}): {len(values)} 要素")
        return self._domains[key]

    def _build_domain(self, type_: FinType, standard: bool) -> List[Any]:
        if isinstance(type_, Base):
            return list(range((self.s if standard else self.N) + 1))
        if isinstance(type_, Real):
            return self.grid_points(self.standard_exponent if standard else self.M)
        if isinstance(type_, GridSetType):
            sets = [GridSet(mask, self.M) for mask in range(2 ** (2 ** self.M + 1))]
            if standard:
                return [b for b in sets if all(self._std_real(p) for p in b.members())]
            return sets
        if isinstance(type_, Seq):
            return self._seq_domain(type_, standard)
        if isinstance(type_, Arrow):
            return self._arrow_domain(type_, standard)
        raise SortTooLargeError(f"未対応の型: {type_}")

    def _std_real(self, p: Fraction) -> bool:
        return (p * 2 ** self.standard_exponent).denominator == 1

    def _sequences(self, elems: List[Any], max_len: int) -> Iterator[Tuple[Any, ...]]:
        for length in range(max_len + 1):
            if len(elems) ** length > self.effective_budget:
                raise BudgetExceededError(f"長さ {length} の列が予算を超えます",
                                          total=len(elems) ** length)
            yield from itertools.product(elems, repeat=length)

    def standard_enumeration(self, elem: FinType) -> Tuple[Any, ...]:
        """標準要素全体の列挙（standard_closed のとき標準列）"""
        return tuple(self.domain(elem, standard=True))

    def _seq_domain(self, type_: Seq, standard: bool) -> List[Any]:
        std_elems = self.domain(type_.elem, standard=True)
        values = list(self._sequences(std_elems, self.s))
        if self.standard_closed:
            enumeration = self.standard_enumeration(type_.elem)
            if enumeration not in values:
                values.append(enumeration)
        if standard:
            return values
        seen = set(values)
        for seq in self._sequences(self.domain(type_.elem), self.L):
            if seq not in seen:
                seen.add(seq)
                values.append(seq)
        return values

    def _arrow_domain(self, type_: Arrow, standard: bool) -> List[Any]:
        if is_type1(type_):
            tables = self.F1_standard if standard else self.F1
            return [FuncValue.from_table(t) for t in tables]
        args = self.domain(type_.dom, standard=True)
        results = self.domain(type_.cod, standard=True)
        total = len(results) ** len(args)
        if total > self.effective_budget:
            raise BudgetExceededError(f"関数空間 {type_} が予算を超えます", total=total)
        default = self.default(type_.cod)
        return [FuncValue(tuple(zip(args, values)), default)
                for values in itertools.product(results, repeat=len(args))]

    # ---------------------------------------------------------------- 標準性

    def is_standard(self, value: Any, type_: FinType) -> bool:
        """st(t) の意味論: 値が型の標準部分に属するか"""
        if isinstance(type_, Base):
            return value <= self.s
        if isinstance(type_, Real):
            return self._std_real(value)
        if isinstance(type_, GridSetType):
            return all(self._std_real(p) for p in value.members())
        if isinstance(type_, Seq):
            if all(self.is_standard(v, type_.elem) for v in value) and len(value) <= self.s:
                return True
            return self.standard_closed and value == self.standard_enumeration(type_.elem)
        if isinstance(type_, Arrow):
            if type_.level() >= 2:
                raise SortTooLargeError(f"水準 {type_.level()} の型 {type_} の標準性は判定できません")
            if is_type1(type_):
                return tuple(value(i) for i in range(self.N + 1)) in set(self.F1_standard)
            return True
        raise SortTooLargeError(f"未対応の型: {type_}")

    @property
    def hac_complete(self) -> bool:
        """標準関数が {0..s} → {0..s} の全写像を実現するか"""
        realized = {table[: self.s + 1] for table in self.F1_standard}
        return len(realized) == (self.s + 1) ** (self.s + 1)

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name, "N": self.N, "s": self.s, "M": self.M, "L": self.L,
            "standard_closed": self.standard_closed, "hac_complete": self.hac_complete,
            "F1": len(self.F1), "F1_standard": len(self.F1_standard),
        }


def hac_complete_model(name: str = "hac", N: int = 2, s: int = 1, M: int = 2, L: int = 2) -> FiniteModel:
    """標準関数が {0..s} 上の全写像を実現するモデル（s 以上は s に潰す）"""
    tables: List[Table] = []
    for values in itertools.product(range(s + 1), repeat=s + 1):
        tables.append(tuple(values) + (values[s],) * (N - s))
    identity = tuple(range(N + 1))
    standard = {identity, *tables}
    # 合成閉包
    changed = True
    while changed:
        changed = False
        for f, g in list(itertools.product(standard, repeat=2)):
            h = tuple(f[g[i]] for i in range(N + 1))
            if h not in standard:
                standard.add(h)
                changed = True
    return FiniteModel(name=name, N=N, s=s, M=M, L=L, F1_standard=sorted(standard))


def default_models() -> List[FiniteModel]:
    """検証で使う既定のモデル群"""
    return [
        FiniteModel(name="tiny", N=2, s=1, M=2, L=1),
        FiniteModel(name="small", N=3, s=1, M=2, L=2),
        FiniteModel(name="wide", N=4, s=2, M=3, L=2),
        FiniteModel(name="deep", N=3, s=2, M=3, L=3),
        hac_complete_model(),
    ]


def open_model() -> FiniteModel:
    """標準集合の列挙が標準でないモデル（Idealize が破れる）"""
    return FiniteModel(name="open", N=3, s=1, M=2, L=2, standard_closed=False)
