"""
格子測度の厳密計算と L*(A) ≈ 0 の総当たりオラクル
"""
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

from loguru import logger

from ..core.errors import BudgetExceededError
from ..core.types import REAL
from .model import FiniteModel, GridSet

PointSet = Union[GridSet, Iterable[Fraction]]


def grid_measure_eval(B: GridSet, M: Optional[int] = None) -> Fraction:
    """L*(B) = |B| / 2^M"""
    if M is not None and M != B.M:
        raise ValueError(f"格子指数が一致しません: {B.M} != {M}")
    return B.measure()


def grid_set(points: Iterable[Fraction], M: int) -> GridSet:
    """格子点の集まりからビット列を作る（格子外の点は無視）"""
    mask = 0
    for p in points:
        index = Fraction(p) * 2 ** M
        if index.denominator == 1 and 0 <= index <= 2 ** M:
            mask |= 1 << int(index)
    return GridSet(mask, M)


def full_grid(M: int) -> GridSet:
    return GridSet((1 << (2 ** M + 1)) - 1, M)


def difference(C: GridSet, D: GridSet) -> GridSet:
    return GridSet(C.mask & ~D.mask, C.M)


def near_zero(B: GridSet, model: FiniteModel) -> bool:
    """有限スケールの L*(B) ≈ 0: |B|/2^M ≤ 1/2^s"""
    return B.measure() <= model.eps_std


def almost_subset_eval(C: GridSet, D: GridSet, model: FiniteModel) -> bool:
    """C ⊂_al D。最大の E は C∖D なので量化は潰れる"""
    if C.M != D.M:
        raise ValueError("格子指数が一致しません")
    return near_zero(difference(C, D), model)


def _as_points(A: PointSet) -> list:
    return A.members() if isinstance(A, GridSet) else [Fraction(p) for p in A]


def st_preimage(A: PointSet, model: FiniteModel) -> GridSet:
    """st⁻¹(A) = { e : 標準な a ∈ A で |a − e| ≤ 1/2^s }"""
    standard_points = [a for a in _as_points(A) if model.is_standard(a, REAL)]
    return grid_set((e for e in model.grid_points()
                     if any(abs(a - e) <= model.eps_std for a in standard_points)), model.M)


def _approx_leq(a: Fraction, b: Fraction, model: FiniteModel) -> bool:
    return a < b or abs(a - b) <= model.eps_std


def st_preimage2(A: PointSet, model: FiniteModel) -> GridSet:
    """
    第2の逆像: 標準な a ≤ c で a ⪅ e ⪅ c、かつ [a, c] の標準点が全て A に属する e
    """
    members = set(_as_points(A))
    standard = model.grid_points(model.standard_exponent)
    intervals = [(a, c) for a in standard for c in standard
                 if a <= c and all(x in members for x in standard if a <= x <= c)]
    return grid_set((e for e in model.grid_points()
                     if any(_approx_leq(a, e, model) and _approx_leq(e, c, model)
                            for a, c in intervals)), model.M)


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def loeb_zero_oracle(A: PointSet, model: FiniteModel, variant: int = 1,
                     budget: Optional[int] = None) -> bool:
    """
    L*(A) ≈ 0 の総当たり判定

    全ての B について、B∖st⁻¹(A) の全部分集合 E が ≈0 なら B も ≈0 であるかを調べる。

    Raises:
        BudgetExceededError: 列挙数が予算を超えた
    """
    limit = budget if budget is not None else model.effective_budget
    preimage = st_preimage(A, model) if variant == 1 else st_preimage2(A, model)
    checked = 0
    for mask in range(1 << (2 ** model.M + 1)):
        B = GridSet(mask, model.M)
        outside = difference(B, preimage)
        antecedent = True
        for sub in _submasks(outside.mask):
            checked += 1
            if checked > limit:
                raise BudgetExceededError("オラクルの予算を超えました", checked=checked, total=limit)
            if not near_zero(GridSet(sub, model.M), model):
                antecedent = False
                break
        if antecedent and not near_zero(B, model):
            logger.debug(f"反例 B = {B}")
            return False
    return True

