"""
有限モデル上の評価器
量化子は定義域を全列挙し、有界量化子は範囲の要素だけを走査する
水準2以上の標準量化子は lowering で水準1以下に書き換えてから評価する
"""
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Tuple

from ..core.errors import BudgetExceededError, IllTypedError
from ..core.formulas import (And, Atom, Exists, ExistsSt, Forall, ForallSt, Formula, Implies,
                             Not, Or, Pred, StAtom, match_bounded)
from ..core.terms import (App, Concat, EmptySeq, GridRat, Index, InitSeg, Lam, Length, NumLit,
                          Plus, SeqLit, SeqMax, Term, Var)
from ..core.typing_rules import typecheck
from .lowering import lower_level_two
from .model import FiniteModel, GridSet

Env = Dict[str, Any]


class Evaluator:
    """1回の評価の状態（予算カウンタ）"""

    def __init__(self, model: FiniteModel, budget: Optional[int] = None):
        self.model = model
        self.budget = budget if budget is not None else model.effective_budget
        self.checked = 0
        self._lowerings: Dict[int, Tuple[Formula, Formula]] = {}

    def _tick(self) -> None:
        self.checked += 1
        if self.checked > self.budget:
            raise BudgetExceededError(f"評価の予算 {self.budget} を超えました",
                                      checked=self.checked, total=self.budget)

    # ---------------------------------------------------------------- 項

    def term(self, t: Term, env: Env) -> Any:
        m = self.model
        if isinstance(t, Var):
            if t.name not in env:
                raise IllTypedError(f"未束縛の変数 {t.name}", t.name)
            return env[t.name]
        if isinstance(t, NumLit):
            return min(t.n, m.N)
        if isinstance(t, Lam):
            return _Closure(self, t, dict(env))
        if isinstance(t, App):
            return self.term(t.fn, env)(self.term(t.arg, env))
        if isinstance(t, EmptySeq):
            return ()
        if isinstance(t, SeqLit):
            return tuple(self.term(e, env) for e in t.elems)
        if isinstance(t, Length):
            return min(len(self.term(t.seq, env)), m.N)
        if isinstance(t, Index):
            seq, i = self.term(t.seq, env), self.term(t.i, env)
            return seq[i] if i < len(seq) else m.default(typecheck(t))
        if isinstance(t, Concat):
            return self.term(t.a, env) + self.term(t.b, env)
        if isinstance(t, InitSeg):
            return self.term(t.seq, env)[: self.term(t.n, env)]
        if isinstance(t, SeqMax):
            seq = self.term(t.seq, env)
            return max(seq) if seq else 0
        if isinstance(t, GridRat):
            return Fraction(t.i, 2 ** self.term(t.exponent, env))
        if isinstance(t, Plus):
            return m.plus(self.term(t.a, env), self.term(t.b, env))
        raise IllTypedError(f"未知の項: {type(t).__name__}")

    # ---------------------------------------------------------------- 式

    def formula(self, f: Formula, env: Env) -> bool:
        if isinstance(f, Atom):
            return self._atom(f, env)
        if isinstance(f, StAtom):
            return self.model.is_standard(self.term(f.term, env), typecheck(f.term))
        if isinstance(f, Not):
            return not self.formula(f.sub, env)
        if isinstance(f, And):
            return self.formula(f.left, env) and self.formula(f.right, env)
        if isinstance(f, Or):
            return self.formula(f.left, env) or self.formula(f.right, env)
        if isinstance(f, Implies):
            if isinstance(f.right, Atom):
                # 原子式の後件を先に見る
                return self._atom(f.right, env) or not self.formula(f.left, env)
            return (not self.formula(f.left, env)) or self.formula(f.right, env)
        bounded = match_bounded(f)
        if bounded is not None:
            v, rng, _, body = bounded
            values = self._range(self.term(rng, env))
            return self._quantify(isinstance(f, Forall), v, values, body, env)
        if isinstance(f, (Forall, ForallSt, Exists, ExistsSt)):
            if f.var.type.level() >= 2:
                return self.formula(self._lowered(f), env)
            values = self.model.domain(f.var.type, standard=f.standard)
            return self._quantify(f.universal, f.var, values, f.body, env)
        raise IllTypedError(f"未知の式: {type(f).__name__}")

    def _lowered(self, f: Formula) -> Formula:
        key = id(f)
        if key not in self._lowerings:
            self._lowerings[key] = (f, lower_level_two(f, self.model))
        return self._lowerings[key][1]

    @staticmethod
    def _range(value: Any) -> Iterable[Any]:
        if isinstance(value, GridSet):
            return value.members()
        return list(dict.fromkeys(value))

    def _quantify(self, universal: bool, v: Var, values: Iterable[Any], body: Formula,
                  env: Env) -> bool:
        inner = dict(env)
        for value in values:
            self._tick()
            inner[v.name] = value
            if self.formula(body, inner) != universal:
                return not universal
        return universal

    def _atom(self, a: Atom, env: Env) -> bool:
        args = [self.term(t, env) for t in a.args]
        handler = _ATOMS[a.pred]
        return handler(*args)


class _Closure:
    """λ 項の値"""

    def __init__(self, evaluator: Evaluator, lam: Lam, env: Env):
        self.evaluator, self.lam, self.env = evaluator, lam, env

    def __call__(self, arg: Any) -> Any:
        inner = dict(self.env)
        inner[self.lam.bound.name] = arg
        return self.evaluator.term(self.lam.body, inner)


_ATOMS: Dict[Pred, Callable[..., bool]] = {
    Pred.EQ: lambda a, b: a == b,
    Pred.LE: lambda a, b: a <= b,
    Pred.LT: lambda a, b: a < b,
    Pred.IN_SEQ: lambda x, s: x in s,
    Pred.IN_GRID: lambda x, B: x in B,
    Pred.APPROX: lambda a, b, eps: abs(a - b) <= eps,
    Pred.MEASURE_LEQ: lambda B, eps: B.measure() <= eps,
}


def evaluate(f: Formula, model: FiniteModel, env: Optional[Mapping[str, Any]] = None,
             budget: Optional[int] = None) -> bool:
    """
    式の真偽を有限モデルで計算する

    Raises:
        SortTooLargeError: 引数の標準量化子の下へ書き換えられない水準2以上の型の量化
        BudgetExceededError: 走査数が予算を超えた
    """
    return Evaluator(model, budget).formula(f, dict(env or {}))
