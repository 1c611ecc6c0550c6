"""
捕獲回避代入と束縛変数の名前替え（Barendregt 規約）
"""
import itertools
import threading
from typing import Dict, Iterable, Optional, Set

from .errors import TypeMismatchError
from .formulas import Atom, Formula, Quant, StAtom
from .terms import Lam, Term, Var
from .typing_rules import typecheck


class FreshNames:
    """新しい変数名の発行（スレッド安全、正規化ごとに1つ）"""

    def __init__(self, avoid: Iterable[str] = ()):
        self._counter = itertools.count(1)
        self._lock = threading.Lock()
        self._taken: Set[str] = set(avoid)

    def reserve(self, names: Iterable[str]) -> None:
        with self._lock:
            self._taken.update(names)

    def fresh(self, base: str) -> str:
        stem = base.split("_")[0] or "v"
        with self._lock:
            while True:
                name = f"{stem}_{next(self._counter)}"
                if name not in self._taken:
                    self._taken.add(name)
                    return name

    def fresh_var(self, base: str, type_) -> Var:
        return Var(self.fresh(base), type_)


def _prime(name: str, avoid: Set[str]) -> str:
    candidate = name + "'"
    while candidate in avoid:
        candidate += "'"
    return candidate


def substitute_term(t: Term, x: Var, s: Term) -> Term:
    """項の中の x を s で置き換える（λ 束縛は捕獲回避）"""
    if isinstance(t, Var):
        return s if t == x else t
    if isinstance(t, Lam):
        if t.bound.name == x.name:
            return t
        if x not in t.body.free_vars():
            return t
        s_names = {v.name for v in s.free_vars()}
        bound, body = t.bound, t.body
        if bound.name in s_names:
            avoid = s_names | {v.name for v in body.free_vars()} | {x.name}
            renamed = Var(_prime(bound.name, avoid), bound.type)
            body = substitute_term(body, bound, renamed)
            bound = renamed
        return Lam(bound, substitute_term(body, x, s))
    subs = t.subterms()
    if not subs:
        return t
    return t.with_subterms(tuple(substitute_term(sub, x, s) for sub in subs))


def _subst(f: Formula, x: Var, s: Term, s_names: Set[str]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(substitute_term(a, x, s) for a in f.args))
    if isinstance(f, StAtom):
        return StAtom(substitute_term(f.term, x, s))
    if isinstance(f, Quant):
        if f.var.name == x.name or x not in f.body.free_vars():
            return f
        bound, body = f.var, f.body
        if bound.name in s_names:
            avoid = s_names | {v.name for v in body.free_vars()} | {x.name}
            renamed = Var(_prime(bound.name, avoid), bound.type)
            body = _subst(body, bound, renamed, {renamed.name})
            bound = renamed
        return type(f)(bound, _subst(body, x, s, s_names))
    subs = f.subformulas()
    return f.with_subformulas(tuple(_subst(sub, x, s, s_names) for sub in subs))


def substitute(f: Formula, x: Var, t: Term, context: Optional[Dict] = None) -> Formula:
    """
    捕獲回避代入 f[x := t]

    Raises:
        TypeMismatchError: t の型が x の型と異なる
    """
    t_type = typecheck(t, context)
    if t_type != x.type:
        raise TypeMismatchError(f"{x.name}:{x.type} に {t_type} の項は代入できません",
                                context={"var": x.name})
    return _subst(f, x, t, {v.name for v in t.free_vars()})


def rename_var(f: Formula, old: Var, new: Var) -> Formula:
    return _subst(f, old, new, {new.name})


def bound_names(f: Formula) -> Set[str]:
    names: Set[str] = set()
    if isinstance(f, Quant):
        names.add(f.var.name)
    for sub in f.subformulas():
        names |= bound_names(sub)
    return names


def rename_apart(f: Formula, names: FreshNames) -> Formula:
    """全束縛変数を互いに、また自由変数と異なる名前にする"""
    used: Set[str] = {v.name for v in f.free_vars()}
    names.reserve(used | bound_names(f))
    return _apart(f, used, names)


def _apart(f: Formula, used: Set[str], names: FreshNames) -> Formula:
    if isinstance(f, Quant):
        bound, body = f.var, f.body
        if bound.name in used:
            renamed = names.fresh_var(bound.name, bound.type)
            body = rename_var(body, bound, renamed)
            bound = renamed
        used.add(bound.name)
        return type(f)(bound, _apart(body, used, names))
    subs = f.subformulas()
    if not subs:
        return f
    return f.with_subformulas(tuple(_apart(sub, used, names) for sub in subs))
