"""
α同値判定（束縛変数を de Bruijn 風の位置名に置き換えて比較）
"""
from typing import Dict

from .formulas import Atom, Formula, Quant, StAtom
from .terms import Lam, Term, Var


def _canon_term(t: Term, env: Dict[str, str], depth: int) -> Term:
    if isinstance(t, Var):
        name = env.get(t.name)
        return Var(name, t.type) if name is not None else t
    if isinstance(t, Lam):
        inner = dict(env)
        slot = f"#{depth}"
        inner[t.bound.name] = slot
        return Lam(Var(slot, t.bound.type), _canon_term(t.body, inner, depth + 1))
    subs = t.subterms()
    if not subs:
        return t
    return t.with_subterms(tuple(_canon_term(s, env, depth) for s in subs))


def _canon(f: Formula, env: Dict[str, str], depth: int) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_canon_term(a, env, depth) for a in f.args))
    if isinstance(f, StAtom):
        return StAtom(_canon_term(f.term, env, depth))
    if isinstance(f, Quant):
        inner = dict(env)
        slot = f"#{depth}"
        inner[f.var.name] = slot
        return type(f)(Var(slot, f.var.type), _canon(f.body, inner, depth + 1))
    return f.with_subformulas(tuple(_canon(s, env, depth) for s in f.subformulas()))


def canonical(f: Formula) -> Formula:
    """束縛変数名を正規化した式"""
    return _canon(f, {}, 0)


def alpha_equiv(f: Formula, g: Formula) -> bool:
    return canonical(f) == canonical(g)

