"""
人が読むための Unicode 表示（∀^st, ≈, L* など）
"""
from .formulas import (And, Atom, Exists, ExistsSt, Forall, ForallSt, Formula, Implies,
                       Not, Or, Pred, Quant, StAtom, match_bounded)
from .terms import (App, Concat, EmptySeq, GridRat, Index, InitSeg, Lam, Length,
                    NumLit, Plus, SeqLit, SeqMax, Term, Var)
from .types import BASE


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, NumLit):
        return str(t.n)
    if isinstance(t, Lam):
        return f"(λ{t.bound.name}){show_term(t.body)}"
    if isinstance(t, App):
        args, fn = [], t
        while isinstance(fn, App):
            args.append(fn.arg)
            fn = fn.fn
        return f"{show_term(fn)}(" + ", ".join(show_term(a) for a in reversed(args)) + ")"
    if isinstance(t, EmptySeq):
        return "⟨⟩"
    if isinstance(t, SeqLit):
        return "⟨" + ", ".join(show_term(e) for e in t.elems) + "⟩"
    if isinstance(t, Length):
        return f"|{show_term(t.seq)}|"
    if isinstance(t, Index):
        return f"{show_term(t.seq)}({show_term(t.i)})"
    if isinstance(t, Concat):
        return f"{show_term(t.a)}*{show_term(t.b)}"
    if isinstance(t, InitSeg):
        return f"{show_term(t.seq)}↾{show_term(t.n)}"
    if isinstance(t, SeqMax):
        return f"max({show_term(t.seq)})"
    if isinstance(t, GridRat):
        if t.i == 1:
            return f"2^-{show_term(t.exponent)}"
        return f"{t.i}/2^{show_term(t.exponent)}"
    if isinstance(t, Plus):
        return f"{show_term(t.a)}+{show_term(t.b)}"
    return repr(t)


def _type_mark(v: Var) -> str:
    if v.type == BASE:
        return v.name + "⁰"
    return v.name


def show_atom(f: Atom, negated: bool = False) -> str:
    a = [show_term(x) for x in f.args]
    if f.pred == Pred.APPROX:
        rel = ">" if negated else "≤"
        return f"|{a[0]}−{a[1]}| {rel} {a[2]}"
    if f.pred == Pred.MEASURE_LEQ:
        rel = ">" if negated else "≤"
        return f"L*({a[0]}) {rel} {a[1]}"
    symbols = {Pred.EQ: ("=", "≠"), Pred.LE: ("≤", ">"), Pred.LT: ("<", "≥"),
               Pred.IN_SEQ: ("∈", "∉"), Pred.IN_GRID: ("∈", "∉")}
    pos, neg = symbols[f.pred]
    if f.pred in (Pred.LE, Pred.LT) and negated:
        return f"{a[0]} {neg} {a[1]}"
    return f"{a[0]} {neg if negated else pos} {a[1]}"


_QUANT = {Forall: "∀", Exists: "∃", ForallSt: "∀^st ", ExistsSt: "∃^st "}


def show(f: Formula) -> str:
    if isinstance(f, Atom):
        return show_atom(f)
    if isinstance(f, StAtom):
        return f"st({show_term(f.term)})"
    if isinstance(f, Not):
        if isinstance(f.sub, Atom):
            return show_atom(f.sub, negated=True)
        return f"¬{show(f.sub)}"
    if isinstance(f, (And, Or, Implies)):
        op = {And: "∧", Or: "∨", Implies: "→"}[type(f)]
        return f"({show(f.left)} {op} {show(f.right)})"
    if isinstance(f, Quant):
        bounded = match_bounded(f)
        if bounded is not None:
            v, rng, _, body = bounded
            return f"({_QUANT[type(f)]}{v.name}∈{show_term(rng)}){show(body)}"
        names = [_type_mark(f.var)]
        body = f.body
        while type(body) is type(f) and match_bounded(body) is None:
            names.append(_type_mark(body.var))
            body = body.body
        return f"({_QUANT[type(f)]}{', '.join(names)}){show(body)}"
    return repr(f)
