"""
式・導出の JSON 表現（安定したフィールド名と順序）
"""
import json
from typing import Any, Dict

from .formulas import Atom, Binary, Formula, Not, Quant, StAtom
from .terms import (App, Concat, EmptySeq, GridRat, Index, InitSeg, Lam, Length,
                    NumLit, Plus, SeqLit, SeqMax, Term, Var)

_TERM_KINDS = {Length: "len", SeqMax: "max", Index: "at", Concat: "concat",
               InitSeg: "init", Plus: "plus", SeqLit: "seq", App: "app"}


def term_to_json(t: Term) -> Dict[str, Any]:
    if isinstance(t, Var):
        return {"kind": "var", "name": t.name, "type": str(t.type)}
    if isinstance(t, NumLit):
        return {"kind": "num", "n": t.n}
    if isinstance(t, Lam):
        return {"kind": "lambda", "var": t.bound.name, "type": str(t.bound.type),
                "body": term_to_json(t.body)}
    if isinstance(t, EmptySeq):
        return {"kind": "empty", "type": str(t.elem)}
    if isinstance(t, GridRat):
        return {"kind": "grid", "i": t.i, "exponent": term_to_json(t.exponent)}
    return {"kind": _TERM_KINDS[type(t)], "args": [term_to_json(s) for s in t.subterms()]}


_QUANT_KINDS = {"Forall": "forall", "Exists": "exists", "ForallSt": "forall-st",
                "ExistsSt": "exists-st"}


def formula_to_json(f: Formula) -> Dict[str, Any]:
    if isinstance(f, Atom):
        return {"kind": "atom", "pred": f.pred.value, "args": [term_to_json(a) for a in f.args]}
    if isinstance(f, StAtom):
        return {"kind": "st", "term": term_to_json(f.term)}
    if isinstance(f, Not):
        return {"kind": "not", "body": formula_to_json(f.sub)}
    if isinstance(f, Binary):
        return {"kind": type(f).__name__.lower(), "left": formula_to_json(f.left),
                "right": formula_to_json(f.right)}
    if isinstance(f, Quant):
        return {"kind": _QUANT_KINDS[type(f).__name__], "var": f.var.name,
                "type": str(f.var.type), "body": formula_to_json(f.body)}
    raise ValueError(f"未知の式: {f!r}")


def dumps(payload: Any, pretty: bool = True) -> str:
    """決定的な JSON 文字列（タイムスタンプなし）"""
    return json.dumps(payload, ensure_ascii=False, indent=2 if pretty else None,
                      default=str)
