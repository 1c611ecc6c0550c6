"""
S式 DSL の構文解析と出力
例: (forall-st (x 0) (exists-st (y 0) (<= x y)))
型: 0, R, G, (-> a b ...), (* a)
自由変数の宣言: (free ((A G) (M 0)) <式>)
"""
import re
from typing import Dict, List, Tuple, Union

import pyparsing as pp

from .errors import DslSyntaxError, DslTypeError, IllTypedError
from .formulas import (And, Atom, Exists, ExistsSt, Forall, ForallSt, Formula, Implies,
                       Not, Or, Pred, Quant, StAtom, atom, conj, disj, eq_formula,
                       falsum, match_bounded, verum)
from .terms import (App, Concat, EmptySeq, GridRat, Index, InitSeg, Lam, Length,
                    NumLit, Plus, SeqLit, SeqMax, Term, Var)
from .types import BASE, GRIDSET, REAL, Arrow, FinType, GridSetType, Seq, arrow
from .typing_rules import check_formula, typecheck


class SList(list):
    """位置情報つきのS式リスト"""
    loc: int = 0
    source: str = ""


class Symbol(str):
    loc: int = 0
    source: str = ""


Node = Union[SList, Symbol]


def _make_list(s, loc, toks):
    node = SList(toks[0])
    node.loc, node.source = loc, s
    return [node]


def _make_symbol(s, loc, toks):
    sym = Symbol(toks[0])
    sym.loc, sym.source = loc, s
    return [sym]


def _grammar() -> pp.ParserElement:
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    symbol = pp.Regex(r"[^\s();]+").set_parse_action(_make_symbol)
    sexp = pp.Forward()
    slist = pp.Group(lpar + pp.ZeroOrMore(sexp) + rpar).set_parse_action(_make_list)
    sexp <<= symbol | slist
    return sexp


_SEXP = _grammar()

QUANTIFIERS = {"forall": Forall, "exists": Exists, "forall-st": ForallSt, "exists-st": ExistsSt}
BOUNDED = {"forall-in": Forall, "exists-in": Exists}
COMPARISONS = {"=": Pred.EQ, "<=": Pred.LE, "<": Pred.LT}
FLIPPED = {">=": Pred.LE, ">": Pred.LT}
ATOMS = {"in": Pred.IN_SEQ, "in-grid": Pred.IN_GRID, "approx": Pred.APPROX,
         "measure<=": Pred.MEASURE_LEQ}


def _position(node) -> Tuple[int, int]:
    source = getattr(node, "source", "")
    loc = getattr(node, "loc", 0)
    if not source:
        return 0, 0
    return pp.lineno(loc, source), pp.col(loc, source)


def _fail(message: str, node) -> DslSyntaxError:
    line, col = _position(node)
    return DslSyntaxError(message, line=line, col=col)


def read_sexp(text: str) -> Node:
    """テキストを1つのS式として読む"""
    # コメントは同じ長さの空白に置換（位置情報を保つ）
    text = re.sub(r";[^\n]*", lambda m: " " * len(m.group()), text)
    try:
        result = _SEXP.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise DslSyntaxError(f"S式の構文エラー: {e.msg}", line=e.lineno, col=e.col)
    return result[0]


# ---------------------------------------------------------------- types

def parse_type(node: Node) -> FinType:
    if isinstance(node, Symbol):
        table = {"0": BASE, "R": REAL, "G": GRIDSET}
        if node in table:
            return table[node]
        if node == "1":
            return Arrow(BASE, BASE)
        raise _fail(f"未知の型: {node}", node)
    if len(node) >= 3 and node[0] == "->":
        return arrow(*[parse_type(n) for n in node[1:]])
    if len(node) == 2 and node[0] == "*":
        return Seq(parse_type(node[1]))
    raise _fail("型の形が不正です", node)


def _binders(node: Node) -> List[Tuple[str, FinType]]:
    """(x T) または ((x T) (y T) ...)"""
    if isinstance(node, SList) and len(node) == 2 and isinstance(node[0], Symbol):
        return [(str(node[0]), parse_type(node[1]))]
    if isinstance(node, SList) and node and all(isinstance(b, SList) and len(b) == 2
                                                 and isinstance(b[0], Symbol) for b in node):
        return [(str(b[0]), parse_type(b[1])) for b in node]
    raise _fail("束縛子は (x 型) または ((x 型) ...) の形です", node)


# ---------------------------------------------------------------- terms

def _term(node: Node, ctx: Dict[str, FinType], path: str) -> Term:
    if isinstance(node, Symbol):
        if node.isdigit():
            return NumLit(int(node))
        if node not in ctx:
            raise DslTypeError(f"未宣言の変数 {node}", path=path)
        return Var(str(node), ctx[node])
    if not node or not isinstance(node[0], Symbol):
        raise _fail("項の先頭には演算子が必要です", node)
    head, args = node[0], node[1:]
    if head == "lambda":
        if len(args) != 2:
            raise _fail("(lambda (x 型) 本体) の形です", node)
        (name, ty), = _binders(args[0])
        inner = dict(ctx)
        inner[name] = ty
        return Lam(Var(name, ty), _term(args[1], inner, f"{path}.body"))
    if head == "app":
        if len(args) < 2:
            raise _fail("(app f x ...) には引数が必要です", node)
        result = _term(args[0], ctx, f"{path}.fn")
        for i, a in enumerate(args[1:]):
            result = App(result, _term(a, ctx, f"{path}.arg[{i}]"))
        return result
    if head == "seq":
        if not args:
            raise _fail("空列は (empty 型) で書きます", node)
        return SeqLit(tuple(_term(a, ctx, f"{path}.elems[{i}]") for i, a in enumerate(args)))
    if head == "empty":
        _arity(node, 1)
        return EmptySeq(parse_type(args[0]))
    if head == "grid":
        _arity(node, 2)
        if not (isinstance(args[0], Symbol) and args[0].isdigit()):
            raise _fail("格子分子は自然数リテラルです", args[0])
        return GridRat(int(args[0]), _term(args[1], ctx, f"{path}.exponent"))
    unary = {"len": Length, "max": SeqMax}
    binary = {"at": Index, "++": Concat, "init": InitSeg, "+": Plus}
    if head in unary:
        _arity(node, 1)
        return unary[head](_term(args[0], ctx, f"{path}.0"))
    if head in binary:
        _arity(node, 2)
        return binary[head](_term(args[0], ctx, f"{path}.0"), _term(args[1], ctx, f"{path}.1"))
    raise _fail(f"未知の項演算子: {head}", node)


def _arity(node: SList, n: int) -> None:
    if len(node) - 1 != n:
        raise _fail(f"{node[0]} の引数は {n} 個です", node)


# ---------------------------------------------------------------- formulas

def _formula(node: Node, ctx: Dict[str, FinType], path: str) -> Formula:
    if isinstance(node, Symbol):
        if node == "true":
            return verum()
        if node == "false":
            return falsum()
        raise _fail(f"式が必要です: {node}", node)
    if not node or not isinstance(node[0], Symbol):
        raise _fail("式の先頭には演算子が必要です", node)
    head, args = node[0], node[1:]
    if head in QUANTIFIERS:
        if len(args) != 2:
            raise _fail(f"({head} (x 型) 本体) の形です", node)
        binders = _binders(args[0])
        inner = dict(ctx)
        for name, ty in binders:
            inner[name] = ty
        body = _formula(args[1], inner, f"{path}.body")
        for name, ty in reversed(binders):
            body = QUANTIFIERS[head](Var(name, ty), body)
        return body
    if head in BOUNDED:
        if len(args) != 3:
            raise _fail(f"({head} (x 型) 範囲 本体) の形です", node)
        (name, ty), = _binders(args[0])
        rng = _term(args[1], ctx, f"{path}.range")
        inner = dict(ctx)
        inner[name] = ty
        body = _formula(args[2], inner, f"{path}.body")
        rng_type = _safe_type(rng, ctx, path)
        pred = Pred.IN_GRID if isinstance(rng_type, GridSetType) else Pred.IN_SEQ
        guard = Atom(pred, (Var(name, ty), rng))
        if BOUNDED[head] is Forall:
            return Forall(Var(name, ty), Implies(guard, body))
        return Exists(Var(name, ty), And(guard, body))
    if head == "not":
        _arity(node, 1)
        return Not(_formula(args[0], ctx, f"{path}.sub"))
    if head in ("and", "or"):
        parts = [_formula(a, ctx, f"{path}.{i}") for i, a in enumerate(args)]
        return conj(*parts) if head == "and" else disj(*parts)
    if head == "implies":
        _arity(node, 2)
        return Implies(_formula(args[0], ctx, f"{path}.left"), _formula(args[1], ctx, f"{path}.right"))
    if head == "st":
        _arity(node, 1)
        return StAtom(_term(args[0], ctx, f"{path}.term"))
    if head == "eq":
        _arity(node, 2)
        x, y = _term(args[0], ctx, f"{path}.0"), _term(args[1], ctx, f"{path}.1")
        return eq_formula(x, y, _safe_type(x, ctx, path), frozenset(ctx))
    terms = [_term(a, ctx, f"{path}.args[{i}]") for i, a in enumerate(args)]
    if head in COMPARISONS:
        return Atom(COMPARISONS[head], tuple(terms))
    if head in FLIPPED:
        return Atom(FLIPPED[head], tuple(reversed(terms)))
    if head in ATOMS:
        return Atom(ATOMS[head], tuple(terms))
    raise _fail(f"未知の式演算子: {head}", node)


def _safe_type(t: Term, ctx: Dict[str, FinType], path: str) -> FinType:
    try:
        return typecheck(t, ctx)
    except IllTypedError as e:
        raise DslTypeError(e.message, path=path)


def parse_dsl(text: str, context: Dict[str, FinType] = None) -> Formula:
    """
    DSLテキストを型検査済みの式に変換

    Raises:
        DslSyntaxError: 構文エラー（行・列）
        DslTypeError: 型エラー（式中のパス）
    """
    node = read_sexp(text)
    ctx: Dict[str, FinType] = dict(context or {})
    if isinstance(node, SList) and node and node[0] == "free":
        if len(node) != 3:
            raise _fail("(free ((x 型) ...) 式) の形です", node)
        for name, ty in _binders(node[1]):
            ctx[name] = ty
        node = node[2]
    formula = _formula(node, ctx, "formula")
    try:
        check_formula(formula, ctx)
    except IllTypedError as e:
        raise DslTypeError(e.message, path=e.location)
    return formula


def parse_type_text(text: str) -> FinType:
    return parse_type(read_sexp(text))


# ---------------------------------------------------------------- rendering

def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, NumLit):
        return str(t.n)
    if isinstance(t, Lam):
        return f"(lambda ({t.bound.name} {t.bound.type}) {render_term(t.body)})"
    if isinstance(t, App):
        args = []
        fn: Term = t
        while isinstance(fn, App):
            args.append(fn.arg)
            fn = fn.fn
        inner = " ".join(render_term(a) for a in reversed(args))
        return f"(app {render_term(fn)} {inner})"
    if isinstance(t, EmptySeq):
        return f"(empty {t.elem})"
    if isinstance(t, SeqLit):
        return "(seq " + " ".join(render_term(e) for e in t.elems) + ")"
    if isinstance(t, GridRat):
        return f"(grid {t.i} {render_term(t.exponent)})"
    names = {Length: "len", SeqMax: "max", Index: "at", Concat: "++", InitSeg: "init", Plus: "+"}
    for cls, name in names.items():
        if isinstance(t, cls):
            return f"({name} " + " ".join(render_term(s) for s in t.subterms()) + ")"
    raise ValueError(f"未知の項: {t!r}")


_QUANT_NAMES = {Forall: "forall", Exists: "exists", ForallSt: "forall-st", ExistsSt: "exists-st"}


def render_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"({f.pred.value} " + " ".join(render_term(a) for a in f.args) + ")"
    if isinstance(f, StAtom):
        return f"(st {render_term(f.term)})"
    if isinstance(f, Not):
        return f"(not {render_formula(f.sub)})"
    if isinstance(f, (And, Or, Implies)):
        name = {And: "and", Or: "or", Implies: "implies"}[type(f)]
        return f"({name} {render_formula(f.left)} {render_formula(f.right)})"
    if isinstance(f, Quant):
        bounded = match_bounded(f)
        if bounded is not None:
            v, rng, _, body = bounded
            name = "forall-in" if isinstance(f, Forall) else "exists-in"
            return f"({name} ({v.name} {v.type}) {render_term(rng)} {render_formula(body)})"
        return f"({_QUANT_NAMES[type(f)]} ({f.var.name} {f.var.type}) {render_formula(f.body)})"
    raise ValueError(f"未知の式: {f!r}")


def render_document(f: Formula) -> str:
    """自由変数宣言つきで出力（parse_dsl で読み戻せる）"""
    free = sorted(f.free_vars(), key=lambda v: v.name)
    if not free:
        return render_formula(f)
    decls = " ".join(f"({v.name} {v.type})" for v in free)
    return f"(free ({decls}) {render_formula(f)})"
