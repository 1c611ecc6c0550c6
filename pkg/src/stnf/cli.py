"""
stnf コマンドライン
parse / normalize / check / extract / loeb / battery / fixtures
終了コード: 0 成功、1 Stuck・反例・NotValid、2 使用法・DSL・設定のエラー
"""
import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from .core.alpha import alpha_equiv
from .core.config_manager import get_config
from .core.dsl import parse_dsl, render_document, render_formula
from .core.errors import DslSyntaxError, DslTypeError, NotValidError, StnfError, StuckError
from .core.formulas import Formula
from .core.pretty import show
from .core.serialize import dumps, formula_to_json
from .core.standardness import as_normal_form, classify
from .core.types import REAL
from .core.terms import Var
from .lab.checks import check_equiv, extract_witnesses
from .lab.evaluator import evaluate
from .lab.measure import grid_set, loeb_zero_oracle
from .lab.model import FiniteModel, default_models, hac_complete_model, open_model
from .lab.battery import BatteryRequest, BatteryRunner
from .loeb.builders import (PointProperty, continuity_property, display_formulas,
                            loeb_zero_formula, loeb_zero_normal_form)
from .normalizer.derivation import Derivation
from .normalizer.engine import normalize

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

FIXTURE_DIR = Path(__file__).parent.parent.parent / "fixtures" / "golden"
EXPECTED_DIR = FIXTURE_DIR.parent / "expected"
DISPLAY_DIR = FIXTURE_DIR.parent / "displays"

console = Console()


def setup_logging(level: Optional[str] = None) -> None:
    """loguru の出力先を標準エラーに設定"""
    logger.remove()
    logger.add(sys.stderr, level=(level or get_config().log_level).upper(),
               format="{time:HH:mm:ss} | {level: <8} | {name}:{line} - {message}")


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _model(spec: str) -> FiniteModel:
    """モデル指定: 既定モデル名または JSON ファイル"""
    named = {m.name: m for m in default_models()}
    named["open"] = open_model()
    named["hac"] = hac_complete_model()
    if spec in named:
        return named[spec]
    return FiniteModel.model_validate_json(_read(spec))


def _parse_points(text: str) -> List[Fraction]:
    return [Fraction(p.strip()) for p in text.split(",") if p.strip()]


def _env(assignments: List[str], model: FiniteModel) -> Dict[str, Any]:
    """--set A=0,1/2 を格子集合の割り当てにする"""
    env: Dict[str, Any] = {}
    for item in assignments or []:
        name, _, points = item.partition("=")
        env[name] = grid_set(_parse_points(points), model.M)
    return env


def _emit(payload: Any, pretty: bool, formula: Optional[Formula] = None,
          derivation: Optional[Derivation] = None) -> None:
    if not pretty:
        print(dumps(payload, pretty=False))
        return
    if formula is not None:
        console.print(show(formula))
    if derivation is not None:
        table = Table(title="導出")
        table.add_column("#", justify="right")
        table.add_column("規則")
        table.add_column("結果")
        for i, step in enumerate(derivation.steps, 1):
            table.add_row(str(i), step.rule.value, show(step.after))
        console.print(table)
    console.print_json(dumps(payload))


# ---------------------------------------------------------------- サブコマンド

def cmd_parse(args) -> int:
    formula = parse_dsl(_read(args.file))
    result = classify(formula)
    _emit({"classification": result.kind.value, "formula": formula_to_json(formula),
           "dsl": render_document(formula)}, args.pretty, formula)
    return EXIT_OK


def cmd_normalize(args) -> int:
    formula = parse_dsl(_read(args.file))
    nf, derivation = normalize(formula, collapse=not args.no_collapse)
    payload: Dict[str, Any] = {"normal_form": render_document(nf.render()),
                               "axioms_used": sorted(a.value for a in derivation.axioms_used)}
    if args.trace:
        payload["derivation"] = derivation.to_json()
    _emit(payload, args.pretty, nf.render(), derivation if args.trace else None)
    return EXIT_OK


def cmd_check(args) -> int:
    model = _model(args.model)
    formula = parse_dsl(_read(args.file))
    env = _env(args.set, model)
    if args.against:
        other = parse_dsl(_read(args.against))
        result = check_equiv(formula, other, model, env)
        _emit(result.to_json(), args.pretty)
        return EXIT_OK if result.equivalent else EXIT_FAILED
    value = evaluate(formula, model, env)
    _emit({"model": model.describe(), "value": value}, args.pretty, formula)
    return EXIT_OK


def cmd_extract(args) -> int:
    model = _model(args.model)
    formula = parse_dsl(_read(args.file))
    nf = as_normal_form(formula)
    if nf is None:
        nf, _ = normalize(formula)
    table = extract_witnesses(nf, model, _env(args.set, model))
    _emit({"normal_form": render_formula(nf.render()), "witnesses": table.to_json(),
           "disjunction": table.render_disjunction(nf)}, args.pretty, nf.render())
    return EXIT_OK


def _point_property(args) -> PointProperty:
    if args.continuity:
        return continuity_property()
    if args.property:
        hole = Var("a", REAL)
        formula = parse_dsl(args.property, {"a": REAL})
        nf = as_normal_form(formula)
        if nf is None:
            nf, _ = normalize(formula)
        return PointProperty.normal_form(nf, hole)
    return PointProperty.explicit(_parse_points(args.points or ""))


def cmd_loeb(args) -> int:
    prop = _point_property(args)
    formula = loeb_zero_formula(prop, args.variant)
    payload: Dict[str, Any] = {"variant": args.variant, "formula": render_document(formula)}
    derivation = None
    if args.normalize:
        nf, derivation = loeb_zero_normal_form(prop, args.variant)
        payload["normal_form"] = render_document(nf.render())
        payload["derivation"] = derivation.to_json()
    if args.model and prop.is_atomic:
        model = _model(args.model)
        payload["value"] = evaluate(formula, model, prop.env(model))
        payload["oracle"] = loeb_zero_oracle(prop.points, model, args.variant)
    _emit(payload, args.pretty, formula, derivation)
    return EXIT_OK


def cmd_battery(args) -> int:
    request = BatteryRequest.load(Path(args.config) if args.config else None)
    runner = BatteryRunner(request)
    report = runner.run()
    if args.pretty:
        runner.print_summary(report)
    if args.output:
        runner.save_report(report, Path(args.output))
    print(dumps(report.to_json(), pretty=args.pretty))
    return EXIT_OK if report.all_passed else EXIT_FAILED


def run_fixtures(directory: Path = FIXTURE_DIR, expected_dir: Optional[Path] = EXPECTED_DIR,
                 display_dir: Optional[Path] = DISPLAY_DIR) -> List[Dict[str, Any]]:
    """
    全フィクスチャを検査し、状態を返す

    入力は正規化し、expected_dir に同名の式があれば α 同値で照合する。
    display_dir の式は構成子の出力と照合する。状態は ok / mismatch / 例外名。
    """
    rows = []
    for path in sorted(directory.glob("*.sexp")):
        row: Dict[str, Any] = {"fixture": path.name}
        try:
            nf, derivation = normalize(parse_dsl(_read(str(path))))
            row.update(status="ok", steps=len(derivation.steps),
                       univ=len(nf.univ_st), exist=len(nf.exist_st))
            expected = expected_dir / path.name if expected_dir is not None else None
            if expected is not None and expected.exists():
                matched = alpha_equiv(nf.render(), parse_dsl(_read(str(expected))))
                row.update(status="ok" if matched else "mismatch", expected=expected.name)
        except StnfError as e:
            row.update(status=type(e).__name__, message=e.message)
        rows.append(row)
    if display_dir is not None and display_dir.is_dir():
        built = display_formulas()
        for path in sorted(display_dir.glob("*.sexp")):
            row = {"fixture": f"{display_dir.name}/{path.name}"}
            try:
                shown = parse_dsl(_read(str(path)))
                formula = built.get(path.stem)
                if formula is None:
                    row.update(status="unknown", message=f"構成子 {path.stem} がありません")
                else:
                    row.update(status="ok" if alpha_equiv(formula, shown) else "mismatch")
            except StnfError as e:
                row.update(status=type(e).__name__, message=e.message)
            rows.append(row)
    return rows


def cmd_fixtures(args) -> int:
    directory = Path(args.dir) if args.dir else FIXTURE_DIR
    expected = Path(args.expected_dir) if args.expected_dir else directory.parent / "expected"
    displays = Path(args.display_dir) if args.display_dir else directory.parent / "displays"
    rows = run_fixtures(directory, expected, displays)
    if args.pretty:
        table = Table(title="フィクスチャ")
        for column in ("fixture", "status", "steps"):
            table.add_column(column)
        for row in rows:
            table.add_row(row["fixture"], row["status"], str(row.get("steps", "-")))
        console.print(table)
    print(dumps(rows, pretty=args.pretty))
    return EXIT_OK if all(r["status"] == "ok" for r in rows) else EXIT_FAILED


# ---------------------------------------------------------------- 引数

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stnf", description="st 付き有限型論理の正規形ワークベンチ")
    parser.add_argument("--log-level", help="ログレベル（既定は STNF_LOG_LEVEL）")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--pretty", action="store_true", help="rich で整形して表示")
        return p

    p = add("parse", "DSL を読み込み分類する")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = add("normalize", "正規形に変換する")
    p.add_argument("file")
    p.add_argument("--trace", action="store_true", help="導出を出力")
    p.add_argument("--no-collapse", action="store_true", help="MaxCollapse を使わない")
    p.set_defaults(func=cmd_normalize)

    p = add("check", "有限モデルで評価、または同値性を検査する")
    p.add_argument("file")
    p.add_argument("--model", required=True, help="モデル名または JSON")
    p.add_argument("--against", help="比較する式のファイル")
    p.add_argument("--set", action="append", help="集合変数の割り当て NAME=p1,p2")
    p.set_defaults(func=cmd_check)

    p = add("extract", "Herbrand 証人を抽出する")
    p.add_argument("file")
    p.add_argument("--model", required=True)
    p.add_argument("--set", action="append")
    p.set_defaults(func=cmd_extract)

    p = add("loeb", "L*(A) ≈ 0 の式を組み立てる")
    p.add_argument("--variant", type=int, choices=[1, 2], default=1)
    p.add_argument("--points", help="明示集合 A の点 (例: 0,1/2)")
    p.add_argument("--set", dest="property", metavar="DSL",
                   help="点の性質 P(a)（穴 a:R を持つ DSL、正規形でなければ正規化する）")
    p.add_argument("--continuity", action="store_true", help="f の a での非標準連続性")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--model", help="明示集合のときオラクルと評価を比較")
    p.set_defaults(func=cmd_loeb)

    p = add("battery", "規則の健全性バッテリー")
    p.add_argument("--config", help="バッテリー設定 JSON")
    p.add_argument("--output", help="報告の保存先")
    p.set_defaults(func=cmd_battery)

    p = add("fixtures", "全フィクスチャを正規化し、期待値と照合する")
    p.add_argument("--dir", help="入力フィクスチャのディレクトリ")
    p.add_argument("--expected-dir", help="期待する正規形のディレクトリ（既定は --dir の隣の expected）")
    p.add_argument("--display-dir", help="構成子と照合する式のディレクトリ（既定は --dir の隣の displays）")
    p.add_argument("--run-all", action="store_true", help="全件を実行（既定の動作）")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """メイン関数"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    setup_logging(args.log_level)
    try:
        return args.func(args)
    except (DslSyntaxError, DslTypeError) as e:
        logger.error(f"DSL エラー: {e.message}")
        print(dumps({"error": e.to_dict()}, pretty=False))
        return EXIT_USAGE
    except (StuckError, NotValidError) as e:
        logger.warning(f"{type(e).__name__}: {e.message}")
        print(dumps({"error": e.to_dict()}, pretty=False))
        return EXIT_FAILED
    except (OSError, ValidationError, ValueError) as e:
        logger.error(f"入力エラー: {e}")
        return EXIT_USAGE
    except StnfError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        print(dumps({"error": e.to_dict()}, pretty=False))
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
