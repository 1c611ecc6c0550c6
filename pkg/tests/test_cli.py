"""
Test suite for the stnf command line

Runs main() in-process on the fixtures and on small temporary DSL files
and checks the exit codes and the JSON printed to stdout.
"""
import io
import json
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from stnf.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main, run_fixtures

FIXTURES = Path(__file__).parent.parent / "fixtures" / "golden"
EXPECTED = FIXTURES.parent / "expected"
DISPLAYS = FIXTURES.parent / "displays"


class TestCli(unittest.TestCase):
    """Exit codes and output of the subcommands."""

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.tmpdir.name, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def run_main(self, *argv):
        buffer = io.StringIO()
        with redirect_stdout(buffer):
            code = main(["--log-level", "ERROR", *argv])
        return code, buffer.getvalue()

    def test_parse_fixture(self):
        """フィクスチャの読み込みと分類"""
        code, out = self.run_main("parse", str(FIXTURES / "nonstandard_param.sexp"))
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertIn("classification", payload)
        self.assertIn("dsl", payload)

    def test_bad_dsl_is_usage_error(self):
        """DSL の構文エラーは終了コード2"""
        path = self.write("bad.sexp", "(forall-st (x 0)")
        code, out = self.run_main("parse", path)
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(json.loads(out)["error"]["error"], "DslSyntaxError")

    def test_missing_file_is_usage_error(self):
        """存在しないファイルは終了コード2"""
        code, _ = self.run_main("parse", os.path.join(self.tmpdir.name, "missing.sexp"))
        self.assertEqual(code, EXIT_USAGE)

    def test_unknown_subcommand(self):
        """未知のサブコマンドは終了コード2"""
        with redirect_stdout(io.StringIO()), open(os.devnull, "w") as devnull:
            stderr, sys.stderr = sys.stderr, devnull
            try:
                code = main(["frobnicate"])
            finally:
                sys.stderr = stderr
        self.assertEqual(code, EXIT_USAGE)

    def test_normalize_with_trace(self):
        """正規化の導出を出力する"""
        code, out = self.run_main("normalize", "--trace", str(FIXTURES / "nonstandard_param.sexp"))
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertIn("normal_form", payload)
        self.assertEqual(len(payload["derivation"]["steps"]), 3)

    def test_check_value(self):
        """モデルでの真偽を出力する"""
        path = self.write("succ.sexp", "(forall-st (x 0) (exists-st (y 0) (<= x y)))")
        code, out = self.run_main("check", path, "--model", "tiny")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(out)["value"])

    def test_check_against_counterexample(self):
        """同値でない2式は反例を出して終了コード1"""
        left = self.write("left.sexp", "(free ((x 0)) (<= x 1))")
        right = self.write("right.sexp", "(free ((x 0)) (< x 1))")
        code, out = self.run_main("check", left, "--model", "tiny", "--against", right)
        self.assertEqual(code, EXIT_FAILED)
        self.assertEqual(json.loads(out)["status"], "Counterexample")

    def test_extract_not_valid(self):
        """偽の正規形からは証人を抽出しない"""
        path = self.write("lt.sexp", "(forall-st (x 0) (exists-st (y 0) (< x y)))")
        code, out = self.run_main("extract", path, "--model", "tiny")
        self.assertEqual(code, EXIT_FAILED)
        self.assertEqual(json.loads(out)["error"]["error"], "NotValidError")

    def test_loeb_normalize(self):
        """明示集合の L*(A) ≈ 0 を正規化する"""
        code, out = self.run_main("loeb", "--points", "0,1/2", "--normalize")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["variant"], 1)
        self.assertIn("normal_form", payload)

    def test_loeb_with_point_property(self):
        """--set で与えた DSL の性質を代入して正規化する"""
        cases = [
            ("(forall-st (n 0) (approx a (grid 0 0) (grid 1 n)))", 1),
            ("(forall (x R) (implies (forall-st (n 0) (approx x a (grid 1 n))) (<= 0 x)))", 2),
        ]
        for source, variant in cases:
            with self.subTest(variant=variant):
                code, out = self.run_main("loeb", "--set", source, "--variant", str(variant),
                                          "--normalize")
                self.assertEqual(code, EXIT_OK)
                payload = json.loads(out)
                self.assertEqual(payload["derivation"]["steps"][0]["rule"], "SubstituteProperty")
                self.assertIn("normal_form", payload)

    def test_fixtures(self):
        """全フィクスチャが期待値と一致する"""
        code, out = self.run_main("fixtures", "--run-all")
        self.assertEqual(code, EXIT_OK)
        rows = json.loads(out)
        inputs = {row["fixture"] for row in rows if "/" not in row["fixture"]}
        displays = {row["fixture"] for row in rows if row["fixture"].startswith("displays/")}
        self.assertEqual(inputs, {p.name for p in FIXTURES.glob("*.sexp")})
        self.assertEqual(displays, {f"displays/{p.name}" for p in DISPLAYS.glob("*.sexp")})
        compared = {row["fixture"] for row in rows if "expected" in row}
        self.assertEqual(compared, {p.name for p in EXPECTED.glob("*.sexp")})

    def test_run_fixtures_reports_failures(self):
        """読めないフィクスチャは例外名を状態にする"""
        self.write("broken.sexp", "(forall-st (x 0)")
        rows = run_fixtures(Path(self.tmpdir.name), None, None)
        self.assertEqual(rows, [{"fixture": "broken.sexp", "status": "DslSyntaxError",
                                 "message": rows[0]["message"]}])

    def test_expected_mismatch_fails(self):
        """期待値と異なる正規形は mismatch で終了コード1"""
        root = Path(self.tmpdir.name)
        (root / "golden").mkdir()
        (root / "expected").mkdir()
        (root / "golden" / "succ.sexp").write_text(
            "(forall-st (x 0) (exists-st (y 0) (<= x y)))", encoding="utf-8")
        cases = [
            ("(forall-st (u 0) (exists-st (v 0) (<= u v)))", "ok", EXIT_OK),
            ("(forall-st (u 0) (exists-st (v 0) (< u v)))", "mismatch", EXIT_FAILED),
        ]
        for expected, status, exit_code in cases:
            with self.subTest(status=status):
                (root / "expected" / "succ.sexp").write_text(expected, encoding="utf-8")
                code, out = self.run_main("fixtures", "--dir", str(root / "golden"))
                self.assertEqual(code, exit_code)
                self.assertEqual([row["status"] for row in json.loads(out)], [status])

    def test_display_mismatch_fails(self):
        """構成子と異なる表示は mismatch で終了コード1"""
        root = Path(self.tmpdir.name)
        (root / "golden").mkdir()
        (root / "displays").mkdir()
        (root / "displays" / "almost_subset.sexp").write_text(
            "(free ((C G) (D G)) (forall (E G) (forall-st (k 0) (measure<= E (grid 1 k)))))",
            encoding="utf-8")
        code, out = self.run_main("fixtures", "--dir", str(root / "golden"))
        self.assertEqual(code, EXIT_FAILED)
        self.assertEqual(json.loads(out), [{"fixture": "displays/almost_subset.sexp",
                                            "status": "mismatch"}])


if __name__ == "__main__":
    unittest.main()
