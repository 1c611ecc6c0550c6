"""
Configuration loading tests

File values, environment overrides and fallbacks to the built-in defaults.
"""
import json
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from stnf.core.config_manager import DEFAULT_CONFIG_PATH, ConfigManager, LabConfig


class TestConfigManager(unittest.TestCase):
    """ConfigManager.load"""

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        patcher = mock.patch.dict(os.environ, {}, clear=False)
        patcher.start()
        self.addCleanup(patcher.stop)
        for name in ("STNF_BUDGET", "STNF_LOG_LEVEL"):
            os.environ.pop(name, None)

    def tearDown(self):
        self.tmpdir.cleanup()

    def write(self, content: str) -> str:
        path = os.path.join(self.tmpdir.name, "stnf_config.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write(content)
        return path

    def test_repository_config(self):
        """リポジトリの設定ファイルを読む"""
        config = ConfigManager(str(DEFAULT_CONFIG_PATH)).load()
        self.assertEqual(config.budget, 200000)
        self.assertEqual(config.max_grid_exponent, 6)

    def test_file_values(self):
        """設定ファイルの値を使う"""
        path = self.write(json.dumps({"budget": 1234, "workers": 2}))
        config = ConfigManager(path).load()
        self.assertEqual((config.budget, config.workers), (1234, 2))

    def test_environment_overrides_file(self):
        """環境変数が設定ファイルより優先"""
        path = self.write(json.dumps({"budget": 1234}))
        with mock.patch.dict(os.environ, {"STNF_BUDGET": "99", "STNF_LOG_LEVEL": "DEBUG"}):
            config = ConfigManager(path).load()
        self.assertEqual(config.budget, 99)
        self.assertEqual(config.log_level, "DEBUG")

    def test_fallbacks(self):
        """設定がなければ既定値"""
        cases = {
            "missing": None,
            "malformed": "{budget: ",
            "invalid": json.dumps({"budget": 0}),
        }
        for name, content in cases.items():
            with self.subTest(case=name):
                if content is None:
                    path = os.path.join(self.tmpdir.name, "missing.json")
                else:
                    path = self.write(content)
                self.assertEqual(ConfigManager(path).load(), LabConfig())


if __name__ == "__main__":
    unittest.main()
