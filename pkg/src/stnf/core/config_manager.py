#!/usr/bin/env python3
"""
設定管理
config/stnf_config.json を読み、環境変数（.env 含む）で上書きする
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent.parent / "config" / "stnf_config.json"


class LabConfig(BaseModel):
    """有限モデル実験の設定"""
    budget: int = Field(default=200_000, ge=1, description="ソート列挙と割当数の上限")
    max_grid_exponent: int = Field(default=6, ge=1, le=12)
    workers: int = Field(default=4, ge=1)
    log_level: str = "WARNING"


class ConfigManager:
    """設定ファイル管理（ファイル → 環境変数の順に適用）"""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH

    def _create_default_config(self) -> Dict[str, Any]:
        """既定設定"""
        return LabConfig().model_dump()

    def load_raw(self) -> Dict[str, Any]:
        """設定ファイル読み込み"""
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError:
            logger.warning(f"設定ファイルが見つかりません: {self.config_path}")
            return self._create_default_config()
        except json.JSONDecodeError as e:
            logger.error(f"設定ファイルの解析エラー: {e}")
            return self._create_default_config()

    def load(self) -> LabConfig:
        load_dotenv()
        raw = self.load_raw()
        if os.getenv("STNF_BUDGET"):
            raw["budget"] = os.environ["STNF_BUDGET"]
        if os.getenv("STNF_LOG_LEVEL"):
            raw["log_level"] = os.environ["STNF_LOG_LEVEL"]
        try:
            return LabConfig(**raw)
        except ValidationError as e:
            logger.error(f"設定値が不正です（既定値を使用）: {e}")
            return LabConfig()


_cached: Optional[LabConfig] = None


def get_config(reload: bool = False) -> LabConfig:
    global _cached
    if _cached is None or reload:
        _cached = ConfigManager().load()
    return _cached
