"""
式ワークベンチ用エラー階層
型検査・書き換え・有限モデル評価で共通に使う例外とエラー集計
"""
from collections import Counter
from enum import Enum
from typing import Any, Dict, List, Optional

from loguru import logger


class ErrorSeverity(Enum):
    """エラー重要度"""
    LOW = "low"            # 集計のみ
    MEDIUM = "medium"      # 呼び出し側で処理
    HIGH = "high"          # 処理中断


class ErrorCategory(Enum):
    """エラーカテゴリ"""
    TYPING = "typing"              # 型エラー
    SHAPE = "shape"                # 規則の適用形でない
    NORMALIZATION = "normalization"  # 正規化が進まない
    MODEL = "model"                # 有限モデルで表現できない
    BUDGET = "budget"              # 列挙上限超過
    SYNTAX = "syntax"              # DSL構文エラー
    VALIDITY = "validity"          # 前提の式が偽


class StnfError(Exception):
    """ワークベンチ例外の基底クラス"""

    def __init__(self,
                 message: str,
                 category: ErrorCategory = ErrorCategory.SHAPE,
                 severity: ErrorSeverity = ErrorSeverity.MEDIUM,
                 context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.category = category
        self.severity = severity
        self.context = context or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "category": self.category.value,
            "message": self.message,
            "context": {k: str(v) for k, v in sorted(self.context.items())},
        }


class IllTypedError(StnfError):
    """項の型付け失敗"""
    def __init__(self, message: str, location: str = "", **kwargs):
        super().__init__(message, category=ErrorCategory.TYPING, **kwargs)
        self.location = location
        self.context.setdefault("location", location)


class TypeMismatchError(StnfError):
    """代入の型不一致"""
    def __init__(self, message: str, **kwargs):
        super().__init__(message, category=ErrorCategory.TYPING, **kwargs)


class HoleTypeMismatchError(StnfError):
    """性質の穴変数と原子式の型不一致"""
    def __init__(self, message: str, **kwargs):
        super().__init__(message, category=ErrorCategory.TYPING, **kwargs)


class UnsupportedShapeError(StnfError):
    """サポート外の位置にある st 量化子"""
    def __init__(self, message: str, **kwargs):
        super().__init__(message, category=ErrorCategory.SHAPE, **kwargs)


class NotApplicableError(StnfError):
    """規則の前提形に一致しない"""
    def __init__(self, message: str, **kwargs):
        super().__init__(message, category=ErrorCategory.SHAPE, **kwargs)


class NotMonotoneError(StnfError):
    """MaxCollapse の単調性検査失敗"""
    def __init__(self, message: str, atom: Any = None, **kwargs):
        super().__init__(message, category=ErrorCategory.SHAPE, **kwargs)
        self.atom = atom


class StuckError(StnfError):
    """どの規則も適用できない部分式"""
    def __init__(self, message: str, subformula: Any = None, **kwargs):
        super().__init__(message, category=ErrorCategory.NORMALIZATION,
                         severity=ErrorSeverity.HIGH, **kwargs)
        self.subformula = subformula


class SortTooLargeError(StnfError):
    """有限モデルで列挙できないソート"""
    def __init__(self, message: str, **kwargs):
        super().__init__(message, category=ErrorCategory.MODEL, **kwargs)


class BudgetExceededError(StnfError):
    """列挙上限超過（部分的な網羅率を保持）"""
    def __init__(self, message: str, checked: int = 0, total: int = 0, **kwargs):
        super().__init__(message, category=ErrorCategory.BUDGET, **kwargs)
        self.checked = checked
        self.total = total
        self.context.update({"checked": checked, "total": total})


class NotValidError(StnfError):
    """証人抽出の前提（正規形が真）が成り立たない"""
    def __init__(self, message: str, **kwargs):
        super().__init__(message, category=ErrorCategory.VALIDITY, **kwargs)


class DslSyntaxError(StnfError):
    """DSL構文エラー（行・列つき）"""
    def __init__(self, message: str, line: int = 0, col: int = 0, **kwargs):
        super().__init__(f"{message} (line {line}, col {col})",
                         category=ErrorCategory.SYNTAX, **kwargs)
        self.line = line
        self.col = col


class DslTypeError(StnfError):
    """DSL型エラー（式中のパスつき）"""
    def __init__(self, message: str, path: str = "", **kwargs):
        super().__init__(f"{message} at {path or '<root>'}",
                         category=ErrorCategory.TYPING, **kwargs)
        self.path = path


class ErrorTracker:
    """カテゴリ別のエラー集計"""

    def __init__(self):
        self.errors: List[StnfError] = []

    def record(self, error: StnfError, **context: Any) -> None:
        error.context.update(context)
        self.errors.append(error)
        logger.debug(f"エラー記録: {type(error).__name__}: {error.message}")

    def merge(self, other: "ErrorTracker") -> "ErrorTracker":
        merged = ErrorTracker()
        merged.errors = self.errors + other.errors
        return merged

    def get_stats(self) -> Dict[str, int]:
        counts = Counter(e.category.value for e in self.errors)
        return dict(sorted(counts.items()))

    def __len__(self) -> int:
        return len(self.errors)
