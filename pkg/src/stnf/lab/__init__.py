"""有限モデルでの評価、同値性検査、証人抽出、格子測度"""
from .battery import (BatteryReport, BatteryRequest, BatteryRunner, FormulaGenerator, RuleStats,
                      negative_control, run_battery)
from .checks import EquivResult, WitnessTable, check_equiv, extract_witnesses
from .evaluator import Evaluator, evaluate
from .measure import (almost_subset_eval, full_grid, grid_measure_eval, grid_set, loeb_zero_oracle,
                      st_preimage, st_preimage2)
from .model import FiniteModel, FuncValue, GridSet, default_models, hac_complete_model, open_model

__all__ = [
    "BatteryReport", "BatteryRequest", "BatteryRunner", "FormulaGenerator", "RuleStats",
    "negative_control", "run_battery",
    "EquivResult", "WitnessTable", "check_equiv", "extract_witnesses",
    "Evaluator", "evaluate",
    "almost_subset_eval", "full_grid", "grid_measure_eval", "grid_set", "loeb_zero_oracle",
    "st_preimage", "st_preimage2",
    "FiniteModel", "FuncValue", "GridSet", "default_models", "hac_complete_model", "open_model",
]
