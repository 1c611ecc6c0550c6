"""正規化: 規則、冠頭化、エンジン、導出"""
from .derivation import RULE_AXIOMS, Axiom, Derivation, RuleName, Step
from .engine import Normalizer, normalize
from .prenex import PrenexReport, merge_prefixes, prenex_report, prenex_st
from .rules import (check_monotone, eliminate_nonstandard_param_steps, herbrandize, idealize,
                    max_collapse, negate_normal_form, negate_normal_form_steps,
                    skolemize_antecedent, substitute_property, unfold_nonstandard_param)
from .s_st import s_st_fixed_point_check, s_st_translate

__all__ = [
    "RULE_AXIOMS", "Axiom", "Derivation", "RuleName", "Step",
    "Normalizer", "normalize",
    "PrenexReport", "merge_prefixes", "prenex_report", "prenex_st",
    "check_monotone", "eliminate_nonstandard_param_steps", "herbrandize", "idealize",
    "max_collapse", "negate_normal_form", "negate_normal_form_steps",
    "skolemize_antecedent", "substitute_property", "unfold_nonstandard_param",
    "s_st_fixed_point_check", "s_st_translate",
]
