"""格子上の Loeb 測度の式"""
from .builders import (PointProperty, PropertyKind, a0_template, almost_everywhere_formula,
                       almost_subset_formula, always, b0_template, continuity_property,
                       grid_measure_atom, grid_set_var, loeb_zero_formula, loeb_zero_normal_form,
                       st_preimage2_membership, st_preimage_membership, st_preimage_nonmembership)

__all__ = [
    "PointProperty", "PropertyKind", "a0_template", "almost_everywhere_formula",
    "almost_subset_formula", "always", "b0_template", "continuity_property",
    "grid_measure_atom", "grid_set_var", "loeb_zero_formula", "loeb_zero_normal_form",
    "st_preimage2_membership", "st_preimage_membership", "st_preimage_nonmembership",
]
