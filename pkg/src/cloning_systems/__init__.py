"""Tree-pair groups from d-ary cloning systems, with a Cantor-space cross-model.

The package builds Thompson-like groups out of cloning systems (group
families with representation and cloning maps), provides exact canonical
forms and group algebra for their tree-pair elements, models the same
groups independently as prefix-exchange homeomorphisms of the d-ary Cantor
space, and ships finite-scale experiment drivers for the structural
criteria: axiom verification, diversity, conjugate growth, normalizer
tests, coset-orbit growth, and commuting (non-mixing) witnesses.
"""

from .cloning import (
    BUILTIN_SYSTEM_KEYS,
    CloningSystem,
    ProductSystem,
    SymmetricSystem,
    check_axiom,
    diversity_witness,
    image_membership,
    make_system,
    probe_property,
    standard_symmetric_clone,
    verify_axioms,
)
from .thompson import (
    Element,
    Triple,
    composite_inverse_closed_form,
    element_text,
    endpoint_slope_character,
    expand_triple,
    fd_generator,
    in_kernel_Kd,
    parse_element,
    pi_to_Vd,
    powers_closed_form,
    reduce_triple,
)
from .trees import (
    Tree,
    agree_away_from,
    caret,
    common_expansion,
    expand_at,
    leaf,
    parse_tree,
    removable_carets,
    tree_text,
)

__all__ = [
    "BUILTIN_SYSTEM_KEYS",
    "CloningSystem",
    "Element",
    "ProductSystem",
    "SymmetricSystem",
    "Tree",
    "Triple",
    "agree_away_from",
    "caret",
    "check_axiom",
    "common_expansion",
    "composite_inverse_closed_form",
    "diversity_witness",
    "element_text",
    "endpoint_slope_character",
    "expand_at",
    "expand_triple",
    "fd_generator",
    "image_membership",
    "in_kernel_Kd",
    "leaf",
    "make_system",
    "parse_element",
    "parse_tree",
    "pi_to_Vd",
    "powers_closed_form",
    "probe_property",
    "reduce_triple",
    "removable_carets",
    "standard_symmetric_clone",
    "tree_text",
    "verify_axioms",
]

__version__ = "0.1.0"
