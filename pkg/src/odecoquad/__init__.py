"""Symmetric 3-tensors, their algebras, and Robeva's equations for odeco tensors."""

__version__ = "0.1.0"

from .algebra import (
    Algebra,
    Decomposition,
    algebra_from_tensor,
    decompose_tensor,
    find_unit,
    is_invertibility_locus,
    is_nilpotent,
    local_decomposition,
    radical,
    unital_nilpotent_split,
)
from .errors import (
    DegenerateCatalecticant,
    DegenerateForm,
    NotAssociative,
    NotDiagonalisable,
    NotLocal,
    NotOrthogonal,
    NotUnital,
    OdecoError,
    RandomSearchExhausted,
    SocleTooBig,
    ZeroParameter,
)
from .gorenstein import (
    HomogeneousForm,
    apolar_algebra,
    counterexample_pipeline,
    hilbert_function,
    ideal_extraction,
    image_condition_check,
    is_gorenstein,
    shipped_cubic,
    socle,
)
from .odeco import (
    IsotropicBasis,
    OdecoSpec,
    diagonal_tensor,
    dim2_limit_family,
    dim_Y,
    dim_Z,
    hyperbolic_S,
    is_two_step_nilpotent,
    odeco_from_vectors,
    random_isotropic_subspace,
    random_odeco,
    weak_odeco_from_isotropic,
)
from .scalars import GaussQ, gq
from .tangent import TangentReport, tangent_dim, tangent_dim_at_E_closed_form
from .tensor import (
    BilinearForm,
    ResidualReport,
    SymTensor3,
    check_invariance,
    is_in_X,
    mu,
    robeva_residuals,
    structure_constants,
)
from .unital import cw_tensor, decomp_tilde, deunitalize, unitalize, unitalize_tensor

__all__ = [
    "Algebra",
    "BilinearForm",
    "Decomposition",
    "DegenerateCatalecticant",
    "DegenerateForm",
    "GaussQ",
    "HomogeneousForm",
    "IsotropicBasis",
    "NotAssociative",
    "NotDiagonalisable",
    "NotLocal",
    "NotOrthogonal",
    "NotUnital",
    "OdecoError",
    "OdecoSpec",
    "RandomSearchExhausted",
    "ResidualReport",
    "SocleTooBig",
    "SymTensor3",
    "TangentReport",
    "ZeroParameter",
    "algebra_from_tensor",
    "apolar_algebra",
    "check_invariance",
    "counterexample_pipeline",
    "cw_tensor",
    "decomp_tilde",
    "decompose_tensor",
    "deunitalize",
    "diagonal_tensor",
    "dim2_limit_family",
    "dim_Y",
    "dim_Z",
    "find_unit",
    "gq",
    "hilbert_function",
    "hyperbolic_S",
    "ideal_extraction",
    "image_condition_check",
    "is_gorenstein",
    "is_in_X",
    "is_invertibility_locus",
    "is_nilpotent",
    "is_two_step_nilpotent",
    "local_decomposition",
    "mu",
    "odeco_from_vectors",
    "radical",
    "random_isotropic_subspace",
    "random_odeco",
    "robeva_residuals",
    "shipped_cubic",
    "socle",
    "structure_constants",
    "tangent_dim",
    "tangent_dim_at_E_closed_form",
    "unital_nilpotent_split",
    "unitalize",
    "unitalize_tensor",
    "weak_odeco_from_isotropic",
]
