"""Separability of three-party states invariant under U⊗U⊗U."""

from .config import DEFAULT_TOL, Tolerances
from .oracles import (
    SeparableDecomposition,
    bisep_inner_oracle,
    gallery,
    hull_membership,
    ppt_oracle,
    sample_trisep_inner,
    trisep_inner_oracle,
)
from .permutation_algebra import expansion_to_matrix, perm_operator, product_state_r_coords, r_operator
from .separability import (
    RegionLabel,
    biseparable_projection_test,
    classify,
    is_biseparable,
    is_ppt,
    is_triseparable,
    region_map_figure1,
    region_map_figure2,
)
from .werner_states import (
    InvalidStateError,
    WernerPoint,
    density_matrix_to_point,
    is_valid_state,
    permutation_average,
    point_to_density_matrix,
    relabel_point,
    twirl_monte_carlo,
)

__version__ = "0.1.0"
