"""gaugeforge: exterior algebra, polyconvexity certificates, and polyhedral chains."""

__version__ = "0.1.0"

from .exterior import (
    GrassmannPoint,
    KVector,
    LinearMap,
    MultiIndex,
    associated_space,
    basis_indices,
    hodge_star,
    induced_map,
    inner,
    is_simple,
    minors,
    wedge,
    wedge_vectors,
)

__all__ = [
    "GrassmannPoint",
    "KVector",
    "LinearMap",
    "MultiIndex",
    "associated_space",
    "basis_indices",
    "hodge_star",
    "induced_map",
    "inner",
    "is_simple",
    "minors",
    "wedge",
    "wedge_vectors",
]
