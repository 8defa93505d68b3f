"""Achievable parallel-transport tuples along discrete webs.

Submodules: :mod:`typevec` (0/1 type vectors), :mod:`groups` (finite
groups), :mod:`lattice` (integer spans), :mod:`generation` (subgroups of
G^n generated by diagonal patterns), :mod:`web` (discrete webs) and
:mod:`cli`.
"""

__version__ = "0.1.0"

from .typevec import (  # noqa: E402
    Splitting,
    TypeSet,
    TypeVector,
    is_rich,
    is_splitting,
    kappa,
    refines,
    restrict,
    restrict_set,
    richness_deficit,
    splitting_for,
)
from .groups import (  # noqa: E402
    FiniteGroup,
    GroupElement,
    alternating,
    central_quotient,
    commutator_decompose,
    commutator_length,
    commutator_length_group,
    commutator_subgroup,
    cyclic,
    direct_product,
    symmetric,
)
from .lattice import ReductiveProfile, codimension, lattice_contains, mod_m_image, rank_r, span_z  # noqa: E402
from .generation import (  # noqa: E402
    FactorWord,
    ReductiveDecomposition,
    TupleSubset,
    decompose,
    g_v_set,
    gv_power_closure,
    predict_closure,
    product_set,
    splitting_subgroup,
    verify_q_bound,
)
from .web import (  # noqa: E402
    DiscreteConnection,
    DiscreteWeb,
    achievable_set,
    check_tassel,
    limit_splittings,
    predict_web_transport,
    step_splittings,
    suffix_truncation_check,
    transport,
    types_of,
)
