"""Tits and split buildings over prime fields, with exact integral homology."""
from .buildings import (
    build_filtration,
    build_S,
    build_T,
    claim_isomorphism_witnesses,
    forgetful_map,
    restrict_S,
)
from .complexes import SimplicialComplex, join_complex
from .ff_linalg import (
    PrimeField,
    SplitPair,
    Subspace,
    contains,
    enumerate_complements,
    enumerate_subspaces,
    gaussian_binomial,
    intersect,
    is_direct_sum,
    rref,
    subspace_span,
    subspace_sum,
)
from .homology import (
    HomologySummary,
    SparseIntMatrix,
    boundaries,
    complex_homology,
    induced_chain_map,
    is_spherical,
    smith_normal_form,
    surjective_on_homology,
)
from .poset import (
    FinitePoset,
    PosetMap,
    check_morse_decomposition,
    fiber,
    height,
    is_cohen_macaulay,
    link,
    lower_link,
    opposite,
    order_complex,
    upper_link,
)

__version__ = "0.1.0"
