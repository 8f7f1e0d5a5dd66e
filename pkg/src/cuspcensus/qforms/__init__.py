from .binary import BinaryForm, class_number, form_from_gram, reduce_binary, reduced_forms
from .lattice import (
    GramLattice,
    NotPositiveDefinite,
    direct_sum,
    is_isometric,
    isometry_test,
    root_lattice,
    short_vectors,
)
from .rational import (
    INFINITY,
    DegenerateForm,
    RationalForm,
    diagonalize,
    find_isotropic_vector,
    hilbert_symbol,
    is_isotropic,
    signature,
)
from .textio import FormatError, format_gram, parse_gram, read_gram

__all__ = [
    "BinaryForm",
    "DegenerateForm",
    "FormatError",
    "GramLattice",
    "INFINITY",
    "NotPositiveDefinite",
    "RationalForm",
    "class_number",
    "diagonalize",
    "direct_sum",
    "find_isotropic_vector",
    "form_from_gram",
    "format_gram",
    "hilbert_symbol",
    "is_isometric",
    "is_isotropic",
    "isometry_test",
    "parse_gram",
    "read_gram",
    "reduce_binary",
    "reduced_forms",
    "root_lattice",
    "short_vectors",
    "signature",
]
