"""Mukai lattices and the cohomological Fourier-Mukai transform on reflexive K3 surfaces."""

from .lattice import (
    DivisorClass,
    LatticeError,
    LatticeMismatchError,
    MukaiVector,
    PicardLattice,
    SignatureError,
    WitIndex,
    dual_vector,
    euler_char,
    euler_pairing,
    intersect,
    is_isotropic,
    is_primitive,
    mukai_pair,
    twist,
)
from .reflexive import (
    NodalReport,
    NotReflexiveError,
    ReflexiveSurface,
    certify_non_effective,
    check_A1,
    check_A2,
    extension_vector,
    generic_surface,
    is_reflexive,
    line_bundle_chi,
    moduli_dim,
    nodal_classes,
)
from .transform import FmContext, Direction, fm_vector, inverse_fm_vector, preservation_report, wit_sheaf_vector
from .kunneth import ch_kernel_Q, grr_transform

__version__ = "0.1.0"
