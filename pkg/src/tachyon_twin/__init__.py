"""Twin-space quantization of a free tachyon field on a truncated Fock space."""

from .errors import (
    DegenerateBoost,
    IncommensurateMode,
    NonConvergent,
    OffShellLeg,
    SingularPoint,
    TachyonTwinError,
    TruncationOverflow,
)
from .fock import FockOperator, FockState, OccBasisState, apply_ladder, inner_product
from .kinematics import (
    Flipped,
    FourVector,
    LorentzTransform,
    ModeLabel,
    Preserved,
    boost,
    classify_mode_boost,
    minkowski_dot,
    threshold_speed,
)
from .lorentz_rep import (
    c_operator_transform_check,
    commutation_preservation_check,
    represent_boost,
    vacuum_invariance_check,
)
from .modes import SpacetimePoint, WavePacket, mode_boost_residual, mode_value
from .propagator import Interval, QuadratureParams, feynman_propagator, pauli_jordan
from . import settings
from .settings import Settings, using
from .twinspace import TwinOperator, TwinState, reduced_amplitude, schmidt_rank, trace_functional

__all__ = [
    name for name, obj in dict(globals()).items()
    if not name.startswith("_") and not isinstance(obj, type(settings))
]
