"""qpermlab: a computational laboratory for finite quantum permutation groups."""

from .errors import QPermError
from .hopf import HopfData, build_hopf, generate_basis, hopf_from_json, hopf_to_json
from .magic import (
    GroupTable,
    MagicUnitary,
    direct_sum,
    dual_group,
    kac_paljutkin,
    quaternion_table,
    repeat_embed,
    symmetric_group,
    symmetric_group_table,
    validate_magic,
)
from .orbitals import orbit_classes, related, three_orbital_transitivity_report
from .rewriter import MagicExpr, normalize, parse, prove_equal
from .sessions import MeasurementSession, SplitMix64, new_session, replay, sample_measurement
from .states import (
    BirkhoffSlice,
    QuantumPermutation,
    birkhoff_slice,
    central_character_eval,
    cesaro,
    character_state,
    classify_idempotent,
    condition,
    convolution_power,
    convolve,
    counit_state,
    deterministic_enumerate,
    fix_spectrum,
    fixed_points_of,
    haar_state,
    is_idempotent,
    mix,
    quasi_subgroup_membership,
    reverse_state,
    sequential_probability,
    state_from_density,
    state_from_function,
    state_from_vector,
    state_to_function,
    support_projection,
    truly_quantum_check,
    twisted_conjugate,
)

__version__ = "0.1.0"
