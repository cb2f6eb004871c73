"""NMR quantum switch: spin simulator, pulse compiler, permutation router."""
from .acquisition import (
    AcquisitionParams,
    FIDRecord,
    Spectrum,
    derive_timing,
    peak_pick,
    simulate_fid,
    spectrum,
)
from .gatecomp import (
    CN,
    CPhase,
    Hadamard,
    Not,
    QuantumCircuit,
    RotZ,
    VerificationReport,
    compile_circuit,
    compile_cn,
    compile_cphase,
    compile_h,
    compile_rz,
    ideal_unitary,
    verify,
)
from .qcore import (
    DensityOperator,
    SpinAxis,
    StateVector,
    apply,
    embed,
    global_phase_distance,
    kron,
    rotation,
)
from .qswitch import (
    ClassicalFrame,
    InvolutionPair,
    SuperposedStateError,
    SwitchConfig,
    build_switch_circuit,
    bypass_circuit_2x2,
    c2q,
    cross_circuit_2x2,
    permutation_to_involutions,
    q2c,
    route_frame,
    route_frames,
)
from .spinsim import (
    CouplingError,
    DelayEvent,
    PulseEvent,
    PulseSequence,
    SpinSystem,
    angle_to_duration,
    coupling_delay,
    delay_propagator,
    pulse_propagator,
    sequence_propagator,
    standard_chloroform,
    uniform_system,
)

__version__ = "0.1.0"
