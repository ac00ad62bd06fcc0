"""Phase-kick echo simulator for a qubit coupled to a damped oscillator.

The library separates the irreversible decay of a harmonic mode from its
coherent exchange dynamics with a two-level probe: evolve for tau, flip
the probe's phase, evolve for T - tau. At tau = T/2 the exchange cancels
and any residual change in the probe's level statistics measures the
mode's decoherence.
"""

from .qspace import (
    CoherentState,
    DensityMatrix,
    FieldStateSpec,
    FieldSuperposition,
    FockState,
    HilbertLayout,
    Operator,
    annihilation,
    build_layout,
    creation,
    identity,
    make_ket,
    make_state,
    number_operator,
    qubit_operator,
)
from .dynamics import (
    AmplitudeDamping,
    IonModeCoupling,
    LindbladDenseOracle,
    LindbladStepper,
    MultiIonParams,
    SystemModel,
    SystemParams,
    UnitaryPropagator,
    default_time_step,
    hamiltonian_h0,
    hamiltonian_hint,
    hamiltonian_multi_ion,
    liouvillian_apply,
    make_propagator,
    multi_ion_hamiltonians,
    total_excitation,
    vectorized_liouvillian,
)
from .protocol import (
    FreeEvolve,
    JcEvolve,
    Kick,
    KickParams,
    ProtocolSchedule,
    Ramsey,
    RamseyParams,
    cancellation_metric,
    effective_coupling,
    kick_unitary,
    measure_pg,
    ramsey_detect,
    ramsey_unitary,
    run_schedule,
)
from .perturbation import (
    DiagonalFieldDistribution,
    PerturbativeResult,
    perturbative_pg,
)
from .config import ConfigError, RunConfig, SweepSpec, load_config, preset_configs
from .sweep import (
    CSV_HEADER,
    NumericalHealthError,
    SweepResult,
    SweepRow,
    emit_csv,
    run_sweep,
)

__version__ = "0.1.0"
