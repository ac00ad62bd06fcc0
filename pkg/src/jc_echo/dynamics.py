"""Hamiltonians, the Lindblad generator, and state propagation.

Units: hbar = 1 and the exchange coupling g sets the time scale, so all
frequencies (omega, kappa, nu) are quoted in units of g and durations in
units of 1/g. Three propagators are provided: an exact unitary kind for
kappa = 0 (spectral decomposition of the Hermitian Hamiltonian), a
classical fixed-step 4th-order stepper for the master equation, and a
dense oracle that exponentiates the column-vectorized Liouvillian via
scaling-and-squaring. The stepper and the oracle are independent code
paths so each can validate the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .qspace import (
    DensityMatrix,
    HilbertLayout,
    Operator,
    annihilation,
    qubit_operator,
)

__all__ = [
    "SystemParams",
    "IonModeCoupling",
    "MultiIonParams",
    "SystemModel",
    "AmplitudeDamping",
    "hamiltonian_h0",
    "hamiltonian_hint",
    "hamiltonian_multi_ion",
    "multi_ion_hamiltonians",
    "total_excitation",
    "liouvillian_apply",
    "vectorized_liouvillian",
    "default_time_step",
    "UnitaryPropagator",
    "LindbladStepper",
    "LindbladDenseOracle",
    "make_propagator",
]


@dataclass(frozen=True)
class SystemParams:
    """Single two-level system resonant with one field mode.

    omega: shared transition/field frequency, in units of g.
    kappa: field energy decay rate, in units of g.
    g_coupling: exchange coupling; 1.0 fixes the time unit.
    """

    layout: HilbertLayout
    omega: float = 0.0
    kappa: float = 0.0
    g_coupling: float = 1.0

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.g_coupling <= 0:
            raise ValueError(f"g_coupling must be > 0, got {self.g_coupling}")


@dataclass(frozen=True)
class IonModeCoupling:
    """One ion addressed on one collective mode.

    mode_frequency is the mode (= laser detuning) frequency nu and
    rabi_frequency the exchange Rabi rate, both in units of g.
    """

    ion: int
    mode_frequency: float
    rabi_frequency: float

    def __post_init__(self):
        if self.ion < 0:
            raise ValueError(f"ion index must be >= 0, got {self.ion}")
        if self.mode_frequency <= 0:
            raise ValueError(f"mode_frequency must be > 0, got {self.mode_frequency}")
        if self.rabi_frequency <= 0:
            raise ValueError(f"rabi_frequency must be > 0, got {self.rabi_frequency}")


@dataclass(frozen=True)
class MultiIonParams:
    """Ion chain coupled to collective motion; at most 3 ions, one mode.

    addressing "individual" couples the listed ion to the mode;
    "homogeneous" replaces the single lowering operator by the sum over
    all ions (one shared coupling entry describes the common drive).
    """

    n_ions: int
    couplings: tuple[IonModeCoupling, ...]
    addressing: str = "individual"

    def __post_init__(self):
        if not 1 <= self.n_ions <= 3:
            raise ValueError(f"n_ions must be 1..3, got {self.n_ions}")
        if self.addressing not in ("individual", "homogeneous"):
            raise ValueError(f"unknown addressing {self.addressing!r}")
        couplings = tuple(self.couplings)
        if not couplings:
            raise ValueError("at least one ion-mode coupling is required")
        object.__setattr__(self, "couplings", couplings)
        ions = [c.ion for c in couplings]
        if len(set(ions)) != len(ions):
            raise ValueError("each ion may appear in at most one coupling")
        if any(c.ion >= self.n_ions for c in couplings):
            raise ValueError("coupling references an ion outside the chain")
        if self.addressing == "homogeneous" and len(couplings) != 1:
            raise ValueError(
                "homogeneous addressing takes a single shared coupling entry"
            )


def _pair_free_matrix(layout: HilbertLayout, qubit: int) -> np.ndarray:
    """sigma†sigma + a†a for one qubit, the excitation counter of a JC pair."""
    sdag = qubit_operator(layout, qubit, "sigma_dagger").matrix
    sig = qubit_operator(layout, qubit, "sigma").matrix
    a = annihilation(layout).matrix
    return sdag @ sig + a.conj().T @ a


def _pair_exchange_matrix(layout: HilbertLayout, qubit: int) -> np.ndarray:
    """sigma†a + sigma a†, the resonant exchange term for one qubit."""
    sdag = qubit_operator(layout, qubit, "sigma_dagger").matrix
    sig = qubit_operator(layout, qubit, "sigma").matrix
    a = annihilation(layout).matrix
    return sdag @ a + sig @ a.conj().T


def hamiltonian_h0(params: SystemParams) -> Operator:
    """Free Hamiltonian omega (sigma†sigma + a†a)."""
    return Operator(params.layout, params.omega * _pair_free_matrix(params.layout, 0))


def hamiltonian_hint(params: SystemParams) -> Operator:
    """Exchange interaction g (sigma†a + sigma a†)."""
    return Operator(
        params.layout, params.g_coupling * _pair_exchange_matrix(params.layout, 0)
    )


def multi_ion_hamiltonians(
    mparams: MultiIonParams, layout: HilbertLayout
) -> tuple[Operator, Operator]:
    """(free, interaction) pair for an ion chain on the single stored mode.

    Individual addressing supports one coupling per mode; this build keeps
    one mode, so exactly one coupling is accepted (several pairs would need
    disjoint modes and sum their JC terms). Homogeneous addressing drives
    every ion identically through the summed lowering operator.
    """
    if layout.n_qubits != mparams.n_ions:
        raise ValueError(
            f"layout has {layout.n_qubits} qubit(s) but params describe "
            f"{mparams.n_ions} ion(s)"
        )
    a = annihilation(layout).matrix
    adag = a.conj().T
    if mparams.addressing == "individual":
        if len(mparams.couplings) != 1:
            raise ValueError(
                "one field mode is available; individual addressing supports "
                f"a single coupling, got {len(mparams.couplings)}"
            )
        c = mparams.couplings[0]
        free = c.mode_frequency * _pair_free_matrix(layout, c.ion)
        inter = c.rabi_frequency * _pair_exchange_matrix(layout, c.ion)
        return Operator(layout, free), Operator(layout, inter)
    # homogeneous: sigma -> sum_j sigma_j with one shared (nu, g) pair
    c = mparams.couplings[0]
    s_sum = qubit_operator(layout, 0, "sigma").matrix
    num_sum = _pair_free_matrix(layout, 0)
    for j in range(1, layout.n_qubits):
        s_sum = s_sum + qubit_operator(layout, j, "sigma").matrix
        sdag_j = qubit_operator(layout, j, "sigma_dagger").matrix
        num_sum = num_sum + sdag_j @ qubit_operator(layout, j, "sigma").matrix
    sdag_sum = s_sum.conj().T
    free = c.mode_frequency * num_sum
    inter = c.rabi_frequency * (sdag_sum @ a + s_sum @ adag)
    return Operator(layout, free), Operator(layout, inter)


def hamiltonian_multi_ion(mparams: MultiIonParams, layout: HilbertLayout) -> Operator:
    """Full chain Hamiltonian; for one ion it reproduces h0 + hint bit for bit."""
    free, inter = multi_ion_hamiltonians(mparams, layout)
    return Operator(layout, free.matrix + inter.matrix)


def total_excitation(layout: HilbertLayout) -> Operator:
    """sum_j sigma_j†sigma_j + a†a, conserved by every exchange term."""
    total = _pair_free_matrix(layout, 0)
    for j in range(1, layout.n_qubits):
        sdag = qubit_operator(layout, j, "sigma_dagger").matrix
        total = total + sdag @ qubit_operator(layout, j, "sigma").matrix
    return Operator(layout, total)


class AmplitudeDamping:
    """Zero-temperature damping of the field at rate kappa.

    The dissipator seam: propagators accept any object exposing
    ``jump_operators(layout) -> list[np.ndarray]`` with rates folded into
    the operators, i.e. D[c]rho = c rho c† - (c†c rho + rho c†c)/2.
    This is the only shipped implementation.
    """

    def __init__(self, kappa: float):
        if kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {kappa}")
        self.kappa = kappa

    def jump_operators(self, layout: HilbertLayout) -> list[np.ndarray]:
        if self.kappa == 0.0:
            return []
        return [math.sqrt(self.kappa) * annihilation(layout).matrix]


def _jump_triples(jumps: list[np.ndarray]) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    out = []
    for c in jumps:
        cdag = c.conj().T
        out.append((c, cdag, cdag @ c))
    return out


def _lindblad_rhs(h: np.ndarray, triples, rho: np.ndarray) -> np.ndarray:
    out = -1j * (h @ rho - rho @ h)
    for c, cdag, cdc in triples:
        out += c @ rho @ cdag - 0.5 * (cdc @ rho + rho @ cdc)
    return out


def liouvillian_apply(params: SystemParams, rho) -> np.ndarray:
    """d(rho)/dt under H = H0 + Hint plus field amplitude damping.

    The kick never appears here; protocols apply it as a discrete
    conjugation. The result is traceless and Hermitian for valid input.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (params.layout.dim, params.layout.dim):
        raise ValueError(
            f"state shape {m.shape} does not match layout dimension {params.layout.dim}"
        )
    h = hamiltonian_h0(params).matrix + hamiltonian_hint(params).matrix
    triples = _jump_triples(AmplitudeDamping(params.kappa).jump_operators(params.layout))
    return _lindblad_rhs(h, triples, m)


def vectorized_liouvillian(h: np.ndarray, jumps: list[np.ndarray]) -> np.ndarray:
    """Column-major superoperator matrix of the Lindblad generator.

    Acts on vec(rho) with Fortran-order stacking, so vec(A rho B) =
    (B^T kron A) vec(rho).
    """
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    L = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c, cdag, cdc in _jump_triples(jumps):
        L += np.kron(c.conj(), c) - 0.5 * (np.kron(eye, cdc) + np.kron(cdc.T, eye))
    return L


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True)
class SystemModel:
    """Hamiltonian split plus decay rate, the common input to propagators.

    h_free generates interaction-off segments; h_free + h_int generates
    the full exchange dynamics. omega_scale and g_scale feed the stepper
    time-step rule.
    """

    layout: HilbertLayout
    h_free: Operator
    h_int: Operator
    kappa: float
    g_scale: float
    omega_scale: float

    @classmethod
    def from_params(cls, params: SystemParams) -> "SystemModel":
        return cls(
            layout=params.layout,
            h_free=hamiltonian_h0(params),
            h_int=hamiltonian_hint(params),
            kappa=params.kappa,
            g_scale=params.g_coupling,
            omega_scale=params.omega,
        )

    @classmethod
    def from_multi_ion(
        cls, mparams: MultiIonParams, layout: HilbertLayout, kappa: float = 0.0
    ) -> "SystemModel":
        free, inter = multi_ion_hamiltonians(mparams, layout)
        return cls(
            layout=layout,
            h_free=free,
            h_int=inter,
            kappa=kappa,
            g_scale=max(c.rabi_frequency for c in mparams.couplings),
            omega_scale=max(c.mode_frequency for c in mparams.couplings),
        )

    def h_total(self) -> Operator:
        return Operator(self.layout, self.h_free.matrix + self.h_int.matrix)


def as_model(system) -> SystemModel:
    if isinstance(system, SystemModel):
        return system
    if isinstance(system, SystemParams):
        return SystemModel.from_params(system)
    raise TypeError(f"expected SystemParams or SystemModel, got {type(system).__name__}")


def default_time_step(model: SystemModel) -> float:
    """Fixed stepper step: resolves the fastest oscillation and the decay.

    min(0.005/g, 0.005/omega_eff, 0.05/kappa) with omega_eff = max(omega, g);
    validated against the dense oracle at 1e-8.
    """
    omega_eff = max(model.omega_scale, model.g_scale)
    dt = min(0.005 / model.g_scale, 0.005 / omega_eff)
    if model.kappa > 0:
        dt = min(dt, 0.05 / model.kappa)
    return dt


def _check_duration(duration: float) -> None:
    if duration < 0:
        raise ValueError(f"duration must be >= 0, got {duration}")


def _check_state(model: SystemModel, rho: DensityMatrix) -> None:
    if rho.layout != model.layout:
        raise ValueError("state layout does not match the system layout")


class UnitaryPropagator:
    """Exact closed-system evolution via eigendecomposition; kappa must be 0."""

    kind = "unitary"

    def __init__(self, model: SystemModel):
        if model.kappa != 0.0:
            raise ValueError("unitary propagation requires kappa = 0")
        self.model = model
        self._eig: dict[bool, tuple[np.ndarray, np.ndarray]] = {}

    def _eigensystem(self, interaction_on: bool):
        if interaction_on not in self._eig:
            h = self.model.h_total() if interaction_on else self.model.h_free
            self._eig[interaction_on] = np.linalg.eigh(h.matrix)
        return self._eig[interaction_on]

    def unitary(self, duration: float, interaction_on: bool = True) -> np.ndarray:
        """exp(-i H t) as a dense matrix."""
        _check_duration(duration)
        w, v = self._eigensystem(interaction_on)
        return (v * np.exp(-1j * w * duration)) @ v.conj().T

    def evolve(
        self, rho: DensityMatrix, duration: float, interaction_on: bool = True
    ) -> DensityMatrix:
        _check_state(self.model, rho)
        if duration == 0:
            _check_duration(duration)
            return rho
        u = self.unitary(duration, interaction_on)
        return DensityMatrix(
            rho.layout,
            u @ rho.matrix @ u.conj().T,
            truncation_defect=rho.truncation_defect,
        )


class LindbladStepper:
    """Classical 4th-order fixed-step integration of the master equation."""

    kind = "stepper"

    def __init__(self, model: SystemModel, dt: float | None = None, dissipator=None):
        self.model = model
        self.dt = dt if dt is not None else default_time_step(model)
        if self.dt <= 0:
            raise ValueError(f"time step must be > 0, got {self.dt}")
        if dissipator is None:
            dissipator = AmplitudeDamping(model.kappa)
        self._triples = _jump_triples(dissipator.jump_operators(model.layout))
        self._h = {
            True: model.h_total().matrix,
            False: model.h_free.matrix,
        }

    def evolve(
        self, rho: DensityMatrix, duration: float, interaction_on: bool = True
    ) -> DensityMatrix:
        _check_duration(duration)
        _check_state(self.model, rho)
        if duration == 0:
            return rho
        h = self._h[interaction_on]
        triples = self._triples
        n_full = int(duration / self.dt)
        remainder = duration - n_full * self.dt
        if remainder < 1e-9 * self.dt:
            remainder = 0.0
        m = rho.matrix
        for step in range(n_full + (1 if remainder else 0)):
            dt = self.dt if step < n_full else remainder
            k1 = _lindblad_rhs(h, triples, m)
            k2 = _lindblad_rhs(h, triples, m + 0.5 * dt * k1)
            k3 = _lindblad_rhs(h, triples, m + 0.5 * dt * k2)
            k4 = _lindblad_rhs(h, triples, m + dt * k3)
            m = m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return DensityMatrix(rho.layout, m, truncation_defect=rho.truncation_defect)


class LindbladDenseOracle:
    """Independent ground truth: expm of the vectorized Liouvillian.

    Scaling-and-squaring on the full dimension^2 generator; exact to
    roundoff and deliberately sharing no propagation code with the
    stepper. Exponentials are cached per (duration, generator).
    """

    kind = "oracle"

    _CACHE_LIMIT = 16

    def __init__(self, model: SystemModel, dissipator=None):
        self.model = model
        if dissipator is None:
            dissipator = AmplitudeDamping(model.kappa)
        jumps = dissipator.jump_operators(model.layout)
        self._liouvillians = {
            True: vectorized_liouvillian(model.h_total().matrix, jumps),
            False: vectorized_liouvillian(model.h_free.matrix, jumps),
        }
        self._cache: dict[tuple[float, bool], np.ndarray] = {}

    def liouvillian_matrix(self, interaction_on: bool = True) -> np.ndarray:
        return self._liouvillians[interaction_on]

    def propagator_matrix(self, duration: float, interaction_on: bool = True) -> np.ndarray:
        _check_duration(duration)
        key = (duration, interaction_on)
        if key not in self._cache:
            if len(self._cache) >= self._CACHE_LIMIT:
                self._cache.clear()
            self._cache[key] = expm(self._liouvillians[interaction_on] * duration)
        return self._cache[key]

    def evolve(
        self, rho: DensityMatrix, duration: float, interaction_on: bool = True
    ) -> DensityMatrix:
        _check_state(self.model, rho)
        if duration == 0:
            _check_duration(duration)
            return rho
        m = self.propagator_matrix(duration, interaction_on)
        out = unvec(m @ vec(rho.matrix), self.model.layout.dim)
        return DensityMatrix(rho.layout, out, truncation_defect=rho.truncation_defect)


_PROPAGATORS = {
    "unitary": UnitaryPropagator,
    "stepper": LindbladStepper,
    "oracle": LindbladDenseOracle,
}


def make_propagator(kind: str, system, **kwargs):
    """Propagator factory; kind is unitary, stepper, or oracle."""
    model = as_model(system)
    try:
        cls = _PROPAGATORS[kind]
    except KeyError:
        raise ValueError(f"unknown propagator kind {kind!r}") from None
    return cls(model, **kwargs)
