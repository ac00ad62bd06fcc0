"""The phase-kick echo protocol and its measurements.

A run is an ordered list of segments: exchange evolution, an optional
interaction-off period (laser switched away, bath still on), the
instantaneous phase kick, and an optional Ramsey pulse before readout.
The kick is an exact unitary, never a time-integrated pulse: its whole
effect is the relative phase it imprints between |g> and |e>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence, Union

import numpy as np

from .dynamics import SystemModel, UnitaryPropagator, as_model, make_propagator
from .qspace import (
    DensityMatrix,
    FockState,
    HilbertLayout,
    Operator,
    make_ket,
    qubit_operator,
)

__all__ = [
    "KickParams",
    "RamseyParams",
    "JcEvolve",
    "FreeEvolve",
    "Kick",
    "Ramsey",
    "ProtocolSchedule",
    "effective_coupling",
    "kick_unitary",
    "ramsey_unitary",
    "run_schedule",
    "measure_pg",
    "ramsey_detect",
    "cancellation_metric",
]


@dataclass(frozen=True)
class KickParams:
    """Phase kick exp(-i pi (1+epsilon) sigma sigma†) on the target qubit(s).

    epsilon = 0 gives exactly diag(-1, +1) on (g, e); epsilon models a
    pulse-area error. target is a qubit index or "all".
    """

    epsilon: float = 0.0
    target: Union[int, str] = "all"

    def __post_init__(self):
        if self.target != "all" and not isinstance(self.target, int):
            raise ValueError(f"target must be a qubit index or 'all', got {self.target!r}")


@dataclass(frozen=True)
class RamseyParams:
    """Readout pulse exp(-i phi (sigma e^{i zeta} + sigma† e^{-i zeta}))."""

    phi: float
    zeta: float = 0.0


@dataclass(frozen=True)
class JcEvolve:
    """Exchange evolution for the given duration (units of 1/g)."""

    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")


@dataclass(frozen=True)
class FreeEvolve:
    """Interaction off: free Hamiltonian plus dissipator only."""

    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")


@dataclass(frozen=True)
class Kick:
    params: KickParams = field(default_factory=KickParams)


@dataclass(frozen=True)
class Ramsey:
    params: RamseyParams = field(default_factory=lambda: RamseyParams(phi=np.pi / 4))


Segment = Union[JcEvolve, FreeEvolve, Kick, Ramsey]


@dataclass(frozen=True)
class ProtocolSchedule:
    """Ordered segments applied left to right."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_t(self) -> float:
        """Sum of evolution durations (exchange and interaction-off)."""
        return sum(
            s.duration for s in self.segments if isinstance(s, (JcEvolve, FreeEvolve))
        )

    @staticmethod
    def echo(
        total_t: float,
        tau_fraction: float = 0.5,
        kick: KickParams | None = None,
        t_free: float = 0.0,
        ramsey: RamseyParams | None = None,
    ) -> "ProtocolSchedule":
        """Canonical echo: evolve tau, kick, evolve T - tau.

        tau = tau_fraction * total_t; a nonzero t_free inserts symmetric
        interaction-off periods around the kick; a Ramsey pulse, when
        given, is appended right before readout.
        """
        if total_t < 0:
            raise ValueError(f"total_t must be >= 0, got {total_t}")
        if not 0.0 <= tau_fraction <= 1.0:
            raise ValueError(f"tau_fraction must be in [0, 1], got {tau_fraction}")
        if t_free < 0:
            raise ValueError(f"t_free must be >= 0, got {t_free}")
        tau = tau_fraction * total_t
        segments: list[Segment] = [JcEvolve(tau)]
        if t_free > 0:
            segments.append(FreeEvolve(t_free))
        segments.append(Kick(kick if kick is not None else KickParams()))
        if t_free > 0:
            segments.append(FreeEvolve(t_free))
        segments.append(JcEvolve(total_t - tau))
        if ramsey is not None:
            segments.append(Ramsey(ramsey))
        return ProtocolSchedule(tuple(segments))


def effective_coupling(tau: float, total_t: float, g_coupling: float = 1.0) -> float:
    """Net exchange strength (2 tau - T)/T * g left after the kicked sequence."""
    if total_t <= 0:
        raise ValueError(f"total_t must be > 0, got {total_t}")
    if not 0.0 <= tau <= total_t:
        raise ValueError(f"tau={tau} outside [0, {total_t}]")
    return (2.0 * tau - total_t) / total_t * g_coupling


def _kick_block(epsilon: float) -> np.ndarray:
    # exp(-i pi (1+eps) |g><g|) = diag(-e^{-i pi eps}, 1) on (g, e)
    return np.array([[-np.exp(-1j * np.pi * epsilon), 0.0], [0.0, 1.0]], dtype=complex)


def kick_unitary(layout: HilbertLayout, kp: KickParams) -> Operator:
    """Kick as a dense unitary; for target "all" the per-qubit kicks multiply."""
    block = _kick_block(kp.epsilon)
    eye2 = np.eye(2, dtype=complex)
    if kp.target == "all":
        factors = [block] * layout.n_qubits
    else:
        if not 0 <= kp.target < layout.n_qubits:
            raise ValueError(
                f"kick target {kp.target} outside 0..{layout.n_qubits - 1}"
            )
        factors = [eye2] * layout.n_qubits
        factors[kp.target] = block
    factors.append(np.eye(layout.fock_dim, dtype=complex))
    return Operator(layout, reduce(np.kron, factors))


def ramsey_unitary(layout: HilbertLayout, rp: RamseyParams, qubit: int = 0) -> Operator:
    """Ramsey pulse on the detector qubit, closed form via X'^2 = 1."""
    xprime = np.array(
        [[0.0, np.exp(1j * rp.zeta)], [np.exp(-1j * rp.zeta), 0.0]], dtype=complex
    )
    block = np.cos(rp.phi) * np.eye(2, dtype=complex) - 1j * np.sin(rp.phi) * xprime
    factors = [np.eye(2, dtype=complex)] * layout.n_qubits
    factors[qubit] = block
    factors.append(np.eye(layout.fock_dim, dtype=complex))
    return Operator(layout, reduce(np.kron, factors))


def _conjugate(rho: DensityMatrix, u: Operator) -> DensityMatrix:
    m = u.matrix @ rho.matrix @ u.matrix.conj().T
    return DensityMatrix(rho.layout, m, truncation_defect=rho.truncation_defect)


def run_schedule(
    system,
    schedule: ProtocolSchedule,
    rho0: DensityMatrix,
    propagator="oracle",
) -> DensityMatrix:
    """Apply a schedule to an initial state and return the final state.

    system is SystemParams or SystemModel; propagator is a kind name
    ("unitary", "stepper", "oracle") or a ready propagator instance.
    Kick and Ramsey segments are instantaneous conjugations; evolution
    segments keep the dissipator on whether or not the interaction is.
    """
    model = as_model(system)
    prop = propagator if hasattr(propagator, "evolve") else make_propagator(propagator, model)
    rho = rho0
    for seg in schedule.segments:
        if isinstance(seg, JcEvolve):
            rho = prop.evolve(rho, seg.duration, interaction_on=True)
        elif isinstance(seg, FreeEvolve):
            rho = prop.evolve(rho, seg.duration, interaction_on=False)
        elif isinstance(seg, Kick):
            rho = _conjugate(rho, kick_unitary(model.layout, seg.params))
        elif isinstance(seg, Ramsey):
            rho = _conjugate(rho, ramsey_unitary(model.layout, seg.params))
        else:
            raise TypeError(f"unknown schedule segment {seg!r}")
    return rho


def measure_pg(rho: DensityMatrix, qubit: Union[int, str] = "all") -> float:
    """Ground-level probability.

    An integer selects one qubit (others traced over); "all" is the
    probability of the global atomic ground state.
    """
    layout = rho.layout
    if qubit == "all":
        proj = qubit_operator(layout, 0, "projector_g").matrix
        for j in range(1, layout.n_qubits):
            proj = proj @ qubit_operator(layout, j, "projector_g").matrix
    else:
        proj = qubit_operator(layout, qubit, "projector_g").matrix
    return float(np.real(np.trace(proj @ rho.matrix)))


def ramsey_detect(rho: DensityMatrix, rp: RamseyParams, qubit: int = 0) -> float:
    """Apply the Ramsey pulse, then read the ground-level probability.

    Together with the detector this is phase-sensitive: with purely
    coherent echo dynamics the answer is cos^2(phi) for every field state,
    and deviations measure the decay of the field phase.
    """
    rotated = _conjugate(rho, ramsey_unitary(rho.layout, rp, qubit))
    return measure_pg(rotated, qubit)


def _default_test_kets(layout: HilbertLayout) -> list[np.ndarray]:
    levels = "g" * layout.n_qubits
    return [make_ket(layout, levels, FockState(n)) for n in range(1, 6)]


def cancellation_metric(
    system,
    epsilon: float,
    test_states: Sequence[np.ndarray] | None = None,
    g_t: float = 10.0,
    kick_target: Union[int, str] = "all",
) -> float:
    """Mean fidelity between the ideal and the perturbed echo output.

    Quantifies how much of the exchange dynamics an imperfect kick
    (pulse area scaled by 1+epsilon) still cancels. Defined for kappa = 0
    over a set of pure test states, default {|g,n>: n=1..5} at gT = 10;
    fidelity is the pure-state overlap |<ideal|perturbed>|^2.
    """
    model = as_model(system)
    if model.kappa != 0.0:
        raise ValueError("cancellation metric requires kappa = 0")
    prop = UnitaryPropagator(model)
    half = prop.unitary(g_t / 2.0)
    k_ideal = kick_unitary(model.layout, KickParams(0.0, kick_target)).matrix
    k_pert = kick_unitary(model.layout, KickParams(epsilon, kick_target)).matrix
    kets = _default_test_kets(model.layout) if test_states is None else list(test_states)
    if not kets:
        raise ValueError("at least one test state is required")
    total = 0.0
    for ket in kets:
        mid = half @ ket
        ideal = half @ (k_ideal @ mid)
        pert = half @ (k_pert @ mid)
        total += abs(np.vdot(ideal, pert)) ** 2
    return total / len(kets)
