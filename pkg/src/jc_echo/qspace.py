"""Truncated composite Hilbert space: layouts, operators, and states.

Basis ordering is qubit-major with the field factor last. For a single
qubit the composite index is ``q * fock_dim + n`` with ``q = 0`` for |g>
and ``q = 1`` for |e>; for several qubits the qubit factors come first
and qubit 0 varies slowest. All matrices are dense complex arrays; the
dimensions in play (<= 64) make sparsity pointless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence, Union

import numpy as np

# DensityMatrix health tolerances (max-norm Hermiticity, |trace - 1|,
# smallest eigenvalue of the hermitized matrix).
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = -1e-8

# Largest admissible probability mass lost by truncating a coherent state.
COHERENT_TAIL_TOL = 1e-10

_QUBIT_BLOCKS = {
    "sigma": np.array([[0, 1], [0, 0]], dtype=complex),         # |g><e|
    "sigma_dagger": np.array([[0, 0], [1, 0]], dtype=complex),  # |e><g|
    "sigma_z": np.array([[-1, 0], [0, 1]], dtype=complex),      # |e><e| - |g><g|
    "projector_g": np.array([[1, 0], [0, 0]], dtype=complex),
    "projector_e": np.array([[0, 0], [0, 1]], dtype=complex),
}


def _frozen(matrix: np.ndarray) -> np.ndarray:
    out = np.array(matrix, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HilbertLayout:
    """Dimensions of the qubit(s) x field product space."""

    n_qubits: int
    fock_dim: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.fock_dim < 2:
            raise ValueError(f"fock_dim must be >= 2, got {self.fock_dim}")

    @property
    def n_max(self) -> int:
        return self.fock_dim - 1

    @property
    def qubit_dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def dim(self) -> int:
        return self.qubit_dim * self.fock_dim

    def index(self, qubit_levels: Union[str, Sequence[str]], n: int) -> int:
        """Composite basis index of |levels> x |n>, qubit 0 slowest."""
        levels = _parse_levels(qubit_levels, self.n_qubits)
        if not 0 <= n <= self.n_max:
            raise ValueError(f"Fock index {n} outside 0..{self.n_max}")
        q = 0
        for lv in levels:
            q = 2 * q + lv
        return q * self.fock_dim + n


def build_layout(n_qubits: int, n_max: int) -> HilbertLayout:
    """Layout with Fock levels 0..n_max. Requires n_qubits >= 1, n_max >= 1."""
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return HilbertLayout(n_qubits=n_qubits, fock_dim=n_max + 1)


def _parse_levels(qubit_levels: Union[str, Sequence[str]], n_qubits: int) -> list[int]:
    levels = list(qubit_levels)
    if len(levels) != n_qubits:
        raise ValueError(
            f"expected {n_qubits} qubit level(s), got {len(levels)}"
        )
    out = []
    for lv in levels:
        if lv not in ("g", "e"):
            raise ValueError(f"qubit level must be 'g' or 'e', got {lv!r}")
        out.append(0 if lv == "g" else 1)
    return out


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator on a layout. Immutable after construction."""

    layout: HilbertLayout
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (self.layout.dim, self.layout.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "matrix", m)

    def dagger(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def _check(self, other: "Operator") -> None:
        if other.layout != self.layout:
            raise ValueError("operators live on different layouts")

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.matrix - other.matrix)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.matrix @ other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, scalar * self.matrix)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.layout, -self.matrix)


def identity(layout: HilbertLayout) -> Operator:
    return Operator(layout, np.eye(layout.dim, dtype=complex))


def annihilation(layout: HilbertLayout) -> Operator:
    """Field lowering operator: a|n> = sqrt(n)|n-1>, identity on qubits."""
    a_f = np.diag(np.sqrt(np.arange(1, layout.fock_dim)), 1).astype(complex)
    return Operator(layout, np.kron(np.eye(layout.qubit_dim, dtype=complex), a_f))


def creation(layout: HilbertLayout) -> Operator:
    return annihilation(layout).dagger()


def number_operator(layout: HilbertLayout) -> Operator:
    """Field number operator a†a."""
    n_f = np.diag(np.arange(layout.fock_dim).astype(complex))
    return Operator(layout, np.kron(np.eye(layout.qubit_dim, dtype=complex), n_f))


def qubit_operator(layout: HilbertLayout, which_qubit: int, kind: str) -> Operator:
    """Single-qubit operator tensor-embedded at ``which_qubit``.

    kind is one of sigma, sigma_dagger, sigma_z, projector_g, projector_e,
    with sigma = |g><e| and sigma_z = |e><e| - |g><g|.
    """
    if not 0 <= which_qubit < layout.n_qubits:
        raise ValueError(
            f"qubit index {which_qubit} outside 0..{layout.n_qubits - 1}"
        )
    try:
        block = _QUBIT_BLOCKS[kind]
    except KeyError:
        raise ValueError(f"unknown qubit operator kind {kind!r}") from None
    factors = [np.eye(2, dtype=complex)] * layout.n_qubits
    factors[which_qubit] = block
    factors.append(np.eye(layout.fock_dim, dtype=complex))
    return Operator(layout, reduce(np.kron, factors))


@dataclass(frozen=True)
class FockState:
    """Number state |n>."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Fock index must be >= 0, got {self.n}")


@dataclass(frozen=True)
class FieldSuperposition:
    """Finite superposition sum_k c_k |n_k>; normalized on realization."""

    terms: tuple[tuple[int, complex], ...]

    def __post_init__(self):
        terms = tuple((int(n), complex(c)) for n, c in self.terms)
        if not terms:
            raise ValueError("superposition needs at least one term")
        if any(n < 0 for n, _ in terms):
            raise ValueError("Fock indices must be >= 0")
        if len({n for n, _ in terms}) != len(terms):
            raise ValueError("duplicate Fock index in superposition")
        object.__setattr__(self, "terms", terms)


@dataclass(frozen=True)
class CoherentState:
    """Coherent state |alpha> with Poissonian number distribution."""

    alpha: complex


FieldStateSpec = Union[FockState, FieldSuperposition, CoherentState]


def field_amplitudes(spec: FieldStateSpec, fock_dim: int) -> tuple[np.ndarray, float]:
    """Normalized amplitude vector on levels 0..fock_dim-1 plus truncation defect.

    The defect is the probability mass dropped by the truncation (nonzero
    only for coherent states). Construction is rejected when a Fock index
    exceeds the truncation or a coherent tail exceeds COHERENT_TAIL_TOL.
    """
    amps = np.zeros(fock_dim, dtype=complex)
    if isinstance(spec, FockState):
        if spec.n >= fock_dim:
            raise ValueError(f"Fock index {spec.n} exceeds n_max {fock_dim - 1}")
        amps[spec.n] = 1.0
        return amps, 0.0
    if isinstance(spec, FieldSuperposition):
        for n, c in spec.terms:
            if n >= fock_dim:
                raise ValueError(f"Fock index {n} exceeds n_max {fock_dim - 1}")
            amps[n] = c
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("superposition has zero norm")
        return amps / norm, 0.0
    if isinstance(spec, CoherentState):
        alpha = complex(spec.alpha)
        # c_n = e^{-|a|^2/2} a^n / sqrt(n!), built by stable recursion
        amps[0] = math.exp(-abs(alpha) ** 2 / 2.0)
        for n in range(1, fock_dim):
            amps[n] = amps[n - 1] * alpha / math.sqrt(n)
        kept = float(np.sum(np.abs(amps) ** 2))
        tail = max(1.0 - kept, 0.0)
        if tail >= COHERENT_TAIL_TOL:
            raise ValueError(
                f"coherent state truncation tail {tail:.3e} exceeds "
                f"{COHERENT_TAIL_TOL:.0e} at n_max {fock_dim - 1}"
            )
        return amps / math.sqrt(kept), tail
    raise TypeError(f"unsupported field state spec: {spec!r}")


def make_ket(
    layout: HilbertLayout,
    qubit_levels: Union[str, Sequence[str]],
    fieldstate: FieldStateSpec,
) -> np.ndarray:
    """Product-state vector |levels> x |field> on the composite space."""
    amps, _ = field_amplitudes(fieldstate, layout.fock_dim)
    base = layout.index(qubit_levels, 0)
    ket = np.zeros(layout.dim, dtype=complex)
    ket[base:base + layout.fock_dim] = amps
    return ket


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state (within tolerances).

    Health metrics are computed on construction and any violation raises,
    so every DensityMatrix in circulation satisfies the invariants.
    ``truncation_defect`` records probability mass lost when a coherent
    initial state was truncated; it is carried along through evolutions.
    """

    layout: HilbertLayout
    matrix: np.ndarray
    truncation_defect: float = 0.0
    trace_defect: float = field(init=False)
    hermiticity_defect: float = field(init=False)
    min_eigenvalue: float = field(init=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (self.layout.dim, self.layout.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "matrix", m)
        herm = float(np.max(np.abs(m - m.conj().T)))
        trace = float(np.real(np.trace(m)))
        min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        object.__setattr__(self, "hermiticity_defect", herm)
        object.__setattr__(self, "trace_defect", abs(trace - 1.0))
        object.__setattr__(self, "min_eigenvalue", min_eig)
        if herm >= HERMITICITY_TOL:
            raise ValueError(f"state not Hermitian: max defect {herm:.3e}")
        if self.trace_defect >= TRACE_TOL:
            raise ValueError(f"state trace defect {self.trace_defect:.3e}")
        if min_eig < POSITIVITY_TOL:
            raise ValueError(f"state not positive: min eigenvalue {min_eig:.3e}")

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, op: Operator) -> float:
        """<A> = tr(rho A) for a Hermitian observable."""
        return float(np.real(np.trace(self.matrix @ op.matrix)))


def make_state(
    layout: HilbertLayout,
    qubit_levels: Union[str, Sequence[str]],
    fieldstate: FieldStateSpec,
) -> DensityMatrix:
    """Pure product state as a density matrix.

    Coherent states are renormalized after truncation; the dropped tail
    mass is recorded on the result as ``truncation_defect``.
    """
    amps, defect = field_amplitudes(fieldstate, layout.fock_dim)
    base = layout.index(qubit_levels, 0)
    ket = np.zeros(layout.dim, dtype=complex)
    ket[base:base + layout.fock_dim] = amps
    return DensityMatrix(layout, np.outer(ket, ket.conj()), truncation_defect=defect)
