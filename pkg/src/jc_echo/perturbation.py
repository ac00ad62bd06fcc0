"""First-order closed form for the echo ground-state probability.

Valid to first order in kappa*T and kappa/g for the half-time echo with
the detector atom starting in |g> and a diagonal initial field
distribution. Only populations enter; off-diagonal field coherences do
not affect the readout at this order. The n = 0 and n = 1 populations
contribute nothing: the sum starts at n = 2, so a single-photon field
gives exactly 1 here, with real deviations appearing at second order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qspace import CoherentState, FieldStateSpec, FockState, field_amplitudes

__all__ = [
    "DiagonalFieldDistribution",
    "PerturbativeResult",
    "perturbative_pg",
]

# Advisory validity thresholds (artifact convention, not tuned values):
# outside kappa*T < 1 and kappa/g < 0.2 the result is flagged, not refused.
VALIDITY_KAPPA_T = 1.0
VALIDITY_KAPPA_OVER_G = 0.2


@dataclass(frozen=True, eq=False)
class DiagonalFieldDistribution:
    """Field number populations rho_nn for n = 0..n_max."""

    populations: np.ndarray

    def __post_init__(self):
        pops = np.array(self.populations, dtype=float)
        if pops.ndim != 1 or pops.size == 0:
            raise ValueError("populations must be a non-empty 1-D sequence")
        if np.any(pops < 0):
            raise ValueError("populations must be >= 0")
        if abs(pops.sum() - 1.0) >= 1e-12:
            raise ValueError(f"populations sum to {pops.sum()!r}, expected 1")
        pops.setflags(write=False)
        object.__setattr__(self, "populations", pops)

    @property
    def n_max(self) -> int:
        return self.populations.size - 1

    @classmethod
    def fock(cls, n: int, n_max: int) -> "DiagonalFieldDistribution":
        if not 0 <= n <= n_max:
            raise ValueError(f"Fock index {n} outside 0..{n_max}")
        pops = np.zeros(n_max + 1)
        pops[n] = 1.0
        return cls(pops)

    @classmethod
    def poissonian(cls, alpha: complex, n_max: int) -> "DiagonalFieldDistribution":
        """Truncated, renormalized number distribution of a coherent state."""
        amps, _ = field_amplitudes(CoherentState(alpha), n_max + 1)
        return cls(np.abs(amps) ** 2)

    @classmethod
    def from_field_spec(cls, spec: FieldStateSpec, n_max: int) -> "DiagonalFieldDistribution":
        """Populations of a diagonal-compatible field spec.

        Fock and coherent states qualify; a number-state superposition
        carries coherences and is rejected.
        """
        if isinstance(spec, FockState):
            return cls.fock(spec.n, n_max)
        if isinstance(spec, CoherentState):
            return cls.poissonian(spec.alpha, n_max)
        raise ValueError(
            "first-order evaluation needs a diagonal or coherent field state, "
            f"got {type(spec).__name__}"
        )


@dataclass(frozen=True, eq=False)
class PerturbativeResult:
    """Probability value(s) plus the advisory first-order validity flag."""

    p_g: float | np.ndarray
    within_first_order: bool | np.ndarray


def perturbative_pg(
    dist: DiagonalFieldDistribution, kappa_over_g: float, g_t: float | np.ndarray
) -> PerturbativeResult:
    """Echo P_g to first order in the decay, for tau = T/2.

    Accepts a scalar or array of dimensionless durations gT. The bracket
    per Fock level n >= 2 combines a secular term kappa*T*(2n-1)/4, two
    single-frequency sine terms, and sine-cosine cross terms with weights
    sqrt(n)(4n-3) and sqrt(n-1)(4n-1); levels are weighted by rho_nn.
    """
    if kappa_over_g < 0:
        raise ValueError(f"kappa_over_g must be >= 0, got {kappa_over_g}")
    t = np.asarray(g_t, dtype=float)
    if np.any(t < 0):
        raise ValueError("gT must be >= 0")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)

    pops = dist.populations
    k = kappa_over_g
    p = np.ones_like(t)
    if pops.size > 2 and k > 0:
        ns = np.arange(2, pops.size, dtype=float)[:, None]
        rt_n = np.sqrt(ns)
        rt_m = np.sqrt(ns - 1.0)
        sin_n = np.sin(t[None, :] * rt_n)
        sin_m = np.sin(t[None, :] * rt_m)
        cos_n = np.cos(t[None, :] * rt_n)
        cos_m = np.cos(t[None, :] * rt_m)
        bracket = (k * t[None, :] / 4.0) * (2.0 * ns - 1.0)
        bracket += k * sin_n / (4.0 * rt_n) - k * sin_m / (4.0 * rt_m)
        bracket -= (k / 4.0) * (
            rt_n * (4.0 * ns - 3.0) * sin_n * cos_m
            - rt_m * (4.0 * ns - 1.0) * sin_m * cos_n
        )
        p = 1.0 - pops[2:] @ bracket

    valid = (k * t < VALIDITY_KAPPA_T) & (k < VALIDITY_KAPPA_OVER_G)
    if scalar:
        return PerturbativeResult(float(p[0]), bool(valid[0]))
    return PerturbativeResult(p, valid)
