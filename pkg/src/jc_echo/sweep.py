"""Sweep execution and CSV emission.

Uniform-grid sweeps against the dense oracle exploit the semigroup
property of the master equation: one scaling-and-squaring exponential
per distinct segment increment, then memoized binary powers, instead of
a fresh matrix exponential per grid point. The stepper path evaluates
points independently. Identical configs produce byte-identical CSVs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .config import RunConfig
from .dynamics import (
    AmplitudeDamping,
    LindbladStepper,
    SystemModel,
    UnitaryPropagator,
    make_propagator,
    unvec,
    vec,
    vectorized_liouvillian,
)
from .perturbation import DiagonalFieldDistribution, perturbative_pg
from .protocol import (
    KickParams,
    ProtocolSchedule,
    RamseyParams,
    cancellation_metric,
    kick_unitary,
    measure_pg,
    ramsey_unitary,
    run_schedule,
)
from .qspace import DensityMatrix, make_ket, FockState

__all__ = [
    "CSV_HEADER",
    "NumericalHealthError",
    "SweepRow",
    "SweepResult",
    "run_sweep",
    "emit_csv",
]

CSV_HEADER = "sweep_value,p_g,p_g_pert,trace_defect,min_eigenvalue"

# Row acceptance bounds; anything outside aborts the sweep.
P_G_SLACK = 1e-9


class NumericalHealthError(RuntimeError):
    """A sweep point produced a state outside the health tolerances."""


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    p_g: float
    p_g_pert: float | None
    trace_defect: float
    min_eigenvalue: float


@dataclass(frozen=True, eq=False)
class SweepResult:
    rows: tuple[SweepRow, ...]
    config: RunConfig


class _BinaryPowers:
    """Applies M^k to vectors through lazily memoized squarings."""

    def __init__(self, matrix: np.ndarray | None):
        self._pows = [matrix] if matrix is not None else None

    def apply(self, v: np.ndarray, k: int) -> np.ndarray:
        if self._pows is None or k == 0:
            return v
        j = 0
        while k:
            if k & 1:
                while j >= len(self._pows):
                    last = self._pows[-1]
                    self._pows.append(last @ last)
                v = self._pows[j] @ v
            k >>= 1
            j += 1
        return v


def _health_guard(build, sweep_value: float):
    try:
        return build()
    except ValueError as exc:
        raise NumericalHealthError(f"sweep value {sweep_value:.12g}: {exc}") from exc


def _check_pg(p: float, sweep_value: float) -> None:
    if not -P_G_SLACK <= p <= 1.0 + P_G_SLACK:
        raise NumericalHealthError(
            f"sweep value {sweep_value:.12g}: probability {p!r} outside [0, 1]"
        )


def _row(value: float, final: DensityMatrix, p_pert: float | None) -> SweepRow:
    p = measure_pg(final, "all")
    _check_pg(p, value)
    return SweepRow(
        sweep_value=float(value),
        p_g=p,
        p_g_pert=p_pert,
        trace_defect=final.trace_defect,
        min_eigenvalue=final.min_eigenvalue,
    )


def _echo_finals_oracle(
    model: SystemModel,
    rho0: DensityMatrix,
    first_durations: tuple[float, float],
    second_durations: tuple[float, float, bool],
    n_points: int,
    grid: np.ndarray,
    kick: KickParams,
    t_free: float,
    ramsey: RamseyParams | None,
) -> list[DensityMatrix]:
    """Final states of echo schedules whose segment durations are affine in k.

    first_durations = (base, step) gives segment-one duration base + k*step;
    second_durations = (base, step, descending) gives segment two at index
    k or n_points-1-k. All exponentials share the generator, so application
    order is irrelevant and binary powers stay exact to roundoff.
    """
    layout = model.layout
    jumps = AmplitudeDamping(model.kappa).jump_operators(layout)
    liouv = vectorized_liouvillian(model.h_total().matrix, jumps)

    def seg(duration: float) -> np.ndarray | None:
        return expm(liouv * duration) if duration > 0 else None

    base1, step1 = first_durations
    base2, step2, descending = second_durations
    m_base1 = seg(base1)
    m_step1 = seg(step1)
    m_base2 = m_base1 if base2 == base1 else seg(base2)
    m_step2 = m_step1 if step2 == step1 else seg(step2)
    ladder = _BinaryPowers(m_step2)

    free_op = None
    if t_free > 0:
        liouv_free = vectorized_liouvillian(model.h_free.matrix, jumps)
        free_op = expm(liouv_free * t_free)

    u_kick = kick_unitary(layout, kick).matrix
    u_ramsey = ramsey_unitary(layout, ramsey).matrix if ramsey is not None else None

    u = vec(rho0.matrix)
    if m_base1 is not None:
        u = m_base1 @ u
    finals = []
    for k in range(n_points):
        if k and m_step1 is not None:
            u = m_step1 @ u
        v = u
        if free_op is not None:
            v = free_op @ v
        r = unvec(v, layout.dim)
        r = u_kick @ r @ u_kick.conj().T
        v = vec(r)
        if free_op is not None:
            v = free_op @ v
        if m_base2 is not None:
            v = m_base2 @ v
        v = ladder.apply(v, (n_points - 1 - k) if descending else k)
        r = unvec(v, layout.dim)
        if u_ramsey is not None:
            r = u_ramsey @ r @ u_ramsey.conj().T
        finals.append(
            _health_guard(
                lambda r=r: DensityMatrix(
                    layout, r, truncation_defect=rho0.truncation_defect
                ),
                grid[k],
            )
        )
    return finals


def _echo_schedule(config: RunConfig, total_t: float, *, epsilon=None, tau_fraction=None):
    return ProtocolSchedule.echo(
        total_t,
        tau_fraction=config.tau_fraction if tau_fraction is None else tau_fraction,
        kick=KickParams(config.kick_epsilon if epsilon is None else epsilon),
        t_free=config.t_free,
        ramsey=config.ramsey,
    )


def _pert_column(config: RunConfig, grid: np.ndarray) -> np.ndarray | None:
    if not config.perturbative:
        return None
    dist = DiagonalFieldDistribution.from_field_spec(config.fieldstate, config.n_max)
    if config.sweep.variable == "gT":
        return np.asarray(perturbative_pg(dist, config.kappa_over_g, grid).p_g)
    # kappa_over_g sweep at fixed duration
    return np.array(
        [perturbative_pg(dist, k, config.fixed_g_t).p_g for k in grid]
    )


def _stepper_points(config, model, rho0, grid, schedules) -> list[DensityMatrix]:
    prop = LindbladStepper(model)
    finals = []
    for value, sched in zip(grid, schedules):
        finals.append(
            _health_guard(lambda s=sched: run_schedule(model, s, rho0, prop), value)
        )
    return finals


def _sweep_gt(config: RunConfig, grid: np.ndarray) -> list[SweepRow]:
    model = config.model()
    rho0 = config.initial_state()
    pert = _pert_column(config, grid)
    f = config.tau_fraction
    if config.propagator == "oracle":
        delta = (grid[-1] - grid[0]) / (len(grid) - 1)
        finals = _echo_finals_oracle(
            model,
            rho0,
            first_durations=(f * grid[0], f * delta),
            second_durations=((1 - f) * grid[0], (1 - f) * delta, False),
            n_points=len(grid),
            grid=grid,
            kick=KickParams(config.kick_epsilon),
            t_free=config.t_free,
            ramsey=config.ramsey,
        )
    else:
        schedules = [_echo_schedule(config, t) for t in grid]
        finals = _stepper_points(config, model, rho0, grid, schedules)
    return [
        _row(v, fin, None if pert is None else float(pert[i]))
        for i, (v, fin) in enumerate(zip(grid, finals))
    ]


def _sweep_tau(config: RunConfig, grid: np.ndarray) -> list[SweepRow]:
    total_t = config.fixed_g_t
    if total_t <= 0:
        raise NumericalHealthError("tau_fraction sweeps need sweep.fixed_gt > 0")
    model = config.model()
    rho0 = config.initial_state()
    if config.propagator == "oracle":
        delta = (grid[-1] - grid[0]) / (len(grid) - 1)
        finals = _echo_finals_oracle(
            model,
            rho0,
            first_durations=(grid[0] * total_t, delta * total_t),
            second_durations=((1 - grid[-1]) * total_t, delta * total_t, True),
            n_points=len(grid),
            grid=grid,
            kick=KickParams(config.kick_epsilon),
            t_free=config.t_free,
            ramsey=config.ramsey,
        )
    else:
        schedules = [
            _echo_schedule(config, total_t, tau_fraction=f) for f in grid
        ]
        finals = _stepper_points(config, model, rho0, grid, schedules)
    return [_row(v, fin, None) for v, fin in zip(grid, finals)]


def _sweep_kappa(config: RunConfig, grid: np.ndarray) -> list[SweepRow]:
    rho0 = config.initial_state()
    pert = _pert_column(config, grid)
    sched = _echo_schedule(config, config.fixed_g_t)
    rows = []
    for i, kappa in enumerate(grid):
        model = config.model(kappa_over_g=float(kappa))
        final = _health_guard(
            lambda m=model: run_schedule(m, sched, rho0, config.propagator), kappa
        )
        rows.append(_row(kappa, final, None if pert is None else float(pert[i])))
    return rows


def _sweep_epsilon(config: RunConfig, grid: np.ndarray) -> list[SweepRow]:
    if config.scenario == "kick_robustness":
        return _sweep_kick_robustness(config, grid)
    model = config.model()
    rho0 = config.initial_state()
    # segment durations are fixed across the grid, so one propagator (and
    # its cached exponentials) serves every kick setting
    prop = make_propagator(config.propagator, model)
    rows = []
    for eps in grid:
        sched = _echo_schedule(config, config.fixed_g_t, epsilon=float(eps))
        final = _health_guard(
            lambda s=sched: run_schedule(model, s, rho0, prop), eps
        )
        rows.append(_row(eps, final, None))
    return rows


def _sweep_kick_robustness(config: RunConfig, grid: np.ndarray) -> list[SweepRow]:
    """Rows carry the cancellation metric over the standard test set."""
    model = config.model()
    layout = model.layout
    prop = UnitaryPropagator(model)
    half = prop.unitary(config.fixed_g_t / 2.0)
    kets = [make_ket(layout, "g" * layout.n_qubits, FockState(n)) for n in range(1, 6)]
    mids = [half @ ket for ket in kets]
    rows = []
    for eps in grid:
        metric = cancellation_metric(model, float(eps), g_t=config.fixed_g_t)
        _check_pg(metric, eps)
        u_kick = kick_unitary(layout, KickParams(float(eps))).matrix
        worst_trace, worst_eig = 0.0, np.inf
        for mid in mids:
            out = half @ (u_kick @ mid)
            dm = _health_guard(
                lambda o=out: DensityMatrix(layout, np.outer(o, o.conj())), eps
            )
            worst_trace = max(worst_trace, dm.trace_defect)
            worst_eig = min(worst_eig, dm.min_eigenvalue)
        rows.append(
            SweepRow(
                sweep_value=float(eps),
                p_g=metric,
                p_g_pert=None,
                trace_defect=worst_trace,
                min_eigenvalue=worst_eig,
            )
        )
    return rows


_SWEEPS = {
    "gT": _sweep_gt,
    "tau_fraction": _sweep_tau,
    "kappa_over_g": _sweep_kappa,
    "epsilon": _sweep_epsilon,
}


def run_sweep(config: RunConfig) -> SweepResult:
    """Evaluate the configured sweep; rows come back ordered by grid value."""
    grid = np.linspace(config.sweep.lo, config.sweep.hi, config.sweep.n_points)
    rows = _SWEEPS[config.sweep.variable](config, grid)
    return SweepResult(rows=tuple(rows), config=config)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit_csv(result: SweepResult, path) -> None:
    """Write rows with the fixed header, LF endings, 12 significant digits."""
    lines = [CSV_HEADER]
    for row in result.rows:
        pert = "" if row.p_g_pert is None else _fmt(row.p_g_pert)
        lines.append(
            f"{_fmt(row.sweep_value)},{_fmt(row.p_g)},{pert},"
            f"{_fmt(row.trace_defect)},{_fmt(row.min_eigenvalue)}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
