"""Measuring field decay through the echo, and when the closed form holds.

With the coherent dynamics echoed away, deviations of P_g from unity are
pure decay signal. The first-order formula tracks the full master
equation while kappa*T stays small; its secular term grows linearly in T,
so the two separate once kappa*T approaches 1 (watch the last rows), and
the gap shrinks quadratically as kappa decreases.
"""

import numpy as np

from jc_echo import (
    DiagonalFieldDistribution,
    FockState,
    ProtocolSchedule,
    SystemParams,
    build_layout,
    make_state,
    measure_pg,
    perturbative_pg,
    run_schedule,
)

layout = build_layout(1, 15)
grid = np.linspace(0.0, 25.0, 11)
dist = DiagonalFieldDistribution.fock(3, layout.n_max)

for kappa in (0.05, 0.01):
    params = SystemParams(layout=layout, kappa=kappa)
    rho0 = make_state(layout, "g", FockState(3))
    closed_form = perturbative_pg(dist, kappa, grid)
    print(f"\ninitial |3>, kappa/g = {kappa}")
    print("    gT     P_g (full)   P_g (1st order)   kappa*T   in validity")
    for g_t, pert, valid in zip(grid, closed_form.p_g, closed_form.within_first_order):
        out = run_schedule(params, ProtocolSchedule.echo(float(g_t)), rho0, "oracle")
        print(
            f"  {g_t:5.1f}   {measure_pg(out):10.6f}   {pert:15.6f}"
            f"   {kappa * g_t:7.3f}   {'yes' if valid else 'no'}"
        )
