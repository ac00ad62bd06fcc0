"""Echo basics: undoing the exchange dynamics with a phase kick.

A two-level probe resonantly exchanging quanta with an oscillator mode
gets thoroughly entangled with it. Flipping the probe phase halfway
(sigma_z) reverses the effective coupling, so after the full duration the
composite state is back where it started -- unless something irreversible
happened to the mode in between.
"""

from jc_echo import (
    FockState,
    JcEvolve,
    KickParams,
    ProtocolSchedule,
    SystemParams,
    build_layout,
    effective_coupling,
    make_state,
    measure_pg,
    run_schedule,
)

layout = build_layout(n_qubits=1, n_max=15)
params = SystemParams(layout=layout)  # closed system, g = 1
rho0 = make_state(layout, "g", FockState(3))

print("Plain exchange evolution scrambles the probe populations:")
for g_t in (1.0, 2.0, 5.0):
    plain = ProtocolSchedule((JcEvolve(g_t),))  # no kick at all
    out = run_schedule(params, plain, rho0, "unitary")
    print(f"  gT = {g_t:4.1f}   P_g = {measure_pg(out):.6f}")

print("\nWith the kick at tau = T/2 the probe always comes home:")
for g_t in (1.0, 2.0, 5.0, 25.0):
    out = run_schedule(params, ProtocolSchedule.echo(g_t), rho0, "unitary")
    print(f"  gT = {g_t:4.1f}   P_g = {measure_pg(out):.12f}")

print("\nKick timing tunes the leftover coupling (2 tau - T)/T * g:")
for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
    g_eff = effective_coupling(frac * 10.0, 10.0)
    out = run_schedule(params, ProtocolSchedule.echo(10.0, frac), rho0, "unitary")
    print(f"  tau/T = {frac:4.2f}   g_eff = {g_eff:+.2f}   P_g = {measure_pg(out):.6f}")

print("\nSwitching the interaction off for a while (laser off, trap still")
print("running) does not disturb the echo populations:")
for t_free in (0.0, 3.0, 12.0):
    sched = ProtocolSchedule.echo(10.0, t_free=t_free, kick=KickParams())
    out = run_schedule(params, sched, rho0, "unitary")
    print(f"  T_free = {t_free:4.1f}   P_g = {measure_pg(out):.12f}")
