import cmath
import math

import numpy as np
import pytest
from scipy.linalg import expm

from jc_echo import (
    CoherentState,
    FieldSuperposition,
    FockState,
    FreeEvolve,
    IonModeCoupling,
    JcEvolve,
    Kick,
    KickParams,
    MultiIonParams,
    ProtocolSchedule,
    RamseyParams,
    SystemModel,
    SystemParams,
    UnitaryPropagator,
    build_layout,
    cancellation_metric,
    effective_coupling,
    kick_unitary,
    make_ket,
    make_state,
    measure_pg,
    qubit_operator,
    ramsey_detect,
    run_schedule,
)

FIELD_STATES = [
    FockState(0),
    FockState(3),
    FieldSuperposition(((2, 1.0), (3, 1j))),
    CoherentState(complex(0.5, 0.5)),
]


class TestEffectiveCoupling:
    def test_half_time_cancels(self):
        assert effective_coupling(5.0, 10.0, 1.0) == 0.0

    def test_endpoints(self):
        assert effective_coupling(10.0, 10.0, 1.0) == pytest.approx(1.0)
        assert effective_coupling(0.0, 10.0, 1.0) == pytest.approx(-1.0)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            effective_coupling(11.0, 10.0, 1.0)
        with pytest.raises(ValueError):
            effective_coupling(0.0, 0.0, 1.0)


class TestKickUnitary:
    def test_ideal_kick_is_sigma_z(self, layout):
        u = kick_unitary(layout, KickParams(0.0)).matrix
        sz = qubit_operator(layout, 0, "sigma_z").matrix
        assert np.array_equal(u, sz)

    def test_full_period_is_identity_up_to_phase(self, layout):
        u = kick_unitary(layout, KickParams(1.0)).matrix
        assert abs(abs(np.trace(u)) - layout.dim) < 1e-9

    def test_fidelity_of_perturbed_kick(self, layout):
        # direct complex arithmetic oracle: |tr(U0† Ue)|/2 per qubit
        eps = 0.07
        u0 = np.array([[-1, 0], [0, 1]], dtype=complex)
        ue = np.array([[-cmath.exp(-1j * math.pi * eps), 0], [0, 1]], dtype=complex)
        oracle = abs(np.trace(u0.conj().T @ ue)) / 2
        assert oracle == pytest.approx(math.cos(math.pi * eps / 2), abs=1e-12)
        assert oracle == pytest.approx(0.993961, abs=5e-7)
        u = kick_unitary(layout, KickParams(eps)).matrix
        block = u[np.ix_([0, layout.fock_dim], [0, layout.fock_dim])]
        assert abs(np.trace(u0.conj().T @ block)) / 2 == pytest.approx(oracle, abs=1e-12)

    @pytest.mark.parametrize("eps", [-0.3, 0.0, 0.07, 0.5, 1.0])
    def test_unitarity(self, layout, eps):
        u = kick_unitary(layout, KickParams(eps)).matrix
        assert np.max(np.abs(u @ u.conj().T - np.eye(layout.dim))) < 1e-12

    def test_all_qubits_is_product_of_single_kicks(self):
        lay = build_layout(2, 2)
        u_all = kick_unitary(lay, KickParams(0.0, "all")).matrix
        u0 = kick_unitary(lay, KickParams(0.0, 0)).matrix
        u1 = kick_unitary(lay, KickParams(0.0, 1)).matrix
        assert np.allclose(u_all, u0 @ u1)

    def test_target_validation(self, layout):
        with pytest.raises(ValueError):
            kick_unitary(layout, KickParams(0.0, 5))
        with pytest.raises(ValueError):
            KickParams(0.0, "some")


class TestSchedule:
    def test_total_t_counts_evolution_segments(self):
        sched = ProtocolSchedule.echo(8.0, t_free=1.5)
        assert sched.total_t == pytest.approx(11.0)

    def test_negative_duration_rejected(self):
        with pytest.raises(ValueError):
            JcEvolve(-0.1)
        with pytest.raises(ValueError):
            FreeEvolve(-0.1)
        with pytest.raises(ValueError):
            ProtocolSchedule.echo(-1.0)

    def test_canonical_echo_shape(self):
        sched = ProtocolSchedule.echo(10.0, tau_fraction=0.3)
        kinds = [type(s).__name__ for s in sched.segments]
        assert kinds == ["JcEvolve", "Kick", "JcEvolve"]
        assert sched.segments[0].duration == pytest.approx(3.0)
        assert sched.segments[2].duration == pytest.approx(7.0)


class TestEchoCompleteness:
    @pytest.mark.parametrize("fieldstate", FIELD_STATES)
    @pytest.mark.parametrize("total_t", [1.0, 5.0, 10.0])
    def test_ground_probe_returns(self, params, fieldstate, total_t):
        rho0 = make_state(params.layout, "g", fieldstate)
        out = run_schedule(
            params, ProtocolSchedule.echo(total_t), rho0, propagator="unitary"
        )
        assert measure_pg(out) == pytest.approx(1.0, abs=1e-9)

    def test_excited_probe_returns(self, params):
        rho0 = make_state(params.layout, "e", FieldSuperposition(((1, 1.0), (2, 1.0))))
        out = run_schedule(params, ProtocolSchedule.echo(6.0), rho0, "unitary")
        assert measure_pg(out) == pytest.approx(0.0, abs=1e-9)

    def test_state_matches_effective_coupling_form(self, params, rng):
        # state-level identity against an independent expm evolution
        lay = params.layout
        model = SystemModel.from_params(params)
        ket0 = make_ket(lay, "g", FieldSuperposition(((1, 1.0), (3, -2j))))
        sz = qubit_operator(lay, 0, "sigma_z").matrix
        for _ in range(3):
            total_t = float(rng.uniform(1.0, 10.0))
            frac = float(rng.uniform(0.0, 1.0))
            rho0 = make_state(lay, "g", FieldSuperposition(((1, 1.0), (3, -2j))))
            out = run_schedule(
                params, ProtocolSchedule.echo(total_t, frac), rho0, "unitary"
            )
            g_eff = effective_coupling(frac * total_t, total_t)
            h_eff = model.h_free.matrix + g_eff * model.h_int.matrix
            ket = sz @ (expm(-1j * h_eff * total_t) @ ket0)
            assert np.max(np.abs(out.matrix - np.outer(ket, ket.conj()))) < 1e-9

    def test_kick_idempotence(self, params):
        rho0 = make_state(params.layout, "g", FockState(2))
        sched = ProtocolSchedule((Kick(KickParams(0.0)), Kick(KickParams(0.0))))
        out = run_schedule(params, sched, rho0, "unitary")
        assert np.max(np.abs(out.matrix - rho0.matrix)) < 1e-12

    def test_free_evolution_neutral_for_populations(self, params):
        rho0 = make_state(params.layout, "g", FockState(3))
        reference = measure_pg(
            run_schedule(params, ProtocolSchedule.echo(8.0), rho0, "unitary")
        )
        for t_free in (0.5, 2.0, 7.7):
            out = run_schedule(
                params, ProtocolSchedule.echo(8.0, t_free=t_free), rho0, "unitary"
            )
            assert measure_pg(out) == pytest.approx(reference, abs=1e-9)

    def test_population_invariant_under_omega(self, layout):
        # readout without the Ramsey pulse ignores the free rotation
        rho0 = make_state(layout, "g", FockState(3))
        sched = ProtocolSchedule.echo(9.0)
        base = run_schedule(SystemParams(layout=layout, omega=0.0), sched, rho0, "unitary")
        spun = run_schedule(SystemParams(layout=layout, omega=10.0), sched, rho0, "unitary")
        assert measure_pg(spun) == pytest.approx(measure_pg(base), abs=1e-9)

    def test_unitary_propagator_with_decay_rejected(self, layout):
        params = SystemParams(layout=layout, kappa=0.1)
        rho0 = make_state(layout, "g", FockState(1))
        with pytest.raises(ValueError, match="kappa"):
            run_schedule(params, ProtocolSchedule.echo(1.0), rho0, "unitary")


class TestMeasurement:
    def test_projector_eigenstate(self, layout):
        rho = make_state(layout, "g", FockState(3))
        assert measure_pg(rho) == pytest.approx(1.0)

    def test_maximally_mixed(self, layout):
        from jc_echo import DensityMatrix

        rho = DensityMatrix(layout, np.eye(layout.dim, dtype=complex) / layout.dim)
        assert measure_pg(rho, 0) == pytest.approx(0.5)

    def test_completeness(self, layout, rng):
        from conftest import random_density_matrix
        from jc_echo import DensityMatrix

        rho = DensityMatrix(layout, random_density_matrix(rng, layout.dim))
        pe = rho.expectation(qubit_operator(layout, 0, "projector_e"))
        assert measure_pg(rho, 0) + pe == pytest.approx(1.0, abs=1e-12)

    def test_global_ground_for_two_qubits(self):
        lay = build_layout(2, 2)
        assert measure_pg(make_state(lay, "gg", FockState(1)), "all") == 1.0
        assert measure_pg(make_state(lay, "ge", FockState(1)), "all") == 0.0
        assert measure_pg(make_state(lay, "ge", FockState(1)), 0) == 1.0


class TestRamsey:
    def test_coherent_echo_gives_half(self, params):
        rho0 = make_state(params.layout, "g", FockState(3))
        out = run_schedule(params, ProtocolSchedule.echo(7.0), rho0, "unitary")
        for zeta in (0.0, 1.1, math.pi):
            assert ramsey_detect(out, RamseyParams(math.pi / 4, zeta)) == pytest.approx(
                0.5, abs=1e-9
            )

    def test_zero_area_pulse_is_plain_readout(self, params, rng):
        from conftest import random_density_matrix
        from jc_echo import DensityMatrix

        rho = DensityMatrix(params.layout, random_density_matrix(rng, params.layout.dim))
        assert ramsey_detect(rho, RamseyParams(0.0, 0.3)) == pytest.approx(
            measure_pg(rho, 0), abs=1e-12
        )

    def test_pi_half_area_empties_ground_level(self, layout):
        rho = make_state(layout, "g", FockState(0))
        assert ramsey_detect(rho, RamseyParams(math.pi / 2, 0.0)) == pytest.approx(
            0.0, abs=1e-12
        )

    @pytest.mark.parametrize("fieldstate", FIELD_STATES)
    def test_cos_squared_independent_of_field(self, params, fieldstate):
        rho0 = make_state(params.layout, "g", fieldstate)
        out = run_schedule(params, ProtocolSchedule.echo(5.0), rho0, "unitary")
        for phi in (0.2, math.pi / 4, 1.2):
            for zeta in (0.0, 2.0):
                assert ramsey_detect(out, RamseyParams(phi, zeta)) == pytest.approx(
                    math.cos(phi) ** 2, abs=1e-9
                )

    def test_ramsey_segment_in_schedule(self, params):
        rho0 = make_state(params.layout, "g", FockState(2))
        sched = ProtocolSchedule.echo(4.0, ramsey=RamseyParams(math.pi / 4, 0.0))
        out = run_schedule(params, sched, rho0, "unitary")
        assert measure_pg(out, 0) == pytest.approx(0.5, abs=1e-9)


class TestCancellationMetric:
    def test_perfect_kick(self, params):
        assert cancellation_metric(params, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_seven_percent_error_keeps_99(self, params):
        assert cancellation_metric(params, 0.07) >= 0.99
        assert cancellation_metric(params, -0.07) >= 0.99

    def test_epsilon_one_matches_unkicked_overlap(self, params):
        # with a 2 pi kick the echo degenerates to plain evolution
        lay = params.layout
        prop = UnitaryPropagator(SystemModel.from_params(params))
        u_half = prop.unitary(5.0)
        sz = kick_unitary(lay, KickParams(0.0)).matrix
        total = 0.0
        kets = [make_ket(lay, "g", FockState(n)) for n in range(1, 6)]
        for ket in kets:
            echoed = u_half @ (sz @ (u_half @ ket))
            plain = u_half @ (u_half @ ket)
            total += abs(np.vdot(echoed, plain)) ** 2
        oracle = total / len(kets)
        assert cancellation_metric(params, 1.0) == pytest.approx(oracle, abs=1e-12)

    def test_monotone_in_error_magnitude(self, params):
        values = [cancellation_metric(params, e) for e in np.linspace(0, 0.1, 11)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_requires_closed_system(self, layout):
        with pytest.raises(ValueError, match="kappa"):
            cancellation_metric(SystemParams(layout=layout, kappa=0.01), 0.05)

    def test_custom_states(self, params):
        kets = [make_ket(params.layout, "g", FockState(2))]
        assert cancellation_metric(params, 0.0, test_states=kets) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            cancellation_metric(params, 0.0, test_states=[])


class TestMultiIonEcho:
    def test_homogeneous_echo_returns_global_ground(self):
        lay = build_layout(2, 3)
        mp = MultiIonParams(
            n_ions=2, couplings=(IonModeCoupling(0, 1.0, 1.0),), addressing="homogeneous"
        )
        model = SystemModel.from_multi_ion(mp, lay)
        rho0 = make_state(lay, "gg", FockState(1))
        for total_t in (2.0, 7.0):
            out = run_schedule(
                model,
                ProtocolSchedule.echo(total_t, kick=KickParams(0.0, "all")),
                rho0,
                "unitary",
            )
            assert measure_pg(out, "all") == pytest.approx(1.0, abs=1e-9)
