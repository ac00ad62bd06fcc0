import math

import numpy as np
import pytest
from scipy.linalg import expm

from jc_echo import (
    DensityMatrix,
    FockState,
    IonModeCoupling,
    LindbladDenseOracle,
    LindbladStepper,
    MultiIonParams,
    SystemModel,
    SystemParams,
    UnitaryPropagator,
    build_layout,
    default_time_step,
    hamiltonian_h0,
    hamiltonian_hint,
    hamiltonian_multi_ion,
    liouvillian_apply,
    make_propagator,
    make_state,
    multi_ion_hamiltonians,
    qubit_operator,
    total_excitation,
)
from conftest import random_density_matrix


def rabi_pe(n, t, g=1.0):
    """Closed-form 2x2 block oracle: excited probability from |g,n>."""
    return math.sin(g * math.sqrt(n) * t) ** 2


class TestHamiltonians:
    def test_h0_diagonal_elements(self, layout):
        params = SystemParams(layout=layout, omega=0.7)
        h0 = hamiltonian_h0(params).matrix
        g0 = layout.index("g", 0)
        e2 = layout.index("e", 2)
        assert h0[g0, g0] == 0.0
        # one atomic plus two field quanta
        assert h0[e2, e2] == pytest.approx(3 * 0.7, abs=1e-15)

    def test_h0_commutes_with_hint(self, layout):
        params = SystemParams(layout=layout, omega=3.2)
        h0 = hamiltonian_h0(params).matrix
        hint = hamiltonian_hint(params).matrix
        assert np.max(np.abs(h0 @ hint - hint @ h0)) < 1e-12

    def test_hint_matrix_elements(self, layout):
        params = SystemParams(layout=layout, g_coupling=1.0)
        hint = hamiltonian_hint(params).matrix
        assert hint[layout.index("e", 0), layout.index("g", 1)] == pytest.approx(1.0)
        assert hint[layout.index("e", 2), layout.index("g", 3)] == pytest.approx(
            math.sqrt(3), abs=1e-15
        )

    def test_hint_anticommutes_with_sigma_z(self, layout):
        hint = hamiltonian_hint(SystemParams(layout=layout)).matrix
        sz = qubit_operator(layout, 0, "sigma_z").matrix
        anti = hint @ sz + sz @ hint
        assert np.max(np.abs(anti)) == 0.0

    def test_hermiticity(self, layout):
        params = SystemParams(layout=layout, omega=10.0)
        assert hamiltonian_h0(params).hermiticity_defect() < 1e-12
        assert hamiltonian_hint(params).hermiticity_defect() < 1e-12


class TestMultiIon:
    def test_single_ion_reduction_bit_for_bit(self, layout):
        params = SystemParams(layout=layout, omega=2.3, g_coupling=1.0)
        expected = hamiltonian_h0(params).matrix + hamiltonian_hint(params).matrix
        for addressing in ("individual", "homogeneous"):
            mp = MultiIonParams(
                n_ions=1,
                couplings=(IonModeCoupling(0, mode_frequency=2.3, rabi_frequency=1.0),),
                addressing=addressing,
            )
            got = hamiltonian_multi_ion(mp, layout).matrix
            assert np.array_equal(got, expected)

    def test_two_ion_homogeneous_exchange_rate(self):
        # Tavis-Cummings oracle: dense diagonalization of the
        # single-excitation block gives the enhanced rate sqrt(2) g.
        lay = build_layout(2, 3)
        mp = MultiIonParams(
            n_ions=2,
            couplings=(IonModeCoupling(0, 1.0, 1.0),),
            addressing="homogeneous",
        )
        _, hint = multi_ion_hamiltonians(mp, lay)
        idx = [lay.index("gg", 1), lay.index("ge", 0), lay.index("eg", 0)]
        block = hint.matrix[np.ix_(idx, idx)]
        evals = np.sort(np.linalg.eigvalsh(block))
        assert np.allclose(evals, [-math.sqrt(2), 0.0, math.sqrt(2)], atol=1e-9)

    def test_two_ion_homogeneous_dynamics(self):
        lay = build_layout(2, 3)
        mp = MultiIonParams(
            n_ions=2, couplings=(IonModeCoupling(0, 1.0, 1.0),), addressing="homogeneous"
        )
        model = SystemModel.from_multi_ion(mp, lay)
        prop = UnitaryPropagator(model)
        rho0 = make_state(lay, "gg", FockState(1))
        proj = rho0.matrix
        for t in (0.3, 0.8, 1.7):
            rho = prop.evolve(rho0, t)
            p_stay = float(np.real(np.trace(proj @ rho.matrix)))
            assert p_stay == pytest.approx(
                math.cos(math.sqrt(2) * t) ** 2, abs=1e-12
            )

    def test_individual_addressing_spectator_constant(self):
        lay = build_layout(2, 3)
        mp = MultiIonParams(
            n_ions=2, couplings=(IonModeCoupling(0, 1.0, 1.0),), addressing="individual"
        )
        model = SystemModel.from_multi_ion(mp, lay)
        prop = UnitaryPropagator(model)
        rho0 = make_state(lay, "ge", FockState(1))
        pe1 = qubit_operator(lay, 1, "projector_e")
        for t in (0.5, 2.0):
            assert prop.evolve(rho0, t).expectation(pe1) == pytest.approx(1.0, abs=1e-12)

    def test_duplicate_ion_rejected(self):
        with pytest.raises(ValueError, match="at most one"):
            MultiIonParams(
                n_ions=2,
                couplings=(IonModeCoupling(0, 1.0, 1.0), IonModeCoupling(0, 2.0, 1.0)),
            )

    def test_layout_mismatch_rejected(self):
        lay = build_layout(1, 3)
        mp = MultiIonParams(
            n_ions=2, couplings=(IonModeCoupling(0, 1.0, 1.0),), addressing="homogeneous"
        )
        with pytest.raises(ValueError, match="layout"):
            hamiltonian_multi_ion(mp, lay)

    def test_one_mode_limit(self):
        lay = build_layout(2, 3)
        mp = MultiIonParams(
            n_ions=2,
            couplings=(IonModeCoupling(0, 1.0, 1.0), IonModeCoupling(1, 2.0, 1.0)),
            addressing="individual",
        )
        with pytest.raises(ValueError, match="single coupling"):
            hamiltonian_multi_ion(mp, lay)


class TestLiouvillian:
    def test_maximally_mixed_stationary_without_decay(self, layout):
        params = SystemParams(layout=layout, omega=1.0, kappa=0.0)
        rho = np.eye(layout.dim, dtype=complex) / layout.dim
        assert np.max(np.abs(liouvillian_apply(params, rho))) < 1e-14

    def test_pure_decay_rates(self):
        # analytic amplitude-damping rate equations at g = 0 require a
        # degenerate params object; emulate with g ~ 0 via direct matrices
        lay = build_layout(1, 3)
        kappa = 0.8
        params = SystemParams(layout=lay, omega=0.0, kappa=kappa, g_coupling=1e-300)
        rho = make_state(lay, "g", FockState(1))
        drho = liouvillian_apply(params, rho)
        g1 = lay.index("g", 1)
        g0 = lay.index("g", 0)
        assert drho[g1, g1] == pytest.approx(-kappa, abs=1e-12)
        assert drho[g0, g0] == pytest.approx(kappa, abs=1e-12)

    def test_traceless_and_hermitian_for_random_state(self, layout, rng):
        params = SystemParams(layout=layout, omega=2.0, kappa=0.3)
        rho = random_density_matrix(rng, layout.dim)
        drho = liouvillian_apply(params, rho)
        assert abs(np.trace(drho)) < 1e-12
        assert np.max(np.abs(drho - drho.conj().T)) < 1e-12

    def test_dimension_mismatch(self, layout):
        params = SystemParams(layout=layout)
        with pytest.raises(ValueError):
            liouvillian_apply(params, np.eye(7))


class TestUnitaryEvolution:
    def test_rabi_oracle(self, params):
        prop = UnitaryPropagator(SystemModel.from_params(params))
        lay = params.layout
        pe = qubit_operator(lay, 0, "projector_e")
        for n, t in [(1, math.pi / 2), (2, 0.9), (3, 2.2)]:
            rho = prop.evolve(make_state(lay, "g", FockState(n)), t)
            assert rho.expectation(pe) == pytest.approx(rabi_pe(n, t), abs=1e-12)

    def test_vacuum_dark_state(self, params):
        prop = UnitaryPropagator(SystemModel.from_params(params))
        lay = params.layout
        rho0 = make_state(lay, "g", FockState(0))
        rho = prop.evolve(rho0, 7.3)
        assert np.max(np.abs(rho.matrix - rho0.matrix)) < 1e-12

    def test_purity_preserved(self, layout, rng):
        params = SystemParams(layout=layout, omega=4.0)
        prop = UnitaryPropagator(SystemModel.from_params(params))
        rho0 = make_state(layout, "g", FockState(3))
        assert abs(prop.evolve(rho0, 17.0).purity() - 1.0) < 1e-9

    def test_excitation_conserved(self, layout):
        params = SystemParams(layout=layout, omega=1.5)
        prop = UnitaryPropagator(SystemModel.from_params(params))
        n_tot = total_excitation(layout)
        rho0 = make_state(layout, "e", FockState(2))
        for t in np.linspace(0.5, 12.0, 6):
            assert prop.evolve(rho0, t).expectation(n_tot) == pytest.approx(
                3.0, abs=1e-9
            )

    def test_kappa_rejected(self, layout):
        with pytest.raises(ValueError, match="kappa"):
            UnitaryPropagator(
                SystemModel.from_params(SystemParams(layout=layout, kappa=0.1))
            )

    def test_negative_duration_rejected(self, params):
        prop = UnitaryPropagator(SystemModel.from_params(params))
        rho = make_state(params.layout, "g", FockState(0))
        with pytest.raises(ValueError, match="duration"):
            prop.evolve(rho, -1.0)


class TestEchoIdentity:
    def test_composed_propagator_matches_effective_coupling_form(self, rng):
        # independent right-hand side via scipy expm on H0 + g_eff Hint
        lay = build_layout(1, 7)
        params = SystemParams(layout=lay, omega=1.3)
        model = SystemModel.from_params(params)
        prop = UnitaryPropagator(model)
        sz = qubit_operator(lay, 0, "sigma_z").matrix
        h0 = model.h_free.matrix
        hint = model.h_int.matrix
        for _ in range(5):
            total_t = float(rng.uniform(0.5, 12.0))
            tau = float(rng.uniform(0.0, total_t))
            composed = prop.unitary(total_t - tau) @ sz @ prop.unitary(tau)
            g_eff = (2 * tau - total_t) / total_t
            direct = sz @ expm(-1j * (h0 + g_eff * hint) * total_t)
            assert np.max(np.abs(composed - direct)) < 1e-10


class TestDissipativeEvolution:
    def test_pure_decay_profile(self):
        lay = build_layout(1, 3)
        kappa, t = 0.4, 2.5
        params = SystemParams(layout=lay, kappa=kappa, g_coupling=1e-300)
        model = SystemModel.from_params(params)
        rho0 = make_state(lay, "g", FockState(1))
        for prop in (LindbladStepper(model, dt=0.005), LindbladDenseOracle(model)):
            rho = prop.evolve(rho0, t)
            g1, g0 = lay.index("g", 1), lay.index("g", 0)
            assert rho.matrix[g1, g1].real == pytest.approx(
                math.exp(-kappa * t), abs=1e-9
            )
            assert rho.matrix[g0, g0].real == pytest.approx(
                1 - math.exp(-kappa * t), abs=1e-9
            )

    def test_stepper_matches_oracle_random_state(self, layout, rng):
        params = SystemParams(layout=layout, kappa=0.05)
        model = SystemModel.from_params(params)
        rho0 = DensityMatrix(layout, random_density_matrix(rng, layout.dim))
        a = LindbladStepper(model).evolve(rho0, 10.0)
        b = LindbladDenseOracle(model).evolve(rho0, 10.0)
        assert np.max(np.abs(a.matrix - b.matrix)) < 1e-8

    def test_stepper_fourth_order_convergence(self, layout):
        # |g,1> keeps the coarse run inside the positivity gate while the
        # errors stay far above roundoff, so the ratio is clean
        params = SystemParams(layout=layout, kappa=0.1)
        model = SystemModel.from_params(params)
        rho0 = make_state(layout, "g", FockState(1))
        exact = LindbladDenseOracle(model).evolve(rho0, 4.0).matrix
        err = {}
        for dt in (0.01, 0.005):
            approx = LindbladStepper(model, dt=dt).evolve(rho0, 4.0).matrix
            err[dt] = np.max(np.abs(approx - exact))
        assert err[0.005] > 1e-13  # above roundoff, ratio is meaningful
        assert err[0.01] / err[0.005] >= 8.0

    def test_health_maintained_with_decay(self, layout):
        params = SystemParams(layout=layout, kappa=0.5)
        model = SystemModel.from_params(params)
        rho = LindbladStepper(model).evolve(make_state(layout, "g", FockState(3)), 20.0)
        assert rho.trace_defect < 1e-9
        assert rho.hermiticity_defect < 1e-10
        assert rho.min_eigenvalue >= -1e-8

    def test_default_time_step_rule(self, layout):
        fast = SystemModel.from_params(SystemParams(layout=layout, omega=10.0))
        assert default_time_step(fast) == pytest.approx(0.0005)
        slow = SystemModel.from_params(SystemParams(layout=layout, kappa=0.05))
        assert default_time_step(slow) == pytest.approx(0.005)
        hot = SystemModel.from_params(SystemParams(layout=layout, kappa=10.0))
        assert default_time_step(hot) == pytest.approx(0.005)

    def test_make_propagator_kinds(self, params):
        assert make_propagator("unitary", params).kind == "unitary"
        assert make_propagator("stepper", params).kind == "stepper"
        assert make_propagator("oracle", params).kind == "oracle"
        with pytest.raises(ValueError):
            make_propagator("magic", params)
