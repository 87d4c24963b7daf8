"""Tests for the NLS and wave solvers, their data and their checks."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from anderson_lab.errors import BlowUpError, DomainViolationError, NumericalError
from anderson_lab.evolve.checks import (
    energy_apriori_check,
    fit_order,
    nls_domain_apriori_check,
    phase_shift_defect,
    scheme_cross_validation,
    tilde_growth_check,
)
from anderson_lab.evolve.convergence import convergence_experiment
from anderson_lab.evolve.data import (
    initial_sharp,
    initial_velocity,
    lift_to_rung,
    prepare_domain_data,
    prepare_energy_data,
    prepare_wave_data,
)
from anderson_lab.evolve.gronwall import gronwall_report, integrate_log_ode, log_gronwall_bound
from anderson_lab.evolve.nls import nls_solve, nonlinear_term, potential
from anderson_lab.evolve.nonlinearity import Nonlinearity
from anderson_lab.evolve.propagators import propagate_linear, sinc, wave_propagate_linear
from anderson_lab.evolve.trace import TRACE_COLUMNS
from anderson_lab.evolve.wave import wave_force, wave_solve
from anderson_lab.models.evolution import (
    ConvergenceMode,
    EquationKind,
    EvolutionConfig,
    NonlinearityKind,
)
from anderson_lab.spectral.lattice import FourierField, l2_norm, product
from anderson_lab.spectral.sampling import band_limited_field, rough_field


def relative(a: FourierField, b: FourierField) -> float:
    return l2_norm(a - b) / max(l2_norm(b), 1e-300)


def short_run(**updates) -> EvolutionConfig:
    return EvolutionConfig(T=0.02, dt=0.001, record_every=5, **updates)


@pytest.fixture
def u0(spec2, rng) -> FourierField:
    return rough_field(spec2, 2.5, rng, sigma=0.5)


@pytest.fixture
def u1(spec2, rng) -> FourierField:
    return rough_field(spec2, 1.5, rng, sigma=0.5)


class TestNonlinearity:
    """Tests for the gauge-invariant nonlinearities."""

    def test_cubic(self):
        """Test N(r) = r, Phi(r) = r^2 / 2 and g(u) = |u|^2 u."""
        nl = Nonlinearity(NonlinearityKind.CUBIC_DEFOCUSING)

        assert float(nl.Phi(2.0)) == pytest.approx(2.0)
        assert complex(nl.g(np.array(1.0 + 1.0j))) == pytest.approx(2.0 + 2.0j)
        assert float(nl.dg(np.array(2.0))) == pytest.approx(12.0)

    def test_focusing_sign(self):
        """Test the focusing cubic flips the sign."""
        nl = Nonlinearity(NonlinearityKind.CUBIC_FOCUSING)

        assert nl.sign == -1.0
        assert float(nl.g(np.array(2.0))) == pytest.approx(-8.0)

    def test_power(self):
        """Test N(r) = r^{(p-1)/2} and its primitive for p = 5."""
        nl = Nonlinearity(NonlinearityKind.POWER, power=5.0)

        assert float(nl.N(3.0)) == pytest.approx(9.0)
        assert float(nl.Phi(3.0)) == pytest.approx(9.0)

    def test_bounded_saturates(self):
        """Test the bounded nonlinearity stays below its taper scale."""
        nl = Nonlinearity(NonlinearityKind.BOUNDED, taper_scale=4.0)

        assert float(nl.N(1e6)) == pytest.approx(4.0)
        assert float(nl.Phi(0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_linear_config(self):
        """Test linear equations drop the nonlinearity."""
        config = EvolutionConfig(equation=EquationKind.LINEAR_NLS)

        assert Nonlinearity.from_config(config).is_zero


class TestNonlinearGrid:
    """Tests for the alias-free evaluation of the nonlinear terms."""

    @pytest.fixture
    def field(self, spec2, rng):
        return band_limited_field(spec2, rng, spec2.K, reality=False) * 0.1

    def test_cubic_term_is_exact(self, field):
        """Test g(u) = |u|^2 u matches the exact lattice product."""
        nl = Nonlinearity(NonlinearityKind.CUBIC_DEFOCUSING)
        exact = product(field, field.conj(), field)

        assert relative(nonlinear_term(nl, field), exact) < 1e-12

    def test_collocation_grid_aliases(self, field):
        """Test the collocation grid alone misses the exact cubic product."""
        nl = Nonlinearity(NonlinearityKind.CUBIC_DEFOCUSING)
        n = field.spec.side
        collocated = FourierField.from_grid(field.spec, nl.g(field.grid(n)), reality=False)

        assert relative(collocated, product(field, field.conj(), field)) > 1e-6

    def test_quartic_potential_is_exact(self, field):
        """Test the potential equals 1/4 int |u|^4 computed on the lattice."""
        nl = Nonlinearity(NonlinearityKind.CUBIC_DEFOCUSING)
        quartic = product(field, field.conj(), field, field.conj())
        exact = 0.25 * quartic.mean.real

        assert potential(nl, field) == pytest.approx(exact, rel=1e-12)

    def test_wave_force_is_exact(self, field):
        """Test the real wave force is -u^3 on the lattice."""
        nl = Nonlinearity(NonlinearityKind.CUBIC_DEFOCUSING)
        u = field.real_part

        assert relative(wave_force(nl, u), -product(u, u, u)) < 1e-12


class TestEvolutionConfig:
    """Tests for the evolution parameters."""

    def test_horizon_below_step(self):
        """Test T must cover at least one step."""
        with pytest.raises(ValidationError):
            EvolutionConfig(T=0.001, dt=0.01)

    def test_step_count(self):
        """Test n_steps rounds T / dt."""
        assert short_run().n_steps == 20


class TestNLS:
    """Tests for the Schroedinger solver."""

    def test_strang_conserves_mass(self, bundle2, u0):
        """Test the split scheme is unitary to rounding."""
        trace = nls_solve(bundle2, u0, short_run())

        assert abs(trace.mass[-1] - trace.mass[0]) / trace.mass[0] < 1e-9
        assert trace.times == pytest.approx([0.0, 0.005, 0.01, 0.015, 0.02])

    def test_linear_matches_propagator(self, bundle2, u0):
        """Test the linear run equals e^{-itH} u0."""
        trace = nls_solve(bundle2, u0, short_run(equation=EquationKind.LINEAR_NLS))

        assert relative(trace.snapshots[-1], propagate_linear(bundle2, u0, 0.02)) < 1e-10

    def test_linear_conserves_energy(self, bundle2, u0):
        """Test the linear energy is constant."""
        trace = nls_solve(bundle2, u0, short_run(equation=EquationKind.LINEAR_NLS))

        assert abs(trace.energy[-1] - trace.energy[0]) <= 1e-9 * abs(trace.energy[0])

    def test_schemes_agree(self, bundle2, u0):
        """Test Strang and the Duhamel fixed point reach the same state."""
        assert scheme_cross_validation(bundle2, u0, short_run()) < 1e-3

    def test_phase_shift(self, bundle2, u0):
        """Test shifting K_Xi by c multiplies the solution by e^{ict}."""
        assert phase_shift_defect(bundle2, u0, short_run(), 3.0) < 1e-9

    def test_focusing_guard(self, bundle2, u0):
        """Test focusing runs refuse large data."""
        config = short_run(
            nonlinearity=NonlinearityKind.CUBIC_FOCUSING, focusing_mass_limit=1e-6
        )

        with pytest.raises(DomainViolationError, match="small data"):
            nls_solve(bundle2, u0, config)

    def test_blow_up_threshold(self, bundle2, u0):
        """Test the L-infinity guard stops the run."""
        with pytest.raises(BlowUpError) as info:
            nls_solve(bundle2, u0, short_run(blowup_linf=1e-6))
        assert info.value.time == 0.0

    def test_trace_rows(self, bundle2, u0):
        """Test trace rows carry every column and leave wave-only columns empty."""
        trace = nls_solve(bundle2, u0, short_run())

        rows = trace.rows()

        assert len(rows) == len(trace) == 5
        assert set(rows[0]) == set(TRACE_COLUMNS)
        assert rows[0]["tilde_energy"] is None
        assert trace.index_at(0.011) == 2


class TestWave:
    """Tests for the wave solver."""

    def test_linear_conserves_energy(self, bundle2, u0, u1):
        """Test the exact linear flow conserves the energy."""
        trace = wave_solve(bundle2, u0, u1, short_run(equation=EquationKind.LINEAR_WAVE))

        assert abs(trace.energy[-1] - trace.energy[0]) <= 1e-9 * abs(trace.energy[0])

    def test_linear_matches_propagator(self, bundle2, u0, u1):
        """Test the stepped linear run equals the one-shot propagator."""
        trace = wave_solve(bundle2, u0, u1, short_run(equation=EquationKind.LINEAR_WAVE))
        u_T, v_T = wave_propagate_linear(bundle2, u0, u1, 0.02)

        assert relative(trace.snapshots[-1], u_T) < 1e-9
        assert relative(trace.velocities[-1], v_T) < 1e-9

    def test_tilde_energy_check(self, bundle2, u0, u1):
        """Test the velocity energy of a linear run is positive and conserved."""
        trace = wave_solve(bundle2, u0, u1, short_run(equation=EquationKind.LINEAR_WAVE))

        report = tilde_growth_check(trace)

        assert report.passed
        assert report.values["identity_residual"] < 1e-8

    def test_supercritical_warning(self, null_bundle3, rng):
        """Test 3-d powers above 5 are flagged."""
        spec = null_bundle3.spec
        u0 = rough_field(spec, 2.5, rng, sigma=0.01)
        config = EvolutionConfig(
            equation=EquationKind.WAVE,
            nonlinearity=NonlinearityKind.POWER,
            power=7.0,
            T=0.002,
            dt=0.001,
        )

        trace = wave_solve(null_bundle3, u0, FourierField.zeros(spec), config)

        assert any("supercritical" in w for w in trace.warnings)

    def test_sinc(self):
        """Test sinc(0) = 1 and its zeros."""
        values = sinc(np.array([0.0, 1e-6, math.pi]))

        assert values[0] == 1.0
        assert values[1] == pytest.approx(1.0)
        assert abs(values[2]) < 1e-15


class TestApriori:
    """Tests for the a-priori checks along trajectories."""

    def test_linear_domain_envelope(self, bundle2, u0):
        """Test ||H u(t)|| stays in its envelope for a linear run."""
        config = short_run(equation=EquationKind.LINEAR_NLS, keep_snapshots=True)
        trace = nls_solve(bundle2, u0, config)

        report = nls_domain_apriori_check(trace, bundle2, u0)

        assert report.passed
        assert report.values["max_ratio"] <= 1.0 + 1e-9

    def test_energy_ratios(self, bundle2, u0):
        """Test the energy check reports finite ratios."""
        trace = nls_solve(bundle2, u0, short_run(keep_snapshots=True))

        report = energy_apriori_check(trace, bundle2)

        assert report.passed
        assert report.values["mass_ratio"] == pytest.approx(1.0, rel=1e-9)

    def test_energy_needs_snapshots(self, bundle2, u0):
        """Test the energy check refuses a trace without snapshots."""
        trace = nls_solve(bundle2, u0, short_run())

        with pytest.raises(NumericalError):
            energy_apriori_check(trace, bundle2)


class TestOrder:
    """Tests for the order fit."""

    def test_second_order_slope(self):
        """Test the slope of drifts proportional to dt^2."""
        dts = [0.004, 0.002, 0.001]

        fit = fit_order(dts, [3.0 * dt**2 for dt in dts])

        assert fit.slope == pytest.approx(2.0, abs=1e-10)

    def test_needs_two_drifts(self):
        """Test the fit refuses fewer than two positive drifts."""
        with pytest.raises(NumericalError):
            fit_order([0.002, 0.001], [1e-6, 0.0])


class TestGronwall:
    """Tests for the logarithmic Gronwall bound."""

    def test_bound_at_zero(self):
        """Test the bound starts at h0 - 1."""
        h0 = math.e**2

        assert log_gronwall_bound(1.0, h0, 0.0) == pytest.approx(h0 - 1.0)

    def test_domain(self):
        """Test log h0 < 1 and C2 < 1 are rejected."""
        with pytest.raises(DomainViolationError):
            log_gronwall_bound(1.0, 2.0, 0.1)
        with pytest.raises(DomainViolationError):
            log_gronwall_bound(0.5, math.e**2, 0.1)

    def test_ode_solution(self):
        """Test the integrator against rho(t) = exp(e^t) - 1 for C2 = 1."""
        rho = integrate_log_ode(1.0, math.e - 1.0, [0.0, 0.5])

        assert rho[1] == pytest.approx(math.exp(math.exp(0.5)) - 1.0, rel=1e-8)

    def test_report(self):
        """Test the bound dominates its own trajectory and sits below h0 at zero."""
        report = gronwall_report(1.0, math.e**2, horizon=0.5, points=11)

        assert report.dominates
        assert report.bound_at_zero_below_h0
        assert all(b < h for b, h in zip(report.bound, report.from_h0))


class TestInitialData:
    """Tests for rung data preparation."""

    def test_domain_data_on_own_rung(self, bundle2):
        """Test lifting to the reference rung itself is the identity."""
        sharp = initial_sharp(bundle2.spec, 3, 0.5)

        data = prepare_domain_data(bundle2, bundle2, sharp)

        assert data.residual < 1e-10
        assert data.distance <= 1e-9 * l2_norm(data.u0)

    def test_energy_data_smooths(self, bundle2, u0):
        """Test the energy data is u0 at eps = 0 and strictly smaller for eps > 0."""
        same = prepare_energy_data(bundle2, bundle2, u0, 0.0)
        smoothed = prepare_energy_data(bundle2, bundle2, u0, 0.1)

        assert same is u0
        assert l2_norm(smoothed) < l2_norm(u0)

    def test_wave_data_on_own_rung(self, bundle2, u0):
        """Test the velocity map is the identity on the reference rung."""
        u1 = initial_velocity(bundle2.spec, 3, 0.5)

        _, u1_eps = prepare_wave_data(bundle2, bundle2, u0, u1)

        assert relative(u1_eps, u1) < 1e-10

    def test_shift_mismatch_warning(self, bundle2, null_bundle2, u0, caplog):
        """Test rungs with a different shift are reported."""
        lift_to_rung(bundle2, null_bundle2, u0)

        assert "differs from the reference shift" in caplog.text


class TestConvergenceExperiment:
    """Tests for the eps-ladder convergence experiment."""

    def test_identical_rungs(self, bundle2):
        """Test two copies of one rung are at distance zero."""
        table, traces = convergence_experiment(
            [bundle2, bundle2],
            [0.25, 0.25],
            short_run(),
            ConvergenceMode.NLS_DOMAIN,
            times=[0.01, 0.02],
            seed=3,
        )

        assert len(traces) == 2
        assert len(table.rows) == 2
        assert all(row.phi < 1e-6 for row in table.rows)

    def test_mode_mismatch(self, bundle2):
        """Test the wave mode needs a wave equation."""
        with pytest.raises(ValueError, match="does not match"):
            convergence_experiment(
                [bundle2], [0.25], short_run(), ConvergenceMode.WAVE, times=[0.01], seed=3
            )
