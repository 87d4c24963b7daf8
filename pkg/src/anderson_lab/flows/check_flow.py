"""check command: the invariant suites at desk scale with a pass/fail table.

Every check compares one measured value against a fixed tolerance; a failed check marks
the run CHECK_FAILED and the CLI exits with status 4. Checks that compare a lattice with
its doubling skip with a warning when the doubled operator does not fit in memory.
"""

import logging
import math
from functools import partial
from typing import Callable

import numpy as np

from ..errors import ResolutionError
from ..evolve.checks import fit_order, order_test, phase_shift_defect, scheme_cross_validation
from ..evolve.data import domain_initial, initial_sharp, initial_velocity
from ..evolve.gronwall import gronwall_report
from ..evolve.nls import nls_solve
from ..evolve.wave import tilde_identity_residual, wave_solve
from ..models.evolution import EquationKind, EvolutionConfig, Scheme
from ..models.operator import InequalityReport
from ..models.run import RunConfig
from ..noise.enhance import EnhancedNoise2D, EnhancedNoise3D, exp_lift
from ..noise.mollifiers import get_mollifier
from ..noise.renorm import renorm_rates
from ..operators.anderson2d import (
    OperatorBundle2D,
    agreement_defect,
    apply_A,
    gamma_inverse,
    gamma_map,
    pair_from_u,
)
from ..operators.anderson3d import (
    OperatorBundle3D,
    apply_A_3d,
    conjugation_defect,
    direct_defect,
    gamma_inverse_3d,
    gamma_map_3d,
    triple_from_flat,
    z_product_check,
)
from ..operators.bundle import DOMAIN_REGULARITY, OperatorBundle, h_norm
from ..operators.diagnostics import (
    count_inversions,
    functional_ineq_report,
    gamma_consistency,
    ratio_range,
    symmetry_defect,
)
from ..operators.matrix import apply_regularized
from ..paracalc.commutators import adjoint_defect_blocks, adjoint_defect_D
from ..paracalc.products import paraproduct
from ..paracalc.sweeps import ESTIMATE_CASES, resolution_comparison
from ..spectral.lattice import FourierField, l2_norm, linf_norm, product
from ..spectral.sampling import band_limited_field, rough_field
from ..storage.artifacts import Cell
from .base import ExperimentFlow
from .rungs import Noise, bundle_task, holdout, noise_task
from .solve_flow import relative_drift

logger = logging.getLogger(__name__)

BONY_TOL = 1e-10
D_ORACLE_TOL = 1e-10
AGREEMENT_TOL = 1e-7
# e^W is truncated to the lattice on the direct 3-d route
DIRECT_ROUTE_TOL = 1e-3
HERMITIAN_TOL = 1e-12
SYMMETRY_RATIO = 0.7
SYMMETRY_FLOOR = 1e-10
GAMMA_LINF_RATIO = 2.0
GAMMA_H_BOUND = {2: (0.8, 3.0), 3: (1.0, 2.0)}
GAMMA_MAX_ITERATIONS = 50
GAMMA_RESIDUAL_TOL = 1e-10
GAMMA_CONSISTENCY_TOL = 1e-8
RENORM_SPREAD = 0.15
INEQUALITY_FACTOR = 2.0
Z_SPLIT_TOL = 1e-10
MASS_DRIFT_TOL = 1e-8
WAVE_ENERGY_TOL = 1e-10
SCHEME_TOL = 1e-3
PHASE_SHIFT_TOL = 1e-10
ORDER_SLOPE = 2.0
ORDER_SLOPE_TOL = 0.3
TILDE_FLOOR = 1e-12

D_ORACLE_MAX_K = 16
CHECK_HORIZON = 0.1
PHASE_SHIFT = 1.0
GRONWALL_CASES = [(c2, h0) for c2 in (1.0, 2.0) for h0 in (math.e, math.e**2)]

CHECK_COLUMNS = ["name", "passed", "value", "threshold", "detail"]


def rung_noise(bundle: OperatorBundle) -> Noise:
    if isinstance(bundle, OperatorBundle2D):
        return bundle.noise
    assert isinstance(bundle, OperatorBundle3D)
    return bundle.noise


def inequality_values(report: InequalityReport) -> list[float]:
    """The report's ratios in a fixed order."""
    values = [report.brezis_gallouet, report.linf_domain]
    values += [report.lp_ratios[p] for p in sorted(report.lp_ratios)]
    if report.agmon is not None:
        values.append(report.agmon)
    return values


class CheckFlow(ExperimentFlow):
    """Bony, commutator and operator oracles, solver invariants and the log-Gronwall bound."""

    command = "check"

    def record_max(
        self,
        name: str,
        values: list[float],
        threshold: float,
        detail: str = "",
    ) -> None:
        worst = max(values) if values else 0.0
        self.add_check(name, worst, threshold, worst <= threshold, detail)

    def _rng(self, stream: int, i: int) -> np.random.Generator:
        return np.random.default_rng([self.config.noise.seed, stream, i])

    def doubled(self) -> RunConfig:
        """The same run at twice the cutoff."""
        torus = self.config.torus
        return self.config.model_copy(update={"torus": torus.with_K(2 * torus.K)})

    def at_double_resolution(self, name: str, check: Callable[[RunConfig], None]) -> None:
        try:
            check(self.doubled())
        except ResolutionError as e:
            logger.warning(f"Skipping {name} at K={2 * self.config.torus.K}: {e}")

    def check_bony(self) -> None:
        spec = self.config.torus
        samples = self.config.check.bony_samples
        defects = []
        for i in range(samples):
            rng = self._rng(31, i)
            f = band_limited_field(spec, rng, spec.K // 2)
            g = band_limited_field(spec, rng, spec.K // 2)
            fg = product(f, g)
            defects.append(l2_norm(fg - paraproduct(f, g).total) / max(l2_norm(fg), 1e-300))
        self.record_max("bony_identity", defects, BONY_TOL, f"{samples} pairs")

    def check_d_oracle(self) -> None:
        spec = self.config.torus
        if spec.K > D_ORACLE_MAX_K:
            spec = spec.with_K(D_ORACLE_MAX_K)
        defects = []
        for i in range(self.config.check.d_oracle_samples):
            rng = self._rng(37, i)
            f, g, h = (band_limited_field(spec, rng, spec.K) for _ in range(3))
            gap = abs(adjoint_defect_D(f, g, h) - adjoint_defect_blocks(f, g, h))
            defects.append(gap / max(l2_norm(f) * l2_norm(g) * l2_norm(h), 1e-300))
        self.record_max("d_block_oracle", defects, D_ORACLE_TOL, f"K={spec.K}")

    def check_agreement(self, bundle: OperatorBundle) -> None:
        spec = self.config.torus
        variant = self.config.operator.g_variant
        defects, direct = [], []
        for i in range(self.config.check.agreement_samples):
            u = rough_field(spec, DOMAIN_REGULARITY, self._rng(41, i))
            if isinstance(bundle, OperatorBundle2D):
                noise = bundle.noise
                reference = apply_regularized(noise.xi, noise.c_eps, u)
                gap = agreement_defect(u, noise, bundle.N, variant)
                defects.append(gap / max(l2_norm(reference), 1e-300))
            else:
                assert isinstance(bundle, OperatorBundle3D)
                args = (u, bundle.noise, bundle.N, bundle.lift, variant)
                defects.append(conjugation_defect(*args))
                direct.append(direct_defect(*args))
        self.record_max("operator_agreement", defects, AGREEMENT_TOL, f"G {variant.value}")
        if direct:
            self.record_max(
                "operator_agreement_direct", direct, DIRECT_ROUTE_TOL, "e^W truncated to K"
            )

    def symmetry_defects(self, noise: Noise, N: int) -> list[float]:
        """Relative |<Au, v> - <u, Av>| on rough pairs, nested under K -> 2K."""
        variant = self.config.operator.g_variant
        lift = exp_lift(noise) if isinstance(noise, EnhancedNoise3D) else None
        defects = []
        for i in range(self.config.check.symmetry_pairs):
            u = rough_field(noise.spec, DOMAIN_REGULARITY, self._rng(43, i))
            v = rough_field(noise.spec, DOMAIN_REGULARITY, self._rng(47, i))
            if isinstance(noise, EnhancedNoise2D):
                Au = apply_A(pair_from_u(u, noise, N), noise, variant)
                Av = apply_A(pair_from_u(v, noise, N), noise, variant)
            else:
                tu, tv = triple_from_flat(u, noise, N, lift), triple_from_flat(v, noise, N, lift)
                u, v = tu.u, tv.u
                Au = apply_A_3d(tu, noise, lift, variant)
                Av = apply_A_3d(tv, noise, lift, variant)
            scale = l2_norm(Au) * l2_norm(v) + l2_norm(u) * l2_norm(Av)
            defects.append(symmetry_defect(u, Au, v, Av, scale))
        return defects

    def check_symmetry(self, bundle: OperatorBundle, eps: float) -> None:
        K = self.config.torus.K
        coarse = max(self.symmetry_defects(rung_noise(bundle), bundle.N))

        def compare(config: RunConfig) -> None:
            fine = max(self.symmetry_defects(noise_task(config, eps), bundle.N))
            detail = f"K={K}: {coarse:.3e}, K={2 * K}: {fine:.3e}"
            if fine <= SYMMETRY_FLOOR:
                self.add_check("symmetry_defect_doubling", fine, SYMMETRY_FLOOR, True, detail)
                return
            ratio = fine / coarse if coarse > 0 else math.inf
            self.add_check(
                "symmetry_defect_doubling", ratio, SYMMETRY_RATIO, ratio <= SYMMETRY_RATIO, detail
            )

        self.at_double_resolution("symmetry_defect_doubling", compare)

    def gamma_image(
        self, bundle: OperatorBundle, u_sharp: FourierField
    ) -> tuple[FourierField, int, float]:
        """(Gamma u_sharp, fixed-point iterations, residual); u_flat in 3-d."""
        if isinstance(bundle, OperatorBundle2D):
            pair = gamma_map(u_sharp, bundle.noise, bundle.N)
            return pair.u, pair.iterations, pair.residual
        assert isinstance(bundle, OperatorBundle3D)
        triple = gamma_map_3d(u_sharp, bundle.noise, bundle.N, bundle.lift)
        return triple.u_flat, triple.iterations, triple.residual

    def check_gamma(self, bundle: OperatorBundle) -> None:
        spec = self.config.torus
        s, h_bound = GAMMA_H_BOUND[spec.dim]
        linf, linf_base, h, h_base = [], [], [], []
        iterations, residuals = [], []
        for i in range(self.config.check.gamma_samples):
            f = rough_field(spec, DOMAIN_REGULARITY, self._rng(53, i))
            image, steps, residual = self.gamma_image(bundle, f)
            linf.append(linf_norm(image))
            linf_base.append(linf_norm(f))
            h.append(h_norm(image, s))
            h_base.append(h_norm(f, s))
            iterations.append(float(steps))
            residuals.append(residual / max(l2_norm(f), 1e-300))
        _, linf_max = ratio_range(linf, linf_base)
        _, h_max = ratio_range(h, h_base)
        detail = f"N={bundle.N}"
        passed = linf_max <= GAMMA_LINF_RATIO
        self.add_check("gamma_linf", linf_max, GAMMA_LINF_RATIO, passed, detail)
        self.add_check(f"gamma_h{s:g}", h_max, h_bound, h_max <= h_bound, detail)
        self.record_max("gamma_iterations", iterations, GAMMA_MAX_ITERATIONS)
        self.record_max("gamma_residual", residuals, GAMMA_RESIDUAL_TOL)

    def check_gamma_consistency(self, bundle: OperatorBundle) -> None:
        ladder = sorted(self.eps_list, reverse=True)
        reference = rung_noise(bundle)
        noises = [noise_task(self.config, eps) for eps in ladder[:-1]] + [reference]
        N = bundle.N
        inverses: list[Callable[[FourierField], FourierField]]
        if isinstance(bundle, OperatorBundle2D):
            fine_2d = bundle.noise
            inverses = [
                partial(gamma_inverse, noise=n, N=N)
                for n in noises
                if isinstance(n, EnhancedNoise2D)
            ]

            def reference_gamma(u_sharp: FourierField) -> FourierField:
                return gamma_map(u_sharp, fine_2d, N).u

        else:
            assert isinstance(bundle, OperatorBundle3D)
            fine_3d, lift = bundle.noise, bundle.lift
            inverses = [
                partial(gamma_inverse_3d, noise=n, N=N)
                for n in noises
                if isinstance(n, EnhancedNoise3D)
            ]

            def reference_gamma(u_sharp: FourierField) -> FourierField:
                return gamma_map_3d(u_sharp, fine_3d, N, lift).u_flat

        u = reference_gamma(rough_field(self.config.torus, DOMAIN_REGULARITY, self._rng(59, 0)))
        scale = max(h_norm(u, 1.0), 1e-300)
        distances = [d / scale for d in gamma_consistency(u, inverses, reference_gamma, 1.0)]
        inversions = count_inversions(distances)
        allowed = self.config.convergence.allowed_inversions
        last = distances[-1]
        ladder_text = ", ".join(f"{d:.2e}" for d in distances)
        self.add_check(
            "gamma_consistency",
            last,
            GAMMA_CONSISTENCY_TOL,
            last <= GAMMA_CONSISTENCY_TOL and inversions <= allowed,
            f"{ladder_text}; {inversions} inversions",
        )

    def check_renorm(self) -> None:
        config = self.config
        dim = config.torus.dim
        rates = renorm_rates(
            config.check.renorm_eps,
            get_mollifier(config.noise.mollifier),
            dim,
            config.noise.symbol_scale,
        )
        tail = rates[-3:]
        spread = (max(tail) - min(tail)) / max(max(abs(r) for r in tail), 1e-300)
        label = "d c_eps / d log(1/eps)" if dim == 2 else "eps c1_eps"
        values = ", ".join(f"{r:.4g}" for r in tail)
        self.add_check(
            "renorm_asymptotics",
            spread,
            RENORM_SPREAD,
            spread < RENORM_SPREAD,
            f"{label}: {values}",
        )

    def inequality_report(self, bundle: OperatorBundle) -> InequalityReport:
        held = holdout(bundle, self.config.check.inequality_samples, self.config.noise.seed)
        return functional_ineq_report(bundle, held.samples, agmon=bundle.spec.dim == 3)

    def check_inequalities(self, bundle: OperatorBundle, eps: float) -> None:
        coarse = inequality_values(self.inequality_report(bundle))

        def compare(config: RunConfig) -> None:
            fine = inequality_values(self.inequality_report(bundle_task(config, eps)))
            finite = all(math.isfinite(v) for v in coarse + fine)
            lo, hi = ratio_range(fine, coarse)
            factor = max(hi, 1.0 / lo) if lo > 0 else math.inf
            self.add_check(
                "functional_inequality_stability",
                factor,
                INEQUALITY_FACTOR,
                finite and factor <= INEQUALITY_FACTOR,
                f"K -> {config.torus.K}",
            )

        self.at_double_resolution("functional_inequality_stability", compare)

    def check_lower_bound(self, bundle: OperatorBundle) -> None:
        held = holdout(bundle, self.config.operator.holdout_samples, self.config.noise.seed)
        worst = min(held.slacks)
        self.add_check(
            "lower_bound_holdout",
            worst,
            0.0,
            worst >= 0.0,
            f"C_Xi={bundle.C_Xi:.6g}, holdout needs {held.constant:.6g}",
        )

    def check_z_product(self, bundle: OperatorBundle) -> None:
        if not isinstance(bundle, OperatorBundle3D):
            return
        report = z_product_check(bundle.noise, self.config.alpha)
        self.add_check(
            "z_product_split",
            report.relative,
            Z_SPLIT_TOL,
            report.relative <= Z_SPLIT_TOL,
            f"paralinear remainder {report.paralinear_remainder:.3e}",
        )

    def check_estimates(self) -> None:
        samples = self.config.check.sweep_samples
        for name in ESTIMATE_CASES:
            comparison = resolution_comparison(
                name, self.config.torus, samples, self.config.noise.seed
            )
            self.add_check(
                f"estimate_{name}",
                comparison.factor,
                2.0,
                comparison.stable,
                f"max ratio {comparison.coarse.max_ratio:.3g} -> {comparison.fine.max_ratio:.3g}",
            )

    def evolution_config(self, equation: EquationKind) -> EvolutionConfig:
        base = self.config.evolution
        T = min(base.T, CHECK_HORIZON)
        return base.model_copy(
            update={
                "equation": equation,
                "T": T,
                "dt": min(base.dt, T),
                "scheme": Scheme.STRANG,
                "keep_snapshots": False,
            }
        )

    def check_solvers(self, bundle: OperatorBundle) -> None:
        config = self.config
        seed, data = config.noise.seed, config.data
        u0 = domain_initial(bundle, initial_sharp(config.torus, seed, data.amplitude))
        u1 = initial_velocity(config.torus, seed, data.velocity_amplitude)
        nls = self.evolution_config(EquationKind.NLS)

        trace = nls_solve(bundle, u0, nls)
        self.record_max("nls_mass_drift", [relative_drift(trace.mass)], MASS_DRIFT_TOL)

        linear_wave = self.evolution_config(EquationKind.LINEAR_WAVE)
        trace = wave_solve(bundle, u0, u1, linear_wave)
        self.record_max("linear_wave_energy", [relative_drift(trace.energy)], WAVE_ENERGY_TOL)

        gap = scheme_cross_validation(bundle, u0, nls)
        self.record_max("scheme_cross_validation", [gap], SCHEME_TOL, f"dt={nls.dt:g}")

        defect = phase_shift_defect(bundle, u0, nls, PHASE_SHIFT)
        self.record_max("phase_shift", [defect], PHASE_SHIFT_TOL, f"c={PHASE_SHIFT:g}")

        self.check_orders(bundle, u0, u1)

    def check_orders(self, bundle: OperatorBundle, u0: FourierField, u1: FourierField) -> None:
        dts = self.config.check.order_dts
        cases = [("nls_energy_order", EquationKind.NLS), ("wave_energy_order", EquationKind.WAVE)]
        for name, equation in cases:
            run = self.evolution_config(equation).model_copy(update={"T": CHECK_HORIZON})
            fit = order_test(bundle, u0, run, dts, u1 if run.is_wave else None)
            gap = abs(fit.slope - ORDER_SLOPE)
            detail = f"slope {fit.slope:.3f}"
            self.add_check(name, gap, ORDER_SLOPE_TOL, gap <= ORDER_SLOPE_TOL, detail)

        wave = self.evolution_config(EquationKind.WAVE)
        residuals = []
        for dt in dts:
            run = wave.model_copy(update={"T": CHECK_HORIZON, "dt": dt, "record_every": 1})
            residuals.append(tilde_identity_residual(wave_solve(bundle, u0, u1, run)))
        threshold = ORDER_SLOPE - ORDER_SLOPE_TOL
        worst = max(residuals)
        if worst <= TILDE_FLOOR:
            self.add_check("tilde_identity_order", worst, TILDE_FLOOR, True, "rounding level")
            return
        slope = fit_order(dts, residuals).slope
        self.add_check(
            "tilde_identity_order",
            slope,
            threshold,
            slope >= threshold,
            f"max residual {worst:.3e}",
        )

    def check_gronwall(self) -> None:
        cases = []
        for C2, h0 in GRONWALL_CASES:
            report = gronwall_report(C2, h0)
            margin = min(b - r for b, r in zip(report.bound, report.from_shifted))
            from_h0 = report.from_h0_margin
            detail = f"bound - ODE from h0-1; from h0: bound+1-rho {from_h0:.3e}"
            if from_h0 < 0:
                detail += " (the bound starts at h0 - 1)"
            self.add_check(f"gronwall_C2={C2:g}_h0={h0:.4g}", margin, 0.0, report.dominates, detail)
            cases.append({"C2": C2, "h0": h0, "shifted_margin": margin, "from_h0_margin": from_h0})
        self.state.records["gronwall_from_h0"] = cases

    def run(self) -> None:
        eps = min(self.eps_list)
        bundle = bundle_task(self.config, eps)
        self.check_bony()
        self.check_d_oracle()
        self.check_estimates()
        self.check_renorm()
        hermitian = bundle.matrix_eps.hermitian_defect()
        self.add_check("hermitian_defect", hermitian, HERMITIAN_TOL, hermitian <= HERMITIAN_TOL)
        self.check_agreement(bundle)
        self.check_z_product(bundle)
        self.check_symmetry(bundle, eps)
        self.check_gamma(bundle)
        self.check_gamma_consistency(bundle)
        self.check_lower_bound(bundle)
        self.check_inequalities(bundle, eps)
        logger.info(f"Operator checks done at eps={eps:g}; running the solvers")
        self.check_solvers(bundle)
        self.check_gronwall()
        rows: list[dict[str, Cell]] = [
            {c: getattr(result, c) for c in CHECK_COLUMNS} for result in self.state.checks
        ]
        self.store.write_table("checks", rows, CHECK_COLUMNS)
        failed = [c.name for c in self.state.checks if not c.passed]
        if failed:
            logger.warning(f"Checks failed at eps={eps:g}: {', '.join(failed)}")
