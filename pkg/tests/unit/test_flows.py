"""Tests for the experiment flows behind the CLI commands."""

import numpy as np
import pytest

from anderson_lab.config.loader import load_run_config
from anderson_lab.errors import ConfigError
from anderson_lab.flows import (
    FLOWS,
    CheckFlow,
    ConvergeFlow,
    NoiseFlow,
    OperatorFlow,
    SolveFlow,
    map_rungs,
    noise_task,
    with_common_shift,
)
from anderson_lab.flows.rungs import bundle_task, holdout
from anderson_lab.models.flow_state import ExecutionStatus


def merged(overrides, **sections):
    out = {k: dict(v) if isinstance(v, dict) else v for k, v in overrides.items()}
    for name, values in sections.items():
        out[name] = {**out.get(name, {}), **values}
    return out


class TestRungs:
    """Tests for the per-rung tasks."""

    def test_map_keeps_order(self, tiny_config):
        """Test rung results follow the eps list."""
        noises = map_rungs(noise_task, tiny_config, [0.25, 0.125])

        assert [n.eps for n in noises] == [0.25, 0.125]
        assert noises[0].c_eps < noises[1].c_eps

    @pytest.mark.slow
    def test_process_pool_matches_serial(self, tiny_config):
        """Test a worker pool returns the same constants as the serial loop."""
        serial = map_rungs(noise_task, tiny_config, [0.25, 0.125])
        pooled = map_rungs(noise_task, tiny_config, [0.25, 0.125], workers=2)

        assert [n.c_eps for n in pooled] == [n.c_eps for n in serial]

    def test_common_shift(self, tiny_config):
        """Test every rung ends on the largest shift."""
        bundles = [bundle_task(tiny_config, eps) for eps in (0.25, 0.125)]

        shifted = with_common_shift(bundles)

        top = max(b.K_Xi for b in bundles)
        assert [b.K_Xi for b in shifted] == [top, top]
        assert shifted[0].matrix_eps is bundles[0].matrix_eps

    def test_holdout(self, tiny_config):
        """Test the holdout set satisfies the calibrated bound."""
        bundle = bundle_task(tiny_config, 0.125)

        held = holdout(bundle, 3, seed=tiny_config.noise.seed)

        assert len(held.samples) == len(held.slacks) == len(held.g_deviations) == 3
        assert min(held.slacks) >= 0
        assert held.constant <= bundle.C_Xi

    def test_registry_of_flows(self):
        """Test every command has a flow."""
        assert set(FLOWS) == {"noise", "operator", "solve", "converge", "check"}


class TestNoiseFlow:
    """Tests for the noise command."""

    def test_tables_and_fields(self, tiny_config, tmp_path, registry):
        """Test constants, ladders and fields are written and registered."""
        flow = NoiseFlow(tiny_config, root=tmp_path, registry=registry)

        status = flow.kickoff()

        assert status["execution_status"] == "completed"
        constants = flow.store.read_table("constants")
        assert [row["eps"] for row in constants] == [0.25, 0.125]
        assert constants[0]["c_eps"] == pytest.approx(constants[0]["c_eps_direct"], rel=1e-12)
        assert flow.store.read_table("ladder_xi")[0]["difference"] == 0.0
        assert len(flow.store.read_table("ladder_Xi2")) == 1
        for name in ("xi_0", "X_1", "Xi2_1"):
            assert (flow.store.fields_dir / f"{name}.txt").exists()
        assert registry.completed(flow.state.run_hash) is not None

    def test_3d_tables(self, tiny_overrides, tmp_path):
        """Test the 3-d run writes c1, c2 and the X1 ladder."""
        overrides = merged(tiny_overrides, torus={"dim": 3, "K": 4})
        overrides["noise"] = {**overrides["noise"], "eps": [0.5, 0.25]}
        flow = NoiseFlow(load_run_config(None, overrides), root=tmp_path)

        flow.kickoff()

        row = flow.store.read_table("constants")[0]
        assert set(row) == {"eps", "c1_eps", "c2_eps", "c1_eps_direct", "eps_c1_eps"}
        assert (flow.store.tables_dir / "ladder_X1.csv").exists()
        assert (flow.store.fields_dir / "X2_0.txt").exists()


class TestOperatorFlow:
    """Tests for the operator command."""

    def test_spectra_and_ladder(self, tiny_config, tmp_path):
        """Test the common shift puts the top of the coarse spectrum at -margin."""
        flow = OperatorFlow(tiny_config, root=tmp_path)

        flow.kickoff()

        spectrum = np.load(flow.store.fields_dir / "spectrum_0.npy")
        assert spectrum.max() == pytest.approx(-1.0, abs=1e-9)
        bundles = flow.store.read_table("bundles")
        assert bundles[0]["K_Xi"] == bundles[1]["K_Xi"]
        assert all(row["min_slack"] >= 0 for row in bundles)
        assert len(flow.store.read_table("resolvent_ladder")) == 1
        inequalities = flow.store.read_table("inequalities")
        assert 0 < inequalities[0]["samples"] <= 4
        assert inequalities[0]["agmon"] is None
        assert flow.state.records["N"] == [0, 0]
        assert len(flow.state.records["g_deviation"]) == 2
        assert all(row["g_deviation"] >= 0 for row in bundles)
        assert all(row["holdout_constant"] <= row["C_Xi"] for row in bundles)


class TestSolveFlow:
    """Tests for the solve command."""

    def test_trace(self, tiny_config, tmp_path):
        """Test the trace table and the final field."""
        flow = SolveFlow(tiny_config, root=tmp_path)

        flow.kickoff()

        trace = flow.store.read_table("trace")
        assert [row["t"] for row in trace] == pytest.approx([0.0, 0.005, 0.01, 0.015, 0.02])
        assert trace[0]["tilde_energy"] is None
        assert (flow.store.fields_dir / "u_final.txt").exists()
        assert flow.state.records["mass_drift"] < 1e-8

    def test_order_test(self, tiny_config, tmp_path):
        """Test the order test writes the dt sweep under its own run hash."""
        plain = SolveFlow(tiny_config, root=tmp_path)
        flow = SolveFlow(tiny_config, root=tmp_path, order_test=True)

        flow.kickoff()

        assert flow.command == "solve-order-test"
        assert flow.state.run_hash != plain.state.run_hash
        rows = flow.store.read_table("order_test")
        assert [row["dt"] for row in rows] == [0.004, 0.002, 0.001]
        assert "order_slope" in flow.state.records

    def test_wave(self, tiny_overrides, tmp_path):
        """Test wave runs record the velocity energy."""
        overrides = merged(tiny_overrides, evolution={"equation": "linear-wave"})
        flow = SolveFlow(load_run_config(None, overrides), root=tmp_path)

        flow.kickoff()

        trace = flow.store.read_table("trace")
        assert trace[0]["tilde_energy"] is not None
        assert flow.state.records["energy_drift"] <= 1e-9


class TestConvergeFlow:
    """Tests for the converge command."""

    def test_phi_tables(self, tiny_config, tmp_path):
        """Test phi rows per sample time and one trace per rung."""
        flow = ConvergeFlow(tiny_config, root=tmp_path)

        flow.kickoff()

        phi = flow.store.read_table("phi")
        assert [row["t"] for row in phi] == pytest.approx([0.01, 0.02])
        assert all(row["phi"] >= 0 for row in phi)
        assert len(flow.store.read_table("phi_trend")) == 2
        assert (flow.store.tables_dir / "trace_1.csv").exists()

    @pytest.mark.parametrize(
        "sections",
        [
            {"evolution": {"equation": "wave"}},
            {"convergence": {"times": [0.5]}},
            {"noise": {"eps": [0.25]}},
        ],
    )
    def test_validation(self, tiny_overrides, tmp_path, registry, sections):
        """Test inconsistent experiments are configuration errors and register as failed."""
        flow = ConvergeFlow(
            load_run_config(None, merged(tiny_overrides, **sections)),
            root=tmp_path,
            registry=registry,
        )

        with pytest.raises(ConfigError):
            flow.kickoff()
        assert flow.state.execution_status is ExecutionStatus.FAILED
        assert registry.list_runs()[0].status == "failed"


class TestCheckFlow:
    """Tests for the check command."""

    def test_zero_noise_passes(self, tiny_config, tmp_path, registry):
        """Test every exact invariant holds for the vanishing noise.

        The estimate sweeps and the dt-order fits are calibrated at the default sizes.
        """
        flow = CheckFlow(tiny_config, root=tmp_path, registry=registry)

        status = flow.kickoff()

        calibrated = ("estimate_", "nls_energy_order", "wave_energy_order")
        exact_failures = [n for n in status["checks_failed"] if not n.startswith(calibrated)]
        assert exact_failures == []
        names = {row["name"] for row in flow.store.read_table("checks")}
        assert {"bony_identity", "d_block_oracle", "operator_agreement", "phase_shift"} <= names
        assert {
            "symmetry_defect_doubling",
            "gamma_linf",
            "gamma_h0.8",
            "gamma_consistency",
            "renorm_asymptotics",
            "functional_inequality_stability",
            "tilde_identity_order",
            "estimate_resonant",
        } <= names
        assert "z_product_split" not in names

    def test_gronwall_reports_both_starts(self, tiny_config, tmp_path):
        """Test the Gronwall rows carry the margin of the trajectory started at h0."""
        flow = CheckFlow(tiny_config, root=tmp_path)

        flow.kickoff()

        rows = [c for c in flow.state.checks if c.name.startswith("gronwall_")]
        assert len(rows) == 4
        assert all(c.passed and "from h0" in c.detail for c in rows)
        cases = flow.state.records["gronwall_from_h0"]
        assert len(cases) == 4
        assert all(case["from_h0_margin"] < case["shifted_margin"] + 1.0 for case in cases)

    def test_agreement_follows_g_variant(self, tiny_overrides, tmp_path):
        """Test the operator agreement runs with the configured G variant."""
        rows = {}
        for variant in ("derived", "printed"):
            config = load_run_config(
                None,
                merged(
                    tiny_overrides, noise={"zero_noise": False}, operator={"g_variant": variant}
                ),
            )
            flow = CheckFlow(config, root=tmp_path / variant)
            flow.check_agreement(bundle_task(config, 0.125))
            rows[variant] = flow.state.checks[0]

        assert rows["derived"].passed
        assert rows["printed"].detail == "G printed"
        assert rows["printed"].value > rows["derived"].value

    def test_reuse(self, tiny_config, tmp_path, registry):
        """Test a completed run is reused and --force recomputes it."""
        CheckFlow(tiny_config, root=tmp_path, registry=registry).kickoff()

        again = CheckFlow(tiny_config, root=tmp_path, registry=registry)
        again.kickoff()
        forced = CheckFlow(tiny_config, root=tmp_path, registry=registry, reuse=False)
        forced.kickoff()

        assert again.state.execution_status is ExecutionStatus.REUSED
        assert again.state.checks
        assert forced.state.execution_status is ExecutionStatus.COMPLETED

    def test_failed_check(self, tiny_config, tmp_path, monkeypatch):
        """Test an impossible tolerance marks the run CHECK_FAILED."""
        monkeypatch.setattr("anderson_lab.flows.check_flow.BONY_TOL", -1.0)
        flow = CheckFlow(tiny_config, root=tmp_path)

        status = flow.kickoff()

        assert status["checks_failed"][0] == "bony_identity"
        assert flow.state.execution_status is ExecutionStatus.CHECK_FAILED
        assert flow.store.read_manifest().records["checks"][0]["passed"] is False
