"""Tests for the Monte Carlo sweep engine."""

import numpy as np
import pytest

from corrlab.errors import InfeasibleError, InputError
from corrlab.exact import kendall_from_pearson, spearman_from_pearson
from corrlab.randgen import MarginalSpec, PopulationSpec, RngStream
from corrlab.simulate import SimulationPlan, logspace_sizes, run_cell, run_plan


class TestLogspaceSizes:
    def test_paper_style_sweep(self):
        sizes = logspace_sizes(5, 1000, 25)
        assert len(sizes) == 25
        assert len(set(sizes)) == 25
        assert sizes[0] == 5 and sizes[-1] == 1000
        assert all(b > a for a, b in zip(sizes, sizes[1:]))

    def test_exact_log_midpoint(self):
        assert logspace_sizes(10, 1000, 3) == (10, 100, 1000)

    def test_degenerate_range_rejected(self):
        with pytest.raises(InputError):
            logspace_sizes(5, 5, 3)

    def test_too_many_sizes_rejected(self):
        with pytest.raises(InputError):
            logspace_sizes(5, 10, 10)

    def test_dense_low_end_still_distinct(self):
        sizes = logspace_sizes(2, 12, 11)
        assert sizes == tuple(range(2, 13))


def _plan(rho=0.2, sizes=(20,), reps=2000, kinds=("pearson", "spearman"), seed=0):
    return SimulationPlan(PopulationSpec.bivariate_normal(rho), sizes,
                          replications=reps, coefficients=kinds, master_seed=seed)


class TestRunCell:
    def test_zero_condition_is_unbiased(self):
        plan = _plan(rho=0.0, sizes=(50,), reps=20000)
        rows = run_cell(plan, 50, RngStream(1).child(0))
        by_kind = {r.kind: r for r in rows}
        assert by_kind["pearson"].mean == pytest.approx(0.0, abs=0.005)
        assert by_kind["spearman"].mean == pytest.approx(0.0, abs=0.005)

    def test_small_sample_bias_matches_theory(self):
        plan = _plan(rho=0.2, sizes=(5,), reps=20000, seed=2)
        rows = run_cell(plan, 5, RngStream(2).child(0))
        by_kind = {r.kind: r for r in rows}
        assert by_kind["pearson"].mean == pytest.approx(0.177, abs=0.01)
        assert by_kind["spearman"].mean == pytest.approx(0.160, abs=0.01)

    def test_single_replication_has_no_sd(self):
        plan = _plan(reps=1)
        rows = run_cell(plan, 20, RngStream(0).child(0))
        assert rows[0].sd is None
        assert rows[0].p5 == rows[0].p95 == rows[0].mean

    def test_rmse_identity(self):
        plan = _plan(reps=3000, seed=3)
        for row in run_cell(plan, 20, RngStream(3).child(0)):
            reps = plan.replications
            lhs = row.rmse ** 2
            rhs = row.sd ** 2 * (reps - 1) / reps + row.bias ** 2
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_percentiles_bracket_mean(self):
        plan = _plan(reps=2000, seed=4)
        for row in run_cell(plan, 20, RngStream(4).child(0)):
            assert row.p5 <= row.mean <= row.p95

    def test_degenerate_draws_are_redrawn_and_counted(self):
        # two-category marginal at n=4: a constant draw is common
        marginal = MarginalSpec.likert((0.5,))
        population = PopulationSpec(marginal, marginal, target_pearson=0.0,
                                    latent_rho=0.0, pop_pearson=0.0,
                                    pop_spearman=0.0)
        plan = SimulationPlan(population, (4,), replications=500,
                              coefficients=("pearson",), master_seed=5)
        rows = run_cell(plan, 4, RngStream(5).child(0))
        assert rows[0].redraw_count > 0

    def test_hopeless_condition_is_infeasible(self):
        # nearly all mass on one category: n=3 draws are almost always constant
        marginal = MarginalSpec.likert((0.999,))
        population = PopulationSpec(marginal, marginal, target_pearson=0.0,
                                    latent_rho=0.0, pop_pearson=0.0,
                                    pop_spearman=0.0)
        plan = SimulationPlan(population, (3,), replications=50,
                              coefficients=("pearson",), master_seed=6)
        with pytest.raises(InfeasibleError):
            run_cell(plan, 3, RngStream(6).child(0))


class TestRunPlan:
    def test_rows_cover_every_cell(self):
        plan = _plan(sizes=(10, 20), reps=200, kinds=("pearson", "spearman", "kendall"))
        rows = run_plan(plan)
        assert {(r.n, r.kind) for r in rows} == {
            (n, k) for n in (10, 20) for k in ("pearson", "spearman", "kendall")}

    def test_seed_determinism_and_thread_independence(self):
        plan = _plan(sizes=(10, 30), reps=500, seed=7)
        rows_a = run_plan(plan)
        rows_b = run_plan(plan)
        rows_c = run_plan(plan, threads=4)
        assert rows_a == rows_b == rows_c

    def test_different_seeds_differ(self):
        rows_a = run_plan(_plan(reps=200, seed=1))
        rows_b = run_plan(_plan(reps=200, seed=2))
        assert rows_a != rows_b

    def test_block_boundaries_do_not_change_results(self, monkeypatch):
        import corrlab.simulate as sim
        plan = _plan(sizes=(15,), reps=300, seed=8)
        rows_a = run_plan(plan)
        monkeypatch.setattr(sim, "_BLOCK_VALUES", 7 * 15)  # 7 replications per block
        rows_b = run_plan(plan)
        assert rows_a == rows_b

    def test_sd_shrinks_with_sample_size(self):
        plan = _plan(sizes=(10, 40, 160), reps=4000, seed=9)
        rows = [r for r in run_plan(plan) if r.kind == "pearson"]
        sds = [r.sd for r in rows]
        assert sds[0] > sds[1] > sds[2]

    def test_kendall_mean_tracks_population_conversion(self):
        plan = _plan(sizes=(100,), reps=4000, kinds=("kendall",), seed=10)
        row = run_plan(plan)[0]
        assert row.mean == pytest.approx(kendall_from_pearson(0.2), abs=0.01)
        assert row.population_value == pytest.approx(kendall_from_pearson(0.2))

    def test_population_values_recorded_per_kind(self):
        plan = _plan(sizes=(12,), reps=50, kinds=("pearson", "spearman"), seed=11)
        by_kind = {r.kind: r for r in run_plan(plan)}
        assert by_kind["pearson"].population_value == 0.2
        assert by_kind["spearman"].population_value == pytest.approx(
            spearman_from_pearson(0.2))

    def test_plan_validation(self):
        with pytest.raises(InputError):
            _plan(sizes=())
        with pytest.raises(InputError):
            _plan(sizes=(1,))
        with pytest.raises(InputError):
            _plan(kinds=("nope",))
        with pytest.raises(InputError):
            _plan(reps=0)
