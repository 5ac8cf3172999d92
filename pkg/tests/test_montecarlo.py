import math

import numpy as np
import pytest

from dirgame.errors import DomainError, PreconditionError, ResourceBudgetError, SpecError
from dirgame.montecarlo import (
    BoundCheck,
    ExperimentConfig,
    SummaryStats,
    check_bootstrap_bound,
    check_subadditivity,
    check_tail_bound,
    clopper_pearson_upper,
    collect_values,
    derived_seed,
    estimate_limit_value,
    oscillation_report,
    report_json_text,
    resolve_method,
    run_experiment,
    run_full_experiment,
    samples_csv_text,
    summarize,
    summary_csv_text,
)

DARY = {"family": "dary", "d": 2}
BERN = {"kind": "bernoulli", "p": 0.5}


def config(**kw):
    base = dict(graph=DARY, payoffs=BERN, n_list=[2], samples=5, master_seed=1)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_invariants(self):
        with pytest.raises(SpecError):
            config(samples=0)
        with pytest.raises(SpecError):
            config(t_grid=[0.0])
        with pytest.raises(DomainError):
            config(delta=0.6)
        with pytest.raises(SpecError):
            config(solver="magic")


class TestDerivedSeeds:
    def test_distinct_across_grid(self):
        seeds = {
            derived_seed(99, n, i, stream=s)
            for n in range(1, 30)
            for i in range(50)
            for s in ("main", "boot-ref")
        }
        assert len(seeds) == 29 * 50 * 2

    def test_deterministic(self):
        assert derived_seed(5, 10, 3) == derived_seed(5, 10, 3)
        assert derived_seed(5, 10, 3) != derived_seed(6, 10, 3)


class TestRunExperiment:
    def test_degenerate_distribution(self):
        cfg = config(payoffs={"kind": "bernoulli", "p": 1.0}, n_list=[1], samples=1)
        res = run_experiment(cfg)
        assert res.records[0].value == 1.0

    def test_rerun_identical(self):
        cfg = config(n_list=[3, 5], samples=10)
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        assert [(r.n, r.sample, r.seed, r.value) for r in a.records] == [
            (r.n, r.sample, r.seed, r.value) for r in b.records
        ]
        assert samples_csv_text(a.records) == samples_csv_text(b.records)

    def test_parallel_equals_serial(self):
        cfg1 = config(n_list=[4], samples=16, threads=1)
        cfg4 = config(n_list=[4], samples=16, threads=4)
        assert samples_csv_text(run_experiment(cfg1).records) == samples_csv_text(
            run_experiment(cfg4).records
        )

    def test_stage_one_mean_near_three_quarters(self):
        # V_1 = max of two fair bits, P(1) = 3/4
        cfg = config(n_list=[1], samples=10**4)
        res = run_experiment(cfg)
        mean = float(np.mean([r.value for r in res.records]))
        assert abs(mean - 0.75) < 0.02

    def test_budget_abort_flags_partial(self):
        cfg = config(
            graph={"family": "counterexample", "branch_intervals": [[1, 13]]},
            n_list=[64],
            samples=2,
            budget=50,
        )
        res = run_experiment(cfg)
        assert res.partial
        assert "budget" in (res.aborted_reason or "")

    def test_method_dispatch(self):
        assert resolve_method(DARY, BERN, 16, "auto", 10**7) == "dary-array"
        assert resolve_method(DARY, BERN, 40, "auto", 10**7) == "pmf"
        assert resolve_method(DARY, BERN, 40, "tree-pmf", 10**7) == "pmf"
        assert resolve_method({"family": "line"}, BERN, 8, "auto", 10**7) == "dict"
        with pytest.raises(SpecError):
            resolve_method({"family": "line"}, BERN, 8, "tree-pmf", 10**7)
        with pytest.raises(ResourceBudgetError):
            resolve_method(DARY, {"kind": "uniform"}, 40, "auto", 10**7)

    def test_pmf_and_direct_same_mean(self):
        # the two sampling routes agree statistically at a feasible horizon
        n, samples = 8, 400
        direct = collect_values(config(solver="direct", samples=samples), n, samples, "x")
        pmf = collect_values(config(solver="tree-pmf", samples=samples), n, samples, "x")
        se = math.sqrt(direct.var() / samples + pmf.var() / samples)
        assert abs(direct.mean() - pmf.mean()) < 4 * se + 1e-9


class TestSummarize:
    def test_all_equal_values(self):
        cfg = config(payoffs={"kind": "bernoulli", "p": 1.0}, n_list=[2], samples=5)
        stats = summarize(run_experiment(cfg).records, [0.1, 0.5])[0]
        assert stats.variance == 0.0
        assert stats.tails[0.1] == 0.0 and stats.tails[0.5] == 0.0

    def test_two_point_example(self):
        from dirgame.montecarlo import SampleRecord

        recs = [
            SampleRecord(n=1, sample=0, seed=0, value=0.0, solve_ms=0),
            SampleRecord(n=1, sample=1, seed=1, value=1.0, solve_ms=0),
        ]
        stats = summarize(recs, [0.4])[0]
        assert stats.mean == 0.5
        assert stats.tails[0.4] == 1.0

    def test_tail_nonincreasing(self):
        cfg = config(n_list=[6], samples=300)
        grid = [0.05, 0.1, 0.2, 0.3, 0.5]
        stats = summarize(run_experiment(cfg).records, grid)[0]
        vals = [stats.tails[t] for t in grid]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            summarize([], [0.1])


class TestClopperPearson:
    def test_zero_successes(self):
        # P(X=0) = (1-p)^n >= 0.001  =>  p <= 1 - 0.001^(1/n)
        assert clopper_pearson_upper(0, 500) == pytest.approx(
            1 - 0.001 ** (1 / 500), rel=1e-6
        )

    def test_all_successes(self):
        assert clopper_pearson_upper(10, 10) == 1.0

    def test_monotone_in_x(self):
        vals = [clopper_pearson_upper(x, 100) for x in range(0, 100, 10)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestTailBound:
    def test_constant_payoffs_pass(self):
        # t chosen so the bound is informative at n=8, h=8: 2e^{-t^2 n/2} < 1
        cfg = config(payoffs={"kind": "bernoulli", "p": 1.0}, n_list=[8], samples=50)
        stats = summarize(run_experiment(cfg).records, [0.45, 0.6])[0]
        for c in check_tail_bound(stats, 8, [0.45, 0.6]):
            assert c.bound < 1.0
            assert c.verdict == "pass"

    def test_uninformative_bound(self):
        stats = SummaryStats(n=16, count=10, mean=0.5, variance=0.0,
                             tails={0.05: 0.0}, tail_ucl={0.05: 0.5})
        (c,) = check_tail_bound(stats, 16, [0.05])
        assert c.bound >= 1.0 and c.verdict == "uninformative"

    def test_bound_formula(self):
        stats = SummaryStats(n=16, count=10, mean=0.5, variance=0.0,
                             tails={0.3: 0.0}, tail_ucl={0.3: 0.01})
        (c,) = check_tail_bound(stats, 16, [0.3])
        assert c.bound == pytest.approx(2 * math.exp(-0.3**2 * 16 / 2))
        assert c.verdict == "pass"

    def test_failure_detected(self):
        stats = SummaryStats(n=100, count=1000, mean=0.5, variance=0.1,
                             tails={0.3: 0.9}, tail_ucl={0.3: 0.93})
        (c,) = check_tail_bound(stats, 100, [0.3])
        assert c.verdict == "fail"


class TestBootstrap:
    def test_condition_violation_names_slack(self):
        cfg = config(n_list=[10], samples=10)
        with pytest.raises(PreconditionError, match="slack"):
            check_bootstrap_bound(cfg, n=10, k=2, t=0.1)

    def test_condition_arithmetic(self):
        # d=2, n=40, k=4, t=0.34: 6 log 2 = 4.1589 <= 0.1156*36 = 4.1616
        assert 4 * math.log(2) + 2 * math.log(2) <= 0.34**2 * 36

    def test_constant_payoffs_zero_frequency(self):
        cfg = config(payoffs={"kind": "bernoulli", "p": 1.0}, n_list=[12], samples=40)
        checks = check_bootstrap_bound(cfg, n=12, k=4, t=0.8, samples=40)
        for c in checks:
            assert c.value == 0.0 and c.verdict == "pass"

    def test_non_dary_rejected(self):
        cfg = config(graph={"family": "line"}, n_list=[10], samples=5)
        with pytest.raises(SpecError):
            check_bootstrap_bound(cfg, n=10, k=4, t=0.9)


class TestSubadditivity:
    def _stats(self, n, mean, var=0.0, count=100):
        return SummaryStats(n=n, count=count, mean=mean, variance=var, tails={}, tail_ucl={})

    def test_constant_payoffs_exact(self):
        c = 0.7
        chk = check_subadditivity(self._stats(10, c), self._stats(10, c), self._stats(20, c), 0.0)
        assert chk.verdict == "pass"
        assert chk.extra["raw_gap"] == pytest.approx(0.0, abs=1e-12)

    def test_m_out_of_range(self):
        with pytest.raises(PreconditionError):
            check_subadditivity(self._stats(30, 0.5), self._stats(10, 0.5), self._stats(40, 0.5), 1.0)

    def test_violation_detected(self):
        chk = check_subadditivity(
            self._stats(10, 0.9), self._stats(10, 0.9), self._stats(20, 0.1), 0.0
        )
        assert chk.verdict == "fail"

    def test_monte_carlo_tree(self):
        from dirgame.partitions import default_epsilon_rule, psi

        cfg = config(n_list=[10, 20], samples=300)
        stats = {s.n: s for s in summarize(run_experiment(cfg).records, [0.1])}
        eps = default_epsilon_rule(0.25)(10)
        slack = 10 * (psi(10, eps, 10, 2**21 - 1) + 2 * eps) + 1
        chk = check_subadditivity(stats[10], stats[10], stats[20], slack)
        assert chk.verdict == "pass"
        assert chk.extra["vacuous"]  # desk-scale structural slack dwarfs the data


class TestLimitEstimate:
    def test_exact_model_recovery(self):
        stats = [
            SummaryStats(n=n, count=100, mean=0.4 + n**-0.25, variance=0.0, tails={}, tail_ucl={})
            for n in (8, 16, 32, 64)
        ]
        est = estimate_limit_value(stats, delta=0.25)
        assert est.estimate == pytest.approx(0.4, abs=1e-9)
        assert est.ci_low == pytest.approx(0.4, abs=1e-9)
        assert est.ci_high == pytest.approx(0.4, abs=1e-9)

    def test_constant_payoffs(self):
        stats = [
            SummaryStats(n=n, count=50, mean=0.6, variance=0.0, tails={}, tail_ucl={})
            for n in (4, 8, 12)
        ]
        est = estimate_limit_value(stats, delta=0.25)
        assert est.estimate == pytest.approx(0.6, abs=1e-12)
        assert est.ci_high - est.ci_low == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_rejected(self):
        stats = [
            SummaryStats(n=8, count=10, mean=0.5, variance=0.0, tails={}, tail_ucl={})
            for _ in range(3)
        ]
        with pytest.raises(DomainError):
            estimate_limit_value(stats, delta=0.25)

    def test_stability_across_seed_batches(self):
        ns = [6, 9, 12, 15]
        cfg_a = config(n_list=ns, samples=150, master_seed=111)
        cfg_b = config(n_list=ns, samples=150, master_seed=222)
        est_a = estimate_limit_value(summarize(run_experiment(cfg_a).records, [0.1]), 0.25)
        est_b = estimate_limit_value(summarize(run_experiment(cfg_b).records, [0.1]), 0.25)
        width = (est_a.ci_high - est_a.ci_low) + (est_b.ci_high - est_b.ci_low)
        assert abs(est_a.estimate - est_b.estimate) <= width + 0.02


class TestOscillation:
    def test_constant_payoffs_no_oscillation(self):
        cfg = config(
            graph={"family": "counterexample", "branch_intervals": [[1, 13]]},
            payoffs={"kind": "bernoulli", "p": 1.0},
            n_list=[4],
            samples=10,
        )
        rep = oscillation_report(cfg, 4, 32, margin=0.02)
        assert rep.mean_branchy == rep.mean_pathy == 1.0
        assert not rep.oscillates


class TestSerialization:
    def test_samples_csv_shape(self):
        cfg = config(n_list=[2], samples=3)
        res = run_experiment(cfg)
        text = samples_csv_text(res.records)
        lines = text.strip().split("\n")
        assert lines[0] == "n,sample,seed,value,solve_ms"
        assert len(lines) == 4
        assert all(line.endswith(",0.000") for line in lines[1:])  # timings off

    def test_summary_csv_header(self):
        cfg = config(n_list=[2], samples=10, t_grid=[0.2, 0.4])
        res, stats, checks = run_full_experiment(cfg)
        text = summary_csv_text(stats, checks, cfg.t_grid)
        lines = text.strip().split("\n")
        assert lines[0] == "n,count,mean,var,t,tail,tail_ucl,bound,verdict,family"
        assert len(lines) == 3  # one per (n, t)
        assert lines[1].split(",")[-1] == "tail"

    def test_report_json_roundtrip(self):
        import json

        cfg = config(n_list=[2], samples=10)
        res, stats, checks = run_full_experiment(cfg)
        doc = json.loads(report_json_text(cfg, res, stats, checks))
        assert doc["partial"] is False
        assert doc["config"]["master_seed"] == 1
        assert doc["solver_methods"]["2"] == "dary-array"
        assert doc["bound_checks"]
