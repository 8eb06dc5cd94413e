import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evoscheme import (
    GaConfig,
    HillClimbConfig,
    HybridConfig,
    Individual,
    Objective,
    RngStream,
    SaSchedule,
    SearchSpace,
    StoppingRule,
    apply_local_search,
    default_config,
    get_benchmark,
    hill_climb,
    run_ga,
    run_hybrid,
    sa_accept_prob,
    sa_local_search,
)
from evoscheme.core import ConfigError
from evoscheme.operators import BinaryCodec


class TestAcceptProbability:
    def test_neutral(self):
        assert sa_accept_prob(0.0, 3.7) == 1.0

    def test_worsening(self):
        assert sa_accept_prob(-1.0, 1.0) == pytest.approx(0.367879, abs=1e-6)

    def test_improving(self):
        assert sa_accept_prob(5.0, 0.01) == 1.0

    def test_bad_temperature(self):
        with pytest.raises(ValueError):
            sa_accept_prob(-1.0, 0.0)

    @given(st.floats(-50, -1e-3), st.floats(-50, -1e-3), st.floats(0.1, 100))
    def test_monotone_in_delta(self, d1, d2, T):
        lo, hi = sorted((d1, d2))
        if hi - lo > 1e-6:
            assert sa_accept_prob(lo, T) < sa_accept_prob(hi, T) <= 1.0

    @given(st.floats(-5, -1e-3), st.floats(0.1, 10), st.floats(0.1, 10))
    def test_monotone_in_temperature(self, d, T1, T2):
        lo, hi = sorted((T1, T2))
        if hi - lo > 1e-6:
            assert 0.0 < sa_accept_prob(d, lo) < sa_accept_prob(d, hi)

    def test_empirical_frequency(self):
        p = math.exp(-0.5 / 2.0)
        rng = RngStream(17)
        hits = np.mean(rng.random(100_000) < sa_accept_prob(-0.5, 2.0))
        assert abs(hits - p) < 5 * math.sqrt(p * (1 - p) / 100_000)


class TestCooling:
    def test_exact_powers(self):
        s = SaSchedule(T0=2.5, beta=0.8)
        for k in range(20):
            assert s.temperature(k) == 2.5 * 0.8**k

    def test_loop_cools_every_block(self, sphere_obj):
        temps = []
        space = SearchSpace.uniform(2, -1, 1)
        sched = SaSchedule(T0=1e6, beta=0.5, steps_per_temperature=4, total_steps=20)
        sa_local_search([0.5, 0.5], sphere_obj, space, sched, RngStream(0), lambda x, f, T: temps.append(T))
        # huge T0 accepts every move, so one temperature per proposal
        assert temps == [sched.temperature(k // 4) for k in range(20)]

    @pytest.mark.parametrize("kwargs", [dict(T0=0.0), dict(beta=1.0), dict(beta=0.0)])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            SaSchedule(**kwargs)


class TestSimulatedAnnealing:
    space = SearchSpace.uniform(2, -5.12, 5.12)

    def test_zero_steps(self, sphere_obj):
        x, f = sa_local_search([1.0, 2.0], sphere_obj, self.space, SaSchedule(total_steps=0), RngStream(0))
        assert x.tolist() == [1.0, 2.0] and f == -5.0

    def test_frozen_is_monotone(self, sphere_obj):
        path = []
        sched = SaSchedule(T0=1e-12, total_steps=300)
        sa_local_search([3.0, -2.0], sphere_obj, self.space, sched, RngStream(1), lambda x, f, T: path.append(f))
        assert path and all(b >= a for a, b in zip(path, path[1:]))

    def test_never_worse_than_start(self):
        for seed in range(100):
            obj = Objective(lambda x: -float(np.sum(x**2)))
            _, f = sa_local_search([1.0, 1.0], obj, self.space, SaSchedule(T0=1.0, beta=0.9, total_steps=500),
                                   RngStream(seed))
            assert f >= -2.0

    def test_returns_best_not_last(self, sphere_obj):
        path = []
        sched = SaSchedule(T0=100.0, total_steps=200, sigma_rel=0.2)
        x, f = sa_local_search([0.1, 0.1], sphere_obj, self.space, sched, RngStream(2),
                               lambda x, f, T: path.append(f))
        assert f == max(path + [sphere_obj.fn([0.1, 0.1])])
        assert f > path[-1]

    def test_evaluation_count(self, sphere_obj):
        sa_local_search([0.0, 0.0], sphere_obj, self.space, SaSchedule(total_steps=37), RngStream(0))
        assert sphere_obj.evaluations == 38


class TestHillClimb:
    def test_fixed_point(self):
        obj = Objective(lambda x: -float(np.sum((x - 0.3) ** 2)))
        x, f = hill_climb([0.3, 0.3], obj, SearchSpace.uniform(2, 0, 1), HillClimbConfig(step=1e-3, max_iterations=5))
        assert x.tolist() == [0.3, 0.3] and f == 0.0

    def test_converges_on_parabola(self):
        obj = Objective(lambda x: -float(x[0] ** 2))
        cfg = HillClimbConfig(step=0.5, shrink=0.5, tolerance=1e-6, max_iterations=1000)
        x, f = hill_climb([1.0], obj, SearchSpace([-4.0], [4.0]), cfg)
        assert abs(x[0]) <= 1e-5

    def test_deterministic(self):
        fn = get_benchmark("rosenbrock", 3)
        a = hill_climb([0.5, -1.0, 1.5], fn.objective(), fn.space, HillClimbConfig())
        b = hill_climb([0.5, -1.0, 1.5], fn.objective(), fn.space, HillClimbConfig())
        assert a[0].tobytes() == b[0].tobytes() and a[1] == b[1]

    def test_never_worse(self):
        fn = get_benchmark("rastrigin", 4)
        rng = RngStream(3)
        for _ in range(20):
            x0 = fn.space.lower + rng.random(4) * fn.space.width
            _, f = hill_climb(x0, fn.objective(), fn.space, HillClimbConfig(max_iterations=20))
            assert f >= fn(x0)


class TestWriteBack:
    space = SearchSpace.uniform(2, -1, 1)

    def _ind(self):
        x = np.array([0.5, -0.5])
        return Individual(x.copy(), x.copy(), -0.5)

    @pytest.mark.parametrize("mode", ["lamarckian", "baldwinian"])
    def test_no_improvement(self, mode):
        ind = self._ind()
        out = apply_local_search(ind, (ind.phenotype, ind.fitness), mode, self.space)
        assert out.phenotype.tolist() == ind.phenotype.tolist() and out.fitness == ind.fitness

    def test_lamarckian(self):
        out = apply_local_search(self._ind(), ([0.1, 0.0], -0.01), "lamarckian", self.space)
        assert out.phenotype.tolist() == [0.1, 0.0] and out.genotype.tolist() == [0.1, 0.0]
        assert out.fitness == -0.01

    def test_baldwinian(self):
        ind = self._ind()
        out = apply_local_search(ind, ([0.1, 0.0], -0.01), "baldwinian", self.space)
        assert out.phenotype.tobytes() == ind.phenotype.tobytes()
        assert out.genotype.tobytes() == ind.genotype.tobytes()
        assert out.fitness == -0.01

    def test_out_of_bounds(self):
        with pytest.raises(ValueError):
            apply_local_search(self._ind(), ([2.0, 0.0], 1.0), "lamarckian", self.space)

    def test_binary_lamarckian(self):
        codec = BinaryCodec(self.space, 4)
        g = codec.encode([0.5, -0.5])
        ind = Individual(g, codec.decode(g), -1.0)
        target = codec.decode(codec.encode([0.0, 0.2]))
        out = apply_local_search(ind, (target, 0.0), "lamarckian", self.space, codec)
        np.testing.assert_array_equal(codec.decode(out.genotype), out.phenotype)
        np.testing.assert_array_equal(out.phenotype, target)


class TestRunHybrid:
    fn = get_benchmark("sphere", 5)

    def test_disabled_matches_plain(self):
        cfg = default_config(5, seed=3)
        plain = run_ga(self.fn.objective(), self.fn.space, cfg)
        for placement in ("post", "interleaved"):
            h = HybridConfig(placement=placement, top_k=0, probability=0.0)
            hybrid = run_hybrid(self.fn.objective(), self.fn.space, cfg, h)
            assert hybrid.records == plain.records
            assert hybrid.local_search_evaluations == 0

    @pytest.mark.parametrize("searcher", ["hill_climb", "sa"])
    def test_post_never_worse(self, searcher):
        cfg = default_config(5, seed=4)
        plain = run_ga(self.fn.objective(), self.fn.space, cfg)
        hybrid = run_hybrid(self.fn.objective(), self.fn.space, cfg, HybridConfig(searcher=searcher))
        assert hybrid.best.fitness >= plain.best.fitness

    def test_interleaved_lamarckian_monotone(self):
        h = HybridConfig(mode="lamarckian", placement="interleaved", probability=0.2,
                         hill_climb=HillClimbConfig(max_iterations=5))
        for seed in range(10):
            trace = run_hybrid(self.fn.objective(), self.fn.space, default_config(5, seed=seed), h)
            assert np.all(np.diff(trace.best_series) >= 0)

    @pytest.mark.parametrize("placement,mode", [("post", "mixed"), ("interleaved", "baldwinian"),
                                                ("interleaved", "mixed")])
    def test_accounting(self, placement, mode):
        obj = self.fn.objective()
        cfg = GaConfig(pop_size=10, stopping=StoppingRule(max_generations=10))
        h = HybridConfig(mode=mode, placement=placement, probability=0.3, searcher="sa",
                         sa=SaSchedule(total_steps=20))
        trace = run_hybrid(obj, self.fn.space, cfg, h)
        ga_only = trace.evaluations - trace.local_search_evaluations
        assert trace.local_search_evaluations > 0
        assert obj.evaluations == trace.evaluations
        assert ga_only == 10 + 10 * 9

    def test_best_is_a_real_point_under_baldwinian(self):
        obj = self.fn.objective()
        h = HybridConfig(mode="baldwinian", placement="interleaved", probability=0.5)
        trace = run_hybrid(obj, self.fn.space, default_config(5, seed=9), h)
        assert self.fn(trace.best.phenotype) == trace.best.fitness

    def test_binary_encoding(self):
        cfg = default_config(5, "binary", 12, seed=2)
        h = HybridConfig(mode="lamarckian", placement="interleaved", probability=0.1)
        trace, pop = run_hybrid(self.fn.objective(), self.fn.space, cfg, h, return_population=True)
        codec = cfg.codec(self.fn.space)
        np.testing.assert_array_equal(codec.decode(pop.genotypes), pop.phenotypes)
        assert self.fn(trace.best.phenotype) == trace.best.fitness

    def test_deterministic(self):
        cfg = default_config(5, seed=6)
        h = HybridConfig(searcher="sa", placement="interleaved", probability=0.2, sa=SaSchedule(total_steps=30))
        a = run_hybrid(self.fn.objective(), self.fn.space, cfg, h)
        b = run_hybrid(self.fn.objective(), self.fn.space, cfg, h)
        assert a.records == b.records and a.best.fitness == b.best.fitness
