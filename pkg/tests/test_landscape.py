import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoscheme import (
    GaConfig,
    Individual,
    Objective,
    RngStream,
    SearchSpace,
    StoppingRule,
    get_benchmark,
    lhs_sample,
    separability_probe,
    slice_grid,
)
from evoscheme.landscape import dedup_ranked, ga_scan


def _strata_ok(design):
    space, N = design.space, len(design)
    k = np.floor((design.points - space.lower) / space.width * N).astype(int)
    return all(sorted(k[:, i].tolist()) == list(range(N)) for i in range(space.n))


class TestLhs:
    def test_single_point(self):
        s = SearchSpace.uniform(3, -2, 5)
        d = lhs_sample(s, 1, RngStream(0))
        assert d.points.shape == (1, 3) and s.contains(d.points[0])

    def test_quarters(self):
        d = lhs_sample(SearchSpace.uniform(2, 0, 1), 4, RngStream(1))
        for i in range(2):
            assert sorted(np.floor(d.points[:, i] * 4).astype(int).tolist()) == [0, 1, 2, 3]

    def test_mean(self):
        d = lhs_sample(SearchSpace([0.0], [1.0]), 100, RngStream(2))
        assert abs(d.points.mean() - 0.5) < 0.03

    @settings(max_examples=50)
    @given(st.integers(1, 200), st.integers(1, 6), st.integers(0, 2**32))
    def test_stratification(self, N, n, seed):
        s = SearchSpace(np.linspace(-3, 0, n), np.linspace(1, 7, n))
        d = lhs_sample(s, N, RngStream(seed))
        assert _strata_ok(d)
        assert all(sorted(d.strata[:, i].tolist()) == list(range(N)) for i in range(n))

    def test_invalid(self):
        with pytest.raises(ValueError):
            lhs_sample(SearchSpace([0.0], [1.0]), 0, RngStream(0))


class TestSlice:
    def test_constant(self):
        g = slice_grid(Objective(lambda x: 4.0), SearchSpace.uniform(3, 0, 1), [0.5] * 3, 0, 2, 5)
        assert np.all(g.values == 4.0)

    def test_sphere_corners(self):
        fn = get_benchmark("sphere", 2)
        space = SearchSpace.uniform(2, -1, 1)
        g = slice_grid(fn.objective(), space, [0.3, 0.3], 0, 1, 3)
        assert [g.values[a, b] for a in (0, 2) for b in (0, 2)] == [-2.0] * 4
        assert g.values[1, 1] == 0.0

    def test_counts_and_frozen(self):
        seen = []
        obj = Objective(lambda x: seen.append(x.copy()) or 0.0)
        base = np.array([0.1, 0.2, 0.3, 0.4])
        slice_grid(obj, SearchSpace.uniform(4, 0, 1), base, 3, 1, 7)
        assert obj.evaluations == 49
        pts = np.array(seen)
        assert np.all(pts[:, [0, 2]] == base[[0, 2]])
        assert set(pts[:, 3]) == set(np.linspace(0, 1, 7))

    @pytest.mark.parametrize("i,j,r", [(0, 0, 3), (0, 1, 1), (0, 5, 3)])
    def test_invalid(self, i, j, r):
        with pytest.raises(ValueError):
            slice_grid(Objective(lambda x: 0.0), SearchSpace.uniform(2, 0, 1), [0.5, 0.5], i, j, r)


class TestSeparability:
    def test_sphere(self):
        fn = get_benchmark("sphere", 5)
        report = separability_probe(fn.objective(), fn.space, rng=RngStream(0))
        assert len(report.residuals) == 10
        assert report.max_residual <= 1e-9 and report.separable

    def test_product(self):
        obj = Objective(lambda x: float(x[0] * x[1]))
        report = separability_probe(obj, SearchSpace.uniform(2, -1, 1), rng=RngStream(0))
        assert report.residuals[(0, 1)] > 1e-3 and not report.separable

    def test_one_dimension(self):
        report = separability_probe(Objective(lambda x: 1.0), SearchSpace([0.0], [1.0]), rng=RngStream(0))
        assert report.residuals == {} and report.separable

    def test_partial(self):
        # x0 * x1 couples one pair only
        obj = Objective(lambda x: float(x[0] * x[1] + x[2] ** 2))
        report = separability_probe(obj, SearchSpace.uniform(3, -1, 1), rng=RngStream(1))
        assert report.pairs == {(0, 1): False, (0, 2): True, (1, 2): True}

    def test_evaluation_count(self):
        obj = Objective(lambda x: 0.0)
        separability_probe(obj, SearchSpace.uniform(4, 0, 1), trials=3, rng=RngStream(0))
        assert obj.evaluations == 6 * 3 * 4

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.lists(st.floats(-3, 3), min_size=4, max_size=4), min_size=3, max_size=3),
           st.integers(0, 2**32))
    def test_sum_of_polynomials_is_separable(self, coeffs, seed):
        c = np.array(coeffs)
        f = lambda x: float(sum(np.polyval(c[i], x[i]) for i in range(3)))  # noqa: E731
        report = separability_probe(Objective(f), SearchSpace.uniform(3, -2, 2), rng=RngStream(seed))
        assert report.separable


class TestScan:
    def test_converged_population(self):
        x = np.array([1.0, 2.0])
        inds = [Individual(x.copy(), x.copy(), 3.0) for _ in range(10)]
        assert len(dedup_ranked(inds, 1e-6)) == 1

    def test_zero_radius_counts_distinct(self):
        pts = [[0.0], [1.0], [0.0], [2.0], [1.0]]
        inds = [Individual(np.array(p), np.array(p), float(k)) for k, p in enumerate(pts)]
        assert len(dedup_ranked(inds, 0.0)) == 3

    def test_keeps_fitter_representative(self):
        inds = [Individual(np.array([0.0]), np.array([0.0]), 1.0),
                Individual(np.array([0.05]), np.array([0.05]), 2.0)]
        out = dedup_ranked(inds, 0.1)
        assert len(out) == 1 and out[0].fitness == 2.0

    def test_ga_scan_sorted(self):
        fn = get_benchmark("rastrigin", 2)
        cfg = GaConfig(pop_size=30, stopping=StoppingRule(max_generations=15))
        out = ga_scan(fn.objective(), fn.space, cfg)
        f = [ind.fitness for ind in out]
        assert f == sorted(f, reverse=True) and 1 <= len(out) <= 30
