import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from evoscheme import (
    BinaryCodec,
    RecombinationWeights,
    RngStream,
    SearchSpace,
    VariationConfig,
    bitflip_mutate,
    decode_binary,
    gaussian_mutate,
    intermediate_recombine,
    one_point_crossover,
    sigma_at_generation,
)
from evoscheme.core import ConfigError, DimensionError

bits = st.lists(st.integers(0, 1), min_size=2, max_size=40)


def _bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


class TestDecode:
    codec = BinaryCodec(SearchSpace([0.0], [7.0]), 3)

    @pytest.mark.parametrize("g,expected", [("000", 0.0), ("111", 7.0), ("101", 5.0), ("011", 3.0)])
    def test_unit_step(self, g, expected):
        assert decode_binary(_bits(g), self.codec).tolist() == [expected]

    def test_positional_oracle(self):
        # independent route: int(bitstring, 2) mapped linearly
        space = SearchSpace([-2.0, 10.0], [3.0, 11.0])
        codec = BinaryCodec(space, 5)
        rng = RngStream(4)
        for _ in range(50):
            g = codec.random(rng)
            s = "".join(map(str, g))
            expected = [lo + int(s[5 * i:5 * i + 5], 2) / 31 * (hi - lo)
                        for i, (lo, hi) in enumerate([(-2.0, 3.0), (10.0, 11.0)])]
            np.testing.assert_allclose(codec.decode(g), expected, rtol=0, atol=1e-12)

    def test_monotone(self):
        codec = BinaryCodec(SearchSpace([-1.0], [1.0]), 6)
        values = [codec.decode(_bits(format(k, "06b")))[0] for k in range(64)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            self.codec.decode(_bits("1010"))

    def test_encode_roundtrip_on_grid(self):
        codec = BinaryCodec(SearchSpace([-3.0, 0.0], [5.0, 1.0]), 8)
        g = codec.random(RngStream(8))
        np.testing.assert_array_equal(codec.encode(codec.decode(g)), g)

    def test_invalid_bits(self):
        with pytest.raises(ConfigError):
            BinaryCodec(SearchSpace([0.0], [1.0]), 0)


class TestBitflip:
    def test_zero_rate_identity(self):
        g = _bits("0110100111")
        np.testing.assert_array_equal(bitflip_mutate(g, 0.0, RngStream(1)), g)

    def test_full_rate_complement(self):
        g = _bits("0110100111")
        np.testing.assert_array_equal(bitflip_mutate(g, 1.0, RngStream(1)), 1 - g)

    def test_input_unchanged(self):
        g = _bits("0000000000")
        bitflip_mutate(g, 0.5, RngStream(1))
        assert g.sum() == 0

    def test_expected_flips(self):
        m, pm, trials = 100, 0.01, 100_000
        g = np.zeros((trials, m), dtype=np.uint8)
        flips = bitflip_mutate(g, pm, RngStream(2)).sum(axis=1)
        se = np.sqrt(m * pm * (1 - pm) / trials)
        assert abs(flips.mean() - m * pm) < 0.05
        assert abs(flips.mean() - m * pm) < 5 * se

    def test_pure_given_stream(self):
        g = _bits("0101010101")
        assert bitflip_mutate(g, 0.3, RngStream(9)).tolist() == bitflip_mutate(g, 0.3, RngStream(9)).tolist()


class TestOnePointCrossover:
    def test_identical_parents(self):
        a = _bits("110010")
        c1, c2 = one_point_crossover(a, a.copy(), RngStream(0))
        assert c1.tolist() == a.tolist() == c2.tolist()

    def test_fixed_cut(self):
        c1, c2 = one_point_crossover(_bits("0000"), _bits("1111"), RngStream(0), cut=2)
        assert "".join(map(str, c1)) == "0011"
        assert "".join(map(str, c2)) == "1100"

    @given(st.data())
    def test_gene_source_and_conservation(self, data):
        a = np.array(data.draw(bits), dtype=np.uint8)
        b = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(a), max_size=len(a))), dtype=np.uint8)
        c1, c2 = one_point_crossover(a, b, RngStream(data.draw(st.integers(0, 2**32))))
        assert np.all((c1 == a) | (c1 == b))
        np.testing.assert_array_equal(np.sort([a, b], axis=0), np.sort([c1, c2], axis=0))

    def test_cut_range(self):
        a, b = np.zeros((5000, 4), np.uint8), np.ones((5000, 4), np.uint8)
        c1, _ = one_point_crossover(a, b, RngStream(1))
        cuts = 4 - c1.sum(axis=1)
        assert set(cuts.tolist()) == {1, 2, 3}

    def test_errors(self):
        with pytest.raises(DimensionError):
            one_point_crossover(_bits("01"), _bits("011"), RngStream(0))
        with pytest.raises(DimensionError):
            one_point_crossover(_bits("0"), _bits("1"), RngStream(0))


class TestIntermediateRecombination:
    def test_identity_weight(self):
        assert intermediate_recombine([[1.0, 2.0], [3.0, 4.0]], RecombinationWeights([1, 0])).tolist() == [1.0, 2.0]

    def test_midpoint(self):
        assert intermediate_recombine([[1.0, 2.0], [3.0, 4.0]], [0.5, 0.5]).tolist() == [2.0, 3.0]

    def test_three_parents(self):
        child = intermediate_recombine([[0, 0], [4, 0], [0, 8]], [0.5, 0.25, 0.25])
        assert child.tolist() == [1.0, 2.0]

    def test_weight_sum_violation(self):
        with pytest.raises(ValueError):
            RecombinationWeights([0.5, 0.6])

    def test_non_convex_needs_opt_in(self):
        with pytest.raises(ValueError):
            RecombinationWeights([1.5, -0.5])
        w = RecombinationWeights([1.5, -0.5], convex=False)
        assert intermediate_recombine([[0.0], [1.0]], w).tolist() == [-0.5]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            intermediate_recombine([[0.0, 1.0], [1.0, 2.0]], [0.2, 0.3, 0.5])

    @settings(max_examples=200)
    @given(st.integers(2, 5).flatmap(lambda k: st.tuples(
        arrays(float, (k, 3), elements=st.floats(-1e3, 1e3)),
        st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k).filter(lambda w: sum(w) > 1e-3))))
    def test_convex_containment(self, case):
        parents, raw = case
        w = np.array(raw) / sum(raw)
        w[-1] = 1.0 - w[:-1].sum()
        if w[-1] < 0:
            return
        child = intermediate_recombine(parents, RecombinationWeights(w))
        # 1 ulp slack for the rounding of the weighted sum
        tol = 1e-12 * (1 + np.abs(parents).max())
        assert np.all(child >= parents.min(axis=0) - tol)
        assert np.all(child <= parents.max(axis=0) + tol)


class TestGaussianMutation:
    space = SearchSpace([0.0, -10.0], [1.0, 10.0])

    def test_vanishing_sigma(self):
        x = np.array([0.3, 4.0])
        np.testing.assert_array_equal(gaussian_mutate(x, 1e-300, 1.0, self.space, RngStream(0)), x)

    def test_zero_rate_identity(self):
        x = np.array([0.3, 4.0])
        np.testing.assert_array_equal(gaussian_mutate(x, 0.5, 0.0, self.space, RngStream(0)), x)

    def test_stays_in_bounds(self):
        x = np.tile([0.99, 9.9], (1000, 1))
        y = gaussian_mutate(x, 1.0, 1.0, self.space, RngStream(1))
        assert np.all(y >= self.space.lower) and np.all(y <= self.space.upper)

    def test_perturbation_std(self):
        s = SearchSpace([0.0], [1.0])
        x = np.full((100_000, 1), 0.5)
        d = gaussian_mutate(x, 0.1, 1.0, s, RngStream(5)) - 0.5
        assert abs(d.std() - 0.1) < 0.002

    def test_scale_follows_range(self):
        x = np.tile([0.5, 0.0], (50_000, 1))
        d = gaussian_mutate(x, 0.01, 1.0, self.space, RngStream(6)) - x
        np.testing.assert_allclose(d.std(axis=0), [0.01, 0.2], rtol=0.02)


class TestSigmaSchedule:
    def test_constant(self):
        assert {sigma_at_generation(0.1, 1.0, t) for t in range(50)} == {0.1}

    def test_initial(self):
        assert sigma_at_generation(0.1, 0.99, 0) == 0.1

    def test_decay(self):
        assert sigma_at_generation(0.1, 0.9, 3) == pytest.approx(0.0729, abs=1e-15)


class TestVariationConfig:
    @pytest.mark.parametrize("kwargs,field", [
        (dict(pc=1.5), "ga.pc"), (dict(pm=-0.1), "ga.pm"),
        (dict(sigma_rel=0.0), "ga.sigma_rel"), (dict(gamma=0.0), "ga.gamma"), (dict(gamma=1.1), "ga.gamma"),
    ])
    def test_invariants(self, kwargs, field):
        with pytest.raises(ConfigError) as info:
            VariationConfig(**kwargs)
        assert info.value.field == field
