import numpy as np
import pytest

from gaussmarkov import (
    Dataset,
    DegenerateBracket,
    DimensionMismatch,
    DomainError,
    InvalidParameter,
    KernelProcess,
    NotPSD,
    SingularConditioning,
    bridge_moments,
    brownian,
    cond_var_one,
    cond_var_two,
    dense_oracle,
    evaluate_brownian_fast,
    evaluate_grid,
    evaluate_posterior,
    node_posterior,
    weight_two_point,
)
from gaussmarkov.verify import NOISE_KINDS, random_instance, random_queries


def evaluate_all(model, data, queries, fast=False):
    npost = node_posterior(model, data)
    fn = evaluate_brownian_fast if fast else evaluate_posterior
    pts = [fn(model, npost, data, q) for q in queries]
    return np.array([p.mean for p in pts]), np.array([p.variance for p in pts])


class TestDataset:
    def test_unsorted_rejected(self):
        with pytest.raises(InvalidParameter):
            Dataset.iid([2.0, 1.0], [0.0, 0.0], 1.0)

    def test_negative_location(self):
        with pytest.raises(DomainError):
            Dataset.iid([-1.0, 1.0], [0.0, 0.0], 1.0)

    def test_shapes(self):
        with pytest.raises(DimensionMismatch):
            Dataset([1.0, 2.0], [0.0], np.eye(2))
        with pytest.raises(DimensionMismatch):
            Dataset([1.0, 2.0], [0.0, 1.0], np.eye(3))

    def test_error_cov_must_be_psd(self):
        with pytest.raises(NotPSD):
            Dataset([1.0, 2.0], [0.0, 1.0], [[1.0, 2.0], [2.0, 1.0]])


class TestNodePosterior:
    def test_single_noisy_observation(self, standard_bm):
        v, s2, y = 1.0, 1.0, 2.0
        npost = node_posterior(standard_bm, Dataset.iid([1.0], [y], s2))
        assert npost.mean[0] == pytest.approx(v / (v + s2) * y, abs=1e-12)
        assert npost.covariance[0, 0] == pytest.approx(1.0 / (1.0 / v + 1.0 / s2), abs=1e-12)
        assert npost.jitter_used == 0.0

    def test_noise_free_is_exact(self, rng):
        model = brownian(0.4, 0.3, 0.8, 1.2)
        ys = rng.normal(size=3)
        npost = node_posterior(model, Dataset.iid([0.5, 1.7, 3.0], ys, 0.0))
        assert np.array_equal(npost.mean, ys)
        assert np.all(np.abs(npost.covariance) <= 1e-10)

    def test_two_nodes_match_oracle(self, standard_bm):
        data = Dataset.iid([1.0, 2.0], [1.0, 1.0], 1.0)
        npost = node_posterior(standard_bm, data)
        m, v = dense_oracle(standard_bm, data, data.xs)
        np.testing.assert_allclose(npost.mean, m, atol=1e-10)
        np.testing.assert_allclose(np.diag(npost.covariance), v, atol=1e-10)

    @pytest.mark.parametrize("seed", range(20))
    def test_variance_bounded_by_prior(self, seed):
        model, data = random_instance(np.random.default_rng(seed))
        npost = node_posterior(model, data)
        assert np.all(npost.variance <= model.gram(data.xs).diagonal() + 1e-10)
        assert np.linalg.eigvalsh(npost.covariance).min() >= -1e-10

    def test_noisy_duplicates_are_fine(self, standard_bm):
        data = Dataset.iid([1.0, 1.0, 2.0], [0.5, 1.5, 0.0], 1.0)
        npost = node_posterior(standard_bm, data)
        assert npost.mean[0] == pytest.approx(npost.mean[1], abs=1e-12)
        m, v = dense_oracle(standard_bm, data, [1.0, 2.0])
        np.testing.assert_allclose(npost.mean[1:], m, atol=1e-12)

    def test_noise_free_duplicates_merge(self, standard_bm):
        dup = Dataset.iid([1.0, 2.0, 2.0, 3.0], [0.2, 1.0, 1.0, -0.5], 0.0)
        single = Dataset.iid([1.0, 2.0, 3.0], [0.2, 1.0, -0.5], 0.0)
        a, b = node_posterior(standard_bm, dup), node_posterior(standard_bm, single)
        np.testing.assert_array_equal(a.mean[[0, 1, 3]], b.mean)
        assert a.mean[2] == 1.0
        for x in (0.5, 1.5, 2.0, 2.5, 4.0):
            pa = evaluate_posterior(standard_bm, a, dup, x)
            pb = evaluate_posterior(standard_bm, b, single, x)
            assert pa.mean == pytest.approx(pb.mean, abs=1e-12)
            assert pa.variance == pytest.approx(pb.variance, abs=1e-12)

    def test_conflicting_noise_free_duplicates(self, standard_bm):
        with pytest.raises(SingularConditioning):
            node_posterior(standard_bm, Dataset.iid([1.0, 1.0], [0.0, 1.0], 0.0))

    def test_known_origin_observation(self):
        bm = brownian(0.7, 0.0, 0.0, 1.0)
        npost = node_posterior(bm, Dataset.iid([0.0, 1.0], [0.7, 2.0], 0.0))
        assert npost.jitter_used == 0.0
        np.testing.assert_array_equal(npost.mean, [0.7, 2.0])
        with pytest.raises(SingularConditioning):
            node_posterior(bm, Dataset.iid([0.0, 1.0], [0.0, 2.0], 0.0))

    def test_partially_exact_observations(self, standard_bm):
        cov = np.diag([1.0, 0.0, 0.5])
        data = Dataset([1.0, 2.0, 3.0], [0.3, 0.9, 0.1], cov)
        npost = node_posterior(standard_bm, data)
        assert npost.mean[1] == 0.9
        assert np.all(npost.covariance[1] == 0.0)
        m, v = dense_oracle(standard_bm, data, data.xs)
        np.testing.assert_allclose(npost.mean, m, atol=1e-12)
        np.testing.assert_allclose(npost.variance, v, atol=1e-12)


class TestTwoPointWeight:
    def test_midpoint(self, standard_bm):
        tw = weight_two_point(standard_bm, 1.5, 1.0, 2.0)
        np.testing.assert_allclose(tw.w, [0.5, 0.5], atol=1e-15)

    def test_at_left_node(self, rng):
        model = brownian(0.0, 0.0, 0.6, 1.3)
        tw = weight_two_point(model, 1.0, 1.0, 2.5)
        np.testing.assert_array_equal(tw.w, [1.0, 0.0])

    def test_uncertain_origin_hand_value(self):
        tw = weight_two_point(brownian(0, 0, 1, 1), 0.5, 0.0, 1.0)
        assert tw.denom == 1.0
        np.testing.assert_allclose(tw.w, [0.5, 0.5], atol=1e-15)

    @pytest.mark.parametrize("x", [1.0, 1.3, 2.2, 3.0])
    def test_brownian_weights_are_linear(self, x):
        model = brownian(0.5, -1.0, 0.9, 0.7)
        tw = weight_two_point(model, x, 1.0, 3.0)
        np.testing.assert_allclose(tw.w, [(3.0 - x) / 2.0, (x - 1.0) / 2.0], atol=1e-14)

    def test_degenerate(self, standard_bm):
        with pytest.raises(DegenerateBracket):
            weight_two_point(standard_bm, 1.0, 2.0, 2.0)
        # sigma = 0: every value equals f(0), perfectly correlated
        with pytest.raises(DegenerateBracket):
            weight_two_point(brownian(0, 0, 1, 0), 1.5, 1.0, 2.0)
        with pytest.raises(DegenerateBracket):
            weight_two_point(standard_bm, 0.5, 0.0, 1.0)


class TestConditionalVariances:
    def test_one_point(self, standard_bm):
        assert cond_var_one(standard_bm, 1.0, 1.0) == 0.0
        assert cond_var_one(standard_bm, 0.5, 1.0) == pytest.approx(0.5 * 0.5 / 1.0, abs=1e-15)
        assert cond_var_one(standard_bm, 2.0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_one_point_degenerate(self, standard_bm):
        with pytest.raises(DegenerateBracket):
            cond_var_one(standard_bm, 1.0, 0.0)

    def test_two_point(self, standard_bm):
        assert cond_var_two(standard_bm, 1.0, 1.0, 2.0) == 0.0
        assert cond_var_two(standard_bm, 1.5, 1.0, 2.0) == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("left,length", [(0.5, 1.0), (2.0, 4.0), (1.0, 0.2)])
    def test_midpoint_is_the_piece_maximum(self, standard_bm, left, length):
        mid = cond_var_two(standard_bm, left + length / 2, left, left + length)
        assert mid == pytest.approx(length / 4, rel=1e-12)
        grid = np.linspace(left, left + length, 101)
        vals = [cond_var_two(standard_bm, x, left, left + length) for x in grid]
        assert int(np.argmax(vals)) == 50


class TestEvaluatePosterior:
    def test_at_last_node(self, standard_bm, doubling_data):
        npost = node_posterior(standard_bm, doubling_data)
        pt = evaluate_posterior(standard_bm, npost, doubling_data, 8.0)
        assert (pt.case, pt.index) == ("at-node", 3)
        assert pt.mean == npost.mean[3]
        assert pt.variance == npost.covariance[3, 3]

    def test_extrapolate_past_exact_observation(self, standard_bm):
        data = Dataset.iid([1.0], [1.0], 0.0)
        pt = evaluate_posterior(standard_bm, node_posterior(standard_bm, data), data, 2.0)
        assert pt.case == "above-last"
        assert pt.mean == pytest.approx(1.0, abs=1e-15)
        assert pt.variance == pytest.approx(1.0, abs=1e-15)

    def test_cases(self, standard_bm, doubling_data):
        npost = node_posterior(standard_bm, doubling_data)
        got = [(p.case, p.index) for p in
               (evaluate_posterior(standard_bm, npost, doubling_data, x) for x in (0.5, 1.0, 3.0, 9.0))]
        assert got == [("below-first", 0), ("at-node", 0), ("interior", 1), ("above-last", 3)]

    def test_random_queries_match_oracle(self, rng):
        model, data = random_instance(rng, kind="dense", n=5)
        q = rng.uniform(0.0, data.xs[-1] + 2.0, 10)
        em, ev = evaluate_all(model, data, q)
        om, ov = dense_oracle(model, data, q)
        np.testing.assert_allclose(em, om, atol=1e-9, rtol=0)
        np.testing.assert_allclose(ev, ov, atol=1e-9, rtol=0)

    def test_negative_query(self, standard_bm, doubling_data):
        npost = node_posterior(standard_bm, doubling_data)
        with pytest.raises(DomainError):
            evaluate_posterior(standard_bm, npost, doubling_data, -0.1)

    def test_mismatched_node_posterior(self, standard_bm, doubling_data):
        npost = node_posterior(standard_bm, doubling_data.prefix(3))
        with pytest.raises(DimensionMismatch):
            evaluate_posterior(standard_bm, npost, doubling_data, 1.0)

    def test_degenerate_bracket_propagates(self):
        model = brownian(0, 0, 1, 0)
        data = Dataset.iid([1.0, 2.0], [0.0, 0.0], 1.0)
        with pytest.raises(DegenerateBracket):
            evaluate_posterior(model, node_posterior(model, data), data, 1.5)

    def test_known_origin_node_at_zero(self):
        # f(0) = mu0 is observed exactly; the bracket (0, x2) uses the one-point pathway
        bm = brownian(0.5, 0.2, 0.0, 1.3)
        data = Dataset.iid([0.0, 2.0, 3.0], [0.5, 1.4, 0.1], 0.0)
        npost = node_posterior(bm, data)
        for x in (0.4, 1.0, 1.7):
            pt = evaluate_posterior(bm, npost, data, x)
            assert pt.case == "interior"
            assert pt.mean == pytest.approx(0.5 + x / 2.0 * (1.4 - 0.5), abs=1e-12)
            assert pt.variance == pytest.approx(1.3**2 * x * (2.0 - x) / 2.0, abs=1e-12)
            fast = evaluate_brownian_fast(bm, npost, data, x)
            assert fast.mean == pytest.approx(pt.mean, abs=1e-12)
            assert fast.variance == pytest.approx(pt.variance, abs=1e-12)

    def test_zero_variance_nodes_are_uninformative(self):
        # variance vanishes on [0, 1]; both bracket nodes carry no information
        proc = KernelProcess(lambda x: 2.0 * x,
                             lambda x, y: np.maximum(np.minimum(x, y) - 1.0, 0.0))
        data = Dataset.iid([0.0, 0.5], [0.0, 1.0], 0.0)
        npost = node_posterior(proc, data)
        pt = evaluate_posterior(proc, npost, data, 0.25)
        assert (pt.mean, pt.variance) == (0.5, 0.0)
        above = evaluate_posterior(proc, npost, data, 3.0)
        assert (above.mean, above.variance) == (6.0, 2.0)

    def test_grid_threads_match_serial(self, standard_bm, doubling_data):
        npost = node_posterior(standard_bm, doubling_data)
        grid = np.linspace(0, 12, 97)
        assert evaluate_grid(standard_bm, npost, doubling_data, grid) == \
            evaluate_grid(standard_bm, npost, doubling_data, grid, workers=4)


class TestBrownianFast:
    def test_interior_midpoint_equal_means(self, standard_bm):
        data = Dataset.iid([1.0, 3.0], [0.7, 0.7], 0.0)
        npost = node_posterior(standard_bm, data)
        assert evaluate_brownian_fast(standard_bm, npost, data, 2.0).mean == 0.7

    def test_known_origin_extrapolation(self):
        bm = brownian(0.0, 0.3, 0.0, 1.0)
        data = Dataset.iid([2.0, 5.0], [1.0, -1.0], 0.5)
        npost = node_posterior(bm, data)
        for x in (0.0, 0.5, 1.5):
            pt = evaluate_brownian_fast(bm, npost, data, x)
            assert pt.mean == pytest.approx(x / 2.0 * npost.mean[0], abs=1e-14)

    def test_matches_general_path(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for i in range(100):
            model, data = random_instance(rng, kind=NOISE_KINDS[i % 3])
            q = random_queries(rng, data.xs, 20)
            gm, gv = evaluate_all(model, data, q)
            fm, fv = evaluate_all(model, data, q, fast=True)
            worst = max(worst, np.max(np.abs(gm - fm)), np.max(np.abs(gv - fv)))
        assert worst <= 1e-10


class TestBridge:
    def test_classical_bridge(self):
        mean, var = bridge_moments(1.0, 3.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.5)
        assert (mean, var) == (2.0, 0.25)

    def test_endpoint(self):
        assert bridge_moments(1.0, 3.0, 0.4, 2.0, 0.3, 2.0, 5.0, 1.5, 2.0) == (1.0, pytest.approx(0.16))

    def test_perfectly_correlated_endpoints(self):
        _, var = bridge_moments(0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.3)
        assert var == pytest.approx(1.0, abs=1e-15)

    def test_general_endpoints_differ_from_unit_interval_weights(self, standard_bm):
        # On [2, 5] the (1-x), x weights are not probabilities; general weights match the oracle.
        data = Dataset([2.0, 5.0], [0.4, -0.3], [[0.6, 0.2], [0.2, 0.9]])
        npost = node_posterior(standard_bm, data)
        s1, s2 = np.sqrt(npost.variance)
        rho = npost.covariance[0, 1] / (s1 * s2)
        x = 3.2
        mean, var = bridge_moments(*npost.mean, s1, s2, rho, 2.0, 5.0, 1.0, x)
        om, ov = dense_oracle(standard_bm, data, [x])
        assert mean == pytest.approx(om[0], abs=1e-12)
        assert var == pytest.approx(ov[0], abs=1e-12)
        unit_weights = ((1 - x) ** 2 * s1**2 + 2 * x * (1 - x) * rho * s1 * s2 + x**2 * s2**2) / 9.0 \
            + (5.0 - x) * (x - 2.0) / 3.0
        assert abs(unit_weights - ov[0]) > 1e-3

    @pytest.mark.parametrize("args", [
        (0, 0, 0, 0, 0, 1.0, 1.0, 1.0, 1.0),
        (0, 0, 0, 0, 0, 0.0, 1.0, 1.0, 1.5),
        (0, 0, -1, 0, 0, 0.0, 1.0, 1.0, 0.5),
        (0, 0, 0, 0, 1.5, 0.0, 1.0, 1.0, 0.5),
        (0, 0, 0, 0, 0, 0.0, 1.0, -1.0, 0.5),
    ])
    def test_invalid(self, args):
        with pytest.raises(InvalidParameter):
            bridge_moments(*args)


@pytest.mark.parametrize("seed", range(30))
def test_oracle_equivalence_property(seed):
    rng = np.random.default_rng(seed)
    model, data = random_instance(rng, kind=NOISE_KINDS[seed % 3])
    q = random_queries(rng, data.xs)
    em, ev = evaluate_all(model, data, q)
    om, ov = dense_oracle(model, data, q)
    assert np.max(np.abs(em - om)) <= 1e-9
    assert np.max(np.abs(ev - ov)) <= 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_continuity_at_knots(seed):
    model, data = random_instance(np.random.default_rng(seed))
    npost = node_posterior(model, data)
    for x in data.xs:
        left = evaluate_posterior(model, npost, data, max(x - 1e-9, 0.0))
        right = evaluate_posterior(model, npost, data, x + 1e-9)
        assert abs(left.mean - right.mean) <= 1e-6
        assert abs(left.variance - right.variance) <= 1e-6


@pytest.mark.parametrize("seed", range(10))
def test_adding_observations_never_increases_variance(seed):
    rng = np.random.default_rng(seed)
    model, data = random_instance(rng, n=8)
    q = rng.uniform(0, data.xs[-1] + 3, 50)
    prev = None
    for m in range(1, 9):
        _, v = evaluate_all(model, data.prefix(m), q)
        if prev is not None:
            assert np.all(v <= prev + 1e-10)
        prev = v


@pytest.mark.parametrize("seed", range(10))
def test_noise_free_nodes_exact(seed):
    rng = np.random.default_rng(seed)
    model, data = random_instance(rng, kind="none")
    npost = node_posterior(model, data)
    for i, x in enumerate(data.xs):
        pt = evaluate_posterior(model, npost, data, x)
        assert pt.mean == data.ys[i]
        assert pt.variance <= 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_brownian_mean_is_piecewise_linear(seed):
    rng = np.random.default_rng(seed)
    model, data = random_instance(rng, n=5)
    npost = node_posterior(model, data)
    for k in range(4):
        a, b = sorted(rng.uniform(data.xs[k], data.xs[k + 1], 2))
        left, right, mid = (evaluate_posterior(model, npost, data, x).mean for x in (a, b, (a + b) / 2))
        assert abs(mid - (left + right) / 2) <= 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_variance_independent_of_observed_values(seed):
    rng = np.random.default_rng(seed)
    model, data = random_instance(rng, kind=NOISE_KINDS[seed % 3])
    q = random_queries(rng, data.xs)
    _, v1 = evaluate_all(model, data, q)
    _, v2 = evaluate_all(model, data.with_ys(rng.permutation(data.ys) + rng.normal()), q)
    assert np.array_equal(v1, v2)
