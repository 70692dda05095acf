import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from tau_spectra.errors import (
    DomainError,
    InvalidDimensionError,
    NormalizationError,
    NotSymmetrizableError,
    ResourceLimitError,
)
from tau_spectra.markov import (
    BirthDeathParams,
    MultiIndexSpace,
    RandomWalkParams,
    expand,
    geometric_steady_state,
    kron_spectrum,
    lex_delinearize,
    lex_linearize,
    queue_generator,
    queue_spectrum,
    reconstruct,
    symmetrize,
    transient_evolve,
    walk_matrix,
    walk_spectrum,
)

rates = st.floats(0.05, 20)


def dense_kron_sum(mats):
    N = int(np.prod([m.shape[0] for m in mats]))
    out = np.zeros((N, N))
    for r, M in enumerate(mats):
        term = np.ones((1, 1))
        for k, A in enumerate(mats):
            term = np.kron(term, M if k == r else np.eye(A.shape[0]))
        out += term
    return out


class TestParams:
    def test_rates_product(self):
        with pytest.raises(DomainError):
            BirthDeathParams(3, 1, -1)
        with pytest.raises(DomainError):
            BirthDeathParams(3, 0, 1)

    def test_walk_constraints(self):
        with pytest.raises(DomainError):
            RandomWalkParams(3, 0.7, 0.4)
        with pytest.raises(DomainError):
            RandomWalkParams(3, 0, 0.4)
        RandomWalkParams(3, 0.5, 0.5)

    def test_dimension(self):
        with pytest.raises(InvalidDimensionError):
            BirthDeathParams(1, 1, 1)

    def test_derived(self):
        b = BirthDeathParams(4, 1, 4)
        assert b.tau == 0.5 and b.rho == 0.25
        np.testing.assert_allclose(b.symmetrizer(), [1, 0.5, 0.25, 0.125])


class TestGenerator:
    def test_two_state(self):
        np.testing.assert_array_equal(queue_generator(BirthDeathParams(2, 1, 2)), [[-1, 1], [2, -2]])

    def test_row_sums(self):
        Q = queue_generator(BirthDeathParams(5, 0.3, 0.7))
        assert np.max(np.abs(Q.sum(axis=1))) <= 1e-14
        P = walk_matrix(RandomWalkParams(6, 0.3, 0.45))
        assert np.max(np.abs(P.sum(axis=1) - 1)) <= 1e-14
        assert np.all(P >= 0)

    def test_small_spectrum(self):
        ev = np.sort(np.linalg.eigvals(queue_generator(BirthDeathParams(3, 1, 1)).T).real)[::-1]
        np.testing.assert_allclose(ev, [0, -1, -3], atol=1e-14)


class TestSymmetrize:
    def test_symmetric_input(self):
        T = np.array([[1.0, 2, 0], [2, 3, 4], [0, 4, 5]])
        d, X = symmetrize(T)
        np.testing.assert_array_equal(d, [1, 1, 1])
        np.testing.assert_allclose(X.to_dense(), T)

    def test_queue_transpose(self):
        Qt = queue_generator(BirthDeathParams(5, 1, 4)).T
        d, X = symmetrize(Qt)
        np.testing.assert_allclose(d, 0.5 ** np.arange(5))
        np.testing.assert_allclose(X.offdiag, 2)
        D = np.diag(d)
        err = np.max(np.abs(Qt - D @ X.to_dense() @ np.linalg.inv(D)))
        assert err <= 1e-12 * np.max(np.abs(Qt))

    def test_two_by_two(self):
        d, X = symmetrize(np.array([[0.0, 3], [12, 0]]))
        np.testing.assert_allclose(X.to_dense(), [[0, 6], [6, 0]])
        np.testing.assert_allclose(d, [1, 2])

    def test_negative_pair_keeps_sign(self):
        d, X = symmetrize(np.array([[0.0, -3], [-12, 0]]))
        np.testing.assert_allclose(X.offdiag, [-6])

    @pytest.mark.parametrize(
        "T",
        [np.array([[0.0, 1], [-1, 0]]), np.array([[0.0, 0], [1, 0]]), np.ones((3, 3))],
    )
    def test_rejects(self, T):
        with pytest.raises(NotSymmetrizableError):
            symmetrize(T)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**31))
    def test_reconstruction(self, n, seed):
        rng = np.random.default_rng(seed)
        sgn = rng.choice([-1.0, 1.0], n - 1)
        b = sgn * rng.uniform(0.1, 5, n - 1)
        c = sgn * rng.uniform(0.1, 5, n - 1)
        T = np.diag(rng.normal(size=n)) + np.diag(b, 1) + np.diag(c, -1)
        d, X = symmetrize(T)
        D = np.diag(d)
        rec = D @ X.to_dense() @ np.diag(1 / d)
        assert np.max(np.abs(T - rec)) <= 1e-12 * np.max(np.abs(T))


class TestQueueSpectrum:
    def test_steady_state_example(self):
        rep = queue_spectrum(BirthDeathParams(3, 1, 2))
        np.testing.assert_allclose(rep.steady_state, [4 / 7, 2 / 7, 1 / 7], rtol=0, atol=1e-14)

    def test_uniform(self):
        np.testing.assert_allclose(queue_spectrum(BirthDeathParams(4, 2.5, 2.5)).steady_state, 0.25, atol=1e-15)

    def test_gap_example(self):
        assert queue_spectrum(BirthDeathParams(3, 1, 1)).gap == pytest.approx(-1, abs=1e-14)

    def test_eigenvalue_formula(self):
        lam, mu, n = 0.7, 2.1, 6
        rep = queue_spectrum(BirthDeathParams(n, lam, mu))
        k = np.arange(1, n)
        expected = np.concatenate([[0], -lam - mu + 2 * math.sqrt(lam * mu) * np.cos(k * math.pi / n)])
        np.testing.assert_allclose(rep.eigenvalues, expected, atol=1e-13)

    def test_eigenvectors_are_eigenvectors(self):
        b = BirthDeathParams(7, 1.3, 0.4)
        rep = queue_spectrum(b)
        Qt = queue_generator(b).T
        V = rep.eigenvectors()
        for k, nu in enumerate(rep.eigenvalues):
            v = V[:, k]
            assert np.linalg.norm(Qt @ v - nu * v) <= 1e-12 * np.linalg.norm(v) * (1 + abs(nu))

    def test_mode_formula(self):
        lam, mu, n = 1.0, 4.0, 5
        rep = queue_spectrum(BirthDeathParams(n, lam, mu))
        tau = 0.5
        i = np.arange(1, n + 1)
        for k in range(1, n):
            th = k * math.pi / n
            w = tau ** (i - 1) * np.sin(i * th) - tau ** (i - 2) * np.sin((i - 1) * th)
            v = rep.eigenvector(k)
            cos = abs(w @ v) / (np.linalg.norm(w) * np.linalg.norm(v))
            assert cos == pytest.approx(1, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 20), rates, rates)
    def test_stationarity(self, n, lam, mu):
        b = BirthDeathParams(n, lam, mu)
        p = queue_spectrum(b).steady_state
        assert np.max(np.abs(queue_generator(b).T @ p)) <= 1e-12 * max(lam, mu, 1)
        assert abs(p.sum() - 1) <= 1e-12 and np.all(p >= 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 12), rates, rates)
    def test_dense_spectrum_and_gap(self, n, lam, mu):
        b = BirthDeathParams(n, lam, mu)
        rep = queue_spectrum(b)
        _, X = symmetrize(queue_generator(b).T)
        ref = np.sort(np.linalg.eigvalsh(X.to_dense()))[::-1]
        scale = lam + mu
        np.testing.assert_allclose(rep.eigenvalues, ref, atol=1e-10 * scale)
        assert rep.gap == pytest.approx(ref[1], abs=1e-12 * scale)
        bound = -(math.sqrt(lam) - math.sqrt(mu)) ** 2 - 2 * math.sqrt(lam * mu) * (1 - math.cos(math.pi / n))
        assert rep.gap < 0
        assert rep.gap <= bound + 1e-12 * scale

    def test_negative_rates_flagged(self):
        b = BirthDeathParams(5, -1, -3)
        rep = queue_spectrum(b)
        assert rep.steady_state is None and not rep.probabilistic
        ev = np.sort(np.linalg.eigvals(queue_generator(b).T).real)[::-1]
        np.testing.assert_allclose(np.sort(rep.eigenvalues)[::-1], ev, atol=1e-12)


class TestWalkSpectrum:
    def test_two_state(self):
        np.testing.assert_allclose(walk_spectrum(RandomWalkParams(2, 0.25, 0.25)).eigenvalues, [1, 0.5], atol=1e-15)

    def test_uniform(self):
        np.testing.assert_allclose(walk_spectrum(RandomWalkParams(3, 1 / 3, 1 / 3)).steady_state, 1 / 3, atol=1e-15)

    def test_geometric(self):
        np.testing.assert_allclose(
            walk_spectrum(RandomWalkParams(3, 0.2, 0.1)).steady_state, [1 / 7, 2 / 7, 4 / 7], atol=1e-15
        )

    def test_dense(self):
        w = RandomWalkParams(8, 0.35, 0.2)
        rep = walk_spectrum(w)
        ref = np.sort(np.linalg.eigvals(walk_matrix(w).T).real)[::-1]
        np.testing.assert_allclose(rep.eigenvalues, ref, atol=1e-12)
        p = rep.steady_state
        np.testing.assert_allclose(walk_matrix(w).T @ p, p, atol=1e-14)


class TestGeometricSteadyState:
    def test_extreme_ratio_is_finite(self):
        p = geometric_steady_state(400, 50.0)
        assert np.all(np.isfinite(p)) and p.sum() == pytest.approx(1)
        assert p[-1] == pytest.approx(1 - 1 / 50, rel=1e-12)

    def test_limit(self):
        np.testing.assert_allclose(geometric_steady_state(5, 1 + 1e-13), 0.2)


class TestLex:
    def test_examples(self):
        s = MultiIndexSpace((2, 3))
        assert lex_linearize(s, (1, 1)) == 0
        assert lex_linearize(s, (1, 3)) == 2
        assert lex_linearize(s, (2, 1)) == 3

    def test_round_trip(self):
        s = MultiIndexSpace((3, 4, 5))
        seen = set()
        for idx in itertools.product(range(1, 4), range(1, 5), range(1, 6)):
            pos = lex_linearize(s, idx)
            seen.add(pos)
            assert lex_delinearize(s, pos) == idx
        assert seen == set(range(60))

    def test_out_of_range(self):
        s = MultiIndexSpace((2, 3))
        for bad in [(0, 1), (3, 1), (1, 4), (1,)]:
            with pytest.raises(InvalidDimensionError):
                lex_linearize(s, bad)
        with pytest.raises(InvalidDimensionError):
            lex_delinearize(s, 6)

    def test_matches_numpy_ravel(self):
        x = np.arange(24.0).reshape(2, 3, 4)
        s = MultiIndexSpace((2, 3, 4))
        for idx in itertools.product(range(1, 3), range(1, 4), range(1, 5)):
            assert x.ravel()[lex_linearize(s, idx)] == x[tuple(i - 1 for i in idx)]


class TestKron:
    def test_chain_products(self):
        w = RandomWalkParams(2, 0.25, 0.25)
        rep = kron_spectrum(MultiIndexSpace((2, 2)), [w, w], "chain")
        np.testing.assert_allclose(np.sort(rep.eigenvalues.ravel())[::-1], [1, 0.5, 0.5, 0.25], atol=1e-15)
        assert rep.gap == pytest.approx(0.5)

    def test_generator_sums(self):
        b = BirthDeathParams(2, 1, 1)
        rep = kron_spectrum(MultiIndexSpace((2, 2)), [b, b], "generator")
        np.testing.assert_allclose(np.sort(rep.eigenvalues.ravel())[::-1], [0, -2, -2, -4], atol=1e-15)

    def test_steady_outer_product(self):
        b = BirthDeathParams(3, 1, 2)
        rep = kron_spectrum(MultiIndexSpace((3, 3)), [b, b], "generator")
        s = np.array([4, 2, 1]) / 7
        np.testing.assert_allclose(rep.steady_state, np.outer(s, s), atol=1e-15)
        L = dense_kron_sum([queue_generator(b)] * 2)
        assert np.max(np.abs(L.T @ rep.steady_state.ravel())) <= 1e-14

    def test_dense_match(self):
        rng = np.random.default_rng(5)
        axes = [BirthDeathParams(3, *rng.uniform(0.2, 3, 2)), BirthDeathParams(4, *rng.uniform(0.2, 3, 2))]
        rep = kron_spectrum(MultiIndexSpace((3, 4)), axes, "generator")
        L = dense_kron_sum([queue_generator(a) for a in axes])
        V = rep.eigenvectors()
        vals = rep.eigenvalues.ravel()
        assert np.max(np.abs(L.T @ V - V * vals)) <= 1e-10
        ref = np.sort(np.linalg.eigvals(L.T).real)[::-1]
        np.testing.assert_allclose(np.sort(vals)[::-1], ref, atol=1e-10)

    def test_chain_dense_match(self):
        ws = [RandomWalkParams(3, 0.3, 0.2), RandomWalkParams(2, 0.1, 0.6)]
        rep = kron_spectrum(MultiIndexSpace((3, 2)), ws, "chain")
        P = np.kron(walk_matrix(ws[0]), walk_matrix(ws[1]))
        V = rep.eigenvectors()
        assert np.max(np.abs(P.T @ V - V * rep.eigenvalues.ravel())) <= 1e-12

    def test_mismatch(self):
        b = BirthDeathParams(3, 1, 1)
        with pytest.raises(InvalidDimensionError):
            kron_spectrum(MultiIndexSpace((3, 4)), [b, b], "generator")
        with pytest.raises(InvalidDimensionError):
            kron_spectrum(MultiIndexSpace((3,)), [b, b], "generator")
        with pytest.raises(DomainError):
            kron_spectrum(MultiIndexSpace((3,)), [b], "chain")

    def test_dense_limit(self):
        b = BirthDeathParams(70, 1, 1)
        rep = kron_spectrum(MultiIndexSpace((70, 70)), [b, b], "generator")
        with pytest.raises(ResourceLimitError):
            rep.eigenvectors()


class TestTransient:
    def test_expansion_round_trip(self):
        rng = np.random.default_rng(8)
        b1, b2 = BirthDeathParams(4, 0.5, 1.5), BirthDeathParams(5, 2, 1)
        rep = kron_spectrum(MultiIndexSpace((4, 5)), [b1, b2], "generator")
        p = rng.random((4, 5))
        p /= p.sum()
        np.testing.assert_allclose(reconstruct(rep, expand(rep, p)), p, atol=1e-10)

    def test_time_zero_is_exact(self):
        rep = queue_spectrum(BirthDeathParams(4, 1, 3))
        p0 = np.array([0.1, 0.2, 0.3, 0.4])
        out = transient_evolve(rep, p0, 0.0)
        np.testing.assert_array_equal(out, p0)
        assert out is not p0

    def test_two_state_closed_form(self):
        rep = queue_spectrum(BirthDeathParams(2, 1, 1))
        for t in (0.1, 0.5, 2.0):
            e = math.exp(-2 * t)
            np.testing.assert_allclose(transient_evolve(rep, [1, 0], t), [0.5 + e / 2, 0.5 - e / 2], atol=1e-15)

    def test_long_time(self):
        rep = queue_spectrum(BirthDeathParams(6, 1.2, 0.8))
        p = transient_evolve(rep, np.eye(6)[0], 1e3 / abs(rep.gap))
        np.testing.assert_allclose(p, rep.steady_state, atol=1e-9)

    def test_matches_expm(self):
        axes = [BirthDeathParams(3, 0.4, 1.1), BirthDeathParams(4, 2.0, 0.7)]
        rep = kron_spectrum(MultiIndexSpace((3, 4)), axes, "generator")
        L = dense_kron_sum([queue_generator(a) for a in axes])
        p0 = np.zeros(12)
        p0[5] = 1
        for t in (0.3, 1.7):
            ref = expm(L.T * t) @ p0
            np.testing.assert_allclose(transient_evolve(rep, p0, t).ravel(), ref, atol=1e-12)

    def test_chain_steps(self):
        w = RandomWalkParams(5, 0.3, 0.25)
        rep = walk_spectrum(w)
        p0 = np.eye(5)[2]
        ref = np.linalg.matrix_power(walk_matrix(w).T, 7) @ p0
        np.testing.assert_allclose(transient_evolve(rep, p0, 7, kind="chain-step"), ref, atol=1e-13)

    def test_errors(self):
        rep = queue_spectrum(BirthDeathParams(3, 1, 1))
        with pytest.raises(NormalizationError):
            transient_evolve(rep, [1, 1, 0], 1.0)
        with pytest.raises(DomainError):
            transient_evolve(rep, [1, 0, 0], -1.0)
        with pytest.raises(DomainError):
            transient_evolve(rep, [1, 0, 0], 1.0, kind="chain-step")
        walk = walk_spectrum(RandomWalkParams(3, 0.2, 0.2))
        with pytest.raises(DomainError):
            transient_evolve(walk, [1, 0, 0], 1.5)

    def test_slope_approaches_gap(self):
        b = BirthDeathParams(6, 1.0, 2.0)
        rep = queue_spectrum(b)
        p0 = np.eye(6)[5]
        t = 10.0 / abs(rep.gap)
        dt = 1.0 / abs(rep.gap)
        d1 = np.linalg.norm(transient_evolve(rep, p0, t) - rep.steady_state)
        d2 = np.linalg.norm(transient_evolve(rep, p0, t + dt) - rep.steady_state)
        slope = (math.log(d2) - math.log(d1)) / dt
        assert slope == pytest.approx(rep.gap, rel=1e-2)
