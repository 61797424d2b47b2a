import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdc import completion, symlin
from pdc.errors import NotDecomposable, NotPartialPd, NotPerfect, OrderingError, PatternMismatch, ZeroPivot
from pdc.graph import (
    Dag,
    UGraph,
    immorality_closure,
    moral_graph,
    perfect_dag_version,
    topological_relabel,
)
from pdc.partial import PartialMatrix, is_partial_positive_definite

from conftest import (
    load_graph,
    load_matrix,
    random_chordal_graph,
    random_ordered_dag,
    random_p_member,
    random_pd_member,
    random_perfect_dag,
    restrict_to_pattern,
)

NAN = np.nan

PRINTED_L = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 2, 1, 0, 0, 0],
    [-3, 0, -5, 1, 0, 0],
    [0, 5, 0, -1, 1, 0],
    [4, -2, 0, 0, 0, 1],
], dtype=float)
PRINTED_GAMMA_HAT = np.array([
    [1, 0, 0, -3, 0, 4],
    [0, -1, -2, 0, -5, 2],
    [0, -2, -2, -10, -10, 4],
    [-3, 0, -10, 56, 3, -12],
    [0, -5, -10, 3, -30, 10],
    [4, 2, 4, -12, 10, 13],
], dtype=float)
PRINTED_SIGMA = np.array([
    [1, 0.3, 0.2437, 0.4, 0.6],
    [0.3, 1, 0.4, -0.12, 0.2],
    [0.2437, 0.4, 1, -0.3, 0.5],
    [0.4, -0.12, -0.3, 1, 0],
    [0.6, 0.2, 0.5, 0, 1],
])
PRINTED_OMEGA = np.array([
    [2.353, -0.567, 0, -1.009, -1.298],
    [-0.567, 1.327, -0.476, 0.243, 0.313],
    [0, -0.476, 1.706, 0.455, -0.758],
    [-1.009, 0.243, 0.455, 1.569, 0.330],
    [-1.298, 0.313, -0.758, 0.330, 2.095],
])


def five_cycle_gamma():
    """Unit-diagonal partial matrix on the five-cycle DAG (edges only are cliques)."""
    vals = np.full((5, 5), NAN)
    np.fill_diagonal(vals, 1.0)
    for (i, j), x in {(2, 1): 0.5, (5, 1): 0.4, (3, 2): 0.3, (4, 3): -0.2, (5, 4): 0.6}.items():
        vals[i - 1, j - 1] = vals[j - 1, i - 1] = x
    return PartialMatrix(vals)


class TestCompleteInP:
    def test_indefinite_worked_example(self):
        D = load_graph("inverse_factor_example")
        res = completion.complete_in_p(load_matrix("inverse_factor_example"), D)
        np.testing.assert_array_equal(res.factor.D, [1, -1, 2, -3, -2, 1])
        np.testing.assert_array_equal(res.factor.L, PRINTED_L)
        np.testing.assert_allclose(res.completed, PRINTED_GAMMA_HAT, atol=1e-12)
        assert not res.in_p_d
        assert res.failing_vertex == 2

    def test_verdict_only(self):
        D = load_graph("inverse_factor_example")
        res = completion.complete_in_p(load_matrix("inverse_factor_example"), D, verdict_only=True)
        assert res.factor is None and not res.in_p_d and res.failing_vertex == 2

    def test_diagonal(self):
        d = [1.0, 2.0, 0.5, 4.0]
        g = PartialMatrix(np.where(np.eye(4) == 1, d, NAN))
        res = completion.complete_in_p(g, Dag(4))
        np.testing.assert_array_equal(res.factor.L, np.eye(4))
        np.testing.assert_array_equal(res.factor.D, d)
        assert res.in_p_d

    def test_round_trip(self, rng):
        for _ in range(50):
            D = random_ordered_dag(rng, int(rng.integers(2, 9)))
            L, lam, omega = random_p_member(rng, D)
            res = completion.complete_in_p(restrict_to_pattern(omega, D), D)
            np.testing.assert_allclose(res.factor.L, L, atol=1e-9)
            np.testing.assert_allclose(res.factor.D, lam, atol=1e-9)
            assert res.in_p_d
            assert completion.verify_in_p(res.completed, D)

    def test_completion_property(self, rng):
        for _ in range(30):
            D = random_ordered_dag(rng, 6)
            _, _, omega = random_p_member(rng, D)
            g = restrict_to_pattern(omega, D)
            res = completion.complete_in_p(g, D)
            mask = g.mask
            np.testing.assert_allclose(res.completed[mask], g.to_array()[mask],
                                       rtol=1e-10, atol=1e-10 * np.abs(omega).max())

    def test_l_supported_on_edges(self):
        D = load_graph("inverse_factor_example")
        L = completion.complete_in_p(load_matrix("inverse_factor_example"), D).factor.L
        for i in range(2, 7):
            for j in range(1, i):
                if (i, j) not in D.edges:
                    assert L[i - 1, j - 1] == 0

    def test_zero_pivot_with_parents(self):
        g = PartialMatrix([[0.0, 1.0], [1.0, 1.0]])
        with pytest.raises(ZeroPivot) as exc:
            completion.complete_in_p(g, Dag(2, [(2, 1)]))
        assert exc.value.j == 1

    def test_zero_pivot_without_parents_is_verdict(self):
        g = PartialMatrix([[0.0, NAN], [NAN, 1.0]])
        res = completion.complete_in_p(g, Dag(2))
        assert not res.in_p_d and res.failing_vertex == 1

    def test_pattern_mismatch(self):
        with pytest.raises(PatternMismatch):
            completion.complete_in_p(PartialMatrix([[1, NAN], [NAN, 1]]), Dag(2, [(2, 1)]))

    def test_requires_ordered(self):
        with pytest.raises(OrderingError):
            completion.complete_in_p(PartialMatrix([[1, 0.1], [0.1, 1]]), Dag(2, [(1, 2)]))


class TestCompleteInPd:
    def test_five_vertex_regression_example(self):
        D = load_graph("five_vertex_regression")
        res = completion.complete_in_pd(load_matrix("five_vertex_regression"), D)
        assert res.completed
        S = res.sigma
        assert abs(S[3, 4]) <= 1e-12
        assert S[3, 1] == pytest.approx(-0.12, abs=1e-12)
        assert S[4, 1] == pytest.approx(0.2, abs=1e-12)
        assert S[2, 0] == pytest.approx(0.2437, abs=5e-5)
        assert completion.verify_in_pd(S, D)

    def test_family_failure(self):
        D = load_graph("family_failure")
        g = load_matrix("family_failure")
        res = completion.complete_in_pd(g, D)
        assert res.status == completion.FAMILY_NOT_PD
        assert res.failing_vertex == 1
        assert res.sigma[3, 1] == pytest.approx(896 / 37, abs=1e-12)
        assert not symlin.is_positive_definite(res.sigma)
        assert is_partial_positive_definite(g, D)

    def test_diagnose_collects_all_failures(self):
        # family blocks of vertices 2 and 1 are both indefinite
        D = Dag(3, [(3, 2), (2, 1)])
        g = PartialMatrix([[1, 2, NAN], [2, 1, 3], [NAN, 3, 1]])
        fast = completion.complete_in_pd(g, D)
        full = completion.complete_in_pd(g, D, diagnose=True)
        assert fast.failures == (2,)
        assert full.failures == (2, 1)
        assert np.isnan(fast.sigma[2, 0])

    def test_top_vertex_checked(self):
        g = PartialMatrix([[1, NAN], [NAN, -1]])
        res = completion.complete_in_pd(g, Dag(2))
        assert res.failing_vertex == 2

    def test_diagonal(self):
        d = [3.0, 1.0, 2.0]
        g = PartialMatrix(np.where(np.eye(3) == 1, d, NAN))
        res = completion.complete_in_pd(g, Dag(3))
        np.testing.assert_array_equal(res.sigma, np.diag(d))

    def test_single_vertex(self):
        res = completion.complete_in_pd(PartialMatrix([[2.5]]), Dag(1))
        np.testing.assert_array_equal(res.sigma, [[2.5]])
        assert not completion.complete_in_pd(PartialMatrix([[-1.0]]), Dag(1)).completed

    def test_round_trip_random(self, rng):
        for _ in range(50):
            D = random_ordered_dag(rng, int(rng.integers(2, 9)))
            S = random_pd_member(rng, D)
            res = completion.complete_in_pd(restrict_to_pattern(S, D), D)
            assert res.completed
            np.testing.assert_allclose(res.sigma, S, atol=1e-8)

    def test_deterministic(self, rng):
        D = random_ordered_dag(rng, 7)
        g = restrict_to_pattern(random_pd_member(rng, D), D)
        a = completion.complete_in_pd(g, D).sigma
        b = completion.complete_in_pd(g, D).sigma
        assert np.array_equal(a, b)

    def test_perturbing_a_free_cell_breaks_membership(self, rng):
        for _ in range(10):
            D = random_non_complete_dag(rng)
            g = restrict_to_pattern(random_pd_member(rng, D), D)
            S = np.array(completion.complete_in_pd(g, D).sigma)
            assert completion.verify_in_pd(S, D)
            free = np.argwhere(np.tril(~g.mask, -1))
            i, j = free[rng.integers(len(free))]
            S[i, j] += 1e-3
            S[j, i] += 1e-3
            assert not completion.verify_in_pd(S, D)

    def test_moral_graph_zeros_of_inverse(self, rng):
        for _ in range(40):
            D = random_ordered_dag(rng, int(rng.integers(3, 9)), density=0.4)
            g = restrict_to_pattern(random_pd_member(rng, D), D)
            S = completion.complete_in_pd(g, D).sigma
            K = np.linalg.inv(S)
            d = np.sqrt(np.diag(K))
            K = K / np.outer(d, d)
            M = moral_graph(D)
            for i in range(1, D.p + 1):
                for j in range(1, i):
                    if not M.adjacent(i, j):
                        assert abs(K[i - 1, j - 1]) < 1e-8

    def test_schur_complement_block_structure(self, rng):
        for _ in range(20):
            D = random_ordered_dag(rng, 7, density=0.4)
            g = restrict_to_pattern(random_pd_member(rng, D), D)
            S = completion.complete_in_pd(g, D).sigma
            for j in range(1, D.p):
                pa = sorted(D.parents(j))
                rest = [j] + sorted(D.predecessors(j))
                C = symlin.schur_complement(S, pa, rest)
                assert symlin.is_positive_definite(C)
                np.testing.assert_allclose(C[0, 1:], 0, atol=1e-10)


def random_non_complete_dag(rng):
    while True:
        D = random_ordered_dag(rng, 6, density=0.5)
        if len(D.edges) < 15:
            return D


class TestPerfectFastPath:
    def test_complete_dag(self, rng):
        p = 4
        D = Dag(p, [(i, j) for i in range(1, p + 1) for j in range(1, i)])
        S = random_pd_member(rng, D)
        out = completion.complete_in_pd_perfect(PartialMatrix(S), D)
        np.testing.assert_array_equal(out, (S + S.T) / 2)

    def test_not_perfect(self):
        with pytest.raises(NotPerfect):
            completion.complete_in_pd_perfect(five_cycle_gamma(), load_graph("five_cycle"))

    def test_not_partial_pd(self):
        D = Dag(2, [(2, 1)])
        with pytest.raises(NotPartialPd):
            completion.complete_in_pd_perfect(PartialMatrix([[1, 2], [2, 1]]), D)

    def test_random_equals_general_procedure(self, rng):
        for _ in range(60):
            D = random_perfect_dag(rng, int(rng.integers(2, 9)))
            g = restrict_to_pattern(random_pd_member(rng, D), D)
            fast = completion.complete_in_pd_perfect(g, D)
            res = completion.complete_in_pd(g, D)
            assert res.completed
            assert np.array_equal(fast, res.sigma)
            assert completion.verify_in_pd(fast, D)


class TestClosure:
    def test_perfect_dag_needs_no_fill(self, rng):
        D = random_perfect_dag(rng, 6)
        g = restrict_to_pattern(random_pd_member(rng, D), D)
        out = completion.complete_via_immorality_closure(g, D)
        assert out.dag == D and out.gamma == g and out.filled == {}
        np.testing.assert_array_equal(out.sigma, completion.complete_in_pd(g, D).sigma)

    def test_five_cycle_fill_formulas(self):
        D = load_graph("five_cycle")
        g = five_cycle_gamma()
        out = completion.complete_via_immorality_closure(g, D)
        G = g.to_array()
        want53 = G[4, 3] / G[3, 3] * G[3, 2]
        want52 = G[4, 3] / G[3, 3] * G[3, 2] / G[2, 2] * G[2, 1]
        assert out.filled[(5, 3)] == pytest.approx(want53, abs=1e-14)
        assert out.filled[(5, 2)] == pytest.approx(want52, abs=1e-14)
        assert out.dag == immorality_closure(D)[-1]
        full = completion.complete_in_pd(g, D)
        assert full.completed
        np.testing.assert_allclose(out.sigma, full.sigma, atol=1e-9)

    def test_enlarged_matrix_over_closed_dag(self):
        D0 = load_graph("five_cycle")
        out = completion.complete_via_immorality_closure(five_cycle_gamma(), D0)
        direct = completion.complete_in_pd_perfect(out.gamma, out.dag)
        sigma0 = completion.complete_in_pd(five_cycle_gamma(), D0).sigma
        np.testing.assert_allclose(direct, sigma0, atol=1e-12)

    def test_five_vertex_regression_example(self):
        D = load_graph("five_vertex_regression")
        g = load_matrix("five_vertex_regression")
        out = completion.complete_via_immorality_closure(g, D)
        np.testing.assert_allclose(out.sigma, completion.complete_in_pd(g, D).sigma, atol=1e-9)

    def test_random_agreement(self, rng):
        for _ in range(60):
            D = random_ordered_dag(rng, int(rng.integers(2, 9)), density=0.4)
            g = restrict_to_pattern(random_pd_member(rng, D), D)
            out = completion.complete_via_immorality_closure(g, D)
            np.testing.assert_allclose(out.sigma, completion.complete_in_pd(g, D).sigma, atol=1e-9)


class TestDecomposable:
    def test_grone_zeros(self, rng):
        for _ in range(30):
            G = random_chordal_graph(rng, int(rng.integers(2, 9)))
            D = perfect_dag_version(G)
            ordered, perm = topological_relabel(G.p, D.edges)
            S0 = random_pd_member(rng, ordered)
            inv = [perm[v - 1] - 1 for v in G.vertices]
            g = restrict_to_pattern(S0[np.ix_(inv, inv)], G)
            S = completion.complete_decomposable(g, G)
            K = np.linalg.inv(S)
            d = np.sqrt(np.diag(K))
            K = K / np.outer(d, d)
            for i in range(1, G.p + 1):
                for j in range(1, i):
                    if not G.adjacent(i, j):
                        assert abs(K[i - 1, j - 1]) < 1e-8
            mask = g.mask
            np.testing.assert_allclose(S[mask], g.to_array()[mask], atol=1e-10)

    def test_not_decomposable(self):
        C4 = UGraph(4, [(1, 2), (1, 3), (2, 4), (3, 4)])
        g = restrict_to_pattern(np.eye(4), C4)
        with pytest.raises(NotDecomposable):
            completion.complete_decomposable(g, C4)


class TestVerify:
    def test_printed_sigma_in_pd(self):
        D = load_graph("five_vertex_regression")
        assert completion.verify_in_pd(PRINTED_SIGMA, D, tol=1e-3)

    def test_identity(self, rng):
        for _ in range(10):
            D = random_ordered_dag(rng, 5)
            assert completion.verify_in_pd(np.eye(5), D)
            assert completion.verify_in_p(np.eye(5), D)

    def test_family_failure_filled_matrix_rejected(self):
        D = load_graph("family_failure")
        S = completion.complete_in_pd(load_matrix("family_failure"), D).sigma
        assert not completion.verify_in_pd(S, D)

    def test_printed_omega_in_p(self):
        D = load_graph("five_vertex_regression")
        assert completion.verify_in_p(PRINTED_OMEGA, D, tol=5e-3)
        f = symlin.modified_cholesky(PRINTED_OMEGA)
        for i, j in [(3, 1), (4, 2), (5, 2), (5, 4)]:
            assert abs(f.L[i - 1, j - 1]) < 5e-3

    def test_dense_matrix_against_sparse_dag(self):
        rng = np.random.default_rng(3)
        A = rng.normal(size=(5, 5))
        S = A @ A.T + np.eye(5)
        D = Dag(5, [(2, 1), (4, 3)])
        assert not completion.verify_in_p(S, D)
        assert not completion.verify_in_pd(S, D)

    def test_indefinite(self):
        assert not completion.verify_in_p(np.diag([1.0, -1.0]), Dag(2))
        assert not completion.verify_in_p(np.array([[1.0, 1.0], [1.0, 1.0]]), Dag(2, [(2, 1)]))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_completion_agrees_with_pattern(p, seed):
    r = np.random.default_rng(seed)
    D = random_ordered_dag(r, p, density=0.4)
    g = restrict_to_pattern(random_pd_member(r, D), D)
    res = completion.complete_in_pd(g, D)
    assert res.completed
    mask = g.mask
    np.testing.assert_allclose(res.sigma[mask], g.to_array()[mask], rtol=1e-10, atol=1e-12)
    assert completion.verify_in_pd(res.sigma, D)
