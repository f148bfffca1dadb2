import random

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mpf

from barypade.adversary import (
    AdversaryPlan,
    ExplicitEpsilon,
    GeometricEpsilon,
    LevelSpec,
    build_coefficients,
    chi_partial,
    decompose_system,
    ensure_generic,
    genericity_check,
    lagrange_weights,
    level_data,
    nullvector_limit_probe,
    radius_r,
    tau,
)
from barypade.errors import AlphaOnNode, NodeCollision, PlanError
from barypade.linalg import Matrix, norm_frobenius, norm_inf
from barypade.numkernel import Poly, Precision
from barypade.pade import NodeLevel, build_system

from conftest import random_alpha, random_level, random_two_level_plan, roots_of_unity, single_block_plan

CTX = Precision(256)
TIGHT = mpmath.ldexp(1, -200)
PM1 = NodeLevel((1, -1))


def half_eps():
    return GeometricEpsilon(mpf(1), mpf(1) / 2)


class TestLevelData:
    def test_lagrange_weights(self):
        assert lagrange_weights(PM1, CTX) == (mpf(-1) / 2, mpf(1) / 2)

    def test_worked(self):
        with CTX.scope():
            d = level_data(PM1, 2, CTX)
            third = mpf(1) / 3
            assert max(abs(x - y) for x, y in zip(d.a, (1, third))) < TIGHT
            assert max(abs(x - y) for x, y in zip(d.d, (2 * third, third))) < TIGHT
            assert max(abs(x - y) for x, y in zip(d.u.row(0), (1, third))) < TIGHT
            assert max(abs(x - y) for x, y in zip(d.limit_vec, (-mpf(1) / 2, mpf(3) / 2))) < TIGHT

    def test_far_alpha(self):
        d = level_data(PM1, 10**6, CTX)
        assert all(abs(x - 1e-6) < 1e-10 for x in d.a)

    def test_alpha_on_node(self):
        with pytest.raises(AlphaOnNode):
            level_data(PM1, 1, CTX)

    @given(st.integers(1, 12), st.integers(0, 10**6))
    def test_vandermonde_residual_and_interpolant(self, n, seed):
        rng = random.Random(seed)
        level = random_level(rng, n, CTX)
        alpha = random_alpha(rng, CTX)
        with CTX.scope():
            d = level_data(level, alpha, CTX)
            scale = norm_inf(d.a)
            for t, a in zip(level.nodes, d.a):
                vd = mpmath.fsum(dj * t ** j for j, dj in enumerate(d.d))
                assert abs(vd - a) <= CTX.nullspace_tol * scale
                # g(t) = t^n d(t) = t^n / (alpha - t) at every node
                g = t ** n * vd
                assert abs(g - t ** n / (alpha - t)) <= CTX.nullspace_tol * (1 + abs(t ** n / (alpha - t)))


class TestBounds:
    def test_radius(self):
        plan = single_block_plan(256)
        assert radius_r(plan, 0) == 2

    def test_radius_grows_with_prefix(self):
        with CTX.scope():
            lv1 = NodeLevel(tuple(3 * x for x in roots_of_unity(3, ctx=CTX)))
            plan = AdversaryPlan(Poly(()), (LevelSpec(PM1, 2), LevelSpec(lv1, 5j)), half_eps(), 256)
            assert abs(radius_r(plan, 1) - 4) < TIGHT

    def test_tau_single_block(self):
        plan = single_block_plan(256)
        with CTX.scope():
            t = tau(plan, -1)
            assert abs(t - mpf(1) / 176) <= mpmath.ldexp(1, -230)
            assert t < mpf(1) / 176

    def test_tau_range(self):
        with pytest.raises(ValueError):
            tau(single_block_plan(256), 0)

    def test_tau_below_one_for_tiny_nodes(self):
        with CTX.scope():
            tiny = NodeLevel((mpf("1e-3"), mpf("-1e-3")))
            plan = AdversaryPlan(Poly(()), (LevelSpec(tiny, 2),), ExplicitEpsilon((mpf(1),) * 3), 256)
            assert 0 < tau(plan, -1) < 1

    def test_tau_shrinks_with_more_eps_mass(self):
        with CTX.scope():
            a = AdversaryPlan(Poly(()), (LevelSpec(PM1, 2),), ExplicitEpsilon((mpf(1) / 2,) * 3), 256)
            b = AdversaryPlan(Poly(()), (LevelSpec(PM1, 2),), ExplicitEpsilon((mpf(1) / 2, mpf(1), mpf(1) / 2)), 256)
            assert tau(b, -1) < tau(a, -1)

    def test_chi_partial(self):
        assert chi_partial(single_block_plan(256)) == 0
        plan = random_two_level_plan(3)
        with plan.ctx.scope():
            lv = plan.levels[0]
            d = level_data(lv.level, lv.alpha, plan.ctx).d
            term0 = radius_r(plan, 0) ** (2 * lv.n) * mpmath.fsum(abs(x) for x in d) * tau(plan, 0)
            assert abs(chi_partial(plan) - term0) <= TIGHT * term0
            assert chi_partial(plan, 1) == 0
            assert chi_partial(plan, 0) == term0 + chi_partial(plan, 1)


class TestGenericity:
    def test_worked(self):
        ok, s1, s2 = genericity_check(PM1, 2, CTX.quarter, CTX)
        assert ok
        with CTX.scope():
            assert abs(s1 + mpf(1) / 3) < TIGHT and abs(s2 + mpf(2) / 3) < TIGHT

    def test_alpha_zero(self):
        ok, s1, _ = genericity_check(PM1, 0, CTX.quarter, CTX)
        assert abs(s1 - 1) < TIGHT

    def test_threshold(self):
        assert not genericity_check(PM1, 2, mpf("0.5"), CTX)[0]

    def test_ensure_generic_leaves_generic_plans_alone(self):
        plan = single_block_plan(256)
        out, perturbed = ensure_generic(plan)
        assert out == plan and perturbed == []

    def test_ensure_generic_perturbs(self):
        from barypade.adversary import Tolerances

        # fourth roots of unity: s2 = alpha^3 / (alpha^4 - 1) vanishes at alpha = 0
        with CTX.scope():
            plan = AdversaryPlan(Poly(()), (LevelSpec(NodeLevel((1, -1, 1j, -1j)), 0),), half_eps(), 256,
                                 tolerances=Tolerances(genericity_tol=mpf("1e-6")))
        out, perturbed = ensure_generic(plan)
        assert len(perturbed) >= 1
        assert out.levels[0].alpha != 0 and out.levels[0].target == 0
        assert genericity_check(out.levels[0].level, out.levels[0].alpha, mpf("1e-6"), CTX)[0]


class TestPlan:
    def test_degree_gap(self):
        with pytest.raises(PlanError):
            AdversaryPlan(Poly(()), (LevelSpec(PM1, 2), LevelSpec(NodeLevel((1, -1, 1j)), 3)), half_eps(), 256)

    def test_p_degree(self):
        with pytest.raises(PlanError):
            AdversaryPlan(Poly((1, 1)), (LevelSpec(PM1, 2),), half_eps(), 256)

    def test_alpha_on_node_of_other_level(self):
        with CTX.scope():
            lv1 = NodeLevel(roots_of_unity(3, radius=2, ctx=CTX))
            with pytest.raises(PlanError):
                AdversaryPlan(Poly(()), (LevelSpec(PM1, lv1.nodes[0]), LevelSpec(lv1, 5j)), half_eps(), 256)

    def test_short_explicit_eps(self):
        with pytest.raises(PlanError):
            AdversaryPlan(Poly(()), (LevelSpec(PM1, 2),), ExplicitEpsilon((mpf(1),)), 256)

    def test_zero_node(self):
        with pytest.raises(NodeCollision):
            NodeLevel((2, 0, -2))


class TestCoefficients:
    def test_worked(self):
        plan = single_block_plan(256)
        with CTX.scope():
            fn = build_coefficients(plan, [mpf(1) / 176])
            expected = (0, mpf(2) / 528, mpf(1) / 528)
            assert max(abs(a - b) for a, b in zip(fn.coeffs.coeffs, expected)) < TIGHT

    def test_mu_must_be_positive(self):
        with pytest.raises(ValueError):
            build_coefficients(single_block_plan(256), [0])

    def test_p_placement(self):
        with CTX.scope():
            plan = AdversaryPlan(Poly((1, 1)), (LevelSpec(NodeLevel(roots_of_unity(2, ctx=CTX)), 3),), half_eps(), 256)
            c = build_coefficients(plan, [mpf("1e-3")]).coeffs.coeffs
        assert c[:2] == (1, 1) and len(c) == 5

    @given(st.integers(0, 10**6))
    def test_blocks_land_in_their_windows(self, seed):
        plan = random_two_level_plan(seed)
        with plan.ctx.scope():
            mu = [tau(plan, -1), tau(plan, 0)]
            c = build_coefficients(plan, mu).coeffs.coeffs
            n0, n1 = plan.n(0), plan.n(1)
            for m in range(len(c)):
                if n0 <= m <= 2 * n0 or n1 <= m <= 2 * n1:
                    assert abs(c[m]) <= plan.eps(m)
                elif m >= len(plan.P.coeffs):
                    assert c[m] == 0


class TestDecomposition:
    def test_single_block(self):
        plan = single_block_plan(256)
        with CTX.scope():
            mu = [mpf(1) / 176]
            y, s = decompose_system(plan, mu, 0)
            assert all(x == 0 for x in y.entries)
            assert norm_frobenius(s) < TIGHT
            m = build_system(build_coefficients(plan, mu).coeffs, PM1, CTX)
            u = level_data(PM1, 2, CTX).u
            assert norm_frobenius(m - u.scale(mu[0])) < TIGHT

    @given(st.integers(0, 10**6))
    def test_top_level_has_no_tail(self, seed):
        plan = random_two_level_plan(seed)
        with plan.ctx.scope():
            mu = [tau(plan, -1), tau(plan, 0)]
            _, s = decompose_system(plan, mu, plan.K)
            assert norm_frobenius(s) <= mpmath.ldexp(1, -plan.precision + 40) * (1 + norm_frobenius(build_system(
                build_coefficients(plan, mu).coeffs, plan.levels[plan.K].level, plan.ctx)))

    @given(st.integers(0, 10**6), st.sampled_from([0, 1]))
    def test_first_row_law(self, seed, k):
        """Row 0 of Y vanishes, so row 0 of M - S is exactly mu_k a_k."""
        plan = random_two_level_plan(seed)
        with plan.ctx.scope():
            mu = [tau(plan, -1), tau(plan, 0)]
            lv = plan.levels[k]
            y, s = decompose_system(plan, mu, k)
            assert all(x == 0 for x in y.row(0))
            m = build_system(build_coefficients(plan, mu).coeffs, lv.level, plan.ctx)
            a = level_data(lv.level, lv.alpha, plan.ctx).a
            row = [x - t for x, t in zip(m.row(0), s.row(0))]
            assert max(abs(x - mu[k] * y) for x, y in zip(row, a)) <= mpmath.ldexp(1, -200) * mu[k] * norm_inf(a)

    @given(st.integers(0, 10**6), st.floats(0.05, 0.95))
    def test_monotone_safety(self, seed, shrink):
        plan = random_two_level_plan(seed)
        with plan.ctx.scope():
            mu = [tau(plan, -1), tau(plan, 0)]
            _, s_big = decompose_system(plan, mu, 0)
            _, s_small = decompose_system(plan, [mu[0], mu[1] * mpf(shrink)], 0)
            tol = mpmath.ldexp(1, -plan.precision + 40) * mu[0]
            for a, b in zip(s_big.entries, s_small.entries):
                assert abs(b) <= abs(a) + tol


class TestProbe:
    def test_zero_matrix_matches_limit_exactly(self):
        rows = nullvector_limit_probe(PM1, 2, Matrix.zeros(1, 2), [10, 100, 1000], CTX)
        assert all(r.error is None and r.distance < TIGHT for r in rows)

    def test_degenerate_row(self):
        (row,) = nullvector_limit_probe(PM1, 2, Matrix.zeros(1, 2), [0], CTX)
        assert row.distance is None and "DegenerateSystem" in row.error
