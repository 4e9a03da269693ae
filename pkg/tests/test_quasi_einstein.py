import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_gn_spec, random_spd, so3_quadratic
from liecurv import (AdaptedFrame, DiagonalTemplate, GnSpec, InvariantForm, LieAlgebra, Metric,
                     QEWitness, SolveOptions, adapted_frame, build_gn, gn_frame,
                     killing_subspace, lie_derivative_metric, qe_residual, ric_m_X, ricci_oracle,
                     ricci_trace, solve_qe, sym_ad, verify_killing_theorem)
from liecurv.errors import LiecurvError, NotPositiveDefiniteError
from liecurv.gn_family import family_deviations, killing_field, result_lam, solve_gn


@pytest.fixture
def g1_frame():
    return gn_frame(GnSpec((1.0,)), [2.0, 1.0, 1.0, 1.0])


def test_lie_derivative_vanishes_on_abelian(rng):
    fr = adapted_frame(LieAlgebra.abelian(3), InvariantForm(np.eye(3)), Metric(random_spd(rng, 3)))
    assert not lie_derivative_metric(fr, rng.normal(size=3)).any()


def test_center_is_killing(rng):
    spec = random_gn_spec(rng, 2)
    lam = rng.uniform(0.5, 3, spec.dim)
    fr = gn_frame(spec, lam)
    x = killing_field(lam)
    assert np.abs(lie_derivative_metric(fr, x)).max() <= 1e-13
    assert np.abs(sym_ad(fr, x)).max() <= 1e-13


def test_every_field_killing_for_bi_invariant_metric(rng):
    alg, form = so3_quadratic()
    fr = adapted_frame(alg, form, Metric.identity(3))
    assert np.abs(lie_derivative_metric(fr, rng.normal(size=3))).max() <= 1e-15


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_lie_derivative_is_minus_twice_sym_ad(seed, n):
    # left-invariant X: L_X g = -(ad X + ad X^t)
    rng = np.random.default_rng(seed)
    alg, form = build_gn(random_gn_spec(rng, n))
    fr = adapted_frame(alg, form, Metric(random_spd(rng, alg.dim)))
    x = rng.normal(size=alg.dim)
    L = lie_derivative_metric(fr, x)
    assert np.abs(L + 2 * sym_ad(fr, x)).max() <= 1e-10 * (1 + np.abs(L).max())


def test_sym_ad_of_f1_on_g1(g1_frame):
    S = sym_ad(g1_frame, [1.0, 0, 0, 0])
    expected = np.zeros((4, 4))
    # ad f1: f3 -> C_13^4 f4 = 0.5 f4, f4 -> C_14^3 f3 = 0.5 f3
    expected[2, 3] = expected[3, 2] = 0.5
    np.testing.assert_allclose(S, expected, atol=1e-15)
    assert not sym_ad(g1_frame, np.zeros(4)).any()


def test_killing_subspace_gn(rng):
    for n in (1, 2, 3):
        spec = random_gn_spec(rng, n)
        lam = rng.uniform(0.5, 3, spec.dim)
        fr = gn_frame(spec, lam)
        kill = killing_subspace(fr)
        assert len(kill) == 1
        k = killing_field(lam) / np.linalg.norm(killing_field(lam))
        assert abs(abs(kill[0] @ k) - 1) <= 1e-12


def test_killing_subspace_abelian_and_so3():
    fr = adapted_frame(LieAlgebra.abelian(3), InvariantForm(np.eye(3)), Metric.identity(3))
    assert len(killing_subspace(fr)) == 3
    alg, form = so3_quadratic()
    assert len(killing_subspace(adapted_frame(alg, form, Metric.identity(3)))) == 3


def test_ric_m_x_zero_field_is_ricci(g1_frame):
    ric = ricci_trace(g1_frame)
    np.testing.assert_array_equal(ric_m_X(g1_frame, ric, np.zeros(4), 3.0), ric.matrix)


def test_ric_m_x_g1_witness(g1_frame):
    ric = ricci_trace(g1_frame)
    T = ric_m_X(g1_frame, ric, [2.0, -1.0, 0, 0], 1.0)
    np.testing.assert_allclose(T, -2.5 * np.eye(4), atol=1e-12)
    assert qe_residual(g1_frame, ric, [2.0, -1.0, 0, 0], -2.5, 1.0) <= 1e-10
    assert qe_residual(g1_frame, ric, [2.0, -1.0, 0, 0], -1.5, 1.0) == pytest.approx(2.0, abs=1e-10)


def test_infinite_m_and_killing_field_leaves_ricci(g1_frame):
    ric = ricci_trace(g1_frame)
    np.testing.assert_allclose(ric_m_X(g1_frame, ric, [2.0, -1.0, 0, 0], math.inf), ric.matrix, atol=1e-14)


def test_infinite_m_is_soliton_form(rng, g1_frame):
    ric = ricci_trace(g1_frame)
    x = rng.normal(size=4)
    T = ric_m_X(g1_frame, ric, x, math.inf)
    np.testing.assert_array_equal(T, ric.matrix + 0.5 * lie_derivative_metric(g1_frame, x))


def test_killing_correction_paths_agree(rng):
    spec = random_gn_spec(rng, 2)
    lam = rng.uniform(0.5, 3, spec.dim)
    fr = gn_frame(spec, lam)
    ric = ricci_trace(fr)
    x = 1.7 * killing_field(lam)
    m = 2.3
    proj = (x @ x) / m * np.outer(x, x) / (x @ x)
    assert np.abs(ric_m_X(fr, ric, x, m) - (ric.matrix - proj)).max() <= 1e-12


def test_einstein_so3_residual():
    alg, form = so3_quadratic()
    fr = adapted_frame(alg, form, Metric.identity(3))
    assert qe_residual(fr, ricci_oracle(fr), np.zeros(3), 0.5, 7.0) <= 1e-12


def test_bad_m_rejected(g1_frame):
    ric = ricci_trace(g1_frame)
    for m in (0.0, -1.0, float("nan")):
        with pytest.raises(LiecurvError):
            ric_m_X(g1_frame, ric, np.zeros(4), m)
    with pytest.raises(LiecurvError):
        QEWitness(np.zeros(4), 0.0, -2.0, 0.0)


def test_witness_residual_is_recomputed(g1_frame):
    ric = ricci_trace(g1_frame)
    w = QEWitness.build(g1_frame, ric, [2.0, -1.0, 0, 0], -2.4, 1.0)
    assert w.residual == qe_residual(g1_frame, ric, w.x, w.lambda_const, w.m)


def test_verify_killing_theorem(g1_frame):
    ric = ricci_trace(g1_frame)
    good = QEWitness.build(g1_frame, ric, [2.0, -1.0, 0, 0], -2.5, 1.0)
    assert verify_killing_theorem(g1_frame, good)[0]
    bad = QEWitness(np.array([0, 0, 1.0, 0]), -2.5, 1.0, 0.0)
    ok, worst = verify_killing_theorem(g1_frame, bad)
    assert not ok and worst > 0.1
    assert verify_killing_theorem(g1_frame, QEWitness(np.zeros(4), 0.0, 1.0, 0.0)) == (True, 0.0)


def test_residual_invariant_under_eigenspace_rotation(g1_frame):
    # theta eigenvalues (1/4, -1, 1, -1): rotate inside the span of f2, f4
    c, s = math.cos(0.7), math.sin(0.7)
    R = np.eye(4)
    R[np.ix_([1, 3], [1, 3])] = [[c, -s], [s, c]]
    rotated = AdaptedFrame(g1_frame.algebra, g1_frame.form, g1_frame.metric, g1_frame.basis @ R)
    assert rotated.diagonalization_error() <= 1e-14
    x = np.array([2.0, -1.0, 0.3, 0.2])
    x_rot = R.T @ x
    r1 = qe_residual(g1_frame, ricci_trace(g1_frame), x, -2.0, 1.5)
    r2 = qe_residual(rotated, ricci_trace(rotated), x_rot, -2.0, 1.5)
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_solve_g1_from_paper_seed():
    spec = GnSpec((1.0,))
    res = solve_gn(spec, [[2.0, 1.0, 1.0, 1.0], [2.1, 0.9, 1.05, 0.97]], SolveOptions(normalize=True))
    assert res
    for r in res:
        dev = family_deviations(spec, result_lam(r), normalize=True)
        assert dev["pairs"] <= 1e-8 and dev["product"] <= 1e-8
        assert r.witness.residual < 1e-10
        assert r.killing_ok
        assert abs(np.sum(np.log(r.params))) <= 1e-9


def test_solve_gn_n2_random_seeds():
    spec = GnSpec((1.0, 2.0))
    res = solve_gn(spec, 6, SolveOptions(normalize=True, seed=11))
    assert res
    for r in res:
        assert max(family_deviations(spec, result_lam(r), normalize=True).values()) <= 1e-8


def test_free_field_solutions_are_killing():
    spec = GnSpec((1.0,))
    res = solve_gn(spec, 6, SolveOptions(normalize=True, killing=False, seed=5))
    assert res
    for r in res:
        assert r.killing_ok
        assert max(family_deviations(spec, result_lam(r), normalize=True).values()) <= 1e-8


def test_solve_abelian_is_flat():
    alg = LieAlgebra.abelian(3)
    res = solve_qe(alg, None, DiagonalTemplate(np.eye(3), np.ones(3)), 3, SolveOptions(seed=2))
    assert res
    for r in res:
        assert r.witness.residual < 1e-10
        assert abs(r.witness.lambda_const) < 1e-10
        assert np.linalg.norm(r.witness.x) ** 2 / r.witness.m < 1e-10


def test_solve_is_deterministic_given_seed():
    spec = GnSpec((1.0,))
    a = solve_gn(spec, 4, SolveOptions(seed=9))
    b = solve_gn(spec, 4, SolveOptions(seed=9))
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_solve_seed_from_environment(monkeypatch):
    spec = GnSpec((1.0,))
    monkeypatch.setenv("LIECURV_SEED", "17")
    a = solve_gn(spec, 3)
    b = solve_gn(spec, 3)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_solve_rejects_bad_template():
    with pytest.raises(NotPositiveDefiniteError):
        DiagonalTemplate(np.eye(2), [1.0, -1.0])
    spec = GnSpec((1.0,))
    with pytest.raises(NotPositiveDefiniteError):
        solve_gn(spec, [[0.0, 1.0, 1.0, 1.0]])
