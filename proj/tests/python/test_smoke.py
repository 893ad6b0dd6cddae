"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import duhamel


def test_taylor_tables_are_exact():
    assert duhamel.taylor_table("f", 6) == {0: "1", 2: "1/3", 4: "-1/45", 6: "2/945"}
    assert duhamel.taylor_table("g", 2) == {0: "1", 2: "-1/3"}
    assert duhamel.taylor_table("h", 4) == {0: "1/2", 2: "-1/6", 4: "-2/45"}
    assert duhamel.bernoulli_numbers(4) == ["1", "-1/2", "1/6", "0", "-1/30"]
    values = duhamel.taylor_values("f", 4)
    assert values[2] == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_kernel_remainders_and_signs():
    assert duhamel.remainder("f", 0, 2.0) > 0.0
    report = duhamel.verify_sign_definiteness("g", 4, grid_points=501)
    assert report["passed"]
    assert report["expected_sign"] == -1
    t, z = duhamel.zeta_cross_check(2)
    assert t == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert z == pytest.approx(t, rel=1e-12)


def test_pauli_algebra_and_duhamel_closed_form():
    y = duhamel.pauli(1, "y", 1)
    z = duhamel.pauli(1, "z", 1)
    x = duhamel.pauli(1, "x", 1)
    comm = duhamel.commutator(y, z)
    assert np.allclose(comm.matrix, 2j * x.matrix)

    b, beta = 0.8, 1.25
    h = duhamel.build_tfsk(1, np.zeros((1, 1)), 0.0, b)
    ctx = duhamel.make_gibbs(h, beta)
    got = duhamel.duhamel(ctx, z, z)
    assert got.real == pytest.approx(math.tanh(beta * b) / (beta * b), rel=1e-12)
    assert duhamel.thermal_expectation(ctx, x).real == pytest.approx(
        math.tanh(beta * b), rel=1e-12
    )

    atoms = duhamel.spectral_measure(ctx, z, z)
    omegas = sorted(omega for omega, _ in atoms)
    assert omegas == pytest.approx([-2.0 * b, 2.0 * b], rel=1e-12)


def test_theorem_reports_and_falk_bruch():
    h_op, a, _, beta = duhamel.make_random_instance(2, 11, 0.5, 2.0)
    ctx = duhamel.make_gibbs(h_op, beta)
    for theorem, n in (("t1", 2), ("t2", 0), ("t3", 4), ("t4", 4)):
        report = duhamel.theorem_bounds(theorem, ctx, a, n)
        assert report["satisfied"]
    residuals = duhamel.lemma_identity_suite(ctx, a, a)
    assert max(residuals[k] for k in ("lemma1", "lemma2", "lemma3", "lemma4", "lemma5")) < 1e-9

    fb = duhamel.falk_bruch_corollary(ctx, duhamel.pauli(1, "z", 2))
    assert fb["satisfied"]


def test_sk_variational_surface():
    assert duhamel.classical_q(0.5, 0.0) == 0.0
    at = duhamel.at_line_check(0.5, 0.0, 0.0)
    assert at["lhs"] == pytest.approx(0.25, abs=1e-13)
    assert at["stable"]

    points = duhamel.solve_stationary(beta=2.0, b1=0.0, h=0.0)
    selected = [p for p in points if p["selected"]]
    assert selected and abs(selected[0]["b0"]) < 1e-8
    assert selected[0]["q"] == pytest.approx(duhamel.classical_q(2.0, 0.0), abs=1e-8)

    h0 = duhamel.h0_special(1.0, 0.0)
    assert h0["bound"] == pytest.approx(-math.log(2.0) - 0.25, abs=1e-13)
    assert duhamel.literature_comparison(1.0, 0.5)["violates"]

    dq, db0 = duhamel.grad_phi(0.3, 0.2, beta=1.2, b1=0.4, h=0.1, quad_count=256)
    step = 1e-5
    fd = (
        duhamel.phi_bound(0.3 + step, 0.2, beta=1.2, b1=0.4, h=0.1, quad_count=256)
        - duhamel.phi_bound(0.3 - step, 0.2, beta=1.2, b1=0.4, h=0.1, quad_count=256)
    ) / (2 * step)
    assert dq == pytest.approx(fd, rel=1e-6)


def test_experiment_surface():
    g, z = duhamel.sample_disorder(3, 42)
    g2, z2 = duhamel.sample_disorder(3, 42)
    assert np.array_equal(g, g2) and np.array_equal(z, z2)
    assert g.shape == (3, 3) and z.shape == (3,)

    est = duhamel.phi_s_estimate(1, 1.0, beta=1.3, b1=0.8, h=0.4, q=0.0, b0=0.0, samples=4, seed=1)
    assert est["mean"] == pytest.approx(
        math.log(2.0 * math.cosh(1.3 * math.hypot(0.4, 0.8))), rel=1e-12
    )
    assert est["stderr"] == pytest.approx(0.0, abs=1e-13)

    check = duhamel.derivative_identity_check(
        2, 0.5, beta=1.0, b1=0.5, h=0.1, q=0.4, b0=0.2, samples=20, seed=9
    )
    assert check["diff"] < 1e-6

    report = duhamel.bound_validation(3, beta=1.0, b1=0.5, h=0.0, samples=15, seed=5)
    assert report["solver_converged"]
    assert report["satisfied_3sigma"]
    assert report["gap"] >= -3.0 * report["stderr"]


def test_metadata():
    assert duhamel.schema_version == 1
    assert isinstance(duhamel.generator_name, str)
    assert duhamel.generator_version == 1
