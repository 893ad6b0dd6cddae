#include <doctest.h>

#include <cmath>
#include <complex>

#include "duhamel/hilbert.hpp"
#include "duhamel/rng.hpp"

using namespace duhamel;
using namespace duhamel::hilbert;
using Complex = std::complex<double>;

namespace {

DenseOperator random_hermitian(int n_sites, std::uint64_t seed) {
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    Matrix g(dim, dim);
    std::uint64_t idx = 0;
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            g(i, j) = Complex(rng::gaussian(seed, idx), rng::gaussian(seed, idx + 1));
            idx += 2;
        }
    Matrix m = 0.5 * (g + g.adjoint()) / std::sqrt(static_cast<double>(dim));
    return DenseOperator{n_sites, std::move(m), true};
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("hilbert") {

TEST_CASE("single-site paulis and their algebra") {
    const auto z = pauli(1, 'z', 1);
    CHECK(z.mat(0, 0) == Complex(1.0));
    CHECK(z.mat(1, 1) == Complex(-1.0));
    CHECK(z.mat(0, 1) == Complex(0.0));

    // [Y_k, Z_j] = 2i delta_{kj} X_j
    for (int n : {1, 2, 3}) {
        for (int k = 1; k <= n; ++k)
            for (int j = 1; j <= n; ++j) {
                const auto comm = commutator(pauli(k, 'y', n), pauli(j, 'z', n));
                if (k == j) {
                    CHECK(max_abs_diff(comm.mat, Complex(0.0, 2.0) * pauli(j, 'x', n).mat) < 1e-14);
                } else {
                    CHECK(comm.mat.cwiseAbs().maxCoeff() < 1e-14);
                }
            }
    }

    // squares are the identity
    const auto x2 = multiply(pauli(2, 'x', 2), pauli(2, 'x', 2));
    CHECK(max_abs_diff(x2.mat, Matrix::Identity(4, 4)) < 1e-14);

    CHECK_THROWS_AS(pauli(0, 'z', 2), std::invalid_argument);
    CHECK_THROWS_AS(pauli(3, 'z', 2), std::invalid_argument);
    CHECK_THROWS_AS(pauli(1, 'w', 2), std::invalid_argument);
    CHECK_THROWS_AS(pauli(1, 'z', size_cap() + 1), std::invalid_argument);
}

TEST_CASE("pauli_string builds products") {
    const auto zz = pauli_string(2, {{1, 'z'}, {2, 'z'}});
    CHECK(max_abs_diff(zz.mat, multiply(pauli(1, 'z', 2), pauli(2, 'z', 2)).mat) < 1e-14);
    CHECK(zz.hermitian_hint);
}

TEST_CASE("tfsk hamiltonian: single site, two-site coupling, Z2 symmetry") {
    Eigen::MatrixXd g0 = Eigen::MatrixXd::Zero(1, 1);
    const auto h1 = build_tfsk(1, g0, 0.0, 0.7);
    CHECK(max_abs_diff(h1.mat, -0.7 * pauli(1, 'x', 1).mat) < 1e-14);
    const auto eig1 = eigendecompose(h1);
    CHECK(eig1.energies(0) == doctest::Approx(-0.7).epsilon(1e-14));
    CHECK(eig1.energies(1) == doctest::Approx(0.7).epsilon(1e-14));

    // N=2, g12 = sqrt(2), no fields: 1/sqrt(2) cancels and H = -Z1 Z2
    Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(2, 2);
    g2(0, 1) = std::sqrt(2.0);
    const auto h2 = build_tfsk(2, g2, 0.0, 0.0);
    CHECK(max_abs_diff(h2.mat, -multiply(pauli(1, 'z', 2), pauli(2, 'z', 2)).mat) < 1e-14);
    const auto eig2 = eigendecompose(h2);
    CHECK(eig2.energies(0) == doctest::Approx(-1.0));
    CHECK(eig2.energies(1) == doctest::Approx(-1.0));
    CHECK(eig2.energies(2) == doctest::Approx(1.0));
    CHECK(eig2.energies(3) == doctest::Approx(1.0));

    // h = 0: U H U^dag = H for U = prod_i X_i
    const int n = 3;
    Eigen::MatrixXd g3(n, n);
    g3.setZero();
    g3(0, 1) = 0.3; g3(0, 2) = -1.1; g3(1, 2) = 0.8;
    const auto h3 = build_tfsk(n, g3, 0.0, 0.45);
    DenseOperator u = pauli(1, 'x', n);
    for (int j = 2; j <= n; ++j) u = multiply(u, pauli(j, 'x', n));
    CHECK(max_abs_diff(u.mat * h3.mat * u.mat.adjoint(), h3.mat) < 1e-12);
    // and the symmetry is broken once h != 0
    const auto h3h = build_tfsk(n, g3, 0.25, 0.45);
    CHECK(max_abs_diff(u.mat * h3h.mat * u.mat.adjoint(), h3h.mat) > 1e-3);
}

TEST_CASE("interpolated hamiltonian endpoints") {
    const int n = 3;
    Eigen::MatrixXd g(n, n);
    g.setZero();
    g(0, 1) = -0.4; g(0, 2) = 1.3; g(1, 2) = 0.25;
    Eigen::VectorXd z(n);
    z << 0.6, -1.2, 0.1;

    const auto at_one = build_interpolated(n, 1.0, g, z, 0.7, 0.2, 0.9, 0.35);
    CHECK(max_abs_diff(at_one.mat, build_tfsk(n, g, 0.2, 0.35).mat) < 1e-14);

    const auto at_zero = build_interpolated(n, 0.0, g, z, 0.0, 0.0, 0.8, 0.35);
    Matrix expected = Matrix::Zero(8, 8);
    for (int j = 1; j <= n; ++j) expected -= 0.8 * pauli(j, 'x', n).mat;
    CHECK(max_abs_diff(at_zero.mat, expected) < 1e-14);

    // s=0, N=1, q=1: two-level closed form -(z1+h) sigma^z - b0 sigma^x
    Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(1, 1);
    Eigen::VectorXd z1(1);
    z1 << -0.35;
    const double h_field = 0.15, b0 = 0.6;
    const auto single = build_interpolated(1, 0.0, g1, z1, 1.0, h_field, b0, 2.0);
    const auto eig = eigendecompose(single);
    const double kappa = std::hypot(z1(0) + h_field, b0);
    CHECK(eig.energies(0) == doctest::Approx(-kappa).epsilon(1e-14));
    CHECK(eig.energies(1) == doctest::Approx(kappa).epsilon(1e-14));

    CHECK_THROWS_AS(build_interpolated(1, -0.1, g1, z1, 0.5, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_interpolated(1, 0.5, g1, z1, 1.5, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("eigendecomposition invariants") {
    const auto op = random_hermitian(3, 7);
    const auto eig = eigendecompose(op);
    CHECK(max_abs_diff(eig.basis.adjoint() * eig.basis, Matrix::Identity(8, 8)) < 1e-10);
    const Matrix rebuilt = eig.basis * eig.energies.asDiagonal() * eig.basis.adjoint();
    CHECK(max_abs_diff(rebuilt, op.mat) < 1e-10 * std::max(1.0, op.mat.cwiseAbs().maxCoeff()));
    for (Eigen::Index i = 1; i < eig.energies.size(); ++i)
        CHECK(eig.energies(i - 1) <= eig.energies(i));

    DenseOperator bad{1, Matrix::Zero(2, 2), true};
    bad.mat(0, 1) = Complex(0.0, 1.0);  // not Hermitian
    CHECK_THROWS_AS(eigendecompose(bad), std::invalid_argument);
}

TEST_CASE("gibbs context and thermal expectations") {
    const double b = 0.8, beta = 1.7;
    const auto h = build_tfsk(1, Eigen::MatrixXd::Zero(1, 1), 0.0, b);
    const auto ctx = make_gibbs(h, beta);
    CHECK(ctx.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(thermal_expectation(ctx, identity_op(1)).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(thermal_expectation(ctx, pauli(1, 'x', 1)).real() ==
          doctest::Approx(std::tanh(beta * b)).epsilon(1e-13));
    CHECK(std::abs(thermal_expectation(ctx, pauli(1, 'z', 1))) < 1e-14);

    // Hermitian observables give real expectations
    const auto op = random_hermitian(2, 3);
    const auto rctx = make_gibbs(random_hermitian(2, 4), 2.2);
    CHECK(std::abs(thermal_expectation(rctx, op).imag()) < 1e-10);

    CHECK_THROWS_AS(make_gibbs(h, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(thermal_expectation(ctx, identity_op(2)), std::invalid_argument);
}

TEST_CASE("spectral measure atoms for closed-form cases") {
    const double b = 0.9, beta = 1.3;
    const auto ctx = make_gibbs(build_tfsk(1, Eigen::MatrixXd::Zero(1, 1), 0.0, b), beta);

    const auto trivial = spectral_measure(ctx, identity_op(1), identity_op(1));
    REQUIRE(trivial.atoms.size() == 1);
    CHECK(trivial.atoms[0].first == doctest::Approx(0.0));
    CHECK(trivial.atoms[0].second.real() == doctest::Approx(2.0).epsilon(1e-13));

    // H = -b X, A = B = Z: atoms at +-2b, each of weight 1
    const auto zmeasure = spectral_measure(ctx, pauli(1, 'z', 1), pauli(1, 'z', 1));
    REQUIRE(zmeasure.atoms.size() == 2);
    CHECK(zmeasure.atoms[0].first == doctest::Approx(-2.0 * b).epsilon(1e-13));
    CHECK(zmeasure.atoms[1].first == doctest::Approx(2.0 * b).epsilon(1e-13));
    CHECK(zmeasure.atoms[0].second.real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(zmeasure.atoms[1].second.real() == doctest::Approx(1.0).epsilon(1e-13));

    // symmetry Q_{B,A}(-omega) = Q_{A,B}(omega) on a random two-site instance
    const auto hop = random_hermitian(2, 11);
    const auto rctx = make_gibbs(hop, 0.9);
    DenseOperator a{2, random_hermitian(2, 12).mat * Complex(0.3, 0.4), false};
    DenseOperator bb{2, random_hermitian(2, 13).mat * Complex(-0.1, 1.0), false};
    const auto q_ab = spectral_measure(rctx, a, bb);
    const auto q_ba = spectral_measure(rctx, bb, a);
    REQUIRE(q_ab.atoms.size() == q_ba.atoms.size());
    for (std::size_t i = 0; i < q_ab.atoms.size(); ++i) {
        const auto& [omega, w] = q_ab.atoms[i];
        const auto& [omega_rev, w_rev] = q_ba.atoms[q_ba.atoms.size() - 1 - i];
        CHECK(omega_rev == doctest::Approx(-omega).epsilon(1e-10));
        CHECK(std::abs(w_rev - w) < 1e-10 * q_ab.total_abs());
    }

    // diagonal case: weights real and nonnegative
    const auto diag = spectral_measure(rctx, dagger(a), a);
    for (const auto& [omega, w] : diag.atoms) {
        CHECK(std::abs(w.imag()) <= 1e-12 * diag.total_abs());
        CHECK(w.real() >= -1e-12 * diag.total_abs());
    }
}

TEST_CASE("spectral measure is bilinear and conjugates contravariantly") {
    const auto hop = random_hermitian(2, 41);
    const auto ctx = make_gibbs(hop, 1.6);
    DenseOperator a1{2, random_hermitian(2, 42).mat * Complex(0.5, -0.8), false};
    DenseOperator a2{2, random_hermitian(2, 43).mat * Complex(-1.1, 0.2), false};
    DenseOperator b{2, random_hermitian(2, 44).mat * Complex(0.9, 0.4), false};
    const Complex alpha(0.7, -1.3);

    // Q_{alpha A1 + A2, B} = alpha Q_{A1,B} + Q_{A2,B}, atom by atom
    DenseOperator combo{2, alpha * a1.mat + a2.mat, false};
    const auto q_combo = spectral_measure(ctx, combo, b);
    const auto q1 = spectral_measure(ctx, a1, b);
    const auto q2 = spectral_measure(ctx, a2, b);
    REQUIRE(q_combo.atoms.size() == q1.atoms.size());
    REQUIRE(q_combo.atoms.size() == q2.atoms.size());
    for (std::size_t i = 0; i < q_combo.atoms.size(); ++i) {
        const Complex expected = alpha * q1.atoms[i].second + q2.atoms[i].second;
        CHECK(std::abs(q_combo.atoms[i].second - expected) < 1e-10 * q_combo.total_abs());
    }

    // Q_{A,B}(omega)^* = Q_{B^dag,A^dag}(omega)
    const auto q_ab = spectral_measure(ctx, a1, b);
    const auto q_conj = spectral_measure(ctx, dagger(b), dagger(a1));
    REQUIRE(q_ab.atoms.size() == q_conj.atoms.size());
    for (std::size_t i = 0; i < q_ab.atoms.size(); ++i) {
        CHECK(q_conj.atoms[i].first == doctest::Approx(q_ab.atoms[i].first).epsilon(1e-12));
        CHECK(std::abs(std::conj(q_ab.atoms[i].second) - q_conj.atoms[i].second) <
              1e-10 * q_ab.total_abs());
    }
}

TEST_CASE("duhamel on a degenerate spectrum reduces to the plain expectation") {
    // H = -Z1 Z2 has two two-fold degenerate levels; [H, Z1] = 0, so every
    // contributing pair is degenerate and (Z1, Z1) = <Z1^2> = 1 exactly.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 1) = std::sqrt(2.0);
    const auto ctx = make_gibbs(build_tfsk(2, g, 0.0, 0.0), 2.3);
    const auto z1 = pauli(1, 'z', 2);
    CHECK(hilbert::duhamel(ctx, z1, z1).real() == doctest::Approx(1.0).epsilon(1e-13));
    // and the s=1/2-style mixed observable keeps the identities intact
    const auto res = spectral_measure(ctx, z1, pauli(2, 'z', 2));
    Complex total = 0.0;
    for (const auto& [omega, w] : res.atoms) total += w;
    const auto direct = bilinear_expectations(ctx, z1, pauli(2, 'z', 2));
    CHECK(std::abs(total - direct.anticomm) < 1e-12);
}

TEST_CASE("duhamel closed forms and the quadrature oracle") {
    const double b = 1.0, beta = 1.0;
    const auto h = build_tfsk(1, Eigen::MatrixXd::Zero(1, 1), 0.0, b);
    const auto ctx = make_gibbs(h, beta);

    CHECK(hilbert::duhamel(ctx, identity_op(1), identity_op(1)).real() == doctest::Approx(1.0).epsilon(1e-14));
    const double expected = std::tanh(beta * b) / (beta * b);
    CHECK(hilbert::duhamel(ctx, pauli(1, 'z', 1), pauli(1, 'z', 1)).real() ==
          doctest::Approx(expected).epsilon(1e-13));
    CHECK(duhamel_by_quadrature(h, beta, pauli(1, 'z', 1), pauli(1, 'z', 1), 64).real() ==
          doctest::Approx(std::tanh(1.0)).epsilon(1e-10));
    CHECK(duhamel_by_quadrature(h, beta, identity_op(1), identity_op(1), 64).real() ==
          doctest::Approx(1.0).epsilon(1e-12));

    for (std::uint64_t seed = 21; seed < 26; ++seed) {
        const auto hr = random_hermitian(2, seed);
        const double beta_r = 0.4 + 0.37 * static_cast<double>(seed - 20);
        const auto rctx = make_gibbs(hr, beta_r);
        DenseOperator a{2, random_hermitian(2, seed + 100).mat * Complex(0.7, -0.2), false};
        DenseOperator bb{2, random_hermitian(2, seed + 200).mat, false};
        const auto fast = hilbert::duhamel(rctx, a, bb);
        const auto slow = duhamel_by_quadrature(hr, beta_r, a, bb, 64);
        CHECK(std::abs(fast - slow) < 1e-8 * std::max(1.0, std::abs(fast)));
    }

    CHECK_THROWS_AS(duhamel_by_quadrature(h, beta, identity_op(1), identity_op(1), 8),
                    std::invalid_argument);
}

TEST_CASE("nested commutators on the free spin") {
    const double b = 0.65;
    const auto h = build_tfsk(1, Eigen::MatrixXd::Zero(1, 1), 0.0, b);
    const auto z = pauli(1, 'z', 1);

    CHECK(max_abs_diff(nested_commutator(h, z, 0).mat, z.mat) == 0.0);
    // [H, Z] = -b [X, Z] = 2 i b Y
    CHECK(max_abs_diff(nested_commutator(h, z, 1).mat,
                       Complex(0.0, 2.0 * b) * pauli(1, 'y', 1).mat) < 1e-14);
    CHECK(max_abs_diff(nested_commutator(h, z, 2).mat, 4.0 * b * b * z.mat) < 1e-14);
    CHECK_THROWS_AS(nested_commutator(h, z, -1), std::invalid_argument);

    // [H, C^{k-1}] = C^k
    const auto hr = random_hermitian(2, 31);
    DenseOperator a{2, random_hermitian(2, 32).mat * Complex(0.2, 0.9), false};
    const auto c2 = nested_commutator(hr, a, 2);
    const auto c3 = nested_commutator(hr, a, 3);
    CHECK(max_abs_diff(commutator(hr, c2).mat, c3.mat) < 1e-12);
}

TEST_CASE("bilinear expectations: closed forms") {
    const double b = 1.2, beta = 0.7;
    const auto ctx = make_gibbs(build_tfsk(1, Eigen::MatrixXd::Zero(1, 1), 0.0, b), beta);
    const auto z = pauli(1, 'z', 1);

    const auto vals = bilinear_expectations(ctx, z, z);
    CHECK(vals.anticomm.real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(vals.comm) < 1e-14);
    CHECK(vals.double_comm.real() == doctest::Approx(4.0 * b * std::tanh(beta * b)).epsilon(1e-13));

    const auto ones = bilinear_expectations(ctx, identity_op(1), identity_op(1));
    CHECK(std::abs(ones.comm) < 1e-15);
    CHECK(std::abs(ones.double_comm) < 1e-15);
    CHECK(ones.anticomm.real() == doctest::Approx(2.0));
}

TEST_CASE("log partition function is shift-stable") {
    Eigen::VectorXd e(3);
    e << -400.0, -399.0, 10.0;
    const double beta = 2.0;
    // direct evaluation would overflow; the shifted form must not
    const double lz = log_partition(e, beta);
    CHECK(std::isfinite(lz));
    CHECK(lz == doctest::Approx(800.0 + std::log(1.0 + std::exp(-2.0) + std::exp(-820.0))).epsilon(1e-13));
}

}  // TEST_SUITE
