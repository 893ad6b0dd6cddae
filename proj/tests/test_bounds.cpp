#include <doctest.h>

#include <cmath>
#include <complex>

#include "duhamel/bounds.hpp"
#include "duhamel/rng.hpp"
#include "duhamel/series.hpp"

using namespace duhamel;
using namespace duhamel::bounds;
using hilbert::DenseOperator;
using hilbert::Matrix;
using Complex = std::complex<double>;

namespace {

DenseOperator free_spin(double b) {
    return hilbert::build_tfsk(1, Eigen::MatrixXd::Zero(1, 1), 0.0, b);
}

double expect_re(const hilbert::GibbsContext& ctx, const Matrix& m) {
    const Matrix t = ctx.eig.basis.adjoint() * m * ctx.eig.basis;
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < ctx.dim(); ++i) acc += ctx.weights(i) * t(i, i);
    return acc.real();
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("theorem 1 at n=2 reproduces the Bogoliubov-Harris structure") {
    const auto inst = make_random_instance(2, 42, 0.5, 0.5);
    const auto ctx = hilbert::make_gibbs(inst.h, inst.beta);
    const auto rep = theorem1_bounds(ctx, inst.a, 2);

    // reassemble the two chain terms by hand
    const Matrix h = inst.h.mat;
    const Matrix a = inst.a.mat;
    const Matrix c1 = h * a - a * h;
    const Matrix c2 = h * c1 - c1 * h;
    const double term1 = inst.beta / 12.0 * expect_re(ctx, a.adjoint() * c1 - c1 * a.adjoint());
    const double term2 = std::pow(inst.beta, 3) / 720.0 *
                         expect_re(ctx, c1.adjoint() * c2 - c2 * c1.adjoint());

    CHECK(rep.upper == doctest::Approx(term1).epsilon(1e-12));
    CHECK(rep.lower.has_value());
    CHECK(*rep.lower == doctest::Approx(term1 - term2).epsilon(1e-12));
    CHECK(rep.exact == doctest::Approx(0.5 * expect_re(ctx, a.adjoint() * a + a * a.adjoint()) -
                                       hilbert::duhamel(ctx, hilbert::dagger(inst.a), inst.a).real())
                           .epsilon(1e-12));
    CHECK(rep.satisfied);

    CHECK_THROWS_AS(theorem1_bounds(ctx, inst.a, 4), std::invalid_argument);  // n/2 even
    CHECK_THROWS_AS(theorem1_bounds(ctx, inst.a, 3), std::invalid_argument);
}

TEST_CASE("theorem 2 at n=0: anticommutator bound and the free-spin closed form") {
    const double b = 0.8, beta = 1.1;
    const auto ctx = hilbert::make_gibbs(free_spin(b), beta);
    const auto z = hilbert::pauli(1, 'z', 1);
    const auto rep = theorem2_bounds(ctx, z, 0);

    CHECK(rep.exact == doctest::Approx(std::tanh(beta * b) / (beta * b)).epsilon(1e-12));
    CHECK(rep.upper == doctest::Approx(1.0).epsilon(1e-13));
    // <{[H,Z]^dag,[H,Z]}> = 8 b^2, so the lower chain is 1 - beta^2 b^2 / 3
    CHECK(rep.lower.has_value());
    CHECK(*rep.lower == doctest::Approx(1.0 - beta * beta * b * b / 3.0).epsilon(1e-12));
    CHECK(rep.satisfied);

    CHECK_THROWS_AS(theorem2_bounds(ctx, z, 2), std::invalid_argument);  // n/2 odd
}

TEST_CASE("theorem 3 at n=0 and the free-spin double commutator") {
    const double b = 0.8, beta = 0.5;
    const auto ctx = hilbert::make_gibbs(free_spin(b), beta);
    const auto z = hilbert::pauli(1, 'z', 1);

    const auto rep0 = theorem3_bounds(ctx, z, 0);
    CHECK(rep0.exact == doctest::Approx(4.0 * b * std::tanh(beta * b)).epsilon(1e-12));
    CHECK(rep0.upper == doctest::Approx(beta / 2.0 * 8.0 * b * b).epsilon(1e-12));
    CHECK(rep0.lower.has_value());
    // lower adds -(beta^3/24) <{C^2+,C^2}> with C^2 = 4 b^2 Z
    CHECK(*rep0.lower ==
          doctest::Approx(beta / 2.0 * 8.0 * b * b -
                          std::pow(beta, 3) / 24.0 * 2.0 * 16.0 * std::pow(b, 4))
              .epsilon(1e-12));
    CHECK(rep0.satisfied);

    const auto rep4 = theorem3_bounds(ctx, z, 4);
    CHECK(rep4.exact == doctest::Approx(4.0 * b * std::tanh(beta * b)).epsilon(1e-12));
    CHECK(rep4.satisfied);
}

TEST_CASE("identity observable collapses every chain") {
    const auto inst = make_random_instance(2, 7, 2.0, 2.0);
    const auto ctx = hilbert::make_gibbs(inst.h, inst.beta);
    const auto one = hilbert::identity_op(2);

    const auto t1 = theorem1_bounds(ctx, one, 2);
    CHECK(t1.exact == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(t1.upper == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(*t1.lower == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    const auto t2 = theorem2_bounds(ctx, one, 0);
    CHECK(t2.exact == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t2.upper == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*t2.lower == doctest::Approx(1.0).epsilon(1e-12));

    const auto t3 = theorem3_bounds(ctx, one, 0);
    CHECK(t3.exact == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(t3.upper == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
}

TEST_CASE("theorem 4: polynomial structure, dominance, Hermitian case") {
    // A = sigma^-: r = <sigma^z>, nonzero once a longitudinal field is on
    const double beta = 1.4;
    const auto ctx =
        hilbert::make_gibbs(hilbert::build_tfsk(1, Eigen::MatrixXd::Zero(1, 1), 0.3, 0.9), beta);
    DenseOperator lowering{1, Matrix::Zero(2, 2), false};
    lowering.mat(1, 0) = 1.0;  // |down><up|

    const auto rep = theorem4_upper(ctx, lowering, 4);
    const auto direct = hilbert::bilinear_expectations(ctx, hilbert::dagger(lowering), lowering);
    const double anticomm = direct.anticomm.real();
    const double r = direct.comm.real() / anticomm;
    CHECK(std::abs(r) > 1e-3);
    CHECK(rep.upper ==
          doctest::Approx(anticomm * 0.5 * (1.0 - r * r / 3.0 - 4.0 * std::pow(r, 4) / 45.0))
              .epsilon(1e-12));
    REQUIRE(rep.roepstorff.has_value());
    CHECK(rep.upper >= *rep.roepstorff - 1e-12);
    CHECK(*rep.roepstorff >= rep.exact - 1e-12);
    CHECK(rep.satisfied);
    CHECK(!rep.lower.has_value());

    // Hermitian A: r = 0 and the bound is <{A,A}>/2
    const auto z = hilbert::pauli(1, 'z', 1);
    const auto hz = theorem4_upper(ctx, z, 0);
    CHECK(hz.upper == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hz.satisfied);

    CHECK_THROWS_AS(theorem4_upper(ctx, lowering, 2), std::invalid_argument);  // n/2 odd
    DenseOperator zero{1, Matrix::Zero(2, 2), false};
    CHECK_THROWS_AS(theorem4_upper(ctx, zero, 0), std::domain_error);
}

TEST_CASE("bracketing holds on a seeded random ensemble") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const int sites = 1 + static_cast<int>(seed % 3);
        const auto inst = make_random_instance(sites, rng::derive_seed(99, seed), 0.1, 5.0);
        const auto ctx = hilbert::make_gibbs(inst.h, inst.beta);
        for (int n : {2, 6, 10}) {
            const auto rep = theorem1_bounds(ctx, inst.a, n);
            CHECK(rep.satisfied);
            ++checked;
        }
        for (int n : {0, 4, 8}) {
            CHECK(theorem2_bounds(ctx, inst.a, n).satisfied);
            CHECK(theorem3_bounds(ctx, inst.a, n).satisfied);
            CHECK(theorem4_upper(ctx, inst.a, n).satisfied);
            checked += 3;
        }
    }
    CHECK(checked == 25 * 12);
}

TEST_CASE("order consistency: adjacent chains differ by exactly one term") {
    const auto inst = make_random_instance(2, 1234, 1.5, 1.5);
    const auto ctx = hilbert::make_gibbs(inst.h, inst.beta);
    for (int n : {0, 4}) {
        const auto rep = theorem2_bounds(ctx, inst.a, n);
        const int k = n / 2 + 1;
        const auto table = series::taylor_table(series::Kernel::G, n + 2);
        const auto h = inst.h.mat;
        Matrix c = inst.a.mat;
        for (int j = 0; j < k; ++j) c = h * c - c * h;
        const double term = std::pow(0.5 * inst.beta, 2 * k) * 0.5 * table.value(2 * k) *
                            expect_re(ctx, c.adjoint() * c + c * c.adjoint());
        CHECK(rep.upper - *rep.lower == doctest::Approx(std::abs(term)).epsilon(1e-10));
    }
}

TEST_CASE("lemma identity suite residuals") {
    // trivial operators: identities hold exactly
    const auto ctx1 = hilbert::make_gibbs(free_spin(0.7), 2.0);
    const auto ones = lemma_identity_suite(ctx1, hilbert::identity_op(1), hilbert::identity_op(1));
    CHECK(ones.worst() < 1e-12);

    // random operators at N = 2, beta = 2
    const auto inst = make_random_instance(2, 5, 2.0, 2.0);
    const auto ctx2 = hilbert::make_gibbs(inst.h, inst.beta);
    const auto res = lemma_identity_suite(ctx2, inst.a, inst.b);
    CHECK(res.lemma1 < 1e-9);
    CHECK(res.lemma2 < 1e-9);
    CHECK(res.lemma3 < 1e-9);
    CHECK(res.lemma4 < 1e-9);
    CHECK(res.lemma5 < 1e-9);
    CHECK(res.duhamel_vs_quadrature < 1e-6);

    // TFSK instance with single-site observables
    const auto coupling = [&] {
        Eigen::MatrixXd g(3, 3);
        g.setZero();
        g(0, 1) = 0.9; g(0, 2) = -0.2; g(1, 2) = 1.4;
        return g;
    }();
    const auto ctx3 = hilbert::make_gibbs(hilbert::build_tfsk(3, coupling, 0.1, 0.6), 1.2);
    const auto res3 =
        lemma_identity_suite(ctx3, hilbert::pauli(1, 'z', 3), hilbert::pauli(2, 'z', 3));
    CHECK(res3.worst() < 1e-9);
    CHECK(res3.duhamel_vs_quadrature < 1e-6);
}

TEST_CASE("phi inversion solves r tanh r = u") {
    CHECK(phi_inverse(0.0) == 0.0);
    for (double r : {1e-6, 0.03, 0.7, 1.0, 4.0, 30.0}) {
        const double u = r * std::tanh(r);
        CHECK(phi_inverse(u) == doctest::Approx(r).epsilon(1e-11));
    }
    CHECK_THROWS_AS(phi_inverse(-0.5), std::domain_error);
}

TEST_CASE("falk-bruch corollary: equality on the free spin, validity elsewhere") {
    for (double b : {0.1, 0.5, 1.0, 2.0}) {
        for (double beta : {0.5, 1.0, 2.0}) {
            const auto ctx = hilbert::make_gibbs(free_spin(b), beta);
            const auto rep = falk_bruch_corollary(ctx, hilbert::pauli(1, 'z', 1));
            CHECK(rep.satisfied);
            // equality: lhs = rhs = g(beta b)
            CHECK(rep.lhs == doctest::Approx(rep.rhs).epsilon(1e-10));
            CHECK(rep.rhs == doctest::Approx(std::tanh(beta * b) / (beta * b)).epsilon(1e-10));
        }
    }

    // A commuting with H: u = 0, both sides 1
    const auto ctx = hilbert::make_gibbs(free_spin(0.8), 1.0);
    const auto rep = falk_bruch_corollary(ctx, hilbert::pauli(1, 'x', 1));
    CHECK(rep.u == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));

    // random two-site Pauli observable
    const auto inst = make_random_instance(2, 77, 1.3, 1.3);
    const auto rctx = hilbert::make_gibbs(inst.h, inst.beta);
    CHECK(falk_bruch_corollary(rctx, hilbert::pauli(1, 'z', 2)).satisfied);
    CHECK(falk_bruch_corollary(rctx, hilbert::pauli(2, 'y', 2)).satisfied);

    // non-involutions are rejected
    DenseOperator skew{1, Matrix::Zero(2, 2), false};
    skew.mat(0, 1) = 2.0;
    skew.mat(1, 0) = 2.0;
    CHECK_THROWS_AS(falk_bruch_corollary(ctx, skew), std::invalid_argument);
}

TEST_CASE("random instances are reproducible and in range") {
    const auto a = make_random_instance(3, 99, 0.1, 5.0);
    const auto b = make_random_instance(3, 99, 0.1, 5.0);
    CHECK(a.beta == b.beta);
    CHECK((a.h.mat - b.h.mat).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.a.mat - b.a.mat).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.beta >= 0.1);
    CHECK(a.beta <= 5.0);
    const auto c = make_random_instance(3, 100, 0.1, 5.0);
    CHECK((a.h.mat - c.h.mat).cwiseAbs().maxCoeff() > 1e-6);
    // H comes out Hermitian with an O(1) spectral radius
    CHECK((a.h.mat - a.h.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    const auto eig = hilbert::eigendecompose(a.h);
    CHECK(std::max(std::abs(eig.energies(0)), std::abs(eig.energies(7))) < 6.0);
}

}  // TEST_SUITE
