#include "duhamel/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "duhamel/rng.hpp"
#include "duhamel/series.hpp"

namespace duhamel::bounds {

namespace {

using hilbert::Matrix;

void require_order(Theorem t, int n) {
    if (n < 0 || n % 2 != 0)
        throw std::invalid_argument(std::string(theorem_name(t)) + ": order n must be even, got " +
                                    std::to_string(n));
    if (!admissible_order(t, n))
        throw std::invalid_argument(std::string(theorem_name(t)) + ": parity violation, n/2 must be " +
                                    (t == Theorem::T1 ? "odd" : "even") + " (n = " + std::to_string(n) + ")");
}

/// H reconstructed from the eigensystem, so the commutator chains run through
/// plain matrix products rather than the spectral identities they certify.
DenseOperator hamiltonian_of(const GibbsContext& ctx) {
    Matrix h = ctx.eig.basis * ctx.eig.energies.asDiagonal() * ctx.eig.basis.adjoint();
    return DenseOperator{ctx.eig.n_sites, std::move(h), true};
}

double real_expect(const GibbsContext& ctx, const Matrix& m) {
    std::complex<double> acc = 0.0;
    const Matrix t = ctx.eig.basis.adjoint() * m * ctx.eig.basis;
    for (Eigen::Index nu = 0; nu < ctx.dim(); ++nu) acc += ctx.weights(nu) * t(nu, nu);
    return acc.real();
}

double rel_residual(std::complex<double> x, std::complex<double> y, double scale) {
    return std::abs(x - y) / std::max({scale, std::abs(x), std::abs(y), 1e-300});
}

}  // namespace

const char* theorem_name(Theorem t) {
    switch (t) {
        case Theorem::T1: return "t1";
        case Theorem::T2: return "t2";
        case Theorem::T3: return "t3";
        case Theorem::T4: return "t4";
    }
    return "?";
}

double bound_tolerance(double exact) { return 1e-10 * std::max(1.0, std::abs(exact)); }

bool admissible_order(Theorem t, int n) {
    if (n < 0 || n % 2 != 0) return false;
    const bool half_odd = (n / 2) % 2 == 1;
    if (t == Theorem::T1) return half_odd;
    return !half_odd;
}

BoundReport theorem1_bounds(const GibbsContext& ctx, const DenseOperator& a, int n) {
    require_order(Theorem::T1, n);
    const auto table = series::taylor_table(series::Kernel::F, n + 2);
    const DenseOperator h = hamiltonian_of(ctx);
    const double half_beta = 0.5 * ctx.beta;

    const auto direct = hilbert::bilinear_expectations(ctx, hilbert::dagger(a), a);
    const double exact = 0.5 * direct.anticomm.real() - hilbert::duhamel(ctx, hilbert::dagger(a), a).real();

    DenseOperator c_prev = a;
    double sum = 0.0;
    double upper = 0.0;
    for (int k = 1; k <= n / 2 + 1; ++k) {
        DenseOperator c_k = hilbert::commutator(h, c_prev);
        const Matrix comm = c_prev.mat.adjoint() * c_k.mat - c_k.mat * c_prev.mat.adjoint();
        sum += std::pow(half_beta, 2 * k - 1) * 0.5 * table.value(2 * k) * real_expect(ctx, comm);
        if (k == n / 2) upper = sum;
        c_prev = std::move(c_k);
    }
    const double lower = sum;
    const double tol = bound_tolerance(exact);
    const bool ok = lower - tol <= exact && exact <= upper + tol;
    return BoundReport{Theorem::T1, n, lower, exact, upper, exact - lower, upper - exact, ok,
                       std::nullopt};
}

BoundReport theorem2_bounds(const GibbsContext& ctx, const DenseOperator& a, int n) {
    require_order(Theorem::T2, n);
    const auto table = series::taylor_table(series::Kernel::G, n + 2);
    const DenseOperator h = hamiltonian_of(ctx);
    const double half_beta = 0.5 * ctx.beta;

    const double exact = hilbert::duhamel(ctx, hilbert::dagger(a), a).real();

    DenseOperator c_k = a;
    double sum = 0.0;
    double upper = 0.0;
    for (int k = 0; k <= n / 2 + 1; ++k) {
        if (k > 0) c_k = hilbert::commutator(h, c_k);
        const Matrix anti = c_k.mat.adjoint() * c_k.mat + c_k.mat * c_k.mat.adjoint();
        sum += std::pow(half_beta, 2 * k) * 0.5 * table.value(2 * k) * real_expect(ctx, anti);
        if (k == n / 2) upper = sum;
    }
    const double lower = sum;
    const double tol = bound_tolerance(exact);
    const bool ok = lower - tol <= exact && exact <= upper + tol;
    return BoundReport{Theorem::T2, n, lower, exact, upper, exact - lower, upper - exact, ok,
                       std::nullopt};
}

BoundReport theorem3_bounds(const GibbsContext& ctx, const DenseOperator& a, int n) {
    require_order(Theorem::T3, n);
    const auto table = series::taylor_table(series::Kernel::G, n + 2);
    const DenseOperator h = hamiltonian_of(ctx);
    const double half_beta = 0.5 * ctx.beta;

    const auto direct = hilbert::bilinear_expectations(ctx, hilbert::dagger(a), a);
    const double exact = direct.double_comm.real();

    DenseOperator c_k = hilbert::commutator(h, a);
    double sum = 0.0;
    double upper = 0.0;
    for (int k = 0; k <= n / 2 + 1; ++k) {
        if (k > 0) c_k = hilbert::commutator(h, c_k);
        const Matrix anti = c_k.mat.adjoint() * c_k.mat + c_k.mat * c_k.mat.adjoint();
        sum += table.value(2 * k) * std::pow(half_beta, 2 * k + 1) * real_expect(ctx, anti);
        if (k == n / 2) upper = sum;
    }
    const double lower = sum;
    const double tol = bound_tolerance(exact);
    const bool ok = lower - tol <= exact && exact <= upper + tol;
    return BoundReport{Theorem::T3, n, lower, exact, upper, exact - lower, upper - exact, ok,
                       std::nullopt};
}

BoundReport theorem4_upper(const GibbsContext& ctx, const DenseOperator& a, int n) {
    require_order(Theorem::T4, n);
    const auto table = series::taylor_table(series::Kernel::H, n);

    const auto direct = hilbert::bilinear_expectations(ctx, hilbert::dagger(a), a);
    const double anticomm = direct.anticomm.real();
    if (anticomm <= 0.0) throw std::domain_error("theorem4: <{A^dag,A}> must be positive");
    const double r = direct.comm.real() / anticomm;
    if (std::abs(r) >= 1.0)
        throw std::domain_error("theorem4: |<[A^dag,A]>/<{A^dag,A}>| >= 1, outside the h domain");

    double sum = 0.0;
    double r_pow = 1.0;
    for (int k = 0; k <= n / 2; ++k) {
        sum += table.value(2 * k) * r_pow;
        r_pow *= r * r;
    }
    const double upper = anticomm * sum;
    const double roepstorff = anticomm * series::kernel_value(series::Kernel::H, r);
    const double exact = hilbert::duhamel(ctx, hilbert::dagger(a), a).real();
    const double tol = bound_tolerance(exact);
    return BoundReport{Theorem::T4, n, std::nullopt, exact, upper, 0.0, upper - exact,
                       exact <= upper + tol, roepstorff};
}

BoundReport theorem_bounds(Theorem t, const GibbsContext& ctx, const DenseOperator& a, int n) {
    switch (t) {
        case Theorem::T1: return theorem1_bounds(ctx, a, n);
        case Theorem::T2: return theorem2_bounds(ctx, a, n);
        case Theorem::T3: return theorem3_bounds(ctx, a, n);
        case Theorem::T4: return theorem4_upper(ctx, a, n);
    }
    throw std::logic_error("bad theorem");
}

double LemmaResiduals::worst() const {
    return std::max({lemma1, lemma2, lemma3, lemma4, lemma5});
}

LemmaResiduals lemma_identity_suite(const GibbsContext& ctx, const DenseOperator& a,
                                    const DenseOperator& b) {
    const auto measure = hilbert::spectral_measure(ctx, a, b);
    const auto direct = hilbert::bilinear_expectations(ctx, a, b);
    const double scale = std::max(measure.total_abs(), 1.0);

    std::complex<double> m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const auto& [omega, w] : measure.atoms) {
        const double th = std::tanh(0.5 * ctx.beta * omega);
        m1 += w;
        m2 += w * th;
        m3 += w * omega * th;
        m4 += w * 0.5 * hilbert::tanhc(0.5 * ctx.beta * omega);
    }
    const auto duh = hilbert::duhamel(ctx, a, b);

    // Lemma 5 at k = 1: omega^2 Q_{A^dag,A} vs Q_{[H,A]^dag,[H,A]}, atom by atom.
    const DenseOperator h = hamiltonian_of(ctx);
    const DenseOperator ca = hilbert::commutator(h, a);
    const auto q_a = hilbert::spectral_measure(ctx, hilbert::dagger(a), a);
    const auto q_ca = hilbert::spectral_measure(ctx, hilbert::dagger(ca), ca);
    double ca_scale = std::max(q_ca.total_abs(), 1e-300);
    const double range = ctx.eig.energies(ctx.dim() - 1) - ctx.eig.energies(0);
    const double match_tol = 2e-9 * std::max(1.0, range);
    double l5 = 0.0;
    std::size_t j = 0;
    for (const auto& [omega, w] : q_a.atoms) {
        const std::complex<double> expected = w * omega * omega;
        while (j < q_ca.atoms.size() && q_ca.atoms[j].first < omega - match_tol) {
            // atom present only in Q_{[H,A]^dag,[H,A]}
            l5 = std::max(l5, std::abs(q_ca.atoms[j].second) / ca_scale);
            ++j;
        }
        if (j < q_ca.atoms.size() && std::abs(q_ca.atoms[j].first - omega) <= match_tol) {
            l5 = std::max(l5, std::abs(q_ca.atoms[j].second - expected) / ca_scale);
            ++j;
        } else {
            l5 = std::max(l5, std::abs(expected) / ca_scale);
        }
    }
    for (; j < q_ca.atoms.size(); ++j) l5 = std::max(l5, std::abs(q_ca.atoms[j].second) / ca_scale);

    const auto quad = hilbert::duhamel_by_quadrature(h, ctx.beta, a, b, 64);
    return LemmaResiduals{rel_residual(m1, direct.anticomm, scale),
                          rel_residual(m2, direct.comm, scale),
                          rel_residual(m3, direct.double_comm, scale),
                          rel_residual(m4, duh, scale),
                          l5,
                          rel_residual(duh, quad, scale)};
}

double phi_inverse(double u) {
    if (u < 0.0) throw std::domain_error("phi_inverse needs u >= 0");
    if (u == 0.0) return 0.0;
    double lo = 0.0;
    double hi = std::max(1.0, u) + 2.0;
    double r = std::min(hi, std::sqrt(u) + u);  // r tanh r ~ r^2 small, ~ r large
    for (int it = 0; it < 200; ++it) {
        const double g = r * std::tanh(r) - u;
        if (g > 0.0) hi = r; else lo = r;
        const double sech = 1.0 / std::cosh(r);
        const double dg = std::tanh(r) + r * sech * sech;
        double next = r - g / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-12 * std::max(1.0, std::abs(r))) return next;
        r = next;
    }
    return r;
}

FalkBruchReport falk_bruch_corollary(const GibbsContext& ctx, const DenseOperator& a) {
    const double scale = std::max(1.0, a.mat.cwiseAbs().maxCoeff());
    if ((a.mat - a.mat.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("falk_bruch_corollary needs Hermitian A");
    const Matrix sq = a.mat * a.mat;
    if ((sq - Matrix::Identity(a.dim(), a.dim())).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("falk_bruch_corollary needs A^2 = 1");

    const auto direct = hilbert::bilinear_expectations(ctx, a, a);
    double u = 0.25 * ctx.beta * direct.double_comm.real();
    if (u < -1e-12 * std::max(1.0, std::abs(ctx.beta)))
        throw std::domain_error("falk_bruch_corollary: negative double-commutator expectation");
    u = std::max(u, 0.0);
    const double r = phi_inverse(u);
    const double rhs = hilbert::tanhc(r);
    const double lhs = hilbert::duhamel(ctx, a, a).real();
    return FalkBruchReport{lhs, rhs, u, r, lhs >= rhs - 1e-10 * std::max(1.0, std::abs(lhs))};
}

RandomInstance make_random_instance(int n_sites, std::uint64_t seed, double beta_lo, double beta_hi) {
    if (beta_hi < beta_lo) throw std::invalid_argument("beta range is empty");
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    const double norm = 1.0 / std::sqrt(2.0 * static_cast<double>(dim));

    auto fill = [&](std::uint64_t sub) {
        Matrix m(dim, dim);
        std::uint64_t idx = 0;
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) {
                m(i, j) = std::complex<double>(rng::gaussian(sub, idx), rng::gaussian(sub, idx + 1)) * norm;
                idx += 2;
            }
        return m;
    };

    Matrix gh = fill(rng::derive_seed(seed, 1));
    DenseOperator h{n_sites, (0.5 * (gh + gh.adjoint())) / std::sqrt(static_cast<double>(dim)) * 2.0, true};
    DenseOperator a{n_sites, fill(rng::derive_seed(seed, 2)), false};
    DenseOperator b{n_sites, fill(rng::derive_seed(seed, 3)), false};
    const double u = rng::uniform01(rng::mix64(seed ^ 0xBE7A5EEDull));
    return RandomInstance{std::move(h), std::move(a), std::move(b), beta_lo + (beta_hi - beta_lo) * u};
}

}  // namespace duhamel::bounds
