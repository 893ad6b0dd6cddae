#include "duhamel/hilbert.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace duhamel::hilbert {

namespace {

constexpr int kDefaultSizeCap = 12;

void check_sites(int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
    if (n_sites > size_cap())
        throw std::invalid_argument("n_sites " + std::to_string(n_sites) + " exceeds size cap " +
                                    std::to_string(size_cap()));
}

void check_same_dim(const DenseOperator& a, const DenseOperator& b, const char* what) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(what) + ": operator dimensions differ (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

void check_ctx_dim(const GibbsContext& ctx, const DenseOperator& a, const char* what) {
    if (ctx.dim() != a.dim())
        throw std::invalid_argument(std::string(what) + ": operator dimension " + std::to_string(a.dim()) +
                                    " does not match context dimension " + std::to_string(ctx.dim()));
}

}  // namespace

int size_cap() {
    static const int cap = [] {
        if (const char* env = std::getenv("DUHAMEL_MAX_SITES")) {
            const int v = std::atoi(env);
            if (v >= 1) return std::min(v, 24);  // dense 2^N solves stop being sane long before this
        }
        return kDefaultSizeCap;
    }();
    return cap;
}

DenseOperator identity_op(int n_sites) {
    check_sites(n_sites);
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    return DenseOperator{n_sites, Matrix::Identity(dim, dim), true};
}

DenseOperator pauli(int site, char axis, int n_sites) {
    check_sites(n_sites);
    if (site < 1 || site > n_sites)
        throw std::invalid_argument("site " + std::to_string(site) + " outside [1," +
                                    std::to_string(n_sites) + "]");
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    const std::uint64_t mask = std::uint64_t(1) << (n_sites - site);
    Matrix m = Matrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        const double s = ((static_cast<std::uint64_t>(b) & mask) == 0) ? 1.0 : -1.0;
        switch (axis) {
            case 'x': case 'X':
                m(static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ mask), b) = 1.0;
                break;
            case 'y': case 'Y':
                m(static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ mask), b) = Complex(0.0, s);
                break;
            case 'z': case 'Z':
                m(b, b) = s;
                break;
            default:
                throw std::invalid_argument(std::string("unknown Pauli axis '") + axis + "'");
        }
    }
    return DenseOperator{n_sites, std::move(m), true};
}

DenseOperator pauli_string(int n_sites, const std::vector<std::pair<int, char>>& factors) {
    DenseOperator out = identity_op(n_sites);
    for (const auto& [site, axis] : factors) out = multiply(out, pauli(site, axis, n_sites));
    out.hermitian_hint = (out.mat - out.mat.adjoint()).cwiseAbs().maxCoeff() <=
                         1e-12 * std::max(1.0, out.mat.cwiseAbs().maxCoeff());
    return out;
}

DenseOperator dagger(const DenseOperator& a) {
    return DenseOperator{a.n_sites, a.mat.adjoint(), a.hermitian_hint};
}

DenseOperator multiply(const DenseOperator& a, const DenseOperator& b) {
    check_same_dim(a, b, "multiply");
    return DenseOperator{a.n_sites, a.mat * b.mat, false};
}

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
    check_same_dim(a, b, "commutator");
    return DenseOperator{a.n_sites, a.mat * b.mat - b.mat * a.mat, false};
}

DenseOperator anticommutator(const DenseOperator& a, const DenseOperator& b) {
    check_same_dim(a, b, "anticommutator");
    return DenseOperator{a.n_sites, a.mat * b.mat + b.mat * a.mat, false};
}

DenseOperator build_tfsk(int n_sites, const Eigen::MatrixXd& g, double h, double b1) {
    check_sites(n_sites);
    if (n_sites > 1 && (g.rows() < n_sites || g.cols() < n_sites))
        throw std::invalid_argument("coupling matrix must be at least n_sites x n_sites");
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    Matrix m = Matrix::Zero(dim, dim);
    const double coupling_scale = 1.0 / std::sqrt(static_cast<double>(n_sites));
    for (Eigen::Index b = 0; b < dim; ++b) {
        double spin[64];
        for (int j = 1; j <= n_sites; ++j)
            spin[j] = ((static_cast<std::uint64_t>(b) >> (n_sites - j)) & 1u) == 0 ? 1.0 : -1.0;
        double diag = 0.0;
        for (int i = 1; i <= n_sites; ++i) {
            for (int j = i + 1; j <= n_sites; ++j)
                diag -= coupling_scale * g(i - 1, j - 1) * spin[i] * spin[j];
            diag -= h * spin[i];
        }
        m(b, b) = diag;
        for (int j = 1; j <= n_sites; ++j) {
            const std::uint64_t flipped = static_cast<std::uint64_t>(b) ^ (std::uint64_t(1) << (n_sites - j));
            m(static_cast<Eigen::Index>(flipped), b) -= b1;
        }
    }
    return DenseOperator{n_sites, std::move(m), true};
}

DenseOperator build_interpolated(int n_sites, double s, const Eigen::MatrixXd& g,
                                 const Eigen::VectorXd& z, double q, double h, double b0, double b1) {
    check_sites(n_sites);
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("s must be in [0,1]");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must be in [0,1]");
    if (z.size() < n_sites) throw std::invalid_argument("field vector z must have n_sites entries");
    if (n_sites > 1 && (g.rows() < n_sites || g.cols() < n_sites))
        throw std::invalid_argument("coupling matrix must be at least n_sites x n_sites");

    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    Matrix m = Matrix::Zero(dim, dim);
    const double coupling_scale = std::sqrt(s / static_cast<double>(n_sites));
    const double field_scale = std::sqrt(q * (1.0 - s));
    const double bs = b1 * s + b0 * (1.0 - s);
    for (Eigen::Index b = 0; b < dim; ++b) {
        double spin[64];
        for (int j = 1; j <= n_sites; ++j)
            spin[j] = ((static_cast<std::uint64_t>(b) >> (n_sites - j)) & 1u) == 0 ? 1.0 : -1.0;
        double diag = 0.0;
        for (int i = 1; i <= n_sites; ++i) {
            for (int j = i + 1; j <= n_sites; ++j)
                diag -= coupling_scale * g(i - 1, j - 1) * spin[i] * spin[j];
            diag -= (field_scale * z(i - 1) + h) * spin[i];
        }
        m(b, b) = diag;
        for (int j = 1; j <= n_sites; ++j) {
            const std::uint64_t flipped = static_cast<std::uint64_t>(b) ^ (std::uint64_t(1) << (n_sites - j));
            m(static_cast<Eigen::Index>(flipped), b) -= bs;
        }
    }
    return DenseOperator{n_sites, std::move(m), true};
}

EigenSystem eigendecompose(const DenseOperator& op) {
    if (op.n_sites > size_cap())
        throw std::invalid_argument("eigendecompose: n_sites " + std::to_string(op.n_sites) +
                                    " exceeds size cap " + std::to_string(size_cap()));
    const double scale = std::max(1.0, op.mat.cwiseAbs().maxCoeff());
    if ((op.mat - op.mat.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("eigendecompose: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.mat);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    return EigenSystem{op.n_sites, solver.eigenvalues(), solver.eigenvectors()};
}

Matrix GibbsContext::to_eigenbasis(const DenseOperator& a) const {
    check_ctx_dim(*this, a, "to_eigenbasis");
    return eig.basis.adjoint() * a.mat * eig.basis;
}

GibbsContext make_gibbs(EigenSystem eig, double beta) {
    if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
    const double e_min = eig.energies.minCoeff();
    Eigen::VectorXd w = (-(beta) * (eig.energies.array() - e_min)).exp();
    w /= w.sum();
    return GibbsContext{std::move(eig), beta, std::move(w)};
}

GibbsContext make_gibbs(const DenseOperator& h, double beta) {
    return make_gibbs(eigendecompose(h), beta);
}

std::complex<double> thermal_expectation(const GibbsContext& ctx, const DenseOperator& a) {
    check_ctx_dim(ctx, a, "thermal_expectation");
    Complex acc = 0.0;
    const Matrix in_basis = ctx.to_eigenbasis(a);
    for (Eigen::Index nu = 0; nu < ctx.dim(); ++nu) acc += ctx.weights(nu) * in_basis(nu, nu);
    return acc;
}

Complex SpectralMeasure::total_weight() const {
    Complex acc = 0.0;
    for (const auto& [omega, w] : atoms) acc += w;
    return acc;
}

double SpectralMeasure::total_abs() const {
    double acc = 0.0;
    for (const auto& [omega, w] : atoms) acc += std::abs(w);
    return acc;
}

SpectralMeasure spectral_measure(const GibbsContext& ctx, const DenseOperator& a,
                                 const DenseOperator& b) {
    check_ctx_dim(ctx, a, "spectral_measure");
    check_ctx_dim(ctx, b, "spectral_measure");
    const Matrix at = ctx.to_eigenbasis(a);
    const Matrix bt = ctx.to_eigenbasis(b);
    const Eigen::Index dim = ctx.dim();

    std::vector<std::pair<double, Complex>> raw;
    raw.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
    double total_abs = 0.0;
    for (Eigen::Index nu = 0; nu < dim; ++nu) {
        for (Eigen::Index mu = 0; mu < dim; ++mu) {
            const Complex w = at(nu, mu) * bt(mu, nu) * (ctx.weights(nu) + ctx.weights(mu));
            raw.emplace_back(ctx.eig.energies(mu) - ctx.eig.energies(nu), w);
            total_abs += std::abs(w);
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    const double range = ctx.eig.energies(dim - 1) - ctx.eig.energies(0);
    const double gap_tol = 1e-9 * std::max(1.0, range);
    const double prune = 1e-14 * std::max(total_abs, 1e-300);

    SpectralMeasure out;
    out.beta = ctx.beta;
    std::size_t i = 0;
    while (i < raw.size()) {
        std::size_t j = i;
        double omega_sum = 0.0;
        Complex w_sum = 0.0;
        while (j < raw.size() && raw[j].first - raw[i].first <= gap_tol) {
            omega_sum += raw[j].first;
            w_sum += raw[j].second;
            ++j;
        }
        if (std::abs(w_sum) > prune)
            out.atoms.emplace_back(omega_sum / static_cast<double>(j - i), w_sum);
        i = j;
    }
    return out;
}

double sinhc(double u) {
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 + u2 / 6.0 * (1.0 + u2 / 20.0);
    }
    return std::sinh(u) / u;
}

double tanhc(double u) {
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 3.0 * (1.0 - 2.0 * u2 / 5.0);
    }
    return std::tanh(u) / u;
}

std::complex<double> duhamel(const GibbsContext& ctx, const DenseOperator& a,
                             const DenseOperator& b) {
    check_ctx_dim(ctx, a, "duhamel");
    check_ctx_dim(ctx, b, "duhamel");
    const Matrix at = ctx.to_eigenbasis(a);
    const Matrix bt = ctx.to_eigenbasis(b);
    const Eigen::Index dim = ctx.dim();
    Complex acc = 0.0;
    for (Eigen::Index nu = 0; nu < dim; ++nu) {
        for (Eigen::Index mu = 0; mu < dim; ++mu) {
            // (e^{-beta E_nu} - e^{-beta E_mu}) / (beta (E_mu - E_nu) Z) in symmetric form
            const double kernel = std::sqrt(ctx.weights(nu) * ctx.weights(mu)) *
                                  sinhc(0.5 * ctx.beta * (ctx.eig.energies(mu) - ctx.eig.energies(nu)));
            acc += at(nu, mu) * bt(mu, nu) * kernel;
        }
    }
    return acc;
}

std::complex<double> duhamel_by_quadrature(const DenseOperator& h, double beta,
                                           const DenseOperator& a, const DenseOperator& b,
                                           int steps) {
    if (steps < 16) throw std::invalid_argument("duhamel_by_quadrature needs steps >= 16");
    check_same_dim(h, a, "duhamel_by_quadrature");
    check_same_dim(h, b, "duhamel_by_quadrature");
    const GibbsContext ctx = make_gibbs(h, beta);
    const Matrix at = ctx.to_eigenbasis(a);
    const Matrix bt = ctx.to_eigenbasis(b);
    const Eigen::Index dim = ctx.dim();
    const Eigen::VectorXd shifted = ctx.eig.energies.array() - ctx.eig.energies.minCoeff();
    double log_zs = std::log((-(beta)*shifted.array()).exp().sum());

    // 4-point Gauss-Legendre panel rule
    static const double gl_x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526};
    static const double gl_w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};

    Complex acc = 0.0;
    for (int panel = 0; panel < steps; ++panel) {
        const double t0 = static_cast<double>(panel) / steps;
        const double t1 = static_cast<double>(panel + 1) / steps;
        for (int node = 0; node < 4; ++node) {
            const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gl_x[node];
            const double wq = 0.5 * (t1 - t0) * gl_w[node];
            Complex val = 0.0;
            for (Eigen::Index nu = 0; nu < dim; ++nu)
                for (Eigen::Index mu = 0; mu < dim; ++mu)
                    val += at(nu, mu) * bt(mu, nu) *
                           std::exp(-beta * ((1.0 - t) * shifted(nu) + t * shifted(mu)) - log_zs);
            acc += wq * val;
        }
    }
    return acc;
}

DenseOperator nested_commutator(const DenseOperator& h, const DenseOperator& a, int k) {
    if (k < 0) throw std::invalid_argument("nested_commutator needs k >= 0");
    check_same_dim(h, a, "nested_commutator");
    DenseOperator out = a;
    for (int j = 0; j < k; ++j) out = commutator(h, out);
    return out;
}

BilinearExpectations bilinear_expectations(const GibbsContext& ctx, const DenseOperator& a,
                                           const DenseOperator& b) {
    check_ctx_dim(ctx, a, "bilinear_expectations");
    check_ctx_dim(ctx, b, "bilinear_expectations");
    const Matrix at = ctx.to_eigenbasis(a);
    const Matrix bt = ctx.to_eigenbasis(b);
    const Eigen::Index dim = ctx.dim();

    // [H,B] in the eigenbasis is (E_nu - E_mu) B_{nu,mu}
    Matrix hb(dim, dim);
    for (Eigen::Index nu = 0; nu < dim; ++nu)
        for (Eigen::Index mu = 0; mu < dim; ++mu)
            hb(nu, mu) = (ctx.eig.energies(nu) - ctx.eig.energies(mu)) * bt(nu, mu);

    const Matrix ab = at * bt;
    const Matrix ba = bt * at;
    const Matrix dc = at * hb - hb * at;
    BilinearExpectations out{0.0, 0.0, 0.0};
    for (Eigen::Index nu = 0; nu < dim; ++nu) {
        out.anticomm += ctx.weights(nu) * (ab(nu, nu) + ba(nu, nu));
        out.comm += ctx.weights(nu) * (ab(nu, nu) - ba(nu, nu));
        out.double_comm += ctx.weights(nu) * dc(nu, nu);
    }
    return out;
}

double log_partition(const Eigen::VectorXd& energies, double beta) {
    const double e_min = energies.minCoeff();
    return -beta * e_min + std::log((-(beta) * (energies.array() - e_min)).exp().sum());
}

}  // namespace duhamel::hilbert
