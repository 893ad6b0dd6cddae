#include "duhamel/sk_variational.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "duhamel/hilbert.hpp"  // sinhc/tanhc helpers

namespace duhamel::sk {

namespace {

constexpr double kGradTol = 1e-11;
constexpr int kNewtonMaxIter = 200;

void check_params(const SKParams& p) {
    if (p.beta <= 0.0) throw std::invalid_argument("beta must be > 0");
}

void check_q(double q) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must be in [0,1]");
}

// Integrand of dPhi/dq after integration by parts:
// (beta^2/2) [ (y/R)^2 sech^2(beta R) + (b0/R)^2 tanh(beta R)/(beta R) ],
// continuous at R = 0 where it equals beta^2/2.
double dq_integrand(double y, double b0, double beta) {
    const double r2 = y * y + b0 * b0;
    if (r2 == 0.0) return 0.5 * beta * beta;
    const double r = std::sqrt(r2);
    const double sech = 1.0 / std::cosh(beta * r);
    return 0.5 * beta * beta * ((y * y / r2) * sech * sech + (b0 * b0 / r2) * hilbert::tanhc(beta * r));
}

}  // namespace

Quadrature gauss_hermite(int count) {
    if (count < 2) throw std::invalid_argument("gauss_hermite needs count >= 2");
    // Golub-Welsch for the probabilists' Hermite recurrence He_{k+1} = x He_k - k He_{k-1}.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
    for (int k = 1; k < count; ++k) {
        const double off = std::sqrt(static_cast<double>(k));
        jacobi(k, k - 1) = off;
        jacobi(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Quadrature quad;
    quad.count = count;
    quad.nodes = solver.eigenvalues();
    quad.weights.resize(count);
    for (int i = 0; i < count; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        quad.weights(i) = v0 * v0;
    }
    quad.weights /= quad.weights.sum();
    return quad;
}

double log_cosh(double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - M_LN2;
}

double log_2cosh(double x) { return log_cosh(x) + M_LN2; }

double phi0(double q, double b0, const SKParams& params, const Quadrature& quad) {
    check_params(params);
    check_q(q);
    const double sq = std::sqrt(q);
    return quad.expect([&](double z) {
        const double y = sq * z + params.h;
        return log_2cosh(params.beta * std::sqrt(y * y + b0 * b0));
    });
}

double phi_bound(double q, double b0, const SKParams& params, const Quadrature& quad) {
    check_params(params);
    check_q(q);
    const double beta = params.beta;
    const double field_mix = b0 * b0 + b0 * params.b1 + params.b1 * params.b1;
    return phi0(q, b0, params, quad) + std::pow(beta, 4) * q / 18.0 * field_mix +
           log_cosh(beta * params.b1) - log_cosh(beta * b0) +
           0.25 * beta * beta * (1.0 - q) * (1.0 - q);
}

Gradient grad_phi(double q, double b0, const SKParams& params, const Quadrature& quad) {
    check_params(params);
    check_q(q);
    const double beta = params.beta;
    const double sq = std::sqrt(q);
    const double field_mix = b0 * b0 + b0 * params.b1 + params.b1 * params.b1;

    double dq = quad.expect([&](double z) { return dq_integrand(sq * z + params.h, b0, beta); });
    dq += std::pow(beta, 4) / 18.0 * field_mix - 0.5 * beta * beta * (1.0 - q);

    double db0 = quad.expect([&](double z) {
        const double y = sq * z + params.h;
        const double r = std::sqrt(y * y + b0 * b0);
        return beta * beta * b0 * hilbert::tanhc(beta * r);
    });
    db0 += -beta * std::tanh(beta * b0) + std::pow(beta, 4) * q / 18.0 * (2.0 * b0 + params.b1);
    return Gradient{dq, db0};
}

std::vector<VariationalPoint> solve_stationary(const SKParams& params, const Quadrature& quad,
                                               std::vector<std::pair<double, double>> starts) {
    check_params(params);
    if (starts.empty()) {
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0})
            for (double b0 : {0.0, 0.5 * params.b1, params.b1}) starts.emplace_back(q, b0);
    }

    auto grad_at = [&](double q, double b0) { return grad_phi(q, b0, params, quad); };
    auto grad_norm = [](const Gradient& g) { return std::max(std::abs(g.dq), std::abs(g.db0)); };

    // The bound chain needs b(s) >= 0 on the whole path, i.e. b0 >= 0 for
    // b1 >= 0: the magnetization step fails for negative fields, so Phi at
    // b0 < 0 is no longer an upper bound and the solver must not go there.
    // Consequently the target is the KKT condition of min Phi over
    // [0,1] x [0,inf): at strong coupling the quartic penalty pins the
    // minimizer to the b0 = 0 edge, so outward gradient components on active
    // faces are clipped and the reported residuals are the projected ones.
    auto projected = [](double q, double b0, const Gradient& g) {
        Gradient p = g;
        if ((q <= 0.0 && g.dq > 0.0) || (q >= 1.0 && g.dq < 0.0)) p.dq = 0.0;
        if (b0 <= 0.0 && g.db0 > 0.0) p.db0 = 0.0;
        return p;
    };

    std::vector<VariationalPoint> points;
    for (const auto& [q_start, b0_start] : starts) {
        double q = std::clamp(q_start, 0.0, 1.0);
        double b0 = std::max(b0_start, 0.0);
        Gradient g = grad_at(q, b0);
        Gradient pg = projected(q, b0, g);
        double phi = phi_bound(q, b0, params, quad);
        bool converged = grad_norm(pg) < kGradTol;
        int iter = 0;
        for (; iter < kNewtonMaxIter && !converged; ++iter) {
            // finite-difference Jacobian of the gradient, one-sided at the q box edges
            const double hq = 1e-6;
            const double hb = 1e-6 * std::max(1.0, std::abs(b0));
            const double q_hi = std::min(q + hq, 1.0);
            const double q_lo = std::max(q - hq, 0.0);
            const Gradient gq_hi = grad_at(q_hi, b0);
            const Gradient gq_lo = grad_at(q_lo, b0);
            const Gradient gb_hi = grad_at(q, b0 + hb);
            const Gradient gb_lo = grad_at(q, b0 - hb);
            Eigen::Matrix2d jac;
            jac(0, 0) = (gq_hi.dq - gq_lo.dq) / (q_hi - q_lo);
            jac(1, 0) = (gq_hi.db0 - gq_lo.db0) / (q_hi - q_lo);
            jac(0, 1) = (gb_hi.dq - gb_lo.dq) / (2.0 * hb);
            jac(1, 1) = (gb_hi.db0 - gb_lo.db0) / (2.0 * hb);

            // Newton on the free coordinates; coordinates clipped at a face stay put
            const bool q_fixed = pg.dq == 0.0 && g.dq != 0.0;
            const bool b0_fixed = pg.db0 == 0.0 && g.db0 != 0.0;
            Eigen::Vector2d step = Eigen::Vector2d::Zero();
            if (!q_fixed && !b0_fixed && std::abs(jac.determinant()) > 1e-300) {
                step = jac.lu().solve(Eigen::Vector2d(-g.dq, -g.db0));
            } else if (!q_fixed && b0_fixed && std::abs(jac(0, 0)) > 1e-300) {
                step(0) = -g.dq / jac(0, 0);
            } else if (q_fixed && !b0_fixed && std::abs(jac(1, 1)) > 1e-300) {
                step(1) = -g.db0 / jac(1, 1);
            } else {
                step = Eigen::Vector2d(-pg.dq, -pg.db0);  // fallback: projected gradient step
            }

            double alpha = 1.0;
            double q_new = q, b0_new = b0, phi_new = phi;
            Gradient g_new = g, pg_new = pg;
            for (int halving = 0; halving <= 20; ++halving) {
                q_new = std::clamp(q + alpha * step(0), 0.0, 1.0);
                b0_new = std::max(b0 + alpha * step(1), 0.0);
                phi_new = phi_bound(q_new, b0_new, params, quad);
                g_new = grad_at(q_new, b0_new);
                pg_new = projected(q_new, b0_new, g_new);
                const bool phi_drops = phi_new <= phi + 1e-14 * std::max(1.0, std::abs(phi));
                if (phi_drops || grad_norm(pg_new) < grad_norm(pg)) break;
                alpha *= 0.5;
            }
            if (std::abs(q_new - q) < 1e-15 && std::abs(b0_new - b0) < 1e-15 &&
                grad_norm(pg_new) >= grad_norm(pg))
                break;  // stalled
            q = q_new;
            b0 = b0_new;
            phi = phi_new;
            g = g_new;
            pg = pg_new;
            converged = grad_norm(pg) < kGradTol;
        }
        points.push_back(VariationalPoint{q, b0, phi, pg.dq, pg.db0, converged, iter, false});
    }

    // deduplicate converged points and flag the least-Phi one
    std::vector<VariationalPoint> unique;
    for (const auto& p : points) {
        if (!p.converged) {
            unique.push_back(p);
            continue;
        }
        bool dup = false;
        for (const auto& u : unique)
            if (u.converged && std::hypot(u.q - p.q, u.b0 - p.b0) < 1e-6) { dup = true; break; }
        if (!dup) unique.push_back(p);
    }
    int best = -1;
    for (std::size_t i = 0; i < unique.size(); ++i)
        if (unique[i].converged && (best < 0 || unique[i].phi_value < unique[static_cast<std::size_t>(best)].phi_value))
            best = static_cast<int>(i);
    if (best >= 0) unique[static_cast<std::size_t>(best)].selected = true;
    return unique;
}

double classical_q(double beta, double h, const Quadrature& quad) {
    if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
    auto self_overlap = [&](double q) {
        const double sq = std::sqrt(q);
        return quad.expect([&](double z) {
            const double t = std::tanh(beta * (sq * z + h));
            return t * t;
        });
    };
    // At h = 0 the map has slope beta^2 at q = 0: below beta = 1 the only
    // fixed point is 0; above it, iterate from the ordered side.
    if (h == 0.0 && beta <= 1.0) return 0.0;
    double q = (h == 0.0) ? 0.99 : 0.5;
    double alpha = 1.0;
    double prev_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200000; ++it) {
        const double res = self_overlap(q) - q;
        if (std::abs(res) < 1e-12) return q;
        if (std::abs(res) > prev_res) alpha = std::max(0.5 * alpha, 1e-3);
        prev_res = std::abs(res);
        q = std::clamp(q + alpha * res, 0.0, 1.0);
    }
    throw std::runtime_error("classical_q did not converge");
}

ATLineReport at_line_check(double beta, double h, double q, const Quadrature& quad) {
    if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
    check_q(q);
    const double sq = std::sqrt(q);
    const double lhs = quad.expect([&](double z) {
        const double c = std::cosh(beta * (sq * z + h));
        return beta * beta / (c * c * c * c);
    });
    return ATLineReport{lhs, lhs <= 1.0};
}

std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                               int subdivisions) {
    if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
    std::vector<double> roots;
    auto push = [&](double x) {
        for (double r : roots)
            if (std::abs(r - x) < 1e-9 * std::max(1.0, std::abs(x))) return;
        roots.push_back(x);
    };
    double x_prev = lo;
    double f_prev = f(lo);
    if (std::abs(f_prev) < 1e-14) push(lo);
    for (int i = 1; i <= subdivisions; ++i) {
        const double x = lo + (hi - lo) * i / subdivisions;
        const double fx = f(x);
        if (std::abs(fx) < 1e-14) {
            push(x);
        } else if (f_prev != 0.0 && std::signbit(f_prev) != std::signbit(fx)) {
            double a = x_prev, b = x;
            double fa = f_prev;
            for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if (fm == 0.0) { a = b = mid; break; }
                if (std::signbit(fa) != std::signbit(fm)) { b = mid; } else { a = mid; fa = fm; }
            }
            push(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = fx;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

H0SpecialReport h0_special(double beta, double b1, const Quadrature& quad) {
    if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
    auto stationarity = [&](double b0) {
        return std::tanh(beta * b0) - beta * b0 +
               std::pow(beta, 3) / 9.0 * b0 * (b0 * b0 + b0 * b1 + b1 * b1);
    };
    auto roots = scan_roots(stationarity, 0.0, b1 + 5.0, 1000);
    if (roots.empty() || roots.front() > 1e-12) roots.insert(roots.begin(), 0.0);

    const SKParams params{beta, b1, 0.0};
    double best_phi = std::numeric_limits<double>::infinity();
    double phi_min = best_phi, phi_max = -best_phi;
    double selected = 0.0;
    for (double b0 : roots) {
        const double phi = phi_bound(0.0, b0, params, quad);
        phi_min = std::min(phi_min, phi);
        phi_max = std::max(phi_max, phi);
        if (phi < best_phi) {
            best_phi = phi;
            selected = b0;
        }
    }
    const double bound = -log_2cosh(beta * b1) / beta - 0.25 * beta;
    const double spread = roots.empty() ? 0.0 : phi_max - phi_min;
    return H0SpecialReport{std::move(roots), selected, bound, spread,
                           spread <= 1e-12 * std::max(1.0, std::abs(phi_max))};
}

LiteratureComparison literature_comparison(double beta, double b1) {
    if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
    if (b1 < 0.0) throw std::invalid_argument("b1 must be >= 0");
    const double static_approx = -log_2cosh(beta * b1) / beta;
    const double sech = 1.0 / std::cosh(beta * b1);
    const double correction = beta / 8.0 * (sech * sech + hilbert::tanhc(beta * b1));
    const double leschke_upper = static_approx - correction;
    return LiteratureComparison{static_approx, leschke_upper, static_approx > leschke_upper};
}

StrongFieldDeviation strong_field_deviation(double beta, double b1) {
    if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
    auto stationarity = [&](double b0) {
        return std::tanh(beta * b0) - std::pow(beta, 3) / 18.0 * (2.0 * b0 + b1);
    };
    const auto roots = scan_roots(stationarity, 0.0, b1 + 5.0, 1000);
    if (roots.empty()) return StrongFieldDeviation{0.0, 0.0, false};
    const double b0 = roots.front();
    const double deviation = std::pow(beta, 4) / 18.0 * (b0 * b0 + b0 * b1 + b1 * b1) +
                             log_cosh(beta * b1) - log_cosh(beta * b0);
    return StrongFieldDeviation{b0, deviation, true};
}

}  // namespace duhamel::sk
