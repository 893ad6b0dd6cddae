#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace duhamel::sk {

struct SKParams {
    double beta = 1.0;  // inverse temperature, > 0
    double b1 = 0.0;    // transverse field of the target model
    double h = 0.0;     // longitudinal field
};

/// Nodes and weights for E[f(z)], z ~ N(0,1); weights are normalized to sum 1.
struct Quadrature {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    int count = 0;

    template <typename F>
    double expect(F&& f) const {
        double acc = 0.0;
        for (int i = 0; i < count; ++i) acc += weights(i) * f(nodes(i));
        return acc;
    }
};

Quadrature gauss_hermite(int count);

double log_cosh(double x);
double log_2cosh(double x);

/// phi_N(0) = E log 2 cosh beta sqrt((sqrt(q) z + h)^2 + b0^2); N-independent.
double phi0(double q, double b0, const SKParams& params, const Quadrature& quad);

/// The four-term variational upper bound Phi(q, b0) on phi_N(1).
double phi_bound(double q, double b0, const SKParams& params, const Quadrature& quad);

struct Gradient {
    double dq;
    double db0;
};

/// Analytic gradient of phi_bound; the q-derivative is the integrated-by-parts
/// form, finite down to q = 0.
Gradient grad_phi(double q, double b0, const SKParams& params, const Quadrature& quad);

struct VariationalPoint {
    double q;
    double b0;
    double phi_value;
    double grad_q;    // box-projected gradient residuals: components pointing
    double grad_b0;   // out of an active q/b0 bound are clipped to zero
    bool converged;
    int iterations;
    bool selected;
};

/// Damped Newton on the gradient from every start, projected to the bound's
/// domain q in [0,1], b0 >= 0; converged points are deduplicated and the
/// least-Phi one is flagged.  An empty `starts` uses the default grid
/// {0,1/4,1/2,3/4,1} x {0,b1/2,b1}.
std::vector<VariationalPoint> solve_stationary(const SKParams& params, const Quadrature& quad,
                                               std::vector<std::pair<double, double>> starts = {});

/// Fixed point of q = E tanh^2 beta(sqrt(q) z + h); for h = 0 returns the
/// largest fixed point (0 when beta <= 1, the ordered branch otherwise).
double classical_q(double beta, double h, const Quadrature& quad);

struct ATLineReport {
    double lhs;  // E beta^2 / cosh^4 beta(sqrt(q) z + h)
    bool stable;
};

ATLineReport at_line_check(double beta, double h, double q, const Quadrature& quad);

struct H0SpecialReport {
    std::vector<double> b0_roots;   // roots of tanh(b b0) - b b0 + (b^3/9) b0 (b0^2+b0 b1+b1^2)
    double selected_b0;             // least Phi(0, b0) among roots
    double bound;                   // -(1/beta) log 2 cosh(beta b1) - beta/4
    double phi_spread;              // max - min of Phi(0, b0) over roots (0 in exact arithmetic)
    bool phi_b0_independent;
};

H0SpecialReport h0_special(double beta, double b1, const Quadrature& quad);

struct LiteratureComparison {
    double static_approx;  // -(1/beta) log 2 cosh beta b1
    double leschke_upper;  // static approx minus the positive LRRS correction
    bool violates;         // static_approx > leschke_upper
};

LiteratureComparison literature_comparison(double beta, double b1);

struct StrongFieldDeviation {
    double b0;
    double deviation;  // D = (beta^4/18)(b0^2+b0 b1+b1^2) + log(cosh beta b1 / cosh beta b0)
    bool root_found;
};

StrongFieldDeviation strong_field_deviation(double beta, double b1);

/// Sign-scan plus bisection root finder on [lo, hi]; used by the scalar
/// stationarity equations above.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                               int subdivisions);

}  // namespace duhamel::sk
