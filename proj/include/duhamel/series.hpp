#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace duhamel::series {

using Rational = boost::multiprecision::cpp_rational;

// The three even kernels driving the inequality chains:
//   f(z) = z coth z,  g(z) = tanh(z)/z = 1/f(z),  h(z) = z / log((1+z)/(1-z)).
enum class Kernel { F, G, H };

char kernel_letter(Kernel k);
Kernel kernel_from_letter(char c);

/// Power series with exact rational coefficients; index m holds the z^m coefficient.
struct RationalSeries {
    std::vector<Rational> coefficients;

    int order() const { return static_cast<int>(coefficients.size()) - 1; }
    const Rational& at(int m) const { return coefficients.at(static_cast<std::size_t>(m)); }
};

// Exact series arithmetic, truncated at min of the operand orders (product)
// or the operand order (reciprocal).
RationalSeries multiply(const RationalSeries& a, const RationalSeries& b);
RationalSeries reciprocal(const RationalSeries& a);

/// B_0 .. B_max_index by the defining recurrence (B_1 = -1/2 convention).
std::vector<Rational> bernoulli_numbers(int max_index);

/// Maclaurin coefficients c_m = K^{(m)}(0)/m! for even m; odd entries are exactly zero.
struct CoefficientTable {
    Kernel kernel;
    int max_order;
    std::vector<Rational> entries;  // indexed by power, size max_order+1

    const Rational& entry(int m) const;
    double value(int m) const;
};

CoefficientTable taylor_table(Kernel kernel, int max_order);

/// (table-derived f^{(n)}(0), zeta-formula f^{(n)}(0)); the two routes must agree.
/// The second value uses f^{(n)}(0) = (-1)^{n/2+1} 2 n! zeta(n)/pi^n with the
/// Riemann zeta evaluated independently of the Bernoulli recurrence.
std::pair<double, double> zeta_cross_check(int n);

/// Direct kernel evaluation (double precision); h requires |x| < 1.
double kernel_value(Kernel kernel, double x);

/// Taylor remainder K(x) - sum_{m<=n} c_m x^m.  Below |x| = 0.5 the value is
/// the next two series terms, which avoids the x^{n+2}-order cancellation of
/// the direct difference.
double remainder(Kernel kernel, int n, double x);

/// Lemma-6 sign for the remainder: +1 means K_n >= 0 on its domain, -1 means <= 0.
int lemma6_sign(Kernel kernel, int n);

struct GridSpec {
    double lo;
    double hi;
    int points;
};

GridSpec default_grid(Kernel kernel, int points = 2001);

/// A sign excursion counts against the lemma only beyond kSignTolerance
/// relative to max(1, |kernel(x)|); below that it is floating-point noise.
inline constexpr double kSignTolerance = 1e-12;

struct SignReport {
    Kernel kernel;
    int n;
    int expected_sign;
    int grid_points;
    double grid_lo;
    double grid_hi;
    double worst_violation;  // largest scaled excursion past the allowed sign, >= 0
    double worst_x;
    bool passed;             // worst_violation <= kSignTolerance
};

SignReport verify_sign_definiteness(Kernel kernel, int n, const GridSpec& grid);
SignReport verify_sign_definiteness(Kernel kernel, int n);

std::string rational_string(const Rational& r);

}  // namespace duhamel::series
