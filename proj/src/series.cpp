#include "duhamel/series.hpp"

#include <cmath>
#include <stdexcept>

namespace duhamel::series {

namespace {

Rational binomial(int n, int k) {
    Rational r = 1;
    for (int j = 0; j < k; ++j) r *= Rational(n - j, j + 1);
    return r;
}

void require_even_nonneg(int n, const char* what) {
    if (n < 0 || n % 2 != 0)
        throw std::invalid_argument(std::string(what) + " must be a nonnegative even integer, got " +
                                    std::to_string(n));
}

// Series of (1/z) log((1+z)/(1-z)) = 2 sum_k z^{2k}/(2k+1); h is its reciprocal.
RationalSeries atanh_ratio_series(int max_order) {
    RationalSeries s;
    s.coefficients.assign(static_cast<std::size_t>(max_order) + 1, Rational(0));
    for (int m = 0; m <= max_order; m += 2) s.coefficients[static_cast<std::size_t>(m)] = Rational(2, m + 1);
    return s;
}

}  // namespace

char kernel_letter(Kernel k) {
    switch (k) {
        case Kernel::F: return 'f';
        case Kernel::G: return 'g';
        case Kernel::H: return 'h';
    }
    throw std::logic_error("bad kernel");
}

Kernel kernel_from_letter(char c) {
    switch (c) {
        case 'f': case 'F': return Kernel::F;
        case 'g': case 'G': return Kernel::G;
        case 'h': case 'H': return Kernel::H;
    }
    throw std::invalid_argument(std::string("unknown kernel '") + c + "', expected f, g or h");
}

RationalSeries multiply(const RationalSeries& a, const RationalSeries& b) {
    if (a.coefficients.empty() || b.coefficients.empty()) return {};
    const int order = std::min(a.order(), b.order());
    RationalSeries out;
    out.coefficients.assign(static_cast<std::size_t>(order + 1), Rational(0));
    for (int i = 0; i <= order; ++i) {
        if (a.coefficients[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; i + j <= order; ++j)
            out.coefficients[static_cast<std::size_t>(i + j)] +=
                a.coefficients[static_cast<std::size_t>(i)] * b.coefficients[static_cast<std::size_t>(j)];
    }
    return out;
}

RationalSeries reciprocal(const RationalSeries& a) {
    if (a.coefficients.empty() || a.coefficients[0] == 0)
        throw std::invalid_argument("series reciprocal needs a nonzero constant term");
    const int order = a.order();
    RationalSeries out;
    out.coefficients.assign(static_cast<std::size_t>(order) + 1, Rational(0));
    const Rational inv0 = Rational(1) / a.coefficients[0];
    out.coefficients[0] = inv0;
    for (int m = 1; m <= order; ++m) {
        Rational acc = 0;
        for (int j = 1; j <= m; ++j)
            acc += a.coefficients[static_cast<std::size_t>(j)] * out.coefficients[static_cast<std::size_t>(m - j)];
        out.coefficients[static_cast<std::size_t>(m)] = -inv0 * acc;
    }
    return out;
}

std::vector<Rational> bernoulli_numbers(int max_index) {
    if (max_index < 0) throw std::invalid_argument("max_index must be >= 0");
    std::vector<Rational> b(static_cast<std::size_t>(max_index) + 1);
    b[0] = 1;
    for (int m = 1; m <= max_index; ++m) {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0  =>  B_m
        Rational acc = 0;
        for (int j = 0; j < m; ++j) acc += binomial(m + 1, j) * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(m)] = -acc / binomial(m + 1, m);
    }
    return b;
}

const Rational& CoefficientTable::entry(int m) const {
    if (m < 0 || m > max_order)
        throw std::out_of_range("coefficient order " + std::to_string(m) + " outside table (max " +
                                std::to_string(max_order) + ")");
    return entries[static_cast<std::size_t>(m)];
}

double CoefficientTable::value(int m) const { return static_cast<double>(entry(m)); }

CoefficientTable taylor_table(Kernel kernel, int max_order) {
    require_even_nonneg(max_order, "max_order");

    // f(z) = z coth z = 1 + sum_{even m>=2} B_m 2^m z^m / m!
    RationalSeries f;
    f.coefficients.assign(static_cast<std::size_t>(max_order) + 1, Rational(0));
    const auto bern = bernoulli_numbers(max_order);
    Rational pow2_over_fact = 1;  // 2^m / m!
    for (int m = 0; m <= max_order; ++m) {
        if (m > 0) pow2_over_fact *= Rational(2, m);
        if (m % 2 == 0) f.coefficients[static_cast<std::size_t>(m)] = bern[static_cast<std::size_t>(m)] * pow2_over_fact;
    }
    f.coefficients[0] = 1;

    RationalSeries chosen;
    switch (kernel) {
        case Kernel::F: chosen = f; break;
        case Kernel::G: chosen = reciprocal(f); break;
        case Kernel::H: chosen = reciprocal(atanh_ratio_series(max_order)); break;
    }
    return CoefficientTable{kernel, max_order, std::move(chosen.coefficients)};
}

std::pair<double, double> zeta_cross_check(int n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("zeta cross-check needs even n >= 2");
    const auto table = taylor_table(Kernel::F, n);
    double fact = 1.0;
    for (int j = 2; j <= n; ++j) fact *= j;
    const double from_table = table.value(n) * fact;
    const double sign = (n / 2) % 2 == 0 ? -1.0 : 1.0;  // (-1)^{n/2+1}
    const double from_zeta = sign * 2.0 * fact * std::riemann_zeta(static_cast<double>(n)) /
                             std::pow(M_PI, static_cast<double>(n));
    return {from_table, from_zeta};
}

double kernel_value(Kernel kernel, double x) {
    switch (kernel) {
        case Kernel::F:
            if (x == 0.0) return 1.0;
            return x / std::tanh(x);
        case Kernel::G:
            if (x == 0.0) return 1.0;
            return std::tanh(x) / x;
        case Kernel::H:
            if (std::abs(x) >= 1.0)
                throw std::domain_error("kernel h needs |x| < 1, got " + std::to_string(x));
            if (x == 0.0) return 0.5;
            return x / (2.0 * std::atanh(x));
    }
    throw std::logic_error("bad kernel");
}

double remainder(Kernel kernel, int n, double x) {
    require_even_nonneg(n, "n");
    if (kernel == Kernel::H && std::abs(x) >= 1.0)
        throw std::domain_error("kernel h needs |x| < 1, got " + std::to_string(x));

    if (std::abs(x) < 0.5) {
        // Leading terms of the tail; the direct difference would cancel to O(x^{n+2}).
        const auto table = taylor_table(kernel, n + 4);
        const double x2 = x * x;
        double xp = 1.0;
        for (int m = 0; m < n + 2; m += 2) xp *= x2;
        return xp * (table.value(n + 2) + x2 * table.value(n + 4));
    }

    const auto table = taylor_table(kernel, n);
    const double x2 = x * x;
    double poly = 0.0;
    for (int m = n; m >= 0; m -= 2) poly = poly * x2 + table.value(m);
    return kernel_value(kernel, x) - poly;
}

int lemma6_sign(Kernel kernel, int n) {
    require_even_nonneg(n, "n");
    const bool half_odd = (n / 2) % 2 == 1;
    switch (kernel) {
        case Kernel::F: return half_odd ? -1 : +1;
        case Kernel::G: return half_odd ? +1 : -1;
        case Kernel::H: return -1;
    }
    throw std::logic_error("bad kernel");
}

GridSpec default_grid(Kernel kernel, int points) {
    if (kernel == Kernel::H) return GridSpec{-0.999, 0.999, points};
    return GridSpec{-20.0, 20.0, points};
}

SignReport verify_sign_definiteness(Kernel kernel, int n, const GridSpec& grid) {
    if (grid.points < 2) throw std::invalid_argument("grid needs at least 2 points");
    const int sign = lemma6_sign(kernel, n);
    double worst = 0.0;  // excursion past the allowed sign, scaled by max(1, |kernel(x)|)
    double worst_x = grid.lo;
    const double step = (grid.hi - grid.lo) / (grid.points - 1);
    for (int i = 0; i < grid.points; ++i) {
        const double x = grid.lo + step * i;
        const double r = remainder(kernel, n, x);
        const double excursion = sign > 0 ? -r : r;  // positive when the sign is violated
        const double scaled = excursion / std::max(1.0, std::abs(kernel_value(kernel, x)));
        if (scaled > worst) {
            worst = scaled;
            worst_x = x;
        }
    }
    return SignReport{kernel, n, sign, grid.points, grid.lo, grid.hi, worst, worst_x, worst <= kSignTolerance};
}

SignReport verify_sign_definiteness(Kernel kernel, int n) {
    return verify_sign_definiteness(kernel, n, default_grid(kernel));
}

std::string rational_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace duhamel::series
