#pragma once

#include <cstdint>
#include <optional>

#include "duhamel/hilbert.hpp"

namespace duhamel::bounds {

using hilbert::DenseOperator;
using hilbert::GibbsContext;

enum class Theorem { T1, T2, T3, T4 };

const char* theorem_name(Theorem t);

/// Three-way comparison lower <= exact <= upper for one theorem at one
/// truncation order.  The "exact" slot holds <{A^dag,A}>/2 - (A^dag,A) for T1,
/// (A^dag,A) for T2/T4, <[A^dag,[H,A]]> for T3.  T4 has no lower bound; its
/// report also carries the un-truncated Roepstorff value <{A^dag,A}> h(r).
struct BoundReport {
    Theorem theorem;
    int n;
    std::optional<double> lower;
    double exact;
    double upper;
    double margin_lower;  // exact - lower (0 when lower absent)
    double margin_upper;  // upper - exact
    bool satisfied;
    std::optional<double> roepstorff;
};

/// Bracketing tolerance: lower - tol <= exact <= upper + tol.
double bound_tolerance(double exact);

BoundReport theorem1_bounds(const GibbsContext& ctx, const DenseOperator& a, int n);
BoundReport theorem2_bounds(const GibbsContext& ctx, const DenseOperator& a, int n);
BoundReport theorem3_bounds(const GibbsContext& ctx, const DenseOperator& a, int n);
BoundReport theorem4_upper(const GibbsContext& ctx, const DenseOperator& a, int n);

BoundReport theorem_bounds(Theorem t, const GibbsContext& ctx, const DenseOperator& a, int n);

/// True when n is an admissible truncation order for the theorem
/// (n/2 odd for T1, n/2 even for T2/T3/T4).
bool admissible_order(Theorem t, int n);

/// Relative residuals between the spectral-measure route and the direct
/// matrix-algebra route for the five identities, plus the agreement of the
/// two Duhamel evaluations.
struct LemmaResiduals {
    double lemma1;  // total weight vs <{A,B}>
    double lemma2;  // tanh-weighted vs <[A,B]>
    double lemma3;  // omega tanh-weighted vs <[A,[H,B]]>
    double lemma4;  // Duhamel kernel vs (A,B)
    double lemma5;  // atomwise omega^2-weighting vs measure of [H,A]
    double duhamel_vs_quadrature;

    double worst() const;
};

LemmaResiduals lemma_identity_suite(const GibbsContext& ctx, const DenseOperator& a,
                                    const DenseOperator& b);

/// Solve r tanh r = u for r >= 0 (monotone; bracketed Newton/bisection).
double phi_inverse(double u);

struct FalkBruchReport {
    double lhs;  // (A,A)
    double rhs;  // tanh(r)/r at r tanh r = <[A,[beta H,A]]>/4
    double u;
    double r;
    bool satisfied;
};

/// Falk-Bruch corollary for a Hermitian involution (A^2 = 1).
FalkBruchReport falk_bruch_corollary(const GibbsContext& ctx, const DenseOperator& a);

/// Seeded random test instance: Hermitian H with O(1) spectral radius,
/// generic complex A and B, beta uniform in [beta_lo, beta_hi].
struct RandomInstance {
    DenseOperator h;
    DenseOperator a;
    DenseOperator b;
    double beta;
};

RandomInstance make_random_instance(int n_sites, std::uint64_t seed, double beta_lo, double beta_hi);

}  // namespace duhamel::bounds
