#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "duhamel/hilbert.hpp"
#include "duhamel/sk_variational.hpp"

namespace duhamel::experiment {

/// One disorder realization: couplings g_{ij} (strict upper triangle) and
/// on-site fields z, reproducible bit-exactly from (n_sites, seed).  The
/// stream is counter-based (see rng.hpp): g consumes draw indices
/// 0 .. N(N-1)/2 - 1 in row-major i<j order, z the next N.
struct DisorderSample {
    std::uint64_t seed = 0;
    int n_sites = 0;
    Eigen::MatrixXd g;
    Eigen::VectorXd z;
};

DisorderSample sample_disorder(int n_sites, std::uint64_t seed);

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    int samples = 0;
};

/// Disorder average of (1/N) log Tr e^{-beta H(s)} over `samples` draws
/// seeded from base_seed.
Estimate phi_s_estimate(int n_sites, double s, const sk::SKParams& params, double q, double b0,
                        int samples, std::uint64_t base_seed);

/// Check of the interpolation derivative on common random numbers.
/// fd_value differentiates the sample-mean free energy; formula_value is the
/// same samples' Gibbs expectation of -beta dH/ds per site, which matches the
/// finite difference up to O(step^2) sample by sample.  duhamel_value is the
/// Duhamel/overlap form of the derivative, whose agreement holds for the
/// disorder average (Gaussian integration by parts), not per sample.
struct DerivativeCheck {
    double fd_value;
    double formula_value;
    double diff;           // |fd_value - formula_value|
    double duhamel_value;
    double duhamel_diff;   // |fd_value - duhamel_value|, statistical
    int samples;
};

DerivativeCheck derivative_identity_check(int n_sites, double s, const sk::SKParams& params,
                                          double q, double b0, int samples,
                                          std::uint64_t base_seed, double fd_step = 1e-4);

/// Integrand of the Duhamel line of the derivative identity for one disorder
/// draw (exposed for the quadrature-based identity tests).
double duhamel_line_value(const hilbert::GibbsContext& ctx, const DisorderSample& d,
                          const sk::SKParams& params, double q, double b0);
double pathwise_derivative_value(const hilbert::GibbsContext& ctx, const DisorderSample& d,
                                 double s, const sk::SKParams& params, double q, double b0);

struct ExperimentReport {
    int n_sites = 0;
    double beta = 0.0;
    double b1 = 0.0;
    double h = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    double mean_phi1 = 0.0;
    double stderr_ = 0.0;
    double variational_bound = 0.0;
    double gap = 0.0;              // variational_bound - mean_phi1
    bool satisfied_3sigma = false;
    bool solver_converged = false;
    double q_star = 0.0;
    double b0_star = 0.0;
};

/// Solve the variational problem, estimate phi_N(1) by exact diagonalization
/// over disorder samples, and compare.
ExperimentReport bound_validation(int n_sites, const sk::SKParams& params, int samples,
                                  std::uint64_t base_seed, const sk::Quadrature& quad);

enum class Format { Jsonl, Csv };

Format format_from_string(const std::string& name);

inline constexpr int kSchemaVersion = 1;

void export_results(const std::vector<ExperimentReport>& reports, const std::string& path,
                    Format format);
std::string render_results(const std::vector<ExperimentReport>& reports, Format format);

/// Order-independent sum (recursive pairwise halving).
double pairwise_sum(const std::vector<double>& values);

/// Fan `count` independent tasks across the worker pool; the thread count
/// comes from DUHAMEL_THREADS (default 1).
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace duhamel::experiment
