#include "duhamel/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "duhamel/rng.hpp"

namespace duhamel::experiment {

namespace {

using hilbert::DenseOperator;
using hilbert::GibbsContext;

double phi_sample(int n_sites, double s, const sk::SKParams& params, double q, double b0,
                  const DisorderSample& d) {
    const DenseOperator h =
        hilbert::build_interpolated(n_sites, s, d.g, d.z, q, params.h, b0, params.b1);
    const auto eig = hilbert::eigendecompose(h);
    return hilbert::log_partition(eig.energies, params.beta) / n_sites;
}

std::vector<double> per_sample_values(int samples, const std::function<double(int)>& fn) {
    std::vector<double> values(static_cast<std::size_t>(samples));
    parallel_for(samples, [&](int k) { values[static_cast<std::size_t>(k)] = fn(k); });
    return values;
}

Estimate summarize(const std::vector<double>& values) {
    const int m = static_cast<int>(values.size());
    Estimate est;
    est.samples = m;
    if (m == 0) return est;
    est.mean = pairwise_sum(values) / m;
    if (m > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - est.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / (m - 1);
        est.stderr_ = std::sqrt(var / m);
    }
    return est;
}

const char* kCsvHeader =
    "schema_version,n_sites,beta,b1,h,samples,seed,mean_phi1,stderr,variational_bound,gap,"
    "satisfied_3sigma,solver_converged,q_star,b0_star";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

DisorderSample sample_disorder(int n_sites, std::uint64_t seed) {
    if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
    DisorderSample d;
    d.seed = seed;
    d.n_sites = n_sites;
    d.g = Eigen::MatrixXd::Zero(n_sites, n_sites);
    d.z = Eigen::VectorXd::Zero(n_sites);
    std::uint64_t index = 0;
    for (int i = 0; i < n_sites; ++i)
        for (int j = i + 1; j < n_sites; ++j) d.g(i, j) = rng::gaussian(seed, index++);
    for (int i = 0; i < n_sites; ++i) d.z(i) = rng::gaussian(seed, index++);
    return d;
}

Estimate phi_s_estimate(int n_sites, double s, const sk::SKParams& params, double q, double b0,
                        int samples, std::uint64_t base_seed) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("s must be in [0,1]");
    const auto values = per_sample_values(samples, [&](int k) {
        const DisorderSample d = sample_disorder(n_sites, rng::derive_seed(base_seed, k));
        return phi_sample(n_sites, s, params, q, b0, d);
    });
    return summarize(values);
}

double pathwise_derivative_value(const GibbsContext& ctx, const DisorderSample& d, double s,
                                 const sk::SKParams& params, double q, double b0) {
    const int n = d.n_sites;
    const double beta = params.beta;
    double acc = 0.0;
    const double coupling_deriv = 1.0 / (2.0 * std::sqrt(s * n));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const auto zz = hilbert::pauli_string(n, {{i, 'z'}, {j, 'z'}});
            acc += coupling_deriv * d.g(i - 1, j - 1) * hilbert::thermal_expectation(ctx, zz).real();
        }
    const double field_deriv = std::sqrt(q) / (2.0 * std::sqrt(1.0 - s));
    for (int j = 1; j <= n; ++j) {
        acc -= field_deriv * d.z(j - 1) *
               hilbert::thermal_expectation(ctx, hilbert::pauli(j, 'z', n)).real();
        acc += (params.b1 - b0) * hilbert::thermal_expectation(ctx, hilbert::pauli(j, 'x', n)).real();
    }
    return beta * acc / n;
}

double duhamel_line_value(const GibbsContext& ctx, const DisorderSample& d,
                          const sk::SKParams& params, double q, double b0) {
    const int n = d.n_sites;
    const double beta = params.beta;
    double pair_term = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const auto zz = hilbert::pauli_string(n, {{i, 'z'}, {j, 'z'}});
            const double duh = hilbert::duhamel(ctx, zz, zz).real();
            const double ev = hilbert::thermal_expectation(ctx, zz).real();
            pair_term += duh - ev * ev;
        }
    double site_term = 0.0;
    double x_term = 0.0;
    for (int j = 1; j <= n; ++j) {
        const auto zj = hilbert::pauli(j, 'z', n);
        const double duh = hilbert::duhamel(ctx, zj, zj).real();
        const double ev = hilbert::thermal_expectation(ctx, zj).real();
        site_term += duh - ev * ev;
        x_term += hilbert::thermal_expectation(ctx, hilbert::pauli(j, 'x', n)).real();
    }
    return beta * beta / (2.0 * n * n) * pair_term - beta * beta * q / (2.0 * n) * site_term +
           beta * (params.b1 - b0) / n * x_term;
}

DerivativeCheck derivative_identity_check(int n_sites, double s, const sk::SKParams& params,
                                          double q, double b0, int samples,
                                          std::uint64_t base_seed, double fd_step) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (fd_step <= 0.0) throw std::invalid_argument("fd_step must be > 0");
    if (s - fd_step <= 0.0 || s + fd_step >= 1.0)
        throw std::invalid_argument("fd step too large for s this close to an endpoint");

    std::vector<double> fd(static_cast<std::size_t>(samples));
    std::vector<double> pathwise(static_cast<std::size_t>(samples));
    std::vector<double> duhamel_line(static_cast<std::size_t>(samples));
    parallel_for(samples, [&](int k) {
        const DisorderSample d = sample_disorder(n_sites, rng::derive_seed(base_seed, k));
        const double plus = phi_sample(n_sites, s + fd_step, params, q, b0, d);
        const double minus = phi_sample(n_sites, s - fd_step, params, q, b0, d);
        fd[static_cast<std::size_t>(k)] = (plus - minus) / (2.0 * fd_step);
        const auto h = hilbert::build_interpolated(n_sites, s, d.g, d.z, q, params.h, b0, params.b1);
        const GibbsContext ctx = hilbert::make_gibbs(h, params.beta);
        pathwise[static_cast<std::size_t>(k)] = pathwise_derivative_value(ctx, d, s, params, q, b0);
        duhamel_line[static_cast<std::size_t>(k)] = duhamel_line_value(ctx, d, params, q, b0);
    });

    DerivativeCheck out;
    out.samples = samples;
    out.fd_value = pairwise_sum(fd) / samples;
    out.formula_value = pairwise_sum(pathwise) / samples;
    out.duhamel_value = pairwise_sum(duhamel_line) / samples;
    out.diff = std::abs(out.fd_value - out.formula_value);
    out.duhamel_diff = std::abs(out.fd_value - out.duhamel_value);
    return out;
}

ExperimentReport bound_validation(int n_sites, const sk::SKParams& params, int samples,
                                  std::uint64_t base_seed, const sk::Quadrature& quad) {
    ExperimentReport report;
    report.n_sites = n_sites;
    report.beta = params.beta;
    report.b1 = params.b1;
    report.h = params.h;
    report.samples = samples;
    report.seed = base_seed;

    const auto points = sk::solve_stationary(params, quad);
    const sk::VariationalPoint* selected = nullptr;
    for (const auto& p : points)
        if (p.selected) selected = &p;
    report.solver_converged = selected != nullptr;

    const auto values = per_sample_values(samples, [&](int k) {
        const DisorderSample d = sample_disorder(n_sites, rng::derive_seed(base_seed, k));
        const auto h = hilbert::build_tfsk(n_sites, d.g, params.h, params.b1);
        const auto eig = hilbert::eigendecompose(h);
        return hilbert::log_partition(eig.energies, params.beta) / n_sites;
    });
    const Estimate est = summarize(values);
    report.mean_phi1 = est.mean;
    report.stderr_ = est.stderr_;

    if (selected != nullptr) {
        report.q_star = selected->q;
        report.b0_star = selected->b0;
        report.variational_bound = selected->phi_value;
        report.gap = report.variational_bound - report.mean_phi1;
        report.satisfied_3sigma = report.gap >= -3.0 * report.stderr_;
    } else {
        report.variational_bound = std::numeric_limits<double>::quiet_NaN();
        report.gap = std::numeric_limits<double>::quiet_NaN();
        report.satisfied_3sigma = false;
    }
    return report;
}

Format format_from_string(const std::string& name) {
    if (name == "jsonl") return Format::Jsonl;
    if (name == "csv") return Format::Csv;
    throw std::invalid_argument("unknown format '" + name + "', expected jsonl or csv");
}

std::string render_results(const std::vector<ExperimentReport>& reports, Format format) {
    std::string out;
    if (format == Format::Csv) {
        out += kCsvHeader;
        out += '\n';
        for (const auto& r : reports) {
            out += std::to_string(kSchemaVersion) + ',' + std::to_string(r.n_sites) + ',' +
                   fmt_double(r.beta) + ',' + fmt_double(r.b1) + ',' + fmt_double(r.h) + ',' +
                   std::to_string(r.samples) + ',' + std::to_string(r.seed) + ',' +
                   fmt_double(r.mean_phi1) + ',' + fmt_double(r.stderr_) + ',' +
                   fmt_double(r.variational_bound) + ',' + fmt_double(r.gap) + ',' +
                   (r.satisfied_3sigma ? "true" : "false") + ',' +
                   (r.solver_converged ? "true" : "false") + ',' + fmt_double(r.q_star) + ',' +
                   fmt_double(r.b0_star) + '\n';
        }
        return out;
    }
    for (const auto& r : reports) {
        nlohmann::ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["n_sites"] = r.n_sites;
        j["beta"] = r.beta;
        j["b1"] = r.b1;
        j["h"] = r.h;
        j["samples"] = r.samples;
        j["seed"] = r.seed;
        j["mean_phi1"] = r.mean_phi1;
        j["stderr"] = r.stderr_;
        j["variational_bound"] = r.variational_bound;
        j["gap"] = r.gap;
        j["satisfied_3sigma"] = r.satisfied_3sigma;
        j["solver_converged"] = r.solver_converged;
        j["q_star"] = r.q_star;
        j["b0_star"] = r.b0_star;
        out += j.dump();
        out += '\n';
    }
    return out;
}

void export_results(const std::vector<ExperimentReport>& reports, const std::string& path,
                    Format format) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("export_results: cannot open '" + path + "' for writing");
    file << render_results(reports, format);
    if (!file) throw std::runtime_error("export_results: write to '" + path + "' failed");
}

double pairwise_sum(const std::vector<double>& values) {
    std::function<double(std::size_t, std::size_t)> sum = [&](std::size_t lo, std::size_t hi) {
        if (hi - lo <= 8) {
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) acc += values[i];
            return acc;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        return sum(lo, mid) + sum(mid, hi);
    };
    return values.empty() ? 0.0 : sum(0, values.size());
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    int threads = 1;
    if (const char* env = std::getenv("DUHAMEL_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) threads = v;
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace duhamel::experiment
