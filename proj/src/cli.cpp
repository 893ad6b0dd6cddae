#include "duhamel/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "duhamel/bounds.hpp"
#include "duhamel/experiment.hpp"
#include "duhamel/hilbert.hpp"
#include "duhamel/rng.hpp"
#include "duhamel/series.hpp"
#include "duhamel/sk_variational.hpp"

namespace duhamel::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = experiment::kSchemaVersion;

struct GlobalOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    bool quiet = false;
    CLI::Option* format_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* quiet_opt = nullptr;
    std::optional<nlohmann::json> config;  // loaded lazily

    // resolved by finalize(): format came from a flag or the config file,
    // not the built-in default (subcommands may pick their own default)
    bool format_explicit = false;

    void finalize() {
        overlay(format_opt, "format", format);
        overlay(out_opt, "out", out_path);
        overlay(quiet_opt, "quiet", quiet);
        const nlohmann::json* cfg = load_config();
        format_explicit = (format_opt != nullptr && format_opt->count() > 0) ||
                          (cfg != nullptr && cfg->contains("format"));
    }

    const nlohmann::json* load_config() {
        if (!config && !config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open config file '" + config_path + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::parse_error& e) {
                throw std::invalid_argument("config file '" + config_path + "': " + e.what());
            }
            if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
            config = std::move(j);
        }
        return config ? &*config : nullptr;
    }

    // Config overlay: flags override config values override defaults.
    template <typename T>
    void overlay(const CLI::Option* opt, const char* key, T& var) {
        if (opt != nullptr && opt->count() > 0) return;
        const nlohmann::json* cfg = load_config();
        if (cfg == nullptr || !cfg->contains(key)) return;
        try {
            var = cfg->at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
        }
    }
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

std::vector<std::pair<int, char>> parse_pauli_string(const std::string& text, int n_sites) {
    std::vector<std::pair<int, char>> factors;
    for (const std::string& token : split(text, '*')) {
        if (token.size() < 2) throw std::invalid_argument("bad Pauli factor '" + token + "'");
        const char axis = token[0];
        if (axis != 'x' && axis != 'X' && axis != 'y' && axis != 'Y' && axis != 'z' && axis != 'Z')
            throw std::invalid_argument("bad Pauli axis in '" + token + "'");
        std::size_t pos = 0;
        int site = 0;
        try {
            site = std::stoi(token.substr(1), &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad site index in '" + token + "'");
        }
        if (pos != token.size() - 1) throw std::invalid_argument("bad Pauli factor '" + token + "'");
        if (site < 1 || site > n_sites)
            throw std::invalid_argument("site in '" + token + "' outside [1," + std::to_string(n_sites) + "]");
        factors.emplace_back(site, axis);
    }
    if (factors.empty()) throw std::invalid_argument("empty Pauli string");
    return factors;
}

std::string csv_cell(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void emit_records(const std::vector<ordered_json>& records, const std::string& format,
                  std::ostream& os) {
    if (format == "json") {
        if (records.size() == 1) {
            os << records.front().dump(2) << '\n';
        } else {
            ordered_json arr = ordered_json::array();
            for (const auto& r : records) arr.push_back(r);
            os << arr.dump(2) << '\n';
        }
    } else if (format == "jsonl") {
        for (const auto& r : records) os << r.dump() << '\n';
    } else if (format == "csv") {
        if (records.empty()) return;
        bool first = true;
        for (auto it = records.front().begin(); it != records.front().end(); ++it) {
            if (!first) os << ',';
            os << it.key();
            first = false;
        }
        os << '\n';
        for (const auto& r : records) {
            first = true;
            for (auto it = r.begin(); it != r.end(); ++it) {
                if (!first) os << ',';
                os << csv_cell(it.value());
                first = false;
            }
            os << '\n';
        }
    } else {
        throw std::invalid_argument("unknown format '" + format + "'");
    }
}

// Write records to --out if given, else to the session stream.
void deliver(const std::vector<ordered_json>& records, const GlobalOpts& global,
             std::ostream& out) {
    if (!global.out_path.empty()) {
        std::ofstream file(global.out_path, std::ios::binary);
        if (!file)
            throw std::runtime_error("cannot open '" + global.out_path + "' for writing");
        emit_records(records, global.format, file);
        if (!file) throw std::runtime_error("write to '" + global.out_path + "' failed");
    } else {
        emit_records(records, global.format, out);
    }
}

void require_format(const GlobalOpts& global, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed)
        if (global.format == f) return;
    std::string opts;
    for (const char* f : allowed) {
        if (!opts.empty()) opts += "|";
        opts += f;
    }
    throw std::invalid_argument("format '" + global.format + "' not supported here, expected " + opts);
}

int run_coeffs(GlobalOpts& global, const CLI::Option* kernel_opt, const CLI::Option* order_opt,
               std::string kernel_name, int order, std::ostream& out) {
    global.finalize();
    global.overlay(kernel_opt, "kernel", kernel_name);
    global.overlay(order_opt, "order", order);
    if (kernel_name.size() != 1) throw std::invalid_argument("kernel must be one of f, g, h");
    if (order < 0 || order % 2 != 0)
        throw std::invalid_argument("order must be a nonnegative even integer");
    require_format(global, {"json", "jsonl", "csv"});

    const auto table = series::taylor_table(series::kernel_from_letter(kernel_name[0]), order);
    std::vector<ordered_json> records;
    for (int m = 0; m <= order; m += 2) {
        ordered_json rec;
        rec["schema_version"] = kSchemaVersion;
        rec["kernel"] = std::string(1, series::kernel_letter(table.kernel));
        rec["order"] = m;
        rec["numerator"] = numerator(table.entry(m)).str();
        rec["denominator"] = denominator(table.entry(m)).str();
        rec["rational"] = series::rational_string(table.entry(m));
        rec["value"] = table.value(m);
        records.push_back(std::move(rec));
    }
    deliver(records, global, out);
    return 0;
}

int run_lemma6(GlobalOpts& global, const CLI::Option* kernel_opt, const CLI::Option* n_opt,
               const CLI::Option* grid_opt, std::string kernel_name, int n, int grid_points,
               std::ostream& out) {
    global.finalize();
    global.overlay(kernel_opt, "kernel", kernel_name);
    global.overlay(n_opt, "n", n);
    global.overlay(grid_opt, "grid_points", grid_points);
    if (kernel_name.size() != 1) throw std::invalid_argument("kernel must be one of f, g, h");
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("n must be a nonnegative even integer");
    if (grid_points < 2) throw std::invalid_argument("grid-points must be >= 2");
    require_format(global, {"json", "jsonl", "csv"});

    const auto kernel = series::kernel_from_letter(kernel_name[0]);
    const auto report = series::verify_sign_definiteness(kernel, n, series::default_grid(kernel, grid_points));
    ordered_json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["kernel"] = std::string(1, series::kernel_letter(report.kernel));
    rec["n"] = report.n;
    rec["expected_sign"] = report.expected_sign;
    rec["grid_lo"] = report.grid_lo;
    rec["grid_hi"] = report.grid_hi;
    rec["grid_points"] = report.grid_points;
    rec["worst_violation"] = report.worst_violation;
    rec["worst_x"] = report.worst_x;
    rec["tolerance"] = series::kSignTolerance;
    rec["passed"] = report.passed;
    deliver({rec}, global, out);
    return report.passed ? 0 : 1;
}

int run_spectral(GlobalOpts& global, const CLI::Option* sites_opt, const CLI::Option* seed_opt,
                 const CLI::Option* beta_opt, const CLI::Option* obs_opt, const CLI::Option* b1_opt,
                 const CLI::Option* h_opt, int sites, std::uint64_t seed, double beta,
                 std::string observable, double b1, double h, std::ostream& out) {
    global.finalize();
    global.overlay(sites_opt, "sites", sites);
    global.overlay(seed_opt, "seed", seed);
    global.overlay(beta_opt, "beta", beta);
    global.overlay(obs_opt, "observable", observable);
    global.overlay(b1_opt, "b1", b1);
    global.overlay(h_opt, "h", h);
    if (observable.empty()) throw std::invalid_argument("--observable is required");
    require_format(global, {"json", "jsonl", "csv"});

    hilbert::DenseOperator hamiltonian;
    const nlohmann::json* cfg = global.load_config();
    if (cfg != nullptr && cfg->contains("hamiltonian")) {
        const auto& terms = cfg->at("hamiltonian");
        if (!terms.is_array() || terms.empty())
            throw std::invalid_argument("config 'hamiltonian' must be a nonempty array of [coefficient, pauli-string]");
        hamiltonian = hilbert::identity_op(sites);
        hamiltonian.mat.setZero();
        for (const auto& term : terms) {
            if (!term.is_array() || term.size() != 2)
                throw std::invalid_argument("hamiltonian terms must be [coefficient, pauli-string] pairs");
            const double coeff = term.at(0).get<double>();
            const auto op = hilbert::pauli_string(sites, parse_pauli_string(term.at(1).get<std::string>(), sites));
            hamiltonian.mat += coeff * op.mat;
        }
        hamiltonian.hermitian_hint = true;
    } else {
        const auto d = experiment::sample_disorder(sites, seed);
        hamiltonian = hilbert::build_tfsk(sites, d.g, h, b1);
    }

    const auto ctx = hilbert::make_gibbs(hamiltonian, beta);
    const auto a = hilbert::pauli_string(sites, parse_pauli_string(observable, sites));
    const auto measure = hilbert::spectral_measure(ctx, hilbert::dagger(a), a);

    std::vector<ordered_json> records;
    for (const auto& [omega, w] : measure.atoms) {
        ordered_json rec;
        rec["schema_version"] = kSchemaVersion;
        rec["observable"] = observable;
        rec["beta"] = beta;
        rec["omega"] = omega;
        rec["weight_re"] = w.real();
        rec["weight_im"] = w.imag();
        records.push_back(std::move(rec));
    }
    deliver(records, global, out);
    return 0;
}

struct VerifySelection {
    std::vector<bounds::Theorem> theorems;
    std::vector<int> orders;
};

VerifySelection parse_verify_selection(const std::string& theorems_text, const std::string& orders_text) {
    VerifySelection sel;
    for (const std::string& t : split(theorems_text, ',')) {
        if (t == "t1") sel.theorems.push_back(bounds::Theorem::T1);
        else if (t == "t2") sel.theorems.push_back(bounds::Theorem::T2);
        else if (t == "t3") sel.theorems.push_back(bounds::Theorem::T3);
        else if (t == "t4") sel.theorems.push_back(bounds::Theorem::T4);
        else throw std::invalid_argument("unknown theorem '" + t + "', expected t1..t4");
    }
    if (sel.theorems.empty()) throw std::invalid_argument("no theorems selected");
    for (const std::string& o : split(orders_text, ',')) {
        int n = 0;
        try {
            n = std::stoi(o);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad order '" + o + "'");
        }
        if (n < 0 || n % 2 != 0)
            throw std::invalid_argument("orders must be nonnegative even integers, got '" + o + "'");
        sel.orders.push_back(n);
    }
    if (sel.orders.empty()) throw std::invalid_argument("no orders selected");
    for (const auto t : sel.theorems) {
        bool any = false;
        for (int n : sel.orders) any = any || bounds::admissible_order(t, n);
        if (!any)
            throw std::invalid_argument(std::string("no admissible order for ") + bounds::theorem_name(t) +
                                        " in the --orders list (parity condition)");
    }
    return sel;
}

int run_verify(GlobalOpts& global, const CLI::Option* sites_opt, const CLI::Option* trials_opt,
               const CLI::Option* seed_opt, const CLI::Option* range_opt, const CLI::Option* theorems_opt,
               const CLI::Option* orders_opt, int sites, int trials, std::uint64_t seed,
               std::string beta_range, std::string theorems_text, std::string orders_text,
               std::ostream& out, std::ostream& err) {
    global.finalize();
    global.overlay(sites_opt, "sites", sites);
    global.overlay(trials_opt, "trials", trials);
    global.overlay(seed_opt, "seed", seed);
    global.overlay(range_opt, "beta_range", beta_range);
    global.overlay(theorems_opt, "theorems", theorems_text);
    global.overlay(orders_opt, "orders", orders_text);
    if (sites < 1) throw std::invalid_argument("--sites must be >= 1");
    if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
    const auto range_parts = split(beta_range, ',');
    if (range_parts.size() != 2) throw std::invalid_argument("--beta-range expects 'lo,hi'");
    const double beta_lo = std::stod(range_parts[0]);
    const double beta_hi = std::stod(range_parts[1]);
    if (!(beta_lo > 0.0) || beta_hi < beta_lo) throw std::invalid_argument("bad --beta-range");
    const VerifySelection sel = parse_verify_selection(theorems_text, orders_text);
    require_format(global, {"json", "jsonl", "csv"});

    std::vector<ordered_json> records;
    int unsatisfied = 0;
    double worst_lower = std::numeric_limits<double>::infinity();
    double worst_upper = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        const auto inst = bounds::make_random_instance(sites, rng::derive_seed(seed, trial), beta_lo, beta_hi);
        const auto ctx = hilbert::make_gibbs(inst.h, inst.beta);
        for (const auto theorem : sel.theorems) {
            for (int n : sel.orders) {
                if (!bounds::admissible_order(theorem, n)) continue;
                const auto rep = bounds::theorem_bounds(theorem, ctx, inst.a, n);
                ordered_json rec;
                rec["schema_version"] = kSchemaVersion;
                rec["trial"] = trial;
                rec["beta"] = inst.beta;
                rec["theorem"] = bounds::theorem_name(rep.theorem);
                rec["n"] = rep.n;
                rec["lower"] = rep.lower ? ordered_json(*rep.lower) : ordered_json(nullptr);
                rec["exact"] = rep.exact;
                rec["upper"] = rep.upper;
                rec["margin_lower"] = rep.margin_lower;
                rec["margin_upper"] = rep.margin_upper;
                rec["satisfied"] = rep.satisfied;
                if (rep.roepstorff) rec["roepstorff"] = *rep.roepstorff;
                records.push_back(std::move(rec));
                if (!rep.satisfied) ++unsatisfied;
                if (rep.lower) worst_lower = std::min(worst_lower, rep.margin_lower);
                worst_upper = std::min(worst_upper, rep.margin_upper);
            }
        }
    }
    deliver(records, global, out);
    if (!global.quiet)
        err << "verify: " << records.size() << " reports, " << unsatisfied
            << " unsatisfied, worst lower margin " << worst_lower << ", worst upper margin "
            << worst_upper << '\n';
    return unsatisfied == 0 ? 0 : 1;
}

std::vector<std::pair<double, double>> parse_starts(const std::string& text) {
    std::vector<std::pair<double, double>> starts;
    if (text.empty()) return starts;
    for (const std::string& pair : split(text, ',')) {
        const auto parts = split(pair, ':');
        if (parts.size() != 2) throw std::invalid_argument("--starts expects 'q:b0[,q:b0...]'");
        starts.emplace_back(std::stod(parts[0]), std::stod(parts[1]));
    }
    return starts;
}

ordered_json point_record(const sk::VariationalPoint& p) {
    ordered_json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["q"] = p.q;
    rec["b0"] = p.b0;
    rec["phi_value"] = p.phi_value;
    rec["grad_q"] = p.grad_q;
    rec["grad_b0"] = p.grad_b0;
    rec["converged"] = p.converged;
    rec["iterations"] = p.iterations;
    rec["selected"] = p.selected;
    return rec;
}

int run_sk_solve(GlobalOpts& global, const CLI::Option* beta_opt, const CLI::Option* b1_opt,
                 const CLI::Option* h_opt, const CLI::Option* quad_opt, const CLI::Option* starts_opt,
                 double beta, double b1, double h, int quad_count, std::string starts_text,
                 std::ostream& out, std::ostream& err) {
    global.finalize();
    global.overlay(beta_opt, "beta", beta);
    global.overlay(b1_opt, "b1", b1);
    global.overlay(h_opt, "h", h);
    global.overlay(quad_opt, "quad_count", quad_count);
    global.overlay(starts_opt, "starts", starts_text);
    require_format(global, {"json", "jsonl", "csv"});

    const sk::SKParams params{beta, b1, h};
    const auto quad = sk::gauss_hermite(quad_count);
    const auto points = sk::solve_stationary(params, quad, parse_starts(starts_text));

    std::vector<ordered_json> records;
    const sk::VariationalPoint* selected = nullptr;
    for (const auto& p : points) {
        records.push_back(point_record(p));
        if (p.selected) selected = &p;
    }
    deliver(records, global, out);
    if (selected != nullptr) {
        if (!global.quiet)
            err << "sk solve: selected q=" << selected->q << " b0=" << selected->b0
                << ", upper bound on phi_N(1): " << selected->phi_value << '\n';
        return 0;
    }
    if (!global.quiet) err << "sk solve: no start converged\n";
    return 1;
}

int run_sk_classical(GlobalOpts& global, const CLI::Option* beta_opt, const CLI::Option* h_opt,
                     const CLI::Option* quad_opt, double beta, double h, int quad_count,
                     std::ostream& out) {
    global.finalize();
    global.overlay(beta_opt, "beta", beta);
    global.overlay(h_opt, "h", h);
    global.overlay(quad_opt, "quad_count", quad_count);
    require_format(global, {"json", "jsonl", "csv"});

    const auto quad = sk::gauss_hermite(quad_count);
    const double q = sk::classical_q(beta, h, quad);
    const auto at = sk::at_line_check(beta, h, q, quad);
    ordered_json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["beta"] = beta;
    rec["h"] = h;
    rec["q"] = q;
    rec["at_lhs"] = at.lhs;
    rec["stable"] = at.stable;
    deliver({rec}, global, out);
    return 0;
}

int run_sk_compare(GlobalOpts& global, const CLI::Option* beta_opt, const CLI::Option* b1_opt,
                   const CLI::Option* quad_opt, double beta, double b1, int quad_count,
                   std::ostream& out) {
    global.finalize();
    global.overlay(beta_opt, "beta", beta);
    global.overlay(b1_opt, "b1", b1);
    global.overlay(quad_opt, "quad_count", quad_count);
    require_format(global, {"json", "jsonl", "csv"});

    const auto quad = sk::gauss_hermite(quad_count);
    const auto h0 = sk::h0_special(beta, b1, quad);
    const auto lit = sk::literature_comparison(beta, b1);
    const auto sf = sk::strong_field_deviation(beta, b1);

    std::string roots;
    for (double r : h0.b0_roots) {
        if (!roots.empty()) roots += ';';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", r);
        roots += buf;
    }
    ordered_json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["beta"] = beta;
    rec["b1"] = b1;
    rec["h0_b0_roots"] = roots;
    rec["h0_selected_b0"] = h0.selected_b0;
    rec["h0_bound"] = h0.bound;
    rec["h0_phi_b0_independent"] = h0.phi_b0_independent;
    rec["static_approx"] = lit.static_approx;
    rec["leschke_upper"] = lit.leschke_upper;
    rec["violates"] = lit.violates;
    rec["strong_field_b0"] = sf.b0;
    rec["strong_field_deviation"] = sf.deviation;
    rec["strong_field_root_found"] = sf.root_found;
    deliver({rec}, global, out);
    return 0;
}

int run_sk_experiment(GlobalOpts& global, const CLI::Option* sites_opt, const CLI::Option* samples_opt,
                      const CLI::Option* seed_opt, const CLI::Option* beta_opt, const CLI::Option* b1_opt,
                      const CLI::Option* h_opt, const CLI::Option* quad_opt, int sites, int samples,
                      std::uint64_t seed, double beta, double b1, double h, int quad_count,
                      std::ostream& out, std::ostream& err) {
    global.finalize();
    global.overlay(sites_opt, "sites", sites);
    global.overlay(samples_opt, "samples", samples);
    global.overlay(seed_opt, "seed", seed);
    global.overlay(beta_opt, "beta", beta);
    global.overlay(b1_opt, "b1", b1);
    global.overlay(h_opt, "h", h);
    global.overlay(quad_opt, "quad_count", quad_count);
    if (!global.format_explicit) global.format = "jsonl";
    require_format(global, {"jsonl", "csv"});

    const sk::SKParams params{beta, b1, h};
    const auto quad = sk::gauss_hermite(quad_count);
    const auto report = experiment::bound_validation(sites, params, samples, seed, quad);

    const auto fmt = experiment::format_from_string(global.format);
    if (!global.out_path.empty()) {
        experiment::export_results({report}, global.out_path, fmt);
    } else {
        out << experiment::render_results({report}, fmt);
    }
    if (!global.quiet)
        err << "sk experiment: mean phi_N(1)=" << report.mean_phi1 << " (stderr " << report.stderr_
            << "), bound " << report.variational_bound << ", gap " << report.gap
            << (report.satisfied_3sigma ? " [ok]" : " [violated]") << '\n';
    return report.satisfied_3sigma ? 0 : 1;
}

int run_sk_derivative_check(GlobalOpts& global, const CLI::Option* sites_opt, const CLI::Option* s_opt,
                            const CLI::Option* samples_opt, const CLI::Option* seed_opt,
                            const CLI::Option* beta_opt, const CLI::Option* b1_opt, const CLI::Option* h_opt,
                            const CLI::Option* q_opt, const CLI::Option* b0_opt, const CLI::Option* step_opt,
                            int sites, double s, int samples, std::uint64_t seed, double beta, double b1,
                            double h, double q, double b0, double fd_step, std::ostream& out) {
    global.finalize();
    global.overlay(sites_opt, "sites", sites);
    global.overlay(s_opt, "s", s);
    global.overlay(samples_opt, "samples", samples);
    global.overlay(seed_opt, "seed", seed);
    global.overlay(beta_opt, "beta", beta);
    global.overlay(b1_opt, "b1", b1);
    global.overlay(h_opt, "h", h);
    global.overlay(q_opt, "q", q);
    global.overlay(b0_opt, "b0", b0);
    global.overlay(step_opt, "fd_step", fd_step);
    require_format(global, {"json", "jsonl", "csv"});

    const sk::SKParams params{beta, b1, h};
    const auto check = experiment::derivative_identity_check(sites, s, params, q, b0, samples, seed, fd_step);
    ordered_json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["sites"] = sites;
    rec["s"] = s;
    rec["samples"] = check.samples;
    rec["fd_step"] = fd_step;
    rec["fd_value"] = check.fd_value;
    rec["formula_value"] = check.formula_value;
    rec["diff"] = check.diff;
    rec["duhamel_value"] = check.duhamel_value;
    rec["duhamel_diff"] = check.duhamel_diff;
    deliver({rec}, global, out);
    return 0;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    GlobalOpts global;
    int exit_code = 0;

    CLI::App app{"correlation-inequality and transverse-field SK toolbox"};
    app.require_subcommand(1);
    app.add_option("--config", global.config_path, "JSON config file; flags override its values");
    global.out_opt = app.add_option("--out", global.out_path, "write records to this path instead of stdout");
    global.format_opt = app.add_option("--format", global.format, "record format: json, jsonl or csv");
    global.quiet_opt = app.add_flag("--quiet", global.quiet, "suppress summary lines");

    // coeffs
    auto* coeffs = app.add_subcommand("coeffs", "exact Taylor coefficients of a kernel");
    coeffs->set_help_flag("--help", "print help");
    coeffs->fallthrough();
    std::string coeffs_kernel = "f";
    int coeffs_order = 10;
    auto* coeffs_kernel_opt = coeffs->add_option("--kernel", coeffs_kernel, "f, g or h");
    auto* coeffs_order_opt = coeffs->add_option("--order", coeffs_order, "max (even) order");
    coeffs->callback([&] {
        exit_code = run_coeffs(global, coeffs_kernel_opt, coeffs_order_opt, coeffs_kernel,
                               coeffs_order, out);
    });

    // lemma6
    auto* lemma6 = app.add_subcommand("lemma6", "remainder sign check on a grid");
    lemma6->set_help_flag("--help", "print help");
    lemma6->fallthrough();
    std::string lemma6_kernel = "f";
    int lemma6_n = 2;
    int lemma6_grid = 2001;
    auto* lemma6_kernel_opt = lemma6->add_option("--kernel", lemma6_kernel, "f, g or h");
    auto* lemma6_n_opt = lemma6->add_option("--n", lemma6_n, "truncation order (even)");
    auto* lemma6_grid_opt = lemma6->add_option("--grid-points", lemma6_grid, "grid resolution");
    lemma6->callback([&] {
        exit_code = run_lemma6(global, lemma6_kernel_opt, lemma6_n_opt, lemma6_grid_opt,
                               lemma6_kernel, lemma6_n, lemma6_grid, out);
    });

    // spectral
    auto* spectral = app.add_subcommand("spectral", "spectral measure of an observable");
    spectral->set_help_flag("--help", "print help");
    spectral->fallthrough();
    int spectral_sites = 2;
    std::uint64_t spectral_seed = 1;
    double spectral_beta = 1.0;
    std::string spectral_obs;
    double spectral_b1 = 1.0;
    double spectral_h = 0.0;
    auto* spectral_sites_opt = spectral->add_option("--sites", spectral_sites, "number of spins");
    auto* spectral_seed_opt = spectral->add_option("--seed", spectral_seed, "disorder seed");
    auto* spectral_beta_opt = spectral->add_option("--beta", spectral_beta, "inverse temperature");
    auto* spectral_obs_opt = spectral->add_option("--observable", spectral_obs, "Pauli string, e.g. X1*Z3");
    auto* spectral_b1_opt = spectral->add_option("--b1", spectral_b1, "transverse field");
    auto* spectral_h_opt = spectral->add_option("--h", spectral_h, "longitudinal field");
    spectral->callback([&] {
        exit_code = run_spectral(global, spectral_sites_opt, spectral_seed_opt, spectral_beta_opt,
                                 spectral_obs_opt, spectral_b1_opt, spectral_h_opt, spectral_sites,
                                 spectral_seed, spectral_beta, spectral_obs, spectral_b1, spectral_h,
                                 out);
    });

    // verify
    auto* verify = app.add_subcommand("verify", "theorem bracketing on random instances");
    verify->set_help_flag("--help", "print help");
    verify->fallthrough();
    int verify_sites = 2;
    int verify_trials = 10;
    std::uint64_t verify_seed = 1;
    std::string verify_range = "0.1,5";
    std::string verify_theorems = "t1,t2,t3,t4";
    std::string verify_orders = "0,2,4,6,8,10";
    auto* verify_sites_opt = verify->add_option("--sites", verify_sites, "number of spins");
    auto* verify_trials_opt = verify->add_option("--trials", verify_trials, "random instances");
    auto* verify_seed_opt = verify->add_option("--seed", verify_seed, "instance seed");
    auto* verify_range_opt = verify->add_option("--beta-range", verify_range, "beta range lo,hi");
    auto* verify_theorems_opt = verify->add_option("--theorems", verify_theorems, "subset of t1,t2,t3,t4");
    auto* verify_orders_opt = verify->add_option("--orders", verify_orders, "even truncation orders");
    verify->callback([&] {
        exit_code = run_verify(global, verify_sites_opt, verify_trials_opt, verify_seed_opt,
                               verify_range_opt, verify_theorems_opt, verify_orders_opt, verify_sites,
                               verify_trials, verify_seed, verify_range, verify_theorems,
                               verify_orders, out, err);
    });

    // sk family
    auto* sk_cmd = app.add_subcommand("sk", "transverse-field SK model tools");
    sk_cmd->fallthrough();
    sk_cmd->require_subcommand(1);

    auto* solve = sk_cmd->add_subcommand("solve", "variational stationary points");
    solve->set_help_flag("--help", "print help");
    solve->fallthrough();
    double solve_beta = 1.0, solve_b1 = 0.0, solve_h = 0.0;
    int solve_quad = 64;
    std::string solve_starts;
    auto* solve_beta_opt = solve->add_option("--beta", solve_beta, "inverse temperature");
    auto* solve_b1_opt = solve->add_option("--b1", solve_b1, "transverse field");
    auto* solve_h_opt = solve->add_option("--h", solve_h, "longitudinal field");
    auto* solve_quad_opt = solve->add_option("--quad-count", solve_quad, "Gauss-Hermite nodes");
    auto* solve_starts_opt = solve->add_option("--starts", solve_starts, "start list q:b0,q:b0,...");
    solve->callback([&] {
        exit_code = run_sk_solve(global, solve_beta_opt, solve_b1_opt, solve_h_opt, solve_quad_opt,
                                 solve_starts_opt, solve_beta, solve_b1, solve_h, solve_quad,
                                 solve_starts, out, err);
    });

    auto* classical = sk_cmd->add_subcommand("classical", "classical fixed point and AT line");
    classical->set_help_flag("--help", "print help");
    classical->fallthrough();
    double classical_beta = 1.0, classical_h = 0.0;
    int classical_quad = 64;
    auto* classical_beta_opt = classical->add_option("--beta", classical_beta, "inverse temperature");
    auto* classical_h_opt = classical->add_option("--h", classical_h, "longitudinal field");
    auto* classical_quad_opt = classical->add_option("--quad-count", classical_quad, "Gauss-Hermite nodes");
    classical->callback([&] {
        exit_code = run_sk_classical(global, classical_beta_opt, classical_h_opt, classical_quad_opt,
                                     classical_beta, classical_h, classical_quad, out);
    });

    auto* compare = sk_cmd->add_subcommand("compare", "h=0 bound, literature values, strong-field deviation");
    compare->set_help_flag("--help", "print help");
    compare->fallthrough();
    double compare_beta = 1.0, compare_b1 = 1.0;
    int compare_quad = 64;
    auto* compare_beta_opt = compare->add_option("--beta", compare_beta, "inverse temperature");
    auto* compare_b1_opt = compare->add_option("--b1", compare_b1, "transverse field");
    auto* compare_quad_opt = compare->add_option("--quad-count", compare_quad, "Gauss-Hermite nodes");
    compare->callback([&] {
        exit_code = run_sk_compare(global, compare_beta_opt, compare_b1_opt, compare_quad_opt,
                                   compare_beta, compare_b1, compare_quad, out);
    });

    auto* exper = sk_cmd->add_subcommand("experiment", "disorder-averaged bound validation");
    exper->set_help_flag("--help", "print help");
    exper->fallthrough();
    int exper_sites = 4, exper_samples = 100;
    std::uint64_t exper_seed = 1;
    double exper_beta = 1.0, exper_b1 = 0.5, exper_h = 0.0;
    int exper_quad = 64;
    auto* exper_sites_opt = exper->add_option("--sites", exper_sites, "number of spins");
    auto* exper_samples_opt = exper->add_option("--samples", exper_samples, "disorder samples");
    auto* exper_seed_opt = exper->add_option("--seed", exper_seed, "base seed");
    auto* exper_beta_opt = exper->add_option("--beta", exper_beta, "inverse temperature");
    auto* exper_b1_opt = exper->add_option("--b1", exper_b1, "transverse field");
    auto* exper_h_opt = exper->add_option("--h", exper_h, "longitudinal field");
    auto* exper_quad_opt = exper->add_option("--quad-count", exper_quad, "Gauss-Hermite nodes");
    exper->callback([&] {
        exit_code = run_sk_experiment(global, exper_sites_opt, exper_samples_opt, exper_seed_opt,
                                      exper_beta_opt, exper_b1_opt, exper_h_opt, exper_quad_opt,
                                      exper_sites, exper_samples, exper_seed, exper_beta, exper_b1,
                                      exper_h, exper_quad, out, err);
    });

    auto* deriv = sk_cmd->add_subcommand("derivative-check", "interpolation derivative identity check");
    deriv->set_help_flag("--help", "print help");
    deriv->fallthrough();
    int deriv_sites = 2, deriv_samples = 50;
    double deriv_s = 0.5;
    std::uint64_t deriv_seed = 1;
    double deriv_beta = 1.0, deriv_b1 = 0.5, deriv_h = 0.1, deriv_q = 0.4, deriv_b0 = 0.2;
    double deriv_step = 1e-4;
    auto* deriv_sites_opt = deriv->add_option("--sites", deriv_sites, "number of spins");
    auto* deriv_s_opt = deriv->add_option("--s", deriv_s, "interpolation parameter in (0,1)");
    auto* deriv_samples_opt = deriv->add_option("--samples", deriv_samples, "disorder samples");
    auto* deriv_seed_opt = deriv->add_option("--seed", deriv_seed, "base seed");
    auto* deriv_beta_opt = deriv->add_option("--beta", deriv_beta, "inverse temperature");
    auto* deriv_b1_opt = deriv->add_option("--b1", deriv_b1, "transverse field");
    auto* deriv_h_opt = deriv->add_option("--h", deriv_h, "longitudinal field");
    auto* deriv_q_opt = deriv->add_option("--q", deriv_q, "overlap parameter");
    auto* deriv_b0_opt = deriv->add_option("--b0", deriv_b0, "auxiliary transverse field");
    auto* deriv_step_opt = deriv->add_option("--fd-step", deriv_step, "central difference step");
    deriv->callback([&] {
        exit_code = run_sk_derivative_check(global, deriv_sites_opt, deriv_s_opt, deriv_samples_opt,
                                            deriv_seed_opt, deriv_beta_opt, deriv_b1_opt, deriv_h_opt,
                                            deriv_q_opt, deriv_b0_opt, deriv_step_opt, deriv_sites,
                                            deriv_s, deriv_samples, deriv_seed, deriv_beta, deriv_b1,
                                            deriv_h, deriv_q, deriv_b0, deriv_step, out);
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);  // prints help or the parse error
        return rc == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return exit_code;
}

}  // namespace duhamel::cli
