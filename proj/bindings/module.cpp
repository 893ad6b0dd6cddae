#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "duhamel/bounds.hpp"
#include "duhamel/experiment.hpp"
#include "duhamel/hilbert.hpp"
#include "duhamel/rng.hpp"
#include "duhamel/series.hpp"
#include "duhamel/sk_variational.hpp"

namespace py = pybind11;
using namespace duhamel;

namespace {

series::Kernel kernel_arg(const std::string& name) {
    if (name.size() != 1) throw std::invalid_argument("kernel must be 'f', 'g' or 'h'");
    return series::kernel_from_letter(name[0]);
}

std::vector<std::pair<int, char>> factors_arg(const std::string& text) {
    std::vector<std::pair<int, char>> factors;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, '*')) {
        if (token.size() < 2) throw std::invalid_argument("bad Pauli factor '" + token + "'");
        factors.emplace_back(std::stoi(token.substr(1)), token[0]);
    }
    return factors;
}

py::dict bound_report_dict(const bounds::BoundReport& rep) {
    py::dict d;
    d["theorem"] = bounds::theorem_name(rep.theorem);
    d["n"] = rep.n;
    d["lower"] = rep.lower ? py::object(py::float_(*rep.lower)) : py::none();
    d["exact"] = rep.exact;
    d["upper"] = rep.upper;
    d["margin_lower"] = rep.margin_lower;
    d["margin_upper"] = rep.margin_upper;
    d["satisfied"] = rep.satisfied;
    d["roepstorff"] = rep.roepstorff ? py::object(py::float_(*rep.roepstorff)) : py::none();
    return d;
}

py::dict point_dict(const sk::VariationalPoint& p) {
    py::dict d;
    d["q"] = p.q;
    d["b0"] = p.b0;
    d["phi_value"] = p.phi_value;
    d["grad_q"] = p.grad_q;
    d["grad_b0"] = p.grad_b0;
    d["converged"] = p.converged;
    d["iterations"] = p.iterations;
    d["selected"] = p.selected;
    return d;
}

py::dict experiment_report_dict(const experiment::ExperimentReport& r) {
    py::dict d;
    d["n_sites"] = r.n_sites;
    d["beta"] = r.beta;
    d["b1"] = r.b1;
    d["h"] = r.h;
    d["samples"] = r.samples;
    d["seed"] = r.seed;
    d["mean_phi1"] = r.mean_phi1;
    d["stderr"] = r.stderr_;
    d["variational_bound"] = r.variational_bound;
    d["gap"] = r.gap;
    d["satisfied_3sigma"] = r.satisfied_3sigma;
    d["solver_converged"] = r.solver_converged;
    d["q_star"] = r.q_star;
    d["b0_star"] = r.b0_star;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "correlation-inequality toolbox: spectral kernels, Duhamel bounds, "
              "transverse-field SK variational solution";

    // ---- series ----
    m.def("bernoulli_numbers", [](int max_index) {
        std::vector<std::string> out;
        for (const auto& b : series::bernoulli_numbers(max_index))
            out.push_back(series::rational_string(b));
        return out;
    }, py::arg("max_index"));

    m.def("taylor_table", [](const std::string& kernel, int max_order) {
        const auto table = series::taylor_table(kernel_arg(kernel), max_order);
        py::dict out;
        for (int j = 0; j <= max_order; j += 2)
            out[py::int_(j)] = series::rational_string(table.entry(j));
        return out;
    }, py::arg("kernel"), py::arg("max_order"));

    m.def("taylor_values", [](const std::string& kernel, int max_order) {
        const auto table = series::taylor_table(kernel_arg(kernel), max_order);
        py::dict out;
        for (int j = 0; j <= max_order; j += 2) out[py::int_(j)] = table.value(j);
        return out;
    }, py::arg("kernel"), py::arg("max_order"));

    m.def("kernel_value", [](const std::string& kernel, double x) {
        return series::kernel_value(kernel_arg(kernel), x);
    }, py::arg("kernel"), py::arg("x"));

    m.def("remainder", [](const std::string& kernel, int n, double x) {
        return series::remainder(kernel_arg(kernel), n, x);
    }, py::arg("kernel"), py::arg("n"), py::arg("x"));

    m.def("zeta_cross_check", &series::zeta_cross_check, py::arg("n"));

    m.def("verify_sign_definiteness", [](const std::string& kernel, int n, int grid_points) {
        const auto k = kernel_arg(kernel);
        const auto rep = series::verify_sign_definiteness(k, n, series::default_grid(k, grid_points));
        py::dict d;
        d["kernel"] = kernel;
        d["n"] = rep.n;
        d["expected_sign"] = rep.expected_sign;
        d["grid_lo"] = rep.grid_lo;
        d["grid_hi"] = rep.grid_hi;
        d["grid_points"] = rep.grid_points;
        d["worst_violation"] = rep.worst_violation;
        d["worst_x"] = rep.worst_x;
        d["passed"] = rep.passed;
        return d;
    }, py::arg("kernel"), py::arg("n"), py::arg("grid_points") = 2001);

    // ---- hilbert ----
    py::class_<hilbert::DenseOperator>(m, "DenseOperator")
        .def_readonly("n_sites", &hilbert::DenseOperator::n_sites)
        .def_property_readonly("matrix",
                               [](const hilbert::DenseOperator& op) { return op.mat; })
        .def("__matmul__", [](const hilbert::DenseOperator& a, const hilbert::DenseOperator& b) {
            return hilbert::multiply(a, b);
        });

    py::class_<hilbert::GibbsContext>(m, "GibbsContext")
        .def_readonly("beta", &hilbert::GibbsContext::beta)
        .def_property_readonly("energies",
                               [](const hilbert::GibbsContext& c) { return c.eig.energies; })
        .def_property_readonly("weights",
                               [](const hilbert::GibbsContext& c) { return c.weights; });

    m.def("identity_op", &hilbert::identity_op, py::arg("n_sites"));
    m.def("pauli", &hilbert::pauli, py::arg("site"), py::arg("axis"), py::arg("n_sites"));
    m.def("pauli_string", [](int n_sites, const std::string& text) {
        return hilbert::pauli_string(n_sites, factors_arg(text));
    }, py::arg("n_sites"), py::arg("factors"));
    m.def("dagger", &hilbert::dagger, py::arg("op"));
    m.def("commutator", &hilbert::commutator, py::arg("a"), py::arg("b"));
    m.def("anticommutator", &hilbert::anticommutator, py::arg("a"), py::arg("b"));
    m.def("operator_from_matrix", [](int n_sites, const Eigen::MatrixXcd& mat) {
        return hilbert::DenseOperator{n_sites, mat, false};
    }, py::arg("n_sites"), py::arg("matrix"));

    m.def("build_tfsk", &hilbert::build_tfsk, py::arg("n_sites"), py::arg("couplings"),
          py::arg("h"), py::arg("b1"));
    m.def("build_interpolated", &hilbert::build_interpolated, py::arg("n_sites"), py::arg("s"),
          py::arg("couplings"), py::arg("z"), py::arg("q"), py::arg("h"), py::arg("b0"),
          py::arg("b1"));

    m.def("make_gibbs", [](const hilbert::DenseOperator& h, double beta) {
        return hilbert::make_gibbs(h, beta);
    }, py::arg("hamiltonian"), py::arg("beta"));

    m.def("thermal_expectation", &hilbert::thermal_expectation, py::arg("ctx"), py::arg("op"));
    m.def("duhamel", &hilbert::duhamel, py::arg("ctx"), py::arg("a"), py::arg("b"));
    m.def("duhamel_by_quadrature", &hilbert::duhamel_by_quadrature, py::arg("hamiltonian"),
          py::arg("beta"), py::arg("a"), py::arg("b"), py::arg("steps") = 64);
    m.def("nested_commutator", &hilbert::nested_commutator, py::arg("hamiltonian"), py::arg("a"),
          py::arg("k"));

    m.def("spectral_measure", [](const hilbert::GibbsContext& ctx, const hilbert::DenseOperator& a,
                                 const hilbert::DenseOperator& b) {
        return hilbert::spectral_measure(ctx, a, b).atoms;
    }, py::arg("ctx"), py::arg("a"), py::arg("b"));

    m.def("bilinear_expectations", [](const hilbert::GibbsContext& ctx,
                                      const hilbert::DenseOperator& a,
                                      const hilbert::DenseOperator& b) {
        const auto v = hilbert::bilinear_expectations(ctx, a, b);
        py::dict d;
        d["anticomm"] = v.anticomm;
        d["comm"] = v.comm;
        d["double_comm"] = v.double_comm;
        return d;
    }, py::arg("ctx"), py::arg("a"), py::arg("b"));

    // ---- bounds ----
    m.def("theorem_bounds", [](const std::string& theorem, const hilbert::GibbsContext& ctx,
                               const hilbert::DenseOperator& a, int n) {
        bounds::Theorem t;
        if (theorem == "t1") t = bounds::Theorem::T1;
        else if (theorem == "t2") t = bounds::Theorem::T2;
        else if (theorem == "t3") t = bounds::Theorem::T3;
        else if (theorem == "t4") t = bounds::Theorem::T4;
        else throw std::invalid_argument("theorem must be t1..t4");
        return bound_report_dict(bounds::theorem_bounds(t, ctx, a, n));
    }, py::arg("theorem"), py::arg("ctx"), py::arg("a"), py::arg("n"));

    m.def("lemma_identity_suite", [](const hilbert::GibbsContext& ctx,
                                     const hilbert::DenseOperator& a,
                                     const hilbert::DenseOperator& b) {
        const auto r = bounds::lemma_identity_suite(ctx, a, b);
        py::dict d;
        d["lemma1"] = r.lemma1;
        d["lemma2"] = r.lemma2;
        d["lemma3"] = r.lemma3;
        d["lemma4"] = r.lemma4;
        d["lemma5"] = r.lemma5;
        d["duhamel_vs_quadrature"] = r.duhamel_vs_quadrature;
        return d;
    }, py::arg("ctx"), py::arg("a"), py::arg("b"));

    m.def("falk_bruch_corollary", [](const hilbert::GibbsContext& ctx,
                                     const hilbert::DenseOperator& a) {
        const auto r = bounds::falk_bruch_corollary(ctx, a);
        py::dict d;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["u"] = r.u;
        d["r"] = r.r;
        d["satisfied"] = r.satisfied;
        return d;
    }, py::arg("ctx"), py::arg("a"));

    m.def("make_random_instance", [](int n_sites, std::uint64_t seed, double beta_lo, double beta_hi) {
        auto inst = bounds::make_random_instance(n_sites, seed, beta_lo, beta_hi);
        return py::make_tuple(std::move(inst.h), std::move(inst.a), std::move(inst.b), inst.beta);
    }, py::arg("n_sites"), py::arg("seed"), py::arg("beta_lo") = 0.1, py::arg("beta_hi") = 5.0);

    // ---- sk variational ----
    m.def("gauss_hermite", [](int count) {
        const auto q = sk::gauss_hermite(count);
        return py::make_tuple(q.nodes, q.weights);
    }, py::arg("count"));

    auto quad_of = [](int count) { return sk::gauss_hermite(count); };

    m.def("phi0", [quad_of](double q, double b0, double beta, double b1, double h, int quad_count) {
        return sk::phi0(q, b0, sk::SKParams{beta, b1, h}, quad_of(quad_count));
    }, py::arg("q"), py::arg("b0"), py::arg("beta"), py::arg("b1") = 0.0, py::arg("h") = 0.0,
       py::arg("quad_count") = 64);

    m.def("phi_bound", [quad_of](double q, double b0, double beta, double b1, double h, int quad_count) {
        return sk::phi_bound(q, b0, sk::SKParams{beta, b1, h}, quad_of(quad_count));
    }, py::arg("q"), py::arg("b0"), py::arg("beta"), py::arg("b1") = 0.0, py::arg("h") = 0.0,
       py::arg("quad_count") = 64);

    m.def("grad_phi", [quad_of](double q, double b0, double beta, double b1, double h, int quad_count) {
        const auto g = sk::grad_phi(q, b0, sk::SKParams{beta, b1, h}, quad_of(quad_count));
        return py::make_tuple(g.dq, g.db0);
    }, py::arg("q"), py::arg("b0"), py::arg("beta"), py::arg("b1") = 0.0, py::arg("h") = 0.0,
       py::arg("quad_count") = 64);

    m.def("solve_stationary", [quad_of](double beta, double b1, double h, int quad_count,
                                        std::vector<std::pair<double, double>> starts) {
        const auto points =
            sk::solve_stationary(sk::SKParams{beta, b1, h}, quad_of(quad_count), std::move(starts));
        py::list out;
        for (const auto& p : points) out.append(point_dict(p));
        return out;
    }, py::arg("beta"), py::arg("b1") = 0.0, py::arg("h") = 0.0, py::arg("quad_count") = 64,
       py::arg("starts") = std::vector<std::pair<double, double>>{});

    m.def("classical_q", [quad_of](double beta, double h, int quad_count) {
        return sk::classical_q(beta, h, quad_of(quad_count));
    }, py::arg("beta"), py::arg("h") = 0.0, py::arg("quad_count") = 64);

    m.def("at_line_check", [quad_of](double beta, double h, double q, int quad_count) {
        const auto r = sk::at_line_check(beta, h, q, quad_of(quad_count));
        py::dict d;
        d["lhs"] = r.lhs;
        d["stable"] = r.stable;
        return d;
    }, py::arg("beta"), py::arg("h"), py::arg("q"), py::arg("quad_count") = 64);

    m.def("h0_special", [quad_of](double beta, double b1, int quad_count) {
        const auto r = sk::h0_special(beta, b1, quad_of(quad_count));
        py::dict d;
        d["b0_roots"] = r.b0_roots;
        d["selected_b0"] = r.selected_b0;
        d["bound"] = r.bound;
        d["phi_spread"] = r.phi_spread;
        d["phi_b0_independent"] = r.phi_b0_independent;
        return d;
    }, py::arg("beta"), py::arg("b1"), py::arg("quad_count") = 64);

    m.def("literature_comparison", [](double beta, double b1) {
        const auto r = sk::literature_comparison(beta, b1);
        py::dict d;
        d["static_approx"] = r.static_approx;
        d["leschke_upper"] = r.leschke_upper;
        d["violates"] = r.violates;
        return d;
    }, py::arg("beta"), py::arg("b1"));

    m.def("strong_field_deviation", [](double beta, double b1) {
        const auto r = sk::strong_field_deviation(beta, b1);
        py::dict d;
        d["b0"] = r.b0;
        d["deviation"] = r.deviation;
        d["root_found"] = r.root_found;
        return d;
    }, py::arg("beta"), py::arg("b1"));

    // ---- experiment ----
    m.def("sample_disorder", [](int n_sites, std::uint64_t seed) {
        const auto d = experiment::sample_disorder(n_sites, seed);
        return py::make_tuple(d.g, d.z);
    }, py::arg("n_sites"), py::arg("seed"));

    m.def("phi_s_estimate", [](int n_sites, double s, double beta, double b1, double h, double q,
                               double b0, int samples, std::uint64_t seed) {
        const auto est =
            experiment::phi_s_estimate(n_sites, s, sk::SKParams{beta, b1, h}, q, b0, samples, seed);
        py::dict d;
        d["mean"] = est.mean;
        d["stderr"] = est.stderr_;
        d["samples"] = est.samples;
        return d;
    }, py::arg("n_sites"), py::arg("s"), py::arg("beta"), py::arg("b1"), py::arg("h"),
       py::arg("q"), py::arg("b0"), py::arg("samples"), py::arg("seed"));

    m.def("derivative_identity_check", [](int n_sites, double s, double beta, double b1, double h,
                                          double q, double b0, int samples, std::uint64_t seed,
                                          double fd_step) {
        const auto c = experiment::derivative_identity_check(
            n_sites, s, sk::SKParams{beta, b1, h}, q, b0, samples, seed, fd_step);
        py::dict d;
        d["fd_value"] = c.fd_value;
        d["formula_value"] = c.formula_value;
        d["diff"] = c.diff;
        d["duhamel_value"] = c.duhamel_value;
        d["duhamel_diff"] = c.duhamel_diff;
        d["samples"] = c.samples;
        return d;
    }, py::arg("n_sites"), py::arg("s"), py::arg("beta"), py::arg("b1"), py::arg("h"),
       py::arg("q"), py::arg("b0"), py::arg("samples"), py::arg("seed"),
       py::arg("fd_step") = 1e-4);

    m.def("bound_validation", [quad_of](int n_sites, double beta, double b1, double h, int samples,
                                        std::uint64_t seed, int quad_count) {
        return experiment_report_dict(experiment::bound_validation(
            n_sites, sk::SKParams{beta, b1, h}, samples, seed, quad_of(quad_count)));
    }, py::arg("n_sites"), py::arg("beta"), py::arg("b1"), py::arg("h"), py::arg("samples"),
       py::arg("seed"), py::arg("quad_count") = 64);

    m.attr("generator_name") = rng::kGeneratorName;
    m.attr("generator_version") = rng::kGeneratorVersion;
    m.attr("schema_version") = experiment::kSchemaVersion;
}
