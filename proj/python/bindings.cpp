#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wl1/analysis.hpp"
#include "wl1/bounds.hpp"
#include "wl1/errors.hpp"
#include "wl1/harness.hpp"
#include "wl1/rip.hpp"
#include "wl1/sharpness.hpp"
#include "wl1/solver.hpp"

namespace py = pybind11;
using namespace wl1;

namespace {

IndexSet to_set(const std::vector<Index>& v) { return IndexSet(v); }

py::dict ric_dict(const RicResult& r) {
  py::dict d;
  d["k_eff"] = r.k_eff;
  d["delta"] = r.delta;
  d["mode"] = to_string(r.mode);
  d["witness"] = r.witness.indices();
  d["witness_eigenvalue"] = r.witness_eigenvalue;
  d["supports_examined"] = r.supports_examined;
  return d;
}

py::dict run_dict(const FailureRun& r) {
  py::dict d;
  d["noise_norm"] = r.noise_norm;
  d["x_hat"] = r.x_hat;
  d["error"] = r.error;
  d["objective"] = r.objective;
  d["status"] = to_string(r.status);
  d["gap"] = r.gap;
  d["feas_violation"] = r.feas_violation;
  return d;
}

Counterexample ce_from(const py::dict& d) {
  // Round-trips through the JSON form so the instance is re-verified.
  const auto json = py::module_::import("json");
  const std::string text = py::str(json.attr("dumps")(d["json"]));
  return counterexample_from_json(Json::parse(text));
}

py::object json_to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted l1 minimisation with partial support information (0-based indices).";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<UnsupportedGeometry>(m, "UnsupportedGeometry", domain.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  m.def("gamma_factor", &gamma_factor, py::arg("omega"), py::arg("rho"), py::arg("alpha"));
  m.def("sparsity_d", [](double omega, double rho, double alpha) {
    const auto s = sparsity_d(omega, rho, alpha);
    return py::make_tuple(s.d, s.a);
  }, py::arg("omega"), py::arg("rho"), py::arg("alpha"));
  m.def("ric_threshold", [](double t, double omega, double rho, double alpha) {
    return ric_threshold(GeometryParams::make(t, omega, rho, alpha));
  }, py::arg("t"), py::arg("omega"), py::arg("rho"), py::arg("alpha"));
  m.def("stability_constants_l2", [](double t, double omega, double rho, double alpha, double delta) {
    const auto c = stability_constants_l2(GeometryParams::make(t, omega, rho, alpha), delta);
    return py::make_tuple(c.D0, c.D1);
  }, py::arg("t"), py::arg("omega"), py::arg("rho"), py::arg("alpha"), py::arg("delta"));
  m.def("stability_constants_ds", [](double t, double omega, double rho, double alpha, double delta, Index k) {
    const auto c = stability_constants_ds(GeometryParams::make(t, omega, rho, alpha), delta, k);
    return py::make_tuple(c.D0, c.D1);
  }, py::arg("t"), py::arg("omega"), py::arg("rho"), py::arg("alpha"), py::arg("delta"), py::arg("k"));
  m.def("bracket_int", &bracket_int);
  m.def("cz_constants", [](double t, double delta, Index k) {
    const auto c = cz_constants(t, delta, k);
    py::dict d;
    d["C0"] = c.C0;
    d["C1"] = c.C1;
    d["C0_ds"] = c.C0_ds;
    d["C1_ds"] = c.C1_ds;
    return d;
  }, py::arg("t"), py::arg("delta"), py::arg("k"));
  m.def("fmsy_threshold", &fmsy_threshold, py::arg("a"), py::arg("omega"), py::arg("rho"), py::arg("alpha"));
  m.def("fmsy_constants", [](double a, double dak, double da1k, double omega, double rho, double alpha) {
    const auto c = fmsy_constants(a, dak, da1k, omega, rho, alpha);
    return py::make_tuple(c.C0pp, c.C1pp);
  }, py::arg("a"), py::arg("delta_ak"), py::arg("delta_a1k"), py::arg("omega"), py::arg("rho"), py::arg("alpha"));
  m.def("dirac_2k_threshold", &dirac_2k_threshold, py::arg("omega"), py::arg("rho"), py::arg("alpha"));
  m.def("gaussian_noise_radius", [](const std::string& kind, Index dim, double sigma) {
    const auto nk = noise_set_from_string(kind);
    return gaussian_noise_radius(nk == NoiseSet::L2Ball ? RadiusKind::L2 : RadiusKind::DS, dim, sigma);
  }, py::arg("kind"), py::arg("dim"), py::arg("sigma"));
  m.def("figure_sweep", [](double t, double rho, double delta, std::vector<double> alphas, int omega_steps) {
    SweepSpec spec;
    spec.t = t;
    spec.rho = rho;
    spec.delta = delta;
    spec.alphas = std::move(alphas);
    spec.omega_steps = omega_steps;
    const auto table = figure_sweep(spec);
    return py::make_tuple(table.columns, table.rows);
  }, py::arg("t"), py::arg("rho"), py::arg("delta"), py::arg("alphas"), py::arg("omega_steps") = 101);
  m.def("emit_figures", [](const std::filesystem::path& dir, int steps) { return emit_figures(dir, steps); },
        py::arg("out_dir"), py::arg("omega_steps") = 101);

  m.def("best_k_term", [](const Vector& x, Index k) {
    const auto s = best_k_term(x, k);
    return py::make_tuple(s.head, s.tail);
  }, py::arg("x"), py::arg("k"));
  m.def("build_weights", [](const std::vector<Index>& T, double omega, Index n) {
    return build_weights(to_set(T), omega, n).values();
  }, py::arg("T_tilde"), py::arg("omega"), py::arg("n"));

  m.def("solve", [](const Matrix& A, const Vector& y, const Vector& weights, const std::string& noise,
                    double eps, double feas_tol, double opt_tol, int max_iters) {
    ProblemInstance inst(A, y, noise_set_from_string(noise), eps);
    SolverOptions opts;
    opts.feas_tol = feas_tol;
    opts.opt_tol = opt_tol;
    opts.max_iters = max_iters;
    const auto r = [&] {
      py::gil_scoped_release release;
      return solve_weighted(inst, WeightVector::from_values(weights), opts);
    }();
    py::dict d;
    d["x_hat"] = r.x_hat;
    d["objective"] = r.objective;
    d["feas_violation"] = r.feas_violation;
    d["dual_bound"] = r.certificate.dual_bound;
    d["gap"] = r.certificate.gap;
    d["iterations"] = r.iterations;
    d["status"] = to_string(r.status);
    return d;
  }, py::arg("A"), py::arg("y"), py::arg("weights"), py::arg("noise") = "l2", py::arg("eps") = 0.0,
     py::arg("feas_tol") = 1e-8, py::arg("opt_tol") = 1e-8, py::arg("max_iters") = 50000);
  m.def("optimality_certificate", [](const Matrix& A, const Vector& y, const Vector& weights,
                                     const std::string& noise, double eps, const Vector& x_hat) {
    ProblemInstance inst(A, y, noise_set_from_string(noise), eps);
    const auto c = optimality_certificate(inst, WeightVector::from_values(weights), x_hat);
    py::dict d;
    d["feas_violation"] = c.feas_violation;
    d["dual_bound"] = c.dual_bound;
    d["objective"] = c.objective;
    d["gap"] = c.gap;
    return d;
  }, py::arg("A"), py::arg("y"), py::arg("weights"), py::arg("noise"), py::arg("eps"), py::arg("x_hat"));

  m.def("exact_ric", [](const Matrix& A, double k, std::uint64_t budget, unsigned workers) {
    RicResult r;
    {
      py::gil_scoped_release release;
      r = exact_ric(A, k, RicOptions{budget, workers});
    }
    return ric_dict(r);
  }, py::arg("A"), py::arg("k"), py::arg("budget") = 2'000'000, py::arg("workers") = 1);
  m.def("mc_ric_lower_bound", [](const Matrix& A, double k, std::uint64_t trials, std::uint64_t seed) {
    RicResult r;
    {
      py::gil_scoped_release release;
      r = mc_ric_lower_bound(A, k, trials, seed);
    }
    return ric_dict(r);
  }, py::arg("A"), py::arg("k"), py::arg("trials"), py::arg("seed"));

  m.def("sparse_decompose", [](const Vector& v, double alpha, Index k) {
    py::list out;
    for (const auto& p : sparse_decompose(v, alpha, k).parts) out.append(py::make_tuple(p.lambda, p.u));
    return out;
  }, py::arg("v"), py::arg("alpha"), py::arg("k"));
  m.def("verify_decomposition", [](const Vector& v, const std::vector<std::pair<double, Vector>>& parts,
                                   double alpha, Index k) {
    ConvexSparseDecomposition dec;
    for (const auto& [lambda, u] : parts) dec.parts.push_back({lambda, u});
    const auto r = verify_decomposition(v, dec, alpha, k);
    py::dict checks;
    for (const auto& c : r.checks) checks[py::str(c.name)] = py::make_tuple(c.ok, c.worst);
    return py::make_tuple(r.valid, checks);
  }, py::arg("v"), py::arg("parts"), py::arg("alpha"), py::arg("k"));
  m.def("shifted_power_inequality", [](const Vector& a, Index k, double lambda, double p) {
    const auto r = shifted_power_inequality(a, k, lambda, p);
    return py::make_tuple(r.lhs, r.rhs, r.holds);
  }, py::arg("a"), py::arg("k"), py::arg("lam"), py::arg("p"));

  m.def("minimal_t", &minimal_t, py::arg("gamma"));
  m.def("construct_counterexample", [](Index k, double t, double omega, double rho, double alpha,
                                       double epsilon, std::optional<Index> N) {
    const auto ce = construct_counterexample(k, t, omega, rho, alpha, epsilon, N);
    py::dict d;
    d["A"] = ce.A;
    d["x0"] = ce.x0;
    d["eta0"] = ce.eta0;
    d["x1"] = ce.x1;
    d["m_prime"] = ce.m_prime;
    d["m"] = ce.m;
    d["T_tilde"] = ce.T_tilde.indices();
    d["weights"] = ce.weights().values();
    d["json"] = json_to_py(counterexample_to_json(ce));
    return d;
  }, py::arg("k"), py::arg("t"), py::arg("omega"), py::arg("rho"), py::arg("alpha"), py::arg("epsilon"),
     py::arg("N") = py::none());
  m.def("demonstrate_failure", [](const py::dict& ce) {
    const auto c = ce_from(ce);
    const auto r = demonstrate_failure(c, NoiseSet::L2Ball);
    py::dict d;
    d["x0_norm"] = r.x0_norm;
    d["eta0_norm"] = r.eta0_norm;
    d["noiseless"] = run_dict(r.noiseless);
    py::list noisy;
    for (const auto& run : r.noisy) noisy.append(run_dict(run));
    d["noisy"] = noisy;
    d["objective_ok"] = r.objective_ok;
    d["recovery_failed"] = r.recovery_failed;
    d["min_noisy_error"] = r.min_noisy_error;
    return d;
  }, py::arg("counterexample"));
}
