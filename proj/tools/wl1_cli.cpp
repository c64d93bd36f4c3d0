// wl1: command line front end.
//
//   wl1 bounds sweep --t 4 --rho 1 --delta 0.1 --alphas 0.5,0.7,0.9 --omega-steps 101 --out fig1.csv
//   wl1 solve --matrix A.csv --y y.csv --weights w.json --noise l2 --eps 0.01 --out report.json
//   wl1 rip exact|mc|certify --matrix A.csv --k 3 ...
//   wl1 sharpness build --k 12 --t 1.3334 --omega 1 --rho 1 --alpha 0.5 --eps 0.5 --out ce.json
//   wl1 sharpness demo --in ce.json
//   wl1 experiment run|bound-check --config cfg.json
//   wl1 figures emit --out dir/

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "wl1/bounds.hpp"
#include "wl1/errors.hpp"
#include "wl1/harness.hpp"
#include "wl1/io.hpp"
#include "wl1/rip.hpp"
#include "wl1/sharpness.hpp"
#include "wl1/solver.hpp"

using namespace wl1;
namespace fs = std::filesystem;

namespace {

void emit(const Json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(out, j);
  }
}

Json ric_json(const RicResult& r) {
  return Json{{"k", r.k_eff},
              {"delta", r.delta},
              {"mode", to_string(r.mode)},
              {"witness", index_set_to_json(r.witness).at("indices")},
              {"witness_eigenvalue", r.witness_eigenvalue},
              {"supports_examined", r.supports_examined}};
}

Json report_json(const RecoveryReport& r) {
  return Json{{"status", to_string(r.status)},
              {"objective", r.objective},
              {"feas_violation", r.feas_violation},
              {"gap", r.certificate.gap},
              {"dual_bound", r.certificate.dual_bound},
              {"iterations", r.iterations},
              {"x_hat", signal_to_json(r.x_hat)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted l1 recovery with partial support information"};
  app.require_subcommand(1);

  // bounds sweep
  auto* bounds = app.add_subcommand("bounds", "Thresholds and stability constants");
  bounds->require_subcommand(1);
  auto* sweep = bounds->add_subcommand("sweep", "Tabulate threshold and constants over (omega, alpha)");
  SweepSpec spec;
  std::string sweep_out;
  std::optional<double> cmp_a, cmp_dak, cmp_da1k;
  sweep->add_option("--t", spec.t)->capture_default_str();
  sweep->add_option("--rho", spec.rho)->capture_default_str();
  sweep->add_option("--delta", spec.delta)->capture_default_str();
  sweep->add_option("--alphas", spec.alphas)->delimiter(',')->capture_default_str();
  sweep->add_option("--omega-steps", spec.omega_steps)->capture_default_str();
  sweep->add_option("--omega-min", spec.omega_min)->capture_default_str();
  sweep->add_option("--omega-max", spec.omega_max)->capture_default_str();
  sweep->add_option("--a", cmp_a, "Adds the comparison columns");
  sweep->add_option("--delta-ak", cmp_dak);
  sweep->add_option("--delta-a1k", cmp_da1k);
  sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

  // solve
  auto* solve = app.add_subcommand("solve", "Weighted l1 minimisation");
  std::string matrix_path, y_path, weights_path, noise = "l2", solve_out;
  double eps = 0.0;
  SolverOptions sopts;
  solve->add_option("--matrix", matrix_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--y", y_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--weights", weights_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--noise", noise)->check(CLI::IsMember({"l2", "ds"}))->capture_default_str();
  solve->add_option("--eps", eps)->capture_default_str();
  solve->add_option("--feas-tol", sopts.feas_tol)->capture_default_str();
  solve->add_option("--opt-tol", sopts.opt_tol)->capture_default_str();
  solve->add_option("--max-iters", sopts.max_iters)->capture_default_str();
  solve->add_option("--out", solve_out);

  // rip
  auto* rip = app.add_subcommand("rip", "Restricted isometry constants");
  rip->require_subcommand(1);
  std::string rip_matrix, rip_out;
  double rip_k = 0.0;
  RicOptions ropts;
  std::uint64_t mc_trials = 10000, mc_seed = 0;
  double ct = 2.0, comega = 1.0, crho = 1.0, calpha = 0.5;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--matrix", rip_matrix)->required()->check(CLI::ExistingFile);
    sub->add_option("--k", rip_k)->required();
    sub->add_option("--budget", ropts.budget)->capture_default_str();
    sub->add_option("--workers", ropts.workers, "0 reads WL1_WORKERS");
    sub->add_option("--out", rip_out);
  };
  auto* rip_exact = rip->add_subcommand("exact", "Exhaustive enumeration");
  add_common(rip_exact);
  auto* rip_mc = rip->add_subcommand("mc", "Monte Carlo lower bound");
  add_common(rip_mc);
  rip_mc->add_option("--trials", mc_trials)->capture_default_str();
  rip_mc->add_option("--seed", mc_seed)->capture_default_str();
  auto* rip_cert = rip->add_subcommand("certify", "Check delta_{ceil(tk)} against the recovery threshold");
  add_common(rip_cert);
  rip_cert->add_option("--t", ct)->required();
  rip_cert->add_option("--omega", comega)->capture_default_str();
  rip_cert->add_option("--rho", crho)->capture_default_str();
  rip_cert->add_option("--alpha", calpha)->capture_default_str();
  rip_cert->add_option("--mc-trials", mc_trials, "Monte Carlo pre-pass (0 disables)");
  rip_cert->add_option("--seed", mc_seed);

  // sharpness
  auto* sharp = app.add_subcommand("sharpness", "Counterexample at the recovery threshold");
  sharp->require_subcommand(1);
  auto* build = sharp->add_subcommand("build", "Construct and verify the instance");
  Index sk = 12;
  double st = 4.0 / 3.0, somega = 1.0, srho = 1.0, salpha = 0.5, seps = 0.5;
  std::optional<Index> sN;
  std::string sharp_out;
  bool skip_ric = false;
  build->add_option("--k", sk)->capture_default_str();
  build->add_option("--t", st)->capture_default_str();
  build->add_option("--omega", somega)->capture_default_str();
  build->add_option("--rho", srho)->capture_default_str();
  build->add_option("--alpha", salpha)->capture_default_str();
  build->add_option("--eps", seps)->capture_default_str();
  build->add_option("--N", sN);
  build->add_option("--out", sharp_out)->required();
  build->add_flag("--skip-ric", skip_ric, "Skip the exact RIC verification");
  auto* demo = sharp->add_subcommand("demo", "Solve on a built instance and report the failure");
  std::string demo_in, demo_out;
  demo->add_option("--in", demo_in)->required()->check(CLI::ExistingFile);
  demo->add_option("--out", demo_out);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Seeded Monte Carlo experiments");
  exp->require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> o_trials, o_seed;
  std::optional<unsigned> o_workers;
  std::optional<std::string> o_output;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    sub->add_option("--trials", o_trials);
    sub->add_option("--seed", o_seed);
    sub->add_option("--workers", o_workers);
    sub->add_option("--output", o_output);
  };
  auto* run = exp->add_subcommand("run", "Recovery sweep over (omega, alpha)");
  add_config(run);
  auto* bound_check = exp->add_subcommand("bound-check", "Certified error-bound check (tiny instances)");
  add_config(bound_check);

  // figures
  auto* figs = app.add_subcommand("figures", "Figure data");
  figs->require_subcommand(1);
  auto* emit_cmd = figs->add_subcommand("emit", "Write the figure CSVs");
  std::string fig_out;
  int fig_steps = 101;
  emit_cmd->add_option("--out", fig_out)->required();
  emit_cmd->add_option("--omega-steps", fig_steps)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      if (cmp_a || cmp_dak || cmp_da1k) {
        SweepSpec::Comparison c;
        if (cmp_a) c.a = *cmp_a;
        if (cmp_dak) c.delta_ak = *cmp_dak;
        if (cmp_da1k) c.delta_a1k = *cmp_da1k;
        spec.comparison = c;
      }
      const auto table = figure_sweep(spec);
      if (sweep_out.empty()) {
        write_csv(std::cout, table);
      } else {
        std::ofstream out(sweep_out);
        if (!out) throw ParameterError("cannot write " + sweep_out);
        write_csv(out, table);
      }
    } else if (*solve) {
      const ProblemInstance inst(read_matrix_csv(matrix_path), read_vector_csv(y_path), noise_set_from_string(noise),
                                 eps);
      const auto w = weights_from_json(read_json(weights_path));
      emit(report_json(solve_weighted(inst, w, sopts)), solve_out);
    } else if (*rip_exact) {
      emit(ric_json(exact_ric(read_matrix_csv(rip_matrix), rip_k, ropts)), rip_out);
    } else if (*rip_mc) {
      emit(ric_json(mc_ric_lower_bound(read_matrix_csv(rip_matrix), rip_k, mc_trials, mc_seed, ropts)), rip_out);
    } else if (*rip_cert) {
      CertifyOptions co;
      co.ric = ropts;
      co.mc_trials = rip_cert->count("--mc-trials") ? mc_trials : 0;
      co.seed = mc_seed;
      const auto k = static_cast<Index>(integral_count(rip_k, "k"));
      const auto c = certify_recovery(read_matrix_csv(rip_matrix), k, GeometryParams::make(ct, comega, crho, calpha), co);
      emit(Json{{"certified", c.certified},
                {"delta", c.delta},
                {"threshold", c.threshold},
                {"margin", c.margin},
                {"refuted_by_lower_bound", c.refuted_by_lower_bound},
                {"ric", ric_json(c.ric)}},
           rip_out);
    } else if (*build) {
      const auto ce = construct_counterexample(sk, st, somega, srho, salpha, seps, sN);
      const fs::path out(sharp_out);
      const fs::path a_path = fs::path(out).replace_extension(".A.csv");
      write_matrix_csv(a_path, ce.A);
      Json j = counterexample_to_json(ce);
      j["A"] = a_path.filename().string();
      Json verification{{"x1_norm", ce.x1.norm()},
                        {"kernel_residual", (ce.A * (ce.x0 - ce.eta0)).norm()},
                        {"x0_weighted_norm", weighted_l1_norm(ce.x0, ce.weights())},
                        {"eta0_weighted_norm", weighted_l1_norm(ce.eta0, ce.weights())}};
      if (!skip_ric) {
        const auto r = verify_ric_bound(ce, seps);
        verification["ric"] = ric_json(r.ric);
        verification["ric_bound"] = r.bound;
        verification["ric_ok"] = r.ok;
      }
      j["verification"] = verification;
      write_json(out, j);
      std::cout << "wrote " << out.string() << " and " << a_path.string() << '\n';
    } else if (*demo) {
      const auto ce = counterexample_from_json(read_json(demo_in));
      emit(failure_report_to_json(demonstrate_failure(ce, NoiseSet::L2Ball)), demo_out);
    } else if (*run || *bound_check) {
      Json j = read_json(config_path);
      if (o_trials) j["trials"] = *o_trials;
      if (o_seed) j["seed"] = *o_seed;
      if (o_workers) j["workers"] = *o_workers;
      if (o_output) j["output"] = *o_output;
      const auto cfg = config_from_json(j);
      if (*run) {
        const auto res = run_recovery_experiment(cfg);
        std::cout << summary_to_json(cfg, res.cells).at("cells").dump(2) << '\n';
      } else {
        const auto res = run_certified_bound_check(cfg);
        std::cout << Json{{"certified_trials_l2", res.certified_l2},
                          {"certified_trials_ds", res.certified_ds},
                          {"violations", res.violations}}
                         .dump(2)
                  << '\n';
        if (res.violations) return 3;
      }
    } else if (*emit_cmd) {
      for (const auto& p : emit_figures(fig_out, fig_steps)) std::cout << p.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
