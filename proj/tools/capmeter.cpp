// capmeter command-line tool: exact threshold-function counts and capacity
// bounds, empirical LM/MK measurement, the separability oracle, and the
// trainer comparison mode. Exit codes: 0 success, 1 domain or config error,
// 2 partial result (time budget expired).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capmeter/architecture.hpp"
#include "capmeter/report.hpp"
#include "capmeter/separability.hpp"
#include "capmeter/shatter.hpp"
#include "capmeter/threshold.hpp"

namespace {

using capmeter::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

struct GlobalOpts {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  double time_budget = 0.0;
  std::string out;
  std::string format = "text";
};

void write_output(const GlobalOpts& g, const std::string& payload) {
  if (g.out.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw std::runtime_error("cannot open output file: " + g.out);
  f << payload;
}

capmeter::ArchitectureSpec make_arch(int k, const std::vector<int>& hidden,
                                     const std::string& activation) {
  capmeter::ArchitectureSpec arch;
  arch.input_dim = k;
  arch.hidden = hidden;
  arch.activation = capmeter::activation_from_string(activation);
  arch.validate();
  return arch;
}

struct MeasureOpts {
  int k = 2;
  std::vector<int> hidden{1};
  std::string activation = "relu";
  int datasets = 20;
  int restarts = 20;
  std::optional<int> max_bits;
  int max_iter = 500;
  int history = 10;
  double grad_tol = 1e-7;
  bool no_skip = false;
  bool dump_params = false;
};

capmeter::HarnessConfig make_harness_config(const MeasureOpts& m, const GlobalOpts& g) {
  capmeter::HarnessConfig cfg;
  cfg.base_seed = g.seed;
  cfg.threads = g.threads;
  cfg.time_budget_seconds = g.time_budget;
  cfg.datasets = m.datasets;
  cfg.restarts = m.restarts;
  if (m.max_bits) {
    cfg.lm_max_bits = *m.max_bits;
    cfg.mk_max_bits = *m.max_bits;
    cfg.curve_max_bits = *m.max_bits;
  }
  cfg.trainer.max_iterations = m.max_iter;
  cfg.trainer.history_size = m.history;
  cfg.trainer.grad_tolerance = m.grad_tol;
  cfg.mk_skip = !m.no_skip;
  cfg.dump_params = m.dump_params;
  return cfg;
}

void add_measure_flags(CLI::App* cmd, MeasureOpts& m) {
  cmd->add_option("--k", m.k, "input dimension")->required();
  cmd->add_option("--hidden", m.hidden, "hidden layer widths")->delimiter(',');
  cmd->add_option("--activation", m.activation, "relu|tanh|logistic|identity")
      ->default_val("relu");
  cmd->add_option("--datasets", m.datasets, "datasets tried per n");
  cmd->add_option("--restarts", m.restarts, "training restarts per labeling");
  cmd->add_option("--max-bits", m.max_bits, "labeling budget: test up to 2^bits labelings");
  cmd->add_option("--max-iter", m.max_iter, "optimizer iteration cap");
  cmd->add_option("--history", m.history, "L-BFGS history size (0 = gradient descent)");
  cmd->add_option("--grad-tol", m.grad_tol, "optimizer gradient tolerance");
  cmd->add_flag("--no-skip", m.no_skip, "disable the MK skip shortcut");
  cmd->add_flag("--dump-params", m.dump_params, "attach one fitted parameter vector per n");
}

int emit_measurement(const capmeter::CapacityMeasurement& meas,
                     const capmeter::HarnessConfig& cfg, const GlobalOpts& g) {
  const json report = capmeter::measurement_report(meas, cfg);
  write_output(g, report.dump(2));
  if (!g.out.empty())
    std::cout << "measured " << to_string(meas.kind) << " = " << meas.measured
              << " (theoretical " << meas.theoretical << ")"
              << (meas.partial ? ", PARTIAL result" : "") << "; report written to " << g.out
              << '\n';
  return meas.partial ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacity measurement toolkit for perceptron networks"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base seed; all randomness derives from it");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--time-budget", g.time_budget, "seconds before partial results are returned");
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--format", g.format, "json|csv|text")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  int exit_code = kExitOk;

  // ---- theory ----
  auto* theory = app.add_subcommand("theory", "exact capacity theory");
  theory->require_subcommand(1);

  auto* tnk = theory->add_subcommand("tnk", "count distinct threshold functions T(n,k)");
  int tnk_n = 1, tnk_k = 1;
  tnk->add_option("--n", tnk_n, "sample count")->required();
  tnk->add_option("--k", tnk_k, "weight count")->required();
  tnk->callback([&] {
    const std::string v = capmeter::tnk_closed(tnk_n, tnk_k).to_decimal();
    if (g.format == "json")
      write_output(g, json{{"schema_version", "capmeter-tnk/1"},
                           {"n", tnk_n},
                           {"k", tnk_k},
                           {"tnk", v}}
                          .dump(2));
    else
      write_output(g, v);
  });

  auto* curve = theory->add_subcommand("curve", "characteristic curve of the ideal unit");
  int curve_k = 1, curve_nmax = 1;
  curve->add_option("--k", curve_k, "weight count")->required();
  curve->add_option("--n-max", curve_nmax, "largest sample count")->required();
  curve->callback([&] {
    std::ostringstream os;
    capmeter::write_theory_curve_csv(os, capmeter::theoretical_curve(curve_k, curve_nmax));
    write_output(g, os.str());
  });

  auto* bounds = theory->add_subcommand("bounds", "parameter count and LM/MK bounds");
  int bounds_k = 1;
  std::vector<int> bounds_hidden;
  std::string bounds_act = "relu";
  int bounds_bits = 0;
  bounds->add_option("--k", bounds_k, "input dimension")->required();
  bounds->add_option("--hidden", bounds_hidden, "hidden layer widths")->delimiter(',');
  bounds->add_option("--activation", bounds_act, "relu|tanh|logistic|identity");
  bounds->add_option("--bits-per-weight", bounds_bits,
                     "annotate the bit-count storage bound param_count * bits (informational)");
  bounds->callback([&] {
    const auto arch = make_arch(bounds_k, bounds_hidden, bounds_act);
    json j = capmeter::bounds_report(arch);
    if (bounds_bits > 0) {
      j["bits_per_weight"] = bounds_bits;
      j["storage_bits_bound"] = j.at("param_count").get<long long>() * bounds_bits;
    }
    write_output(g, j.dump(2));
  });

  // ---- measure ----
  auto* measure = app.add_subcommand("measure", "empirical capacity measurement");
  measure->require_subcommand(1);

  auto* mlm = measure->add_subcommand("lm", "measure the LM dimension");
  MeasureOpts lm_opts;
  add_measure_flags(mlm, lm_opts);
  mlm->callback([&] {
    const auto arch = make_arch(lm_opts.k, lm_opts.hidden, lm_opts.activation);
    const auto cfg = make_harness_config(lm_opts, g);
    exit_code = emit_measurement(capmeter::measure_lm(arch, cfg), cfg, g);
  });

  auto* mmk = measure->add_subcommand("mk", "measure the MK dimension");
  MeasureOpts mk_opts;
  add_measure_flags(mmk, mk_opts);
  mmk->callback([&] {
    const auto arch = make_arch(mk_opts.k, mk_opts.hidden, mk_opts.activation);
    const auto cfg = make_harness_config(mk_opts, g);
    exit_code = emit_measurement(capmeter::measure_mk(arch, cfg), cfg, g);
  });

  auto* mcurve = measure->add_subcommand("curve", "measure the characteristic curve");
  MeasureOpts curve_opts;
  int curve_nmin = 1, curve_nmax2 = 1;
  add_measure_flags(mcurve, curve_opts);
  mcurve->add_option("--n-min", curve_nmin, "first sample count")->required();
  mcurve->add_option("--n-max", curve_nmax2, "last sample count")->required();
  mcurve->callback([&] {
    const auto arch = make_arch(curve_opts.k, curve_opts.hidden, curve_opts.activation);
    const auto cfg = make_harness_config(curve_opts, g);
    const auto curve_res = capmeter::measure_curve(arch, curve_nmin, curve_nmax2, cfg);
    std::ostringstream os;
    capmeter::write_measured_curve_csv(os, curve_res);
    write_output(g, os.str());
    if (!g.out.empty())
      std::cout << "curve with " << curve_res.points.size() << " points"
                << (curve_res.partial ? " (PARTIAL)" : "") << " written to " << g.out << '\n';
    exit_code = curve_res.partial ? kExitPartial : kExitOk;
  });

  // ---- oracle ----
  auto* oracle = app.add_subcommand("oracle", "exact linear-separability oracle");
  oracle->require_subcommand(1);
  auto* ocount = oracle->add_subcommand("count", "count separable labelings of random points");
  int on = 1, ok = 1;
  bool homogeneous = false;
  ocount->add_option("--n", on, "point count")->required();
  ocount->add_option("--k", ok, "point dimension")->required();
  ocount->add_flag("--homogeneous", homogeneous, "hyperplane through the origin (no bias)");
  ocount->callback([&] {
    const capmeter::Dataset pts = capmeter::generate_dataset(on, ok, g.seed);
    const capmeter::BigCount count = capmeter::count_separable(pts, homogeneous, g.threads);
    const int weights = homogeneous ? ok : ok + 1;
    const capmeter::BigCount theory = capmeter::tnk_closed(on, weights);
    if (g.format == "json") {
      write_output(g, json{{"schema_version", capmeter::kCountSchema},
                           {"n", on},
                           {"k", ok},
                           {"homogeneous", homogeneous},
                           {"seed", g.seed},
                           {"separable_count", count.to_decimal()},
                           {"tnk_weights", weights},
                           {"tnk", theory.to_decimal()}}
                           .dump(2));
    } else {
      std::ostringstream os;
      os << "separable_count " << count.to_decimal() << "\n"
         << "tnk T(" << on << "," << weights << ") = " << theory.to_decimal() << "\n"
         << "match " << (count == theory ? "yes" : "no") << "\n";
      write_output(g, os.str());
    }
  });

  // ---- compare ----
  auto* compare = app.add_subcommand("compare", "benchmark trainer configurations");
  std::string compare_config;
  compare->add_option("--config", compare_config, "JSON config file")->required();
  compare->callback([&] {
    std::ifstream f(compare_config);
    if (!f) throw std::runtime_error("cannot open config file: " + compare_config);
    json cfg_json;
    f >> cfg_json;
    capmeter::HarnessConfig defaults;
    defaults.base_seed = g.seed;
    defaults.threads = g.threads;
    const auto report = capmeter::run_compare(cfg_json, defaults, g.time_budget);
    if (g.format == "json") {
      write_output(g, capmeter::to_json(report).dump(2));
    } else {
      if (!g.out.empty()) {
        std::ofstream jf(g.out);
        jf << capmeter::to_json(report).dump(2);
      }
      std::cout << capmeter::to_table(report);
    }
    if (report.any_partial) exit_code = kExitPartial;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return exit_code;
}
