// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// gating criterion fails. Criterion 6 runs the reduced budget profile
// (datasets=5, restarts=10) by default; pass --full for the full default
// budgets. Criterion 8 is a stretch target and is reported without gating.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "capmeter/labeling.hpp"
#include "capmeter/mlp.hpp"
#include "capmeter/report.hpp"
#include "capmeter/separability.hpp"
#include "capmeter/shatter.hpp"
#include "capmeter/threshold.hpp"

namespace {

using namespace capmeter;

unsigned g_threads = 0;
bool g_full = false;

ArchitectureSpec arch_of(int k, std::vector<int> hidden,
                         Activation act = Activation::relu) {
  ArchitectureSpec a;
  a.input_dim = k;
  a.hidden = std::move(hidden);
  a.activation = act;
  return a;
}

HarnessConfig default_config(std::uint64_t seed) {
  HarnessConfig cfg;
  cfg.base_seed = seed;
  cfg.threads = g_threads;
  return cfg;
}

// ---- criterion 1: exact combinatorics -------------------------------------
bool exact_combinatorics(std::ostream& log) {
  bool ok = tnk_closed(4, 3) == BigCount(14);
  for (int n = 1; n <= 64 && ok; ++n)
    ok = tnk_closed(n, n) == BigCount::pow2(static_cast<unsigned>(n)) &&
         tnk_closed(n, n + 3) == BigCount::pow2(static_cast<unsigned>(n));
  for (int k = 1; k <= 64 && ok; ++k)
    ok = tnk_closed(2 * k, k) == BigCount::pow2(static_cast<unsigned>(2 * k - 1));
  for (int n = 1; n <= 200 && ok; ++n)
    for (int k = 1; k <= 200 && ok; ++k) ok = tnk_recursive(n, k) == tnk_closed(n, k);
  log << "    T(4,3)=14, saturation to n=64, half points to k=64, recursive==closed to 200\n";
  return ok;
}

// ---- criterion 2: oracle-formula agreement ---------------------------------
bool oracle_agreement(std::ostream& log) {
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 20 && ok; ++seed) {
    const Dataset p3 = generate_dataset(6, 3, seed);
    ok = count_separable(p3, true) == BigCount(32);
    if (!ok) {
      log << "    seed " << seed << ": homogeneous count != 32\n";
      break;
    }
    const Dataset p2 = generate_dataset(4, 2, seed);
    ok = count_separable(p2, false) == BigCount(14);
    if (!ok) log << "    seed " << seed << ": affine count != 14\n";
  }
  if (ok) log << "    20 seeds: count(6 pts, 3D, homog) = 32 = T(6,3); count(4 pts, 2D, affine) = 14 = T(4,3)\n";
  return ok;
}

// ---- criterion 3: gradient check -------------------------------------------
bool gradient_check(std::ostream& log) {
  const Activation acts[] = {Activation::relu, Activation::tanh, Activation::logistic,
                             Activation::identity};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    rng::CounterRng gen(rng::derive(0xACCE97, trial));
    const int k = 1 + static_cast<int>(gen.next_u64() % 4);
    const int h = 1 + static_cast<int>(gen.next_u64() % 8);
    const int n = 1 + static_cast<int>(gen.next_u64() % 10);
    const auto arch = arch_of(k, {h}, acts[trial % 4]);

    LabeledSet set;
    set.data = generate_dataset(n, k, rng::derive(0xDA7A, trial));
    set.labels.resize(static_cast<std::size_t>(n));
    for (auto& b : set.labels) b = gen.next_u64() & 1;

    MlpEval eval(arch);
    std::vector<double> flat = init_params(arch, static_cast<std::uint64_t>(trial)).flatten();
    std::vector<double> grad(flat.size()), scratch(flat.size());
    eval.loss_and_grad(flat, set, 0.0, grad);
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double h_step = 1e-6;
      const double saved = flat[i];
      flat[i] = saved + h_step;
      const double fp = eval.loss_and_grad(flat, set, 0.0, scratch);
      flat[i] = saved - h_step;
      const double fm = eval.loss_and_grad(flat, set, 0.0, scratch);
      flat[i] = saved;
      const double fd = (fp - fm) / (2.0 * h_step);
      const double scale = std::max({std::abs(grad[i]), std::abs(fd), 1e-6});
      worst = std::max(worst, std::abs(grad[i] - fd) / scale);
    }
  }
  log << "    100 instances (k<=4, h<=8, n<=10, all four activations), max relative error "
      << worst << "\n";
  return worst < 1e-4;
}

// ---- criterion 4: optimizer -------------------------------------------------
bool optimizer_check(std::ostream& log) {
  const std::vector<double> center{1.0, -2.0, 3.0, -4.0, 5.0};
  const Objective quad = [&](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - center[i];
      f += 0.5 * d * d;
      g[i] = d;
    }
    return f;
  };
  const auto rq = minimize(quad, std::vector<double>(5, 0.0), OptimizerConfig{});
  double dist = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    dist += (rq.final_params[i] - center[i]) * (rq.final_params[i] - center[i]);
  dist = std::sqrt(dist);

  const Objective rosen = [](std::span<const double> x, std::span<double> g) {
    const double a = x[0], b = x[1];
    g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
    g[1] = 200.0 * (b - a * a);
    return (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
  };
  const auto rr = minimize(rosen, {-1.2, 1.0}, OptimizerConfig{});
  log << "    quadratic: |x-c| = " << dist << " in " << rq.iterations
      << " iterations; rosenbrock: loss " << rr.final_loss << " in " << rr.iterations
      << " iterations\n";
  return dist < 1e-8 && rq.iterations <= 10 && rr.final_loss < 1e-6 && rr.iterations <= 200;
}

// ---- criterion 5: perceptron-equivalent capacity ----------------------------
bool perceptron_capacity(std::ostream& log) {
  const auto arch = arch_of(2, {1});
  bool ok = true;
  for (std::uint64_t seed = 0; seed <= 4; ++seed) {
    const auto cfg = default_config(seed);
    const auto lm = measure_lm(arch, cfg);
    const auto mk = measure_mk(arch, cfg);
    log << "    seed " << seed << ": lm = " << lm.measured << ", mk = " << mk.measured << "\n";
    ok = ok && lm.measured == 3 && mk.measured == 6 && !lm.partial && !mk.partial;
  }
  return ok;
}

// ---- criterion 6: upper-bound law over the grid -----------------------------
struct GridResult {
  CapacityMeasurement lm22, mk22;  // saved for criterion 7
  bool ok = false;
};

GridResult upper_bound_grid(std::ostream& log) {
  GridResult out;
  out.ok = true;
  for (int k : {2, 3})
    for (int h : {1, 2}) {
      const auto arch = arch_of(k, {h});
      auto cfg = default_config(0);
      if (!g_full) {
        cfg.datasets = 5;
        cfg.restarts = 10;
      }
      const auto lm = measure_lm(arch, cfg);
      const auto mk = measure_mk(arch, cfg);
      const auto bounds = capacity_bounds(arch);
      const bool bounds_ok = lm.measured <= bounds.lm && mk.measured <= bounds.mk;
      const bool ratio_ok = std::abs(mk.measured - 2 * lm.measured) <= 2;
      log << "    k=" << k << " h=" << h << ": lm " << lm.measured << "/" << bounds.lm
          << ", mk " << mk.measured << "/" << bounds.mk << ", |mk-2lm| = "
          << std::abs(mk.measured - 2 * lm.measured) << (bounds_ok && ratio_ok ? "" : "  <-- FAIL")
          << "\n";
      out.ok = out.ok && bounds_ok && ratio_ok && !lm.partial && !mk.partial;
      if (k == 2 && h == 2) {
        out.lm22 = lm;
        out.mk22 = mk;
      }
    }
  return out;
}

// ---- criterion 7: characteristic curve shape --------------------------------
bool curve_shape(const GridResult& grid, std::ostream& log) {
  const auto arch = arch_of(2, {2});
  auto cfg = default_config(0);
  if (!g_full) cfg.restarts = 10;  // same trainer profile as the grid it is compared against
  const int n_max = grid.mk22.measured + 3;
  const auto curve = measure_curve(arch, 1, n_max, cfg);
  if (curve.partial || curve.points.empty()) {
    log << "    curve measurement incomplete\n";
    return false;
  }
  bool saturated = true;
  for (const auto& p : curve.points)
    if (p.n <= arch.input_dim + 1 && p.fraction != 1.0) saturated = false;
  bool monotone = true;
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    if (curve.points[i].fraction > curve.points[i - 1].fraction + 0.05) monotone = false;
  int n_cross = -1;
  for (const auto& p : curve.points)
    if (p.fraction < 0.5) {
      n_cross = p.n;
      break;
    }
  const bool crossing_ok =
      n_cross > grid.lm22.measured && n_cross <= grid.mk22.measured;
  log << "    fraction(n<=3) = 1: " << (saturated ? "yes" : "NO")
      << "; non-increasing (tol 0.05): " << (monotone ? "yes" : "NO")
      << "; first n below 0.5: " << n_cross << " with measured lm " << grid.lm22.measured
      << ", mk " << grid.mk22.measured << "\n";
  return saturated && monotone && n_cross > 0 && crossing_ok;
}

// ---- criterion 8 (stretch, non-gating): the 9-sample shatter ----------------
// The special case needs a deeper restart budget than the default sweeps;
// the search for it raises restarts to 60, mirroring how it was originally
// found by increasing the training budget.
bool stretch_shatter(std::ostream& log) {
  const auto arch = arch_of(3, {2});
  const auto cfg = default_config(0);
  const int restarts = 60;
  const int n = 9;
  const LabelingStream stream(n, cfg.lm_max_bits, rng::derive(cfg.base_seed, rng::kTagLabeling, n));
  const WorkPool pool(g_threads);
  for (int d = 0; d < 20; ++d) {
    const Dataset ds =
        generate_dataset(n, arch.input_dim, rng::derive(cfg.base_seed, rng::kTagDataset, d));
    std::vector<std::uint8_t> out(stream.count(), 0);
    pool.for_each(0, stream.count(), [&](std::uint64_t i) {
      out[i] = try_fit(arch, ds, stream.labels(i), restarts, cfg.trainer, cfg.base_seed, i) ? 1 : 0;
    });
    std::uint64_t fit = 0;
    for (auto o : out) fit += o;
    if (fit == stream.count()) {
      log << "    dataset " << d << " shatters all " << stream.count()
          << " tested labelings of 9 samples (k=3, h=2, " << restarts << " restarts)\n";
      return true;
    }
    log << "    dataset " << d << ": " << fit << "/" << stream.count() << " labelings fit\n";
  }
  log << "    no dataset among 20 shattered 9 samples\n";
  return false;
}

struct Criterion {
  std::string name;
  bool gating;
  std::function<bool(std::ostream&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0) g_full = true;
    else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      g_threads = static_cast<unsigned>(std::stoi(argv[++i]));
    else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::stoi(argv[++i]);
    else {
      std::cerr << "usage: capmeter_acceptance [--full] [--threads N] [--only N]\n";
      return 1;
    }
  }

  GridResult grid;
  std::vector<Criterion> criteria{
      {"1 exact combinatorics", true, exact_combinatorics},
      {"2 oracle-formula agreement", true, oracle_agreement},
      {"3 gradient check", true, gradient_check},
      {"4 optimizer", true, optimizer_check},
      {"5 perceptron-equivalent capacity", true, perceptron_capacity},
      {"6 upper-bound law", true,
       [&grid](std::ostream& log) {
         grid = upper_bound_grid(log);
         return grid.ok;
       }},
      {"7 characteristic-curve shape", true,
       [&grid](std::ostream& log) { return curve_shape(grid, log); }},
      {"8 stretch: 9-sample shatter (non-gating)", false, stretch_shatter},
  };

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    auto& c = criteria[i];
    if (only != 0 && only == 7 && i + 1 == 7) {
      // criterion 7 needs the grid measurements from criterion 6
      grid = upper_bound_grid(std::cout);
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream log;
    bool ok = false;
    try {
      ok = c.run(log);
    } catch (const std::exception& e) {
      log << "    exception: " << e.what() << "\n";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.name << "  ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat
              << "\n"
              << log.str();
    if (c.gating) all_ok = all_ok && ok;
  }
  std::cout << (all_ok ? "ACCEPTANCE: all gating criteria passed\n"
                       : "ACCEPTANCE: FAILURES above\n");
  return all_ok ? 0 : 1;
}
