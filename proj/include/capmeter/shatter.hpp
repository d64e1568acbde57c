#pragma once

// Empirical capacity measurement: generate points in random position,
// enumerate or sample labelings, train with restarts, and locate the largest
// sample counts the network can still shatter (LM) or fit at the 50% level
// (MK), plus the measured characteristic curve.
//
// Determinism: every trial's randomness is derived from
// (base_seed, dataset index, labeling index, restart index), so results are
// identical whether labeling trials run sequentially or on a pool. Early
// exits replay per-labeling outcomes in index order and therefore reach the
// same decision as a sequential run; parallelism can only waste work, never
// change a result.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "capmeter/architecture.hpp"
#include "capmeter/dataset.hpp"
#include "capmeter/labeling.hpp"
#include "capmeter/lbfgs.hpp"
#include "capmeter/mlp.hpp"
#include "capmeter/rng.hpp"
#include "capmeter/work_pool.hpp"

namespace capmeter {

struct HarnessConfig {
  int lm_max_bits = 15;  // exhaustive labeling budget for the LM search
  int mk_max_bits = 10;  // and for the MK search
  int curve_max_bits = 10;
  int restarts = 20;
  int datasets = 20;
  double lm_stop_fraction = 0.95;
  double mk_stop_fraction = 0.45;
  std::uint64_t base_seed = 0;
  OptimizerConfig trainer;
  double l2 = 0.0;
  unsigned threads = 0;              // 0 = hardware concurrency
  double time_budget_seconds = 0.0;  // 0 = unlimited
  bool mk_skip = true;               // use the one-hidden-layer skip shortcut
  bool dump_params = false;          // attach one successful fit's params per n

  void validate() const {
    trainer.validate();
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (datasets < 1) throw std::invalid_argument("datasets must be >= 1");
    if (lm_max_bits < 0 || lm_max_bits > 62 || mk_max_bits < 0 || mk_max_bits > 62 ||
        curve_max_bits < 0 || curve_max_bits > 62)
      throw std::invalid_argument("labeling bit budgets must be in [0, 62]");
    if (!(0.0 < mk_stop_fraction && mk_stop_fraction < 0.5 &&
          0.5 < lm_stop_fraction && lm_stop_fraction <= 1.0))
      throw std::invalid_argument("need 0 < mk_stop < 0.5 < lm_stop <= 1");
    if (l2 < 0.0) throw std::invalid_argument("l2 must be >= 0");
  }
};

enum class DimensionKind { lm, mk };

inline const char* to_string(DimensionKind k) {
  return k == DimensionKind::lm ? "lm" : "mk";
}

struct PerNRecord {
  int n = 0;
  std::uint64_t tested = 0;  // labeling budget at this n
  std::uint64_t fit = 0;     // best dataset's fitted-labelings count
  bool exhaustive = true;
  int datasets_tried = 0;
  std::vector<double> example_params;  // one successful fit, when requested
};

struct CapacityMeasurement {
  DimensionKind kind = DimensionKind::lm;
  ArchitectureSpec arch;
  int measured = 0;            // largest n passing the criterion
  long long theoretical = 0;   // matching bound from capacity_bounds
  std::vector<PerNRecord> per_n;
  bool partial = false;        // time budget expired before the sweep ended
  double runtime_seconds = 0.0;
};

/// True iff some restart trains the network to reproduce labels exactly on
/// all points. Restart r initializes from a seed derived from
/// (base_seed, dataset seed, labeling index, r). Optimizer failures count as
/// failed restarts. When fitted is non-null the winning flat parameter
/// vector is stored there.
inline bool try_fit(const ArchitectureSpec& arch, const Dataset& data,
                    std::span<const std::uint8_t> labels, int restarts,
                    const OptimizerConfig& trainer, std::uint64_t base_seed,
                    std::uint64_t labeling_index, double l2 = 0.0,
                    std::vector<double>* fitted = nullptr) {
  if (labels.size() != static_cast<std::size_t>(data.n))
    throw std::invalid_argument("try_fit: labels length must equal dataset size");
  MlpEval eval(arch);
  LabeledSet set{data, {labels.begin(), labels.end()}};
  const Objective objective = [&](std::span<const double> x, std::span<double> g) {
    return eval.loss_and_grad(x, set, l2, g);
  };
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t seed = rng::derive(base_seed, data.seed, labeling_index,
                                           static_cast<std::uint64_t>(r));
    std::vector<double> x0 = init_params(arch, seed).flatten();
    OptimizeResult res;
    try {
      res = minimize(objective, std::move(x0), trainer);
    } catch (const std::invalid_argument&) {
      continue;  // non-finite start or similar: a failed restart, not an abort
    }
    bool all_match = true;
    for (int i = 0; i < data.n && all_match; ++i)
      all_match = eval.predict(res.final_params, data.row(i)) == static_cast<int>(labels[i]);
    if (all_match) {
      if (fitted) *fitted = std::move(res.final_params);
      return true;
    }
  }
  return false;
}

namespace detail {

class Budget {
 public:
  explicit Budget(double seconds)
      : unlimited_(seconds <= 0.0),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(seconds > 0.0 ? seconds : 0.0))) {}

  bool expired() const {
    return !unlimited_ && std::chrono::steady_clock::now() >= deadline_;
  }

 private:
  bool unlimited_;
  std::chrono::steady_clock::time_point deadline_;
};

struct TrialContext {
  const ArchitectureSpec& arch;
  const HarnessConfig& cfg;
  const WorkPool& pool;

  bool fit_one(const Dataset& ds, const LabelingStream& stream, std::uint64_t index) const {
    return try_fit(arch, ds, stream.labels(index), cfg.restarts, cfg.trainer,
                   cfg.base_seed, index, cfg.l2);
  }
};

// Chunked parallel evaluation replayed in index order through a stop
// automaton. automaton(index, outcome) returns false to stop; evaluation
// past a stop point is wasted, never observed.
template <class Automaton>
void run_trials(const TrialContext& ctx, const Dataset& ds, const LabelingStream& stream,
                const Budget& budget, bool& expired, Automaton&& automaton) {
  const std::uint64_t total = stream.count();
  const std::uint64_t chunk =
      ctx.pool.thread_count() <= 1
          ? 1
          : std::max<std::uint64_t>(8, std::uint64_t{2} * ctx.pool.thread_count());
  std::vector<std::uint8_t> outcomes(static_cast<std::size_t>(chunk));
  for (std::uint64_t base = 0; base < total; base += chunk) {
    if (budget.expired()) {
      expired = true;
      return;
    }
    const std::uint64_t m = std::min(chunk, total - base);
    ctx.pool.for_each(0, m, [&](std::uint64_t i) {
      outcomes[static_cast<std::size_t>(i)] = ctx.fit_one(ds, stream, base + i) ? 1 : 0;
    });
    for (std::uint64_t i = 0; i < m; ++i)
      if (!automaton(base + i, outcomes[static_cast<std::size_t>(i)] != 0)) return;
  }
}

// LM protocol: count fits up to (excluding) the first miss.
inline std::uint64_t lm_dataset_count(const TrialContext& ctx, const Dataset& ds,
                                      const LabelingStream& stream, const Budget& budget,
                                      bool& expired) {
  std::uint64_t fit = 0;
  run_trials(ctx, ds, stream, budget, expired, [&](std::uint64_t, bool ok) {
    if (!ok) return false;
    ++fit;
    return true;
  });
  return fit;
}

struct MkDatasetResult {
  std::uint64_t fit = 0;
  bool success = false;
};

// MK protocol: success once fits reach half the budget, failure once misses
// exceed half.
inline MkDatasetResult mk_dataset_count(const TrialContext& ctx, const Dataset& ds,
                                        const LabelingStream& stream, const Budget& budget,
                                        bool& expired) {
  const std::uint64_t tested = stream.count();
  MkDatasetResult r;
  std::uint64_t miss = 0;
  run_trials(ctx, ds, stream, budget, expired, [&](std::uint64_t, bool ok) {
    if (ok)
      ++r.fit;
    else
      ++miss;
    if (2 * r.fit >= tested) {
      r.success = true;
      return false;
    }
    return 2 * miss <= tested;
  });
  return r;
}

// Re-runs the lowest-index fitted labeling to capture one winning parameter
// vector for --dump-params reports.
inline std::vector<double> capture_example_params(const TrialContext& ctx, const Dataset& ds,
                                                  const LabelingStream& stream,
                                                  std::uint64_t search_limit) {
  std::vector<double> fitted;
  for (std::uint64_t i = 0; i < search_limit; ++i) {
    if (try_fit(ctx.arch, ds, stream.labels(i), ctx.cfg.restarts, ctx.cfg.trainer,
                ctx.cfg.base_seed, i, ctx.cfg.l2, &fitted))
      return fitted;
  }
  return {};
}

inline std::uint64_t dataset_seed(const HarnessConfig& cfg, int index) {
  return rng::derive(cfg.base_seed, rng::kTagDataset, static_cast<std::uint64_t>(index));
}

inline std::uint64_t labeling_seed(const HarnessConfig& cfg, int n) {
  return rng::derive(cfg.base_seed, rng::kTagLabeling, static_cast<std::uint64_t>(n));
}

}  // namespace detail

/// Locates the empirical LM dimension: the largest n whose best dataset fits
/// at least lm_stop_fraction of the tested labelings (all of them, when the
/// fraction is configured to 1).
inline CapacityMeasurement measure_lm(const ArchitectureSpec& arch, const HarnessConfig& cfg) {
  arch.validate();
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const CapacityBounds bounds = capacity_bounds(arch);
  CapacityMeasurement meas;
  meas.kind = DimensionKind::lm;
  meas.arch = arch;
  meas.theoretical = bounds.lm;
  const WorkPool pool(cfg.threads);
  const detail::TrialContext ctx{arch, cfg, pool};
  const detail::Budget budget(cfg.time_budget_seconds);
  const int n_cap = static_cast<int>(2 * bounds.mk + 16);  // safety net only

  for (int n = 1; n <= n_cap; ++n) {
    const LabelingStream stream(n, cfg.lm_max_bits, detail::labeling_seed(cfg, n));
    const std::uint64_t tested = stream.count();
    PerNRecord rec{n, tested, 0, stream.exhaustive(), 0, {}};
    bool expired = false;
    int best_dataset = -1;
    for (int d = 0; d < cfg.datasets && !expired; ++d) {
      if (budget.expired()) {
        expired = true;
        break;
      }
      ++rec.datasets_tried;
      const Dataset ds = generate_dataset(n, arch.input_dim, detail::dataset_seed(cfg, d));
      const std::uint64_t fit = detail::lm_dataset_count(ctx, ds, stream, budget, expired);
      if (expired) break;
      if (fit > rec.fit || best_dataset < 0) {
        rec.fit = fit;
        best_dataset = d;
      }
      if (fit == tested) break;  // nothing left to improve at this n
    }
    if (expired) {
      meas.partial = true;
      meas.per_n.push_back(std::move(rec));
      break;
    }
    const bool success =
        static_cast<double>(rec.fit) >= cfg.lm_stop_fraction * static_cast<double>(tested);
    if (success && cfg.dump_params && best_dataset >= 0) {
      const Dataset ds =
          generate_dataset(n, arch.input_dim, detail::dataset_seed(cfg, best_dataset));
      rec.example_params = detail::capture_example_params(ctx, ds, stream, tested);
    }
    meas.per_n.push_back(std::move(rec));
    if (!success) break;
    meas.measured = n;
  }
  if (meas.measured >= n_cap) meas.partial = true;  // sweep never reached a failing n
  meas.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return meas;
}

/// Locates the empirical MK dimension: the largest n where some dataset fits
/// at least half of the tested labelings. With one hidden layer the search
/// starts above mk_skip_threshold(arch), where fits are assumed to succeed;
/// deeper networks require mk_skip = false.
inline CapacityMeasurement measure_mk(const ArchitectureSpec& arch, const HarnessConfig& cfg) {
  arch.validate();
  cfg.validate();
  if (cfg.mk_skip && arch.hidden.size() != 1)
    throw std::invalid_argument(
        "measure_mk: the skip shortcut requires one hidden layer; disable it for other depths");
  const auto t0 = std::chrono::steady_clock::now();
  const CapacityBounds bounds = capacity_bounds(arch);
  CapacityMeasurement meas;
  meas.kind = DimensionKind::mk;
  meas.arch = arch;
  meas.theoretical = bounds.mk;
  const WorkPool pool(cfg.threads);
  const detail::TrialContext ctx{arch, cfg, pool};
  const detail::Budget budget(cfg.time_budget_seconds);
  const int start_n = cfg.mk_skip ? mk_skip_threshold(arch) + 1 : 1;
  meas.measured = start_n - 1;  // skipped sample counts are assumed fits
  const int n_cap = static_cast<int>(2 * bounds.mk + 16);

  for (int n = start_n; n <= n_cap; ++n) {
    const LabelingStream stream(n, cfg.mk_max_bits, detail::labeling_seed(cfg, n));
    const std::uint64_t tested = stream.count();
    PerNRecord rec{n, tested, 0, stream.exhaustive(), 0, {}};
    bool expired = false;
    bool success = false;
    int best_dataset = -1;
    for (int d = 0; d < cfg.datasets && !expired; ++d) {
      if (budget.expired()) {
        expired = true;
        break;
      }
      ++rec.datasets_tried;
      const Dataset ds = generate_dataset(n, arch.input_dim, detail::dataset_seed(cfg, d));
      const detail::MkDatasetResult r = detail::mk_dataset_count(ctx, ds, stream, budget, expired);
      if (expired) break;
      if (r.fit > rec.fit || best_dataset < 0) {
        rec.fit = r.fit;
        best_dataset = d;
      }
      if (r.success) {
        success = true;
        break;  // dataset loop exists to retry failures only
      }
    }
    if (expired) {
      meas.partial = true;
      meas.per_n.push_back(std::move(rec));
      break;
    }
    if (success && cfg.dump_params && best_dataset >= 0) {
      const Dataset ds =
          generate_dataset(n, arch.input_dim, detail::dataset_seed(cfg, best_dataset));
      rec.example_params = detail::capture_example_params(ctx, ds, stream, tested);
    }
    const double fraction = static_cast<double>(rec.fit) / static_cast<double>(tested);
    meas.per_n.push_back(std::move(rec));
    if (success) meas.measured = n;
    if (fraction < cfg.mk_stop_fraction) break;
  }
  if (meas.measured >= n_cap) meas.partial = true;
  meas.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return meas;
}

struct MeasuredCurvePoint {
  int n = 0;
  double x = 0.0;  // n / theoretical LM dimension
  double fraction = 0.0;
  std::uint64_t tested = 0;
  bool exhaustive = true;
};

struct CurveMeasurement {
  ArchitectureSpec arch;
  long long theoretical_lm = 0;
  std::vector<MeasuredCurvePoint> points;
  bool partial = false;
  double runtime_seconds = 0.0;
};

/// Fraction of labelings learned on a single dataset for each n in
/// [n_min, n_max]; abscissa normalized so x = 1 is the theoretical LM point
/// and x = 2 the MK point. No early exits: the fraction is the plain count.
inline CurveMeasurement measure_curve(const ArchitectureSpec& arch, int n_min, int n_max,
                                      const HarnessConfig& cfg) {
  arch.validate();
  cfg.validate();
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("measure_curve: bad n range");
  const auto t0 = std::chrono::steady_clock::now();
  CurveMeasurement curve;
  curve.arch = arch;
  curve.theoretical_lm = capacity_bounds(arch).lm;
  const WorkPool pool(cfg.threads);
  const detail::TrialContext ctx{arch, cfg, pool};
  const detail::Budget budget(cfg.time_budget_seconds);

  for (int n = n_min; n <= n_max; ++n) {
    if (budget.expired()) {
      curve.partial = true;
      break;
    }
    const LabelingStream stream(n, cfg.curve_max_bits, detail::labeling_seed(cfg, n));
    const Dataset ds = generate_dataset(n, arch.input_dim, detail::dataset_seed(cfg, 0));
    const std::uint64_t tested = stream.count();
    std::uint64_t fit = 0;
    bool expired = false;
    detail::run_trials(ctx, ds, stream, budget, expired, [&](std::uint64_t, bool ok) {
      if (ok) ++fit;
      return true;  // the curve counts everything; no early exit
    });
    if (expired) {
      curve.partial = true;  // the interrupted n is dropped
      break;
    }
    curve.points.push_back({n, static_cast<double>(n) / static_cast<double>(curve.theoretical_lm),
                            static_cast<double>(fit) / static_cast<double>(tested), tested,
                            stream.exhaustive()});
  }
  curve.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return curve;
}

}  // namespace capmeter
