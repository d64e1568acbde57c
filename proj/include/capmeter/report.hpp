#pragma once

// Machine-readable outputs: measurement reports, curve CSVs and the
// benchmark comparison. Every JSON document carries a schema_version field;
// the schemas are documented in the README. Reports echo the full effective
// configuration so a result is reproducible from the file alone.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <ios>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "capmeter/architecture.hpp"
#include "capmeter/shatter.hpp"
#include "capmeter/threshold.hpp"

namespace capmeter {

using nlohmann::json;

inline constexpr const char* kReportSchema = "capmeter-report/1";
inline constexpr const char* kBoundsSchema = "capmeter-bounds/1";
inline constexpr const char* kCompareSchema = "capmeter-compare/1";
inline constexpr const char* kCountSchema = "capmeter-count/1";

/// Shortest decimal that round-trips to the same double.
inline std::string double_repr(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json to_json(const ArchitectureSpec& arch) {
  return {{"k", arch.input_dim}, {"hidden", arch.hidden}, {"activation", to_string(arch.activation)}};
}

inline json to_json(const CapacityBounds& b) {
  return {{"param_count", b.param_count}, {"lm", b.lm}, {"mk", b.mk}, {"per_unit", b.per_unit}};
}

inline json bounds_report(const ArchitectureSpec& arch) {
  json j = to_json(capacity_bounds(arch));
  j["schema_version"] = kBoundsSchema;
  return j;
}

inline json to_json(const OptimizerConfig& c) {
  return {{"history_size", c.history_size},
          {"max_iterations", c.max_iterations},
          {"grad_tolerance", c.grad_tolerance},
          {"loss_tolerance", c.loss_tolerance},
          {"wolfe_c1", c.wolfe_c1},
          {"wolfe_c2", c.wolfe_c2},
          {"max_line_search_steps", c.max_line_search_steps}};
}

inline json to_json(const HarnessConfig& c) {
  return {{"lm_max_bits", c.lm_max_bits},
          {"mk_max_bits", c.mk_max_bits},
          {"curve_max_bits", c.curve_max_bits},
          {"restarts", c.restarts},
          {"datasets", c.datasets},
          {"lm_stop_fraction", c.lm_stop_fraction},
          {"mk_stop_fraction", c.mk_stop_fraction},
          {"l2", c.l2},
          {"threads", c.threads},
          {"time_budget_seconds", c.time_budget_seconds},
          {"mk_skip", c.mk_skip},
          {"trainer", to_json(c.trainer)}};
}

/// Full measurement report for `measure lm` / `measure mk`.
inline json measurement_report(const CapacityMeasurement& m, const HarnessConfig& cfg) {
  const CapacityBounds bounds = capacity_bounds(m.arch);
  json per_n = json::array();
  for (const PerNRecord& r : m.per_n) {
    json rec{{"n", r.n},
             {"tested", r.tested},
             {"fit", r.fit},
             {"exhaustive", r.exhaustive},
             {"datasets_tried", r.datasets_tried}};
    if (!r.example_params.empty()) rec["example_params"] = r.example_params;
    per_n.push_back(std::move(rec));
  }
  return {{"schema_version", kReportSchema},
          {"kind", to_string(m.kind)},
          {"arch", to_json(m.arch)},
          {"theoretical", to_json(bounds)},
          {"measured", m.measured},
          {"per_n", std::move(per_n)},
          {"config", to_json(cfg)},
          {"seed", cfg.base_seed},
          {"runtime_seconds", m.runtime_seconds},
          {"partial", m.partial}};
}

/// CSV for `theory curve`: header n,k,x,fraction.
inline void write_theory_curve_csv(std::ostream& os, const std::vector<CurvePoint>& pts) {
  os << "n,k,x,fraction\n";
  for (const CurvePoint& p : pts)
    os << p.n << ',' << p.k << ',' << double_repr(p.x) << ',' << double_repr(p.fraction) << '\n';
}

/// CSV for `measure curve`: header n,x_theoretical,fraction,tested,exhaustive.
inline void write_measured_curve_csv(std::ostream& os, const CurveMeasurement& c) {
  os << "n,x_theoretical,fraction,tested,exhaustive\n";
  for (const MeasuredCurvePoint& p : c.points)
    os << p.n << ',' << double_repr(p.x) << ',' << double_repr(p.fraction) << ',' << p.tested
       << ',' << (p.exhaustive ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// compare: benchmark several (architecture, trainer) entries against theory

struct CompareEntry {
  std::string label;
  ArchitectureSpec arch;
  HarnessConfig cfg;
  // results
  bool failed = false;
  std::string error;
  CapacityMeasurement lm, mk;
  double efficiency_lm = 0.0, efficiency_mk = 0.0;
  bool partial = false;
};

struct ComparisonReport {
  std::vector<CompareEntry> entries;
  bool any_partial = false;
};

namespace detail {

inline void apply_overrides(HarnessConfig& cfg, const json& e) {
  if (e.contains("seed")) cfg.base_seed = e.at("seed").get<std::uint64_t>();
  if (e.contains("datasets")) cfg.datasets = e.at("datasets").get<int>();
  if (e.contains("restarts")) cfg.restarts = e.at("restarts").get<int>();
  if (e.contains("lm_max_bits")) cfg.lm_max_bits = e.at("lm_max_bits").get<int>();
  if (e.contains("mk_max_bits")) cfg.mk_max_bits = e.at("mk_max_bits").get<int>();
  if (e.contains("lm_stop_fraction")) cfg.lm_stop_fraction = e.at("lm_stop_fraction").get<double>();
  if (e.contains("mk_stop_fraction")) cfg.mk_stop_fraction = e.at("mk_stop_fraction").get<double>();
  if (e.contains("l2")) cfg.l2 = e.at("l2").get<double>();
  if (e.contains("mk_skip")) cfg.mk_skip = e.at("mk_skip").get<bool>();
  if (e.contains("max_iterations")) cfg.trainer.max_iterations = e.at("max_iterations").get<int>();
  if (e.contains("history_size")) cfg.trainer.history_size = e.at("history_size").get<int>();
  if (e.contains("grad_tolerance")) cfg.trainer.grad_tolerance = e.at("grad_tolerance").get<double>();
}

}  // namespace detail

/// Runs measure_lm and measure_mk for every entry of a compare config:
///   {"version": 1, "entries": [{"label": ..., "k": ..., "hidden": [...],
///    "activation": "relu", ...optional overrides...}]}
/// Per-entry failures are recorded and the run continues. Entries come back
/// sorted by efficiency_lm, highest first.
inline ComparisonReport run_compare(const json& config, const HarnessConfig& defaults,
                                    double total_time_budget = 0.0) {
  if (!config.is_object() || !config.contains("version"))
    throw std::invalid_argument("compare config: missing version");
  if (config.at("version").get<int>() != 1)
    throw std::invalid_argument("compare config: unsupported version");
  if (!config.contains("entries") || !config.at("entries").is_array() ||
      config.at("entries").empty())
    throw std::invalid_argument("compare config: entries must be a non-empty array");

  ComparisonReport report;
  const auto t0 = std::chrono::steady_clock::now();
  for (const json& e : config.at("entries")) {
    CompareEntry entry;
    entry.cfg = defaults;
    try {
      entry.arch.input_dim = e.at("k").get<int>();
      entry.arch.hidden = e.value("hidden", std::vector<int>{});
      entry.arch.activation = activation_from_string(e.value("activation", std::string("relu")));
      entry.label = e.value("label", to_string(entry.arch.activation) +
                                         std::string(" k=") + std::to_string(entry.arch.input_dim));
      detail::apply_overrides(entry.cfg, e);
      if (total_time_budget > 0.0) {
        const double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        entry.cfg.time_budget_seconds = std::max(1e-9, total_time_budget - used);
      }
      entry.lm = measure_lm(entry.arch, entry.cfg);
      entry.mk = measure_mk(entry.arch, entry.cfg);
      const CapacityBounds b = capacity_bounds(entry.arch);
      entry.efficiency_lm = static_cast<double>(entry.lm.measured) / static_cast<double>(b.lm);
      entry.efficiency_mk = static_cast<double>(entry.mk.measured) / static_cast<double>(b.mk);
      entry.partial = entry.lm.partial || entry.mk.partial;
      report.any_partial = report.any_partial || entry.partial;
    } catch (const std::exception& ex) {
      entry.failed = true;
      entry.error = ex.what();
      if (entry.label.empty()) entry.label = "entry " + std::to_string(report.entries.size());
    }
    report.entries.push_back(std::move(entry));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const CompareEntry& a, const CompareEntry& b) {
                     if (a.failed != b.failed) return !a.failed;
                     return a.efficiency_lm > b.efficiency_lm;
                   });
  return report;
}

inline json to_json(const ComparisonReport& r) {
  json entries = json::array();
  for (const CompareEntry& e : r.entries) {
    json je{{"label", e.label}};
    if (e.failed) {
      je["error"] = e.error;
    } else {
      je["arch"] = to_json(e.arch);
      je["config"] = to_json(e.cfg);
      je["seed"] = e.cfg.base_seed;
      je["measured_lm"] = e.lm.measured;
      je["measured_mk"] = e.mk.measured;
      je["theoretical_lm"] = e.lm.theoretical;
      je["theoretical_mk"] = e.mk.theoretical;
      je["efficiency_lm"] = e.efficiency_lm;
      je["efficiency_mk"] = e.efficiency_mk;
      je["partial"] = e.partial;
    }
    entries.push_back(std::move(je));
  }
  return {{"schema_version", kCompareSchema}, {"entries", std::move(entries)}};
}

/// Fixed-width table with the same numbers as the JSON document.
inline std::string to_table(const ComparisonReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(24) << "label" << std::right << std::setw(8) << "lm" << std::setw(8)
     << "lm_max" << std::setw(8) << "eff_lm" << std::setw(8) << "mk" << std::setw(8) << "mk_max"
     << std::setw(8) << "eff_mk" << '\n';
  os << std::string(72, '-') << '\n';
  for (const CompareEntry& e : r.entries) {
    os << std::left << std::setw(24) << e.label << std::right;
    if (e.failed) {
      os << "  error: " << e.error << '\n';
      continue;
    }
    os << std::setw(8) << e.lm.measured << std::setw(8) << e.lm.theoretical << std::setw(8)
       << std::fixed << std::setprecision(3) << e.efficiency_lm << std::setw(8) << e.mk.measured
       << std::setw(8) << e.mk.theoretical << std::setw(8) << e.efficiency_mk;
    os.unsetf(std::ios::fixed);
    if (e.partial) os << "  (partial)";
    os << '\n';
  }
  return os.str();
}

}  // namespace capmeter
