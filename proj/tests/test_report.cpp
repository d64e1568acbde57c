#include <doctest.h>

#include <sstream>
#include <string>

#include "capmeter/report.hpp"

using capmeter::json;

namespace {

capmeter::ArchitectureSpec arch21() {
  capmeter::ArchitectureSpec a;
  a.input_dim = 2;
  a.hidden = {1};
  return a;
}

capmeter::HarnessConfig quick() {
  capmeter::HarnessConfig cfg;
  cfg.datasets = 3;
  cfg.restarts = 6;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("measurement report carries the documented schema") {
  const auto cfg = quick();
  const auto m = capmeter::measure_lm(arch21(), cfg);
  const json r = capmeter::measurement_report(m, cfg);
  CHECK(r.at("schema_version") == capmeter::kReportSchema);
  CHECK(r.at("kind") == "lm");
  CHECK(r.at("arch").at("k") == 2);
  CHECK(r.at("arch").at("hidden") == json::array({1}));
  CHECK(r.at("arch").at("activation") == "relu");
  CHECK(r.at("theoretical").at("param_count") == 5);
  CHECK(r.at("theoretical").at("lm") == 5);
  CHECK(r.at("theoretical").at("mk") == 10);
  CHECK(r.at("measured").is_number_integer());
  CHECK(r.at("per_n").is_array());
  for (const auto& rec : r.at("per_n")) {
    CHECK(rec.contains("n"));
    CHECK(rec.contains("tested"));
    CHECK(rec.contains("fit"));
    CHECK(rec.contains("exhaustive"));
    CHECK(rec.contains("datasets_tried"));
  }
  CHECK(r.at("config").at("restarts") == 6);
  CHECK(r.at("config").at("trainer").at("history_size") == 10);
  CHECK(r.at("seed").is_number());
  CHECK(r.at("runtime_seconds").is_number());
  CHECK(r.at("partial").is_boolean());
  // round-trips through text
  CHECK(json::parse(r.dump()) == r);
}

TEST_CASE("theory curve csv uses the documented header and survives parsing") {
  std::ostringstream os;
  capmeter::write_theory_curve_csv(os, capmeter::theoretical_curve(3, 8));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "n,k,x,fraction");
  std::getline(is, line);
  CHECK(line.rfind("1,3,", 0) == 0);
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 8);
  // 17 significant digits reproduce the double exactly
  const double f = capmeter::theoretical_curve(3, 8)[7].fraction;
  CHECK(std::stod(capmeter::double_repr(f)) == f);
}

TEST_CASE("measured curve csv header") {
  capmeter::CurveMeasurement c;
  c.theoretical_lm = 5;
  c.points.push_back({1, 0.2, 1.0, 1, true});
  std::ostringstream os;
  capmeter::write_measured_curve_csv(os, c);
  CHECK(os.str() == "n,x_theoretical,fraction,tested,exhaustive\n1,0.20000000000000001,1,1,1\n");
}

TEST_CASE("bounds report merges schema version into the documented fields") {
  const json b = capmeter::bounds_report(arch21());
  CHECK(b.at("schema_version") == capmeter::kBoundsSchema);
  CHECK(b.at("param_count") == 5);
  CHECK(b.at("lm") == 5);
  CHECK(b.at("mk") == 10);
  CHECK(b.at("per_unit") == json::array({3, 2}));
}

TEST_CASE("compare runs entries, sorts by lm efficiency, and records failures") {
  const json config{
      {"version", 1},
      {"entries",
       json::array({json{{"label", "tiny"}, {"k", 2}, {"hidden", json::array({1})},
                         {"datasets", 2}, {"restarts", 5}},
                    json{{"label", "broken"}, {"k", 0}},
                    json{{"label", "tiny-other-seed"}, {"k", 2}, {"hidden", json::array({1})},
                         {"datasets", 2}, {"restarts", 5}, {"seed", 9}}})}};
  capmeter::HarnessConfig defaults = quick();
  const auto report = capmeter::run_compare(config, defaults);
  REQUIRE(report.entries.size() == 3);
  // failed entries sort last and keep their error text
  CHECK(report.entries.back().failed);
  CHECK_FALSE(report.entries.back().error.empty());
  // both healthy entries share seed-independent theory columns
  const auto& a = report.entries[0];
  const auto& b = report.entries[1];
  CHECK(a.lm.theoretical == b.lm.theoretical);
  CHECK(a.mk.theoretical == b.mk.theoretical);
  CHECK(a.efficiency_lm >= b.efficiency_lm);
  for (const auto& e : report.entries)
    if (!e.failed) {
      CHECK(e.efficiency_lm >= 0.0);
      CHECK(e.efficiency_lm <= 1.0);
      CHECK(e.efficiency_mk >= 0.0);
      CHECK(e.efficiency_mk <= 1.0);
      // perceptron-equivalent entry: measured lm 3 of bound 5
      CHECK(e.lm.measured == 3);
      CHECK(e.efficiency_lm == doctest::Approx(0.6));
    }

  const json j = capmeter::to_json(report);
  CHECK(j.at("schema_version") == capmeter::kCompareSchema);
  CHECK(j.at("entries").size() == 3);
  const std::string table = capmeter::to_table(report);
  CHECK(table.find("tiny") != std::string::npos);
  CHECK(table.find("0.600") != std::string::npos);
  CHECK(table.find("error:") != std::string::npos);
}

TEST_CASE("compare config validation") {
  capmeter::HarnessConfig defaults = quick();
  CHECK_THROWS_AS(capmeter::run_compare(json{{"version", 1}, {"entries", json::array()}}, defaults),
                  std::invalid_argument);
  CHECK_THROWS_AS(capmeter::run_compare(json{{"entries", json::array()}}, defaults),
                  std::invalid_argument);
  CHECK_THROWS_AS(capmeter::run_compare(json{{"version", 2}, {"entries", json::array({json{{"k", 2}}})}},
                                        defaults),
                  std::invalid_argument);
}
