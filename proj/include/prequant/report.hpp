#pragma once

#include <json.hpp>

#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "prequant/action.hpp"
#include "prequant/errors.hpp"

namespace prequant {

using Json = nlohmann::ordered_json;

/// One verification check: named, with its numeric residual and the
/// tolerance it was held to. Exact (symbolic) checks report residual 0.
struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

/// Accumulated action of one distinguished homotopy, sampled along the
/// deformation parameter: cumulative[k] is the action of the first k rows,
/// so cumulative.front() == 0 and cumulative.back() == total up to summation
/// roundoff.
struct TraceData {
  std::string name;
  std::vector<double> cumulative;
  double total = 0.0;
  double error_estimate = 0.0;
};

inline TraceData make_trace(std::string name, const ActionResult& a) {
  TraceData t;
  t.name = std::move(name);
  t.total = a.value;
  t.error_estimate = a.error_estimate;
  t.cumulative.reserve(a.row_contributions.size() + 1);
  t.cumulative.push_back(0.0);
  double acc = 0.0;
  for (double e : a.row_contributions) {
    acc += e;
    t.cumulative.push_back(acc);
  }
  return t;
}

inline void write_trace_csv(std::ostream& os, const TraceData& t) {
  os << "s,cumulative_action\n";
  os << std::setprecision(17);
  const size_t rows = t.cumulative.size();
  require(rows >= 2, errc::invalid_argument, "trace with no rows");
  for (size_t k = 0; k < rows; ++k) {
    os << (static_cast<double>(k) / static_cast<double>(rows - 1)) << ","
       << t.cumulative[k] << "\n";
  }
}

struct SymbolReport {
  std::string name;
  double approx = 0.0;
};

/// One cocycle value: the exact representative (snapped or declared), the
/// raw quadrature float before snapping, and the quadrature estimate.
struct CocycleReportEntry {
  std::string i, j;
  std::string exact;
  double value = 0.0;
  double raw = 0.0;
  double error_estimate = 0.0;
};

struct RelationReportEntry {
  std::string word;
  std::string exact;
  double value = 0.0;
  bool in_total_periods = false;
};

struct HolonomyReport {
  std::string kind;  // "subgroup" or "continuum"
  std::string description;
  std::string note;
  // continuum witnesses: two radii with distinct phases
  double witness_radius_a = 0.0, witness_radius_b = 0.0;
  double action_a = 0.0, action_b = 0.0;
};

/// Full analysis output for one scenario. Serializes to JSON with stable
/// field order and no volatile content, so identical inputs produce byte
/// identical reports.
struct AnalysisReport {
  std::string scenario;
  std::string description;
  std::string model;
  std::string group;
  std::vector<double> basepoint;
  size_t grid_s = 0, grid_n = 0;
  double tolerance = 0.0;

  std::vector<SymbolReport> symbols;

  std::string toric_periods;
  std::string total_periods;
  std::vector<std::string> total_period_generators;
  std::string period_torus;
  bool discrete = true;

  std::string cocycle_backing;  // "geometric", "declared" or "flat"
  std::vector<CocycleReportEntry> cocycle;
  std::vector<RelationReportEntry> relations;

  std::string fundamental_group_abelianized;
  std::string extension_moduli;
  std::string character_group;
  std::string isotropy;

  std::optional<HolonomyReport> holonomy;

  std::vector<CheckResult> checks;
  std::vector<TraceData> traces;
  std::vector<std::string> warnings;

  size_t checks_passed() const {
    size_t n = 0;
    for (const auto& c : checks) n += c.pass ? 1 : 0;
    return n;
  }
  bool all_checks_pass() const { return checks_passed() == checks.size(); }
};

inline Json report_to_json(const AnalysisReport& r) {
  Json j;
  j["schema"] = "prequant-report/1";
  j["scenario"] = r.scenario;
  j["description"] = r.description;
  j["model"] = r.model;
  j["group"] = r.group;
  j["basepoint"] = r.basepoint;
  j["grid"] = Json{{"s", r.grid_s}, {"n", r.grid_n}};
  j["tolerance"] = r.tolerance;

  Json symbols = Json::array();
  for (const auto& s : r.symbols)
    symbols.push_back(Json{{"name", s.name}, {"approx", s.approx}});
  j["symbols"] = symbols;

  j["periods"] = Json{{"toric", r.toric_periods},
                      {"total", r.total_periods},
                      {"generators", r.total_period_generators},
                      {"torus", r.period_torus},
                      {"discrete", r.discrete}};

  Json cocycle = Json::array();
  for (const auto& e : r.cocycle)
    cocycle.push_back(Json{{"i", e.i},
                           {"j", e.j},
                           {"exact", e.exact},
                           {"value", e.value},
                           {"raw", e.raw},
                           {"error_estimate", e.error_estimate}});
  j["cocycle"] = Json{{"backing", r.cocycle_backing}, {"values", cocycle}};

  Json relations = Json::array();
  for (const auto& e : r.relations)
    relations.push_back(Json{{"word", e.word},
                             {"exact", e.exact},
                             {"value", e.value},
                             {"in_total_periods", e.in_total_periods}});
  j["relations"] = relations;

  j["structure"] =
      Json{{"fundamental_group_abelianized", r.fundamental_group_abelianized},
           {"extension_moduli", r.extension_moduli},
           {"character_group", r.character_group},
           {"isotropy", r.isotropy}};

  if (r.holonomy) {
    Json h;
    h["kind"] = r.holonomy->kind;
    h["description"] = r.holonomy->description;
    h["note"] = r.holonomy->note;
    if (r.holonomy->kind == "continuum") {
      h["witnesses"] = Json::array(
          {Json{{"radius", r.holonomy->witness_radius_a},
                {"action", r.holonomy->action_a}},
           Json{{"radius", r.holonomy->witness_radius_b},
                {"action", r.holonomy->action_b}}});
    }
    j["holonomy"] = h;
  }

  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"name", c.name},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"detail", c.detail}});
  j["checks"] = checks;
  j["checks_passed"] = r.checks_passed();
  j["checks_total"] = r.checks.size();

  Json traces = Json::array();
  for (const auto& t : r.traces)
    traces.push_back(Json{{"name", t.name},
                          {"total", t.total},
                          {"error_estimate", t.error_estimate},
                          {"samples", t.cumulative.size()},
                          {"cumulative", t.cumulative}});
  j["traces"] = traces;

  j["warnings"] = r.warnings;
  return j;
}

}  // namespace prequant
