// Command line front end: scenario loading, the analysis pipeline, the
// verification harness over the built-in corpus, and report/plot-data
// emission.
//
// Exit codes: 0 all requested work succeeded and every check passed,
//             1 at least one consistency check failed,
//             2 bad input (unknown scenario, schema/parse errors, I/O).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <prequant/prequant.hpp>

namespace fs = std::filesystem;
using namespace prequant;

namespace {

struct GridOverride {
  size_t s = 0;
  size_t n = 0;
};

std::optional<GridOverride> parse_grid(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return std::nullopt;
  GridOverride g;
  try {
    g.s = std::stoul(text.substr(0, comma));
    g.n = std::stoul(text.substr(comma + 1));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (g.s == 0 || g.n == 0) return std::nullopt;
  return g;
}

Scenario load_with_overrides(const std::string& name_or_path,
                             const std::optional<GridOverride>& grid,
                             const std::optional<double>& tol) {
  Json j;
  fs::path base_dir = ".";
  if (is_builtin_scenario(name_or_path)) {
    j = builtin_scenario_json(name_or_path);
  } else {
    std::ifstream f(name_or_path);
    require(f.good(), errc::io_error,
            "cannot open scenario file '" + name_or_path + "'");
    std::ostringstream buffer;
    buffer << f.rdbuf();
    j = parse_scenario_text(buffer.str(), name_or_path);
    base_dir = fs::path(name_or_path).parent_path();
  }
  ScenarioConfig cfg = scenario_config_from_json(j, base_dir);
  if (grid) {
    cfg.grid_s = grid->s;
    cfg.grid_n = grid->n;
  }
  if (tol) cfg.tolerance = *tol;
  return build_scenario(cfg);
}

std::string safe_filename(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                          c == '_' || c == '.'
                      ? c
                      : '-');
  return out;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path);
  require(f.good(), errc::io_error, "cannot write '" + path.string() + "'");
  f << contents;
  require(f.good(), errc::io_error, "write failed on '" + path.string() + "'");
}

void print_check_line(std::ostream& os, const std::string& scope,
                      const CheckResult& c) {
  os << (c.pass ? "[PASS] " : "[FAIL] ") << scope << "/" << c.name
     << "  residual=" << c.residual << "  tolerance=" << c.tolerance << "\n";
  if (!c.pass) os << "       " << c.detail << "\n";
}

int cmd_list() {
  for (const auto& n : builtin_scenario_names()) std::cout << n << "\n";
  return 0;
}

int cmd_analyze(const std::string& scenario_arg,
                const std::optional<GridOverride>& grid,
                const std::optional<double>& tol, const std::string& out_flag,
                const std::string& emit_flag) {
  bool emit_json = false, emit_csv = false;
  {
    std::stringstream ss(emit_flag);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (token == "json")
        emit_json = true;
      else if (token == "csv")
        emit_csv = true;
      else if (!token.empty()) {
        std::cerr << "error: unknown emit format '" << token
                  << "' (expected json,csv)\n";
        return 2;
      }
    }
  }

  fs::path out_dir = out_flag;
  if (out_dir.empty()) {
    if (const char* env = std::getenv("PREQUANT_OUT_DIR"))
      out_dir = env;
    else
      out_dir = ".";
  }

  Scenario s = load_with_overrides(scenario_arg, grid, tol);
  AnalysisReport rep = run_analysis(s, true);

  std::cout << "scenario:      " << rep.scenario << "\n"
            << "model:         " << rep.model << "\n"
            << "group:         " << rep.group << "\n"
            << "toric periods: " << rep.toric_periods << "\n"
            << "total periods: " << rep.total_periods << "\n"
            << "period torus:  " << rep.period_torus << "\n"
            << "ext moduli:    " << rep.extension_moduli << "\n"
            << "characters:    " << rep.character_group << "\n"
            << "checks:        " << rep.checks_passed() << "/"
            << rep.checks.size() << " passed\n";
  for (const auto& c : rep.checks)
    if (!c.pass) print_check_line(std::cout, rep.scenario, c);
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";

  if (emit_json || emit_csv) fs::create_directories(out_dir);
  const std::string stem = safe_filename(rep.scenario);
  if (emit_json) {
    fs::path p = out_dir / (stem + ".report.json");
    write_file(p, report_to_json(rep).dump(2) + "\n");
    std::cout << "wrote " << p.string() << "\n";
  }
  if (emit_csv) {
    for (const auto& t : rep.traces) {
      fs::path p = out_dir / (stem + "." + safe_filename(t.name) + ".csv");
      std::ostringstream os;
      write_trace_csv(os, t);
      write_file(p, os.str());
      std::cout << "wrote " << p.string() << "\n";
    }
  }
  return rep.all_checks_pass() ? 0 : 1;
}

int cmd_verify(const std::string& suite) {
  std::vector<std::string> names;
  if (suite == "paper")
    names = builtin_scenario_names();
  else
    names.push_back(suite);

  size_t total = 0, failed = 0;
  for (const auto& name : names) {
    Scenario s = load_with_overrides(name, std::nullopt, std::nullopt);
    AnalysisReport rep = run_analysis(s, true);
    for (const auto& c : rep.checks) {
      print_check_line(std::cout, rep.scenario, c);
      ++total;
      if (!c.pass) ++failed;
    }
  }
  std::cout << total << " checks, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "prequant: action integrals, period groups and the prequantum "
      "groupoid on the built-in model spaces"};
  app.require_subcommand(1);

  auto* list_cmd =
      app.add_subcommand("list-scenarios", "list the built-in scenarios");

  std::string scenario_arg;
  std::string grid_text;
  double tol_value = 0.0;
  std::string out_flag;
  std::string emit_flag = "json,csv";
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "run the analysis of one scenario and emit its report");
  analyze_cmd
      ->add_option("scenario", scenario_arg,
                   "built-in scenario name or path to a scenario JSON file")
      ->required();
  analyze_cmd->add_option("--grid", grid_text,
                          "override the homotopy grid as S,N (both even)");
  auto* tol_opt = analyze_cmd->add_option(
      "--tol", tol_value, "override the scenario check tolerance");
  analyze_cmd->add_option(
      "--out", out_flag,
      "output directory (default: $PREQUANT_OUT_DIR, else current)");
  analyze_cmd->add_option("--emit", emit_flag,
                          "comma separated outputs to write: json,csv");

  std::string suite = "paper";
  auto* verify_cmd = app.add_subcommand(
      "verify",
      "run every applicable consistency check and print one line per check");
  verify_cmd->add_option(
      "--suite", suite,
      "'paper' for the whole built-in corpus, or one scenario name/path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) return cmd_list();
    if (analyze_cmd->parsed()) {
      std::optional<GridOverride> grid;
      if (!grid_text.empty()) {
        grid = parse_grid(grid_text);
        if (!grid) {
          std::cerr << "error: --grid expects S,N with positive integers\n";
          return 2;
        }
      }
      std::optional<double> tol;
      if (tol_opt->count() > 0) tol = tol_value;
      return cmd_analyze(scenario_arg, grid, tol, out_flag, emit_flag);
    }
    if (verify_cmd->parsed()) return cmd_verify(suite);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
