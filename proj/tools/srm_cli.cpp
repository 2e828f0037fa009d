// Command-line front end: solve-inner, solve-outer, reinsurance, oracle, gap-study.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "srm/errors.hpp"
#include "srm/harness/oracle.hpp"
#include "srm/harness/report.hpp"
#include "srm/harness/scenario.hpp"
#include "srm/outer/conjugate.hpp"
#include "srm/reinsurance/reinsurance.hpp"

namespace {

using nlohmann::json;
using namespace srm;

constexpr int kExitValidation = 2;
constexpr int kExitCap = 3;

struct Options {
  std::string scenario;
  std::optional<double> epsilon;
  std::optional<std::size_t> m;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out;
  std::string format = "json";
  bool exact = false;
  bool grid = false;
};

harness::Scenario load(const Options& o) {
  if (o.scenario.empty()) throw ConfigError("--scenario is required");
  harness::Scenario s = harness::load_scenario(o.scenario);
  if (o.exact && o.grid) throw ConfigError("--exact and --grid are mutually exclusive");
  if (o.exact) s.inner.mode = mdp::AxisMode::exact;
  if (o.grid) s.inner.mode = mdp::AxisMode::grid;
  if (o.m) {
    s.outer.m = *o.m;
  } else if (o.epsilon) {
    s.outer.epsilon = *o.epsilon;
    s.outer.m.reset();
  }
  if (o.seed) s.outer.seed = *o.seed;
  if (o.threads) s.outer.threads = *o.threads;
  s.outer.inner = s.inner;
  s.outer.validate();
  return s;
}

void emit(const Options& o, const std::string& command, const std::string& body) {
  std::string path = o.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("SRM_OUTPUT_DIR"); dir && *dir) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (command + "." + o.format)).string();
    }
  }
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << body;
}

json envelope(const std::string& command, const harness::Scenario& s) {
  return {{"command", command}, {"version", harness::version_stamp()}, {"seed", s.outer.seed},
          {"scenario_kind", s.kind == harness::ScenarioKind::generic_mdp ? "generic_mdp" : "reinsurance"}};
}

std::string dump(json j, std::chrono::steady_clock::time_point start) {
  j[harness::kTimingField] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return j.dump(2) + "\n";
}

int solve_inner(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = load(o);
  int x0 = 0;
  const auto model = harness::scenario_model(s, &x0);
  const GPoly g = harness::scenario_g(s, model);
  const auto report = mdp::solve_inner(model, g, x0, s.inner);
  if (o.format == "csv") {
    emit(o, "solve-inner", harness::policy_csv(model, report.policy));
    return 0;
  }
  json j = envelope("solve-inner", s);
  j["inner"] = harness::inner_json(model, report);
  emit(o, "solve-inner", dump(j, start));
  return 0;
}

int solve_outer(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = load(o);
  int x0 = 0;
  const auto model = harness::scenario_model(s, &x0);
  const auto result = outer::anneal(model, s.spectrum, x0, s.outer);
  if (o.format == "csv") {
    emit(o, "solve-outer", harness::policy_csv(model, result.inner_report.policy));
    return 0;
  }
  json j = envelope("solve-outer", s);
  j["outer"] = harness::outer_json(model, result);
  if (s.oracle.enabled && !model.infinite()) {
    const auto oracle = harness::oracle_exact_optimum(model, s.spectrum, x0, s.oracle.policy_cap);
    j["oracle"] = {{"value", oracle.value}, {"policies", oracle.policies}, {"policy", oracle.policy}};
    j["gap"] = result.best_value - oracle.value;
  }
  emit(o, "solve-outer", dump(j, start));
  return 0;
}

int run_reinsurance(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = load(o);
  if (s.kind != harness::ScenarioKind::reinsurance) throw ConfigError("scenario kind must be 'reinsurance'");
  const auto report = reinsurance::solve_cost_of_capital(*s.reinsurance, s.spectrum, s.outer);
  if (o.format == "csv") {
    emit(o, "reinsurance", harness::reinsurance_policy_csv(report.policy));
    return 0;
  }
  const auto built = reinsurance::build_mdp(*s.reinsurance);
  json j = envelope("reinsurance", s);
  j["cost_of_capital"] = report.value;
  j["unshifted_cost_of_capital"] = report.unshifted_value;
  j["scaled_error_bound"] = report.scaled_bound;
  j["max_snap_error"] = report.max_snap_error;
  j["outer"] = harness::outer_json(built.model, report.outer, false);
  j["policy"] = harness::reinsurance_policy_json(report.policy);
  emit(o, "reinsurance", dump(j, start));
  return 0;
}

int run_oracle(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = load(o);
  int x0 = 0;
  const auto model = harness::scenario_model(s, &x0);
  const auto r = harness::oracle_exact_optimum(model, s.spectrum, x0, s.oracle.policy_cap);
  if (o.format == "csv") {
    emit(o, "oracle", "value,policies\n" + std::to_string(r.value) + "," + std::to_string(r.policies) + "\n");
    return 0;
  }
  json j = envelope("oracle", s);
  j["oracle"] = {{"value", r.value}, {"policies", r.policies}, {"policy", r.policy}};
  emit(o, "oracle", dump(j, start));
  return 0;
}

int gap_study(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = load(o);
  int x0 = 0;
  const auto model = harness::scenario_model(s, &x0);
  const auto oracle = harness::oracle_exact_optimum(model, s.spectrum, x0, s.oracle.policy_cap);
  double pitch = s.oracle.lattice_pitch;
  if (!(pitch > 0.0)) {
    const double c_hat = outer::cost_cap(model);
    pitch = (c_hat > 0.0 ? c_hat : 1.0) / 50.0;
  }
  const auto rows = harness::oracle_outer_gap(model, s.spectrum, x0, s.oracle.m_list, pitch, oracle.value,
                                              s.oracle.lattice_cap, s.inner);
  if (o.format == "csv") {
    emit(o, "gap-study", harness::gap_csv(rows));
    return 0;
  }
  json j = envelope("gap-study", s);
  j["oracle"] = {{"value", oracle.value}, {"policies", oracle.policies}};
  j["lattice_pitch"] = pitch;
  j["rows"] = harness::gap_json(rows);
  emit(o, "gap-study", dump(j, start));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral risk minimization for finite Markov decision models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("srm ") + SRM_VERSION);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario file (JSON)")->required();
    sub->add_option("--epsilon", o.epsilon, "target restriction error");
    sub->add_option("--m", o.m, "knot count, overrides --epsilon");
    sub->add_option("--seed", o.seed, "annealing seed");
    sub->add_option("--threads", o.threads, "parallel annealing restarts");
    sub->add_option("--out", o.out, "output file (default: stdout or $SRM_OUTPUT_DIR)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--exact", o.exact, "exact reachable-set s-axis");
    sub->add_flag("--grid", o.grid, "equidistant s-grid");
  };
  auto* inner = app.add_subcommand("solve-inner", "inner problem for the scenario's fixed g");
  auto* outer_cmd = app.add_subcommand("solve-outer", "full pipeline: annealing over g plus inner solves");
  auto* reins = app.add_subcommand("reinsurance", "cost-of-capital reinsurance optimization");
  auto* oracle = app.add_subcommand("oracle", "exhaustive history-dependent policy enumeration");
  auto* gap = app.add_subcommand("gap-study", "lattice scan of K_m against the oracle");
  for (auto* sub : {inner, outer_cmd, reins, oracle, gap}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*inner) return solve_inner(o);
    if (*outer_cmd) return solve_outer(o);
    if (*reins) return run_reinsurance(o);
    if (*oracle) return run_oracle(o);
    if (*gap) return gap_study(o);
  } catch (const CapExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitCap;
  } catch (const ConfigError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
