#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srm/mdp/model.hpp"
#include "srm/mdp/solver.hpp"
#include "srm/outer/outer.hpp"
#include "srm/reinsurance/reinsurance.hpp"
#include "srm/risk/gpoly.hpp"
#include "srm/risk/spectrum.hpp"

namespace srm::harness {

enum class ScenarioKind { generic_mdp, reinsurance };

struct OracleConfig {
  bool enabled = false;
  double policy_cap = 1e6;
  double lattice_pitch = 0.0;     ///< 0: c_hat / 50
  double lattice_cap = 2e5;
  std::vector<std::size_t> m_list{2};
};

/// Fixed disutility for solve-inner.
struct GSpec {
  std::string type = "identity";  ///< identity | hinge | piecewise
  double q = 0.0;                 ///< hinge (s - q)^+
  std::vector<double> knots;
  std::vector<double> values;
  std::optional<double> max_slope;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::generic_mdp;
  std::optional<mdp::MDPModel> model;             ///< generic_mdp
  int initial_state = 0;
  std::optional<reinsurance::ReinsuranceConfig> reinsurance;
  StepSpectrum spectrum = StepSpectrum::expectation();
  std::optional<GSpec> g;
  outer::OuterConfig outer;
  mdp::InnerOptions inner;
  OracleConfig oracle;
};

/// Parses and validates a scenario document; throws ConfigError with the
/// offending key on any schema violation.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

/// Canonical re-emission; parse_scenario(emit_scenario(s)) reproduces s.
nlohmann::json emit_scenario(const Scenario& s);

/// The decision model of a scenario (built for reinsurance kinds).
mdp::MDPModel scenario_model(const Scenario& s, int* x0 = nullptr);

/// The fixed disutility of a scenario; identity and hinge use the cost bound as cap.
GPoly scenario_g(const Scenario& s, const mdp::MDPModel& model);

}  // namespace srm::harness
