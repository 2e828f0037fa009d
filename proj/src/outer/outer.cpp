#include "srm/outer/outer.hpp"

#include "srm/errors.hpp"
#include "srm/outer/conjugate.hpp"

namespace srm::outer {

double objective_K(const mdp::MDPModel& model, const GPoly& g, const StepSpectrum& spec, int x0,
                   const mdp::InnerOptions& inner) {
  return mdp::solve_inner(model, g, x0, inner).value_at_origin + conjugate_integral(g, spec);
}

void OuterConfig::validate() const {
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (m && *m < 2) throw ConfigError("m must be at least 2");
  if (!epsilon && !m) throw ConfigError("either epsilon or m is required");
  if (restarts == 0) throw ConfigError("restarts must be positive");
  if (!(initial_temperature > 0.0)) throw ConfigError("initial_temperature must be positive");
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw ConfigError("cooling_rate must lie in (0, 1)");
  if (!(move_scale > 0.0)) throw ConfigError("move_scale must be positive");
  if (threads == 0) throw ConfigError("threads must be positive");
}

}  // namespace srm::outer
