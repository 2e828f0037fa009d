#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "srm/mdp/model.hpp"
#include "srm/mdp/solver.hpp"
#include "srm/risk/gpoly.hpp"
#include "srm/risk/spectrum.hpp"

namespace srm::outer {

/// Inner value at (x0, 0, 1) plus the conjugate integral.
double objective_K(const mdp::MDPModel& model, const GPoly& g, const StepSpectrum& spec, int x0,
                   const mdp::InnerOptions& inner = {});

struct OuterConfig {
  std::optional<double> epsilon;      ///< target restriction error
  std::optional<std::size_t> m;       ///< explicit grid size, overrides epsilon
  std::size_t restarts = 4;
  std::size_t anneal_steps = 2000;
  double initial_temperature = 0.1;   ///< in units of c_hat
  double cooling_rate = 0.995;
  double move_scale = 0.1;            ///< in units of c_hat
  std::uint64_t seed = 7;
  std::size_t threads = 1;
  std::size_t refine_rounds = 3;      ///< policy / minimizer alternations after annealing
  mdp::InnerOptions inner;

  /// Throws ConfigError on a non-positive parameter or cooling_rate >= 1.
  void validate() const;
};

struct RestartStats {
  double start_value = 0.0;
  double best_value = 0.0;
  std::size_t accepted = 0;
  std::size_t evaluations = 0;  ///< inner solves actually run
  std::size_t cache_hits = 0;
  std::size_t refinements = 0;  ///< refinement rounds that improved the value
};

struct OuterResult {
  std::vector<double> best_y;
  double best_value = 0.0;
  mdp::SolveReport inner_report;
  double conjugate_integral = 0.0;
  double error_bound = 0.0;
  std::size_t evaluations = 0;
  std::size_t m = 0;
  double c_hat = 0.0;         ///< cost bound of the model
  double search_cap = 0.0;    ///< right end of the knot grid (c_hat, or 1 when c_hat = 0)
  std::size_t best_restart = 0;
  std::vector<RestartStats> restarts;

  GPoly best_g(double phi1) const { return GPoly::on_grid(search_cap, best_y, phi1); }
};

/// Seeded multistart simulated annealing over the knot-value polytope.
OuterResult anneal(const mdp::MDPModel& model, const StepSpectrum& spec, int x0,
                   const OuterConfig& cfg);

}  // namespace srm::outer
