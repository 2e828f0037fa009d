#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "srm/mdp/model.hpp"
#include "srm/mdp/tables.hpp"
#include "srm/risk/distribution.hpp"
#include "srm/risk/gpoly.hpp"

namespace srm::mdp {

/// Increasing convex disutility g together with its slope beyond the cost cap,
/// used when the grid solver has to look above its top s-point.
struct Disutility {
  std::function<double(double)> eval;
  double tail_slope = 0.0;

  Disutility(const GPoly& g);  // NOLINT(google-explicit-constructor)
  Disutility(std::function<double(double)> f, double slope) : eval(std::move(f)), tail_slope(slope) {}

  double operator()(double s) const { return eval(s); }
};

struct InnerOptions {
  AxisMode mode = AxisMode::exact;
  std::size_t exact_cap = 200000;   ///< total reachable points before falling back to grid mode
  std::size_t grid_points = 201;    ///< s-grid size in grid mode and for infinite horizon
  double grid_top = 0.0;            ///< top of the s-grid; 0 selects the total cost bound
  std::vector<double> t_scales{1.0};///< finite-horizon grid mode: layers t = scale * beta^n
  double tolerance = 1e-6;          ///< infinite horizon stopping tolerance
  double grid_margin = 0.05;        ///< infinite horizon: s-grid covers [0, c_hat (1 + margin)]
  int max_iterations = 100000;
  bool check_invariants = true;     ///< verify value-space invariants after every step
};

enum class DiscretizationNote { exact, interpolated };

struct SolveReport {
  double value_at_origin = 0.0;
  MarkovPolicy policy;
  ValueTable values;
  int iterations = 0;
  double residual = 0.0;  ///< last sup-norm change, infinite horizon only
  double min_increment = 0.0;  ///< smallest pointwise change between iterates, infinite horizon only
  DiscretizationNote note = DiscretizationNote::exact;
  bool fell_back_to_grid = false;
  std::size_t points = 0;
};

/// Successor value v(x', s', t') used by the one-step operators.
using NextValue = std::function<double(const ExtendedState&)>;

/// E[v(T_hat(x, s, t, a, Z))]: exact finite sum over the disturbance atoms.
double apply_L(const MDPModel& model, int n, const NextValue& v_next, const ExtendedState& es, int a);

/// Points at which a Bellman step is evaluated: per layer a t and per state the s-points.
struct StageGrid {
  std::vector<double> t;
  std::vector<std::vector<std::vector<double>>> s;  ///< [layer][state] -> sorted s-points
};

/// min over admissible actions of apply_L at every grid point; ties go to the
/// lowest action index.
std::pair<ValueStage, RuleStage> bellman_step(const MDPModel& model, int n, const NextValue& v_next,
                                              const StageGrid& grid);

/// Backward induction J_N(x,s,t) = g(s + t c_N(x)), J_n = T_n J_{n+1}; reports
/// J_0(x0, 0, 1) and the optimal Markov policy on the extended space.
SolveReport solve_finite(const MDPModel& model, const Disutility& g, int x0,
                         const InnerOptions& opts = {});

/// Value iteration from J_0 = g on the (s, t) grid up to the fixed point.
SolveReport solve_infinite(const MDPModel& model, const Disutility& g, int x0,
                           const InnerOptions& opts = {});

/// Dispatches on the model's horizon.
SolveReport solve_inner(const MDPModel& model, const Disutility& g, int x0,
                        const InnerOptions& opts = {});

/// Value of a fixed Markov policy at (x0, 0, 1), by the backward recursion with
/// the decisions held fixed.
double evaluate_policy(const MDPModel& model, const MarkovPolicy& policy, const Disutility& g,
                       int x0, const InnerOptions& opts = {});

/// Law of the total discounted cost under a Markov policy started at (x0, 0, 1).
/// Exact forward enumeration for finite horizons; for an infinite horizon the
/// sum is truncated once the remaining discount weight is below
/// `opts.tolerance` and accumulated costs are merged on a pitch of
/// c_hat / (grid_points - 1).
DiscreteDistribution policy_cost_distribution(const MDPModel& model, const MarkovPolicy& policy,
                                              int x0, const InnerOptions& opts = {});

/// Myopic rule: minimizes the expected one-stage cost, ignoring (s, t).
MarkovPolicy greedy_policy(const MDPModel& model);

}  // namespace srm::mdp
