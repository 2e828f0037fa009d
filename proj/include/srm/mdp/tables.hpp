#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "srm/mdp/model.hpp"

namespace srm::mdp {

/// How the accumulated-cost axis s is discretized.
///  exact: the forward-reachable set of accumulated costs per stage and state.
///  grid:  an equidistant grid with linear interpolation.
enum class AxisMode { exact, grid };

/// Values of one state on one t-level, as a function of s.
struct ValueSlice {
  std::vector<double> s;
  std::vector<double> value;

  /// Linear interpolation in s; constant below the first point and linear with
  /// `tail_slope` above the last one.
  double at(double s_query, double tail_slope) const;
  /// Value at a point that must be present; throws std::logic_error otherwise.
  double exact_at(double s_query) const;
};

struct ValueLayer {
  double t = 1.0;
  std::vector<ValueSlice> states;
};

struct ValueStage {
  std::vector<ValueLayer> layers;
};

/// Stage-indexed value functions J_n on the extended grid. A finite-horizon
/// table holds stages 0..N-1 (J_N is g(s + t c_N(x)) in closed form); an
/// infinite-horizon table holds one stationary stage whose layers are the
/// t-levels beta^j.
struct ValueTable {
  std::vector<ValueStage> stages;
  double tail_slope = 0.0;
  AxisMode mode = AxisMode::exact;
};

struct RuleSlice {
  std::vector<double> s;
  std::vector<int> action;
  /// Action at the grid point nearest to s.
  int at(double s_query) const;
};

struct RuleLayer {
  double t = 1.0;
  std::vector<RuleSlice> states;
};

struct RuleStage {
  std::vector<RuleLayer> layers;
};

/// Deterministic Markov decision rules on the extended state space. One stage
/// entry means a stationary policy.
class MarkovPolicy {
 public:
  std::vector<RuleStage> stages;

  /// Rule lookup: nearest t-level, then nearest s-point.
  int action(int n, int x, double s, double t) const;
  bool stationary() const { return stages.size() == 1; }

  /// The same action in every state; throws ContractViolation where it is not admissible.
  static MarkovPolicy constant(const MDPModel& model, int action);
};

/// Largest violations of the value-space invariants: increasing in s, increasing
/// in t (layers sharing an s-grid), and bounded below by g(s).
struct InvariantReport {
  std::size_t points = 0;
  double max_s_decrease = 0.0;
  double max_t_decrease = 0.0;
  double max_below_g = 0.0;

  bool holds(double tol) const {
    return max_s_decrease <= tol && max_t_decrease <= tol && max_below_g <= tol;
  }
};

InvariantReport check_value_stage(const ValueStage& stage, const std::function<double(double)>& g);
InvariantReport check_value_table(const ValueTable& table, const std::function<double(double)>& g);

}  // namespace srm::mdp
