#pragma once

#include <optional>
#include <string>

#include "srm/mdp/model.hpp"

namespace srm::mdp {

/// A pair of states (by index, x_lo having the smaller state value) where a
/// monotonicity property fails, with the action and atom involved if any.
struct MonotoneWitness {
  int stage = 0;
  int x_lo = 0;
  int x_hi = 0;
  int action = -1;
  int atom = -1;
  std::string describe() const;
};

struct MonotoneReport {
  bool admissible_increasing = true;  ///< x <= x' implies D(x) subset of D(x')
  bool admissible_decreasing = true;  ///< x <= x' implies D(x') subset of D(x)
  bool transition_increasing = true;  ///< T(., a, z) increasing wherever a is admissible
  bool cost_increasing = true;        ///< realized one-stage cost increasing in x
  bool cost_decreasing = true;

  std::optional<MonotoneWitness> admissible_witness;  ///< pair breaking both inclusions
  std::optional<MonotoneWitness> transition_witness;
  std::optional<MonotoneWitness> cost_witness;        ///< pair breaking both cost directions

  /// Values increasing in x: D decreasing, T increasing, cost increasing.
  bool value_increasing_variant() const {
    return admissible_decreasing && transition_increasing && cost_increasing;
  }
  /// Values decreasing in x: D increasing, T increasing, cost decreasing.
  bool value_decreasing_variant() const {
    return admissible_increasing && transition_increasing && cost_decreasing;
  }
};

/// Diagnostic check of the finite model data along the sorted state values.
MonotoneReport validate_monotone(const MDPModel& model);

}  // namespace srm::mdp
