#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace srm::mdp {

/// Data of one decision epoch. Tables are indexed [(x * actions + a) * atoms + z].
struct StageData {
  std::vector<std::vector<int>> admissible;  ///< per state, sorted action indices
  std::vector<double> probs;                 ///< disturbance atom probabilities
  std::vector<int> next;                     ///< successor state index
  std::vector<double> cost;                  ///< realized one-stage cost c(x, a, T(x, a, z))

  friend bool operator==(const StageData&, const StageData&) = default;
};

/// Finite decision model. A single StageData entry means stationary data; a
/// finite horizon N may instead carry N entries, one per epoch.
struct MDPModel {
  std::vector<double> states;         ///< real state values (sorted for monotone checks)
  std::vector<std::string> actions;
  std::vector<StageData> stages;
  std::vector<double> terminal_cost;  ///< c_N(x), zero for infinite horizon
  double discount = 1.0;
  std::optional<int> horizon;         ///< nullopt: infinite horizon
  double cost_cap = 0.0;              ///< upper bound on every stage and terminal cost

  std::size_t state_count() const { return states.size(); }
  std::size_t action_count() const { return actions.size(); }
  bool stationary() const { return stages.size() == 1; }
  bool infinite() const { return !horizon.has_value(); }

  const StageData& stage(int n) const { return stationary() ? stages.front() : stages.at(n); }
  std::size_t atom_count(int n) const { return stage(n).probs.size(); }
  std::size_t index(int n, int x, int a, int z) const {
    return (static_cast<std::size_t>(x) * action_count() + static_cast<std::size_t>(a)) *
               atom_count(n) +
           static_cast<std::size_t>(z);
  }
  int next_state(int n, int x, int a, int z) const { return stage(n).next[index(n, x, a, z)]; }
  double stage_cost(int n, int x, int a, int z) const { return stage(n).cost[index(n, x, a, z)]; }
  const std::vector<int>& admissible(int n, int x) const { return stage(n).admissible[x]; }
  bool is_admissible(int n, int x, int a) const;

  /// Largest stage or terminal cost in the tables.
  double max_cost() const;

  /// Throws ConfigError describing the first broken invariant.
  void validate() const;

  friend bool operator==(const MDPModel&, const MDPModel&) = default;
};

/// Uniform bound on the total discounted cost:
/// sum_{k=0}^{N} beta^k c_bar (finite N) or c_bar / (1 - beta).
double total_cost_bound(const MDPModel& model);

/// Element (x, s, t) of the extended state space: state, accumulated discounted
/// cost, current discount weight.
struct ExtendedState {
  int x;
  double s;
  double t;
};

/// (T(x,a,z), s + t c(x,a,T(x,a,z)), beta t). Throws ContractViolation for an
/// inadmissible action.
ExtendedState extend_transition(const MDPModel& model, int n, const ExtendedState& es, int a,
                                int z);

}  // namespace srm::mdp
