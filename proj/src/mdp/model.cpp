#include "srm/mdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srm/errors.hpp"

namespace srm::mdp {

bool MDPModel::is_admissible(int n, int x, int a) const {
  const auto& d = admissible(n, x);
  return std::binary_search(d.begin(), d.end(), a);
}

double MDPModel::max_cost() const {
  double c = 0.0;
  for (const auto& st : stages) {
    for (double v : st.cost) c = std::max(c, v);
  }
  for (double v : terminal_cost) c = std::max(c, v);
  return c;
}

void MDPModel::validate() const {
  const std::size_t X = states.size();
  const std::size_t A = actions.size();
  if (X == 0) throw ConfigError("model has no states");
  if (A == 0) throw ConfigError("model has no actions");
  if (stages.empty()) throw ConfigError("model has no stage data");
  if (!(discount > 0.0) || !std::isfinite(discount)) throw ConfigError("discount must be > 0");
  if (horizon) {
    if (*horizon < 1) throw ConfigError("finite horizon must be >= 1");
    if (!stationary() && stages.size() != static_cast<std::size_t>(*horizon)) {
      throw ConfigError("non-stationary model needs one stage entry per epoch");
    }
  } else {
    if (!stationary()) throw ConfigError("infinite horizon requires stationary data");
    if (!(discount < 1.0)) throw ConfigError("infinite horizon requires discount < 1");
  }
  if (terminal_cost.size() != X) throw ConfigError("terminal_cost needs one entry per state");
  for (std::size_t x = 0; x < X; ++x) {
    if (!(terminal_cost[x] >= 0.0) || !std::isfinite(terminal_cost[x])) {
      throw ConfigError("terminal cost of state " + std::to_string(x) + " must be finite and >= 0");
    }
    if (!horizon && terminal_cost[x] != 0.0) {
      throw ConfigError("infinite horizon requires zero terminal cost");
    }
  }
  for (std::size_t n = 0; n < stages.size(); ++n) {
    const StageData& st = stages[n];
    const std::size_t Z = st.probs.size();
    if (Z == 0) throw ConfigError("stage " + std::to_string(n) + " has no disturbance atoms");
    double mass = 0.0;
    for (double p : st.probs) {
      if (!(p >= 0.0)) throw ConfigError("disturbance probabilities must be >= 0");
      mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9) throw ConfigError("disturbance probabilities must sum to 1");
    if (st.admissible.size() != X) throw ConfigError("admissible sets need one entry per state");
    for (std::size_t x = 0; x < X; ++x) {
      const auto& d = st.admissible[x];
      if (d.empty()) {
        throw ConfigError("empty admissible set at stage " + std::to_string(n) + ", state " +
                          std::to_string(x));
      }
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] < 0 || static_cast<std::size_t>(d[i]) >= A) {
          throw ConfigError("admissible action index out of range");
        }
        if (i > 0 && d[i] <= d[i - 1]) throw ConfigError("admissible sets must be sorted and unique");
      }
    }
    if (st.next.size() != X * A * Z || st.cost.size() != X * A * Z) {
      throw ConfigError("transition and cost tables must cover every (x, a, z)");
    }
    for (std::size_t i = 0; i < st.next.size(); ++i) {
      if (st.next[i] < 0 || static_cast<std::size_t>(st.next[i]) >= X) {
        throw ConfigError("transition target out of range");
      }
      if (!(st.cost[i] >= 0.0) || !std::isfinite(st.cost[i])) {
        throw ConfigError("stage costs must be finite and >= 0");
      }
    }
  }
  if (!(cost_cap >= max_cost())) throw ConfigError("cost_cap must bound every stage and terminal cost");
  if (!std::isfinite(cost_cap)) throw ConfigError("cost_cap must be finite");
}

double total_cost_bound(const MDPModel& model) {
  if (model.infinite()) {
    if (!(model.discount < 1.0)) throw DomainError("infinite horizon needs discount < 1");
    return model.cost_cap / (1.0 - model.discount);
  }
  double acc = 0.0;
  double w = 1.0;
  for (int k = 0; k <= *model.horizon; ++k) {
    acc += w * model.cost_cap;
    w *= model.discount;
  }
  return acc;
}

ExtendedState extend_transition(const MDPModel& model, int n, const ExtendedState& es, int a,
                                int z) {
  if (!model.is_admissible(n, es.x, a)) {
    throw ContractViolation("action " + std::to_string(a) + " is not admissible in state " +
                            std::to_string(es.x));
  }
  const std::size_t i = model.index(n, es.x, a, z);
  const StageData& st = model.stage(n);
  return {st.next[i], es.s + es.t * st.cost[i], model.discount * es.t};
}

}  // namespace srm::mdp
