#include "srm/mdp/tables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "srm/errors.hpp"

namespace srm::mdp {

double ValueSlice::at(double q, double tail_slope) const {
  if (q <= s.front()) return value.front();
  if (q >= s.back()) return value.back() + tail_slope * (q - s.back());
  auto it = std::upper_bound(s.begin(), s.end(), q);
  const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
  const double w = (q - s[k]) / (s[k + 1] - s[k]);
  return value[k] + w * (value[k + 1] - value[k]);
}

double ValueSlice::exact_at(double q) const {
  auto it = std::lower_bound(s.begin(), s.end(), q);
  if (it == s.end() || *it != q) {
    throw std::logic_error("accumulated cost missing from the reachable set");
  }
  return value[static_cast<std::size_t>(it - s.begin())];
}

int RuleSlice::at(double q) const {
  auto it = std::lower_bound(s.begin(), s.end(), q);
  if (it == s.end()) return action.back();
  std::size_t k = static_cast<std::size_t>(it - s.begin());
  if (k > 0 && (q - s[k - 1]) <= (s[k] - q)) --k;
  return action[k];
}

int MarkovPolicy::action(int n, int x, double s, double t) const {
  const RuleStage& st = stationary() ? stages.front() : stages.at(static_cast<std::size_t>(n));
  std::size_t best = 0;
  double gap = std::abs(st.layers[0].t - t);
  for (std::size_t l = 1; l < st.layers.size(); ++l) {
    const double d = std::abs(st.layers[l].t - t);
    if (d < gap) {
      gap = d;
      best = l;
    }
  }
  return st.layers[best].states.at(static_cast<std::size_t>(x)).at(s);
}

MarkovPolicy MarkovPolicy::constant(const MDPModel& model, int action) {
  MarkovPolicy policy;
  const std::size_t n_stages = model.stationary() ? 1 : model.stages.size();
  for (std::size_t n = 0; n < n_stages; ++n) {
    RuleLayer layer;
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      if (!model.is_admissible(static_cast<int>(n), static_cast<int>(x), action)) {
        throw ContractViolation("constant action " + std::to_string(action) +
                                " is not admissible in state " + std::to_string(x));
      }
      layer.states.push_back(RuleSlice{{0.0}, {action}});
    }
    policy.stages.push_back(RuleStage{{std::move(layer)}});
  }
  return policy;
}

namespace {

void accumulate(InvariantReport& into, const InvariantReport& r) {
  into.points += r.points;
  into.max_s_decrease = std::max(into.max_s_decrease, r.max_s_decrease);
  into.max_t_decrease = std::max(into.max_t_decrease, r.max_t_decrease);
  into.max_below_g = std::max(into.max_below_g, r.max_below_g);
}

}  // namespace

InvariantReport check_value_stage(const ValueStage& stage, const std::function<double(double)>& g) {
  InvariantReport r;
  for (const ValueLayer& layer : stage.layers) {
    for (const ValueSlice& slice : layer.states) {
      for (std::size_t k = 0; k < slice.s.size(); ++k) {
        ++r.points;
        r.max_below_g = std::max(r.max_below_g, g(slice.s[k]) - slice.value[k]);
        if (k > 0) r.max_s_decrease = std::max(r.max_s_decrease, slice.value[k - 1] - slice.value[k]);
      }
    }
  }
  // t-monotonicity between layers sharing the same s-points
  std::vector<std::size_t> order(stage.layers.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return stage.layers[a].t < stage.layers[b].t; });
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const ValueLayer& lo = stage.layers[order[i]];
    const ValueLayer& hi = stage.layers[order[i + 1]];
    for (std::size_t x = 0; x < lo.states.size() && x < hi.states.size(); ++x) {
      if (lo.states[x].s != hi.states[x].s) continue;
      for (std::size_t k = 0; k < lo.states[x].s.size(); ++k) {
        r.max_t_decrease =
            std::max(r.max_t_decrease, lo.states[x].value[k] - hi.states[x].value[k]);
      }
    }
  }
  return r;
}

InvariantReport check_value_table(const ValueTable& table, const std::function<double(double)>& g) {
  InvariantReport r;
  for (const ValueStage& st : table.stages) accumulate(r, check_value_stage(st, g));
  return r;
}

}  // namespace srm::mdp
