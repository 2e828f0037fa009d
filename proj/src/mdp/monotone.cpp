#include "srm/mdp/monotone.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace srm::mdp {

std::string MonotoneWitness::describe() const {
  std::string out = "stage " + std::to_string(stage) + ", states " + std::to_string(x_lo) + " < " +
                    std::to_string(x_hi);
  if (action >= 0) out += ", action " + std::to_string(action);
  if (atom >= 0) out += ", atom " + std::to_string(atom);
  return out;
}

namespace {

bool subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

MonotoneReport validate_monotone(const MDPModel& model) {
  MonotoneReport r;
  std::vector<int> order(model.state_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return model.states[a] < model.states[b]; });

  const int n_stages = static_cast<int>(model.stages.size());
  for (int n = 0; n < n_stages; ++n) {
    const StageData& st = model.stages[static_cast<std::size_t>(n)];
    const std::size_t Z = st.probs.size();
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        const int lo = order[i];
        const int hi = order[j];
        if (model.states[lo] == model.states[hi]) continue;
        const auto& d_lo = st.admissible[lo];
        const auto& d_hi = st.admissible[hi];
        const bool inc = subset(d_lo, d_hi);
        const bool dec = subset(d_hi, d_lo);
        r.admissible_increasing = r.admissible_increasing && inc;
        r.admissible_decreasing = r.admissible_decreasing && dec;
        if (!inc && !dec && !r.admissible_witness) r.admissible_witness = MonotoneWitness{n, lo, hi};

        for (int a : d_lo) {
          if (!std::binary_search(d_hi.begin(), d_hi.end(), a)) continue;
          for (std::size_t z = 0; z < Z; ++z) {
            const std::size_t il = model.index(n, lo, a, static_cast<int>(z));
            const std::size_t ih = model.index(n, hi, a, static_cast<int>(z));
            if (model.states[st.next[il]] > model.states[st.next[ih]]) {
              r.transition_increasing = false;
              if (!r.transition_witness) {
                r.transition_witness = MonotoneWitness{n, lo, hi, a, static_cast<int>(z)};
              }
            }
            const double c_lo = st.cost[il];
            const double c_hi = st.cost[ih];
            if (c_lo > c_hi) r.cost_increasing = false;
            if (c_lo < c_hi) r.cost_decreasing = false;
            if (!r.cost_increasing && !r.cost_decreasing && !r.cost_witness) {
              r.cost_witness = MonotoneWitness{n, lo, hi, a, static_cast<int>(z)};
            }
          }
        }
      }
    }
  }
  return r;
}

}  // namespace srm::mdp
