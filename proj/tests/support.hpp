#pragma once

// Shared generators and brute-force references for the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "srm/mdp/model.hpp"
#include "srm/risk/distribution.hpp"
#include "srm/risk/spectrum.hpp"

namespace srm::test {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline std::vector<double> random_probs(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) total += (v = rng.uniform(0.05, 1.0));
  for (double& v : p) v /= total;
  return p;
}

/// Up to `max_atoms` atoms in [lo, hi]; with `lattice` > 0 atoms are multiples of it.
inline DiscreteDistribution random_dist(Rng& rng, int max_atoms, double lo = 0.0, double hi = 10.0,
                                        double lattice = 0.0) {
  const int n = rng.integer(1, max_atoms);
  std::vector<double> atoms(static_cast<std::size_t>(n));
  for (double& a : atoms) {
    a = rng.uniform(lo, hi);
    if (lattice > 0.0) a = std::round(a / lattice) * lattice;
  }
  return DiscreteDistribution(atoms, random_probs(rng, atoms.size()));
}

/// Increasing step spectrum with up to `max_steps` steps; breakpoints on a 1/1000 lattice.
inline StepSpectrum random_spectrum(Rng& rng, int max_steps) {
  const int steps = rng.integer(1, max_steps);
  std::vector<double> cuts;
  while (static_cast<int>(cuts.size()) < steps - 1) {
    const double u = rng.integer(1, 999) / 1000.0;
    if (std::find(cuts.begin(), cuts.end(), u) == cuts.end()) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bp{0.0};
  bp.insert(bp.end(), cuts.begin(), cuts.end());
  bp.push_back(1.0);
  std::vector<double> vals(static_cast<std::size_t>(steps));
  double level = rng.coin(0.3) ? 0.0 : rng.uniform(0.0, 1.0);
  for (double& v : vals) {
    v = level;
    level += rng.uniform(0.0, 2.0);
  }
  double mass = 0.0;
  for (std::size_t j = 0; j < vals.size(); ++j) mass += vals[j] * (bp[j + 1] - bp[j]);
  if (mass <= 0.0) {
    vals.back() = 1.0;
    mass = bp.back() - bp[bp.size() - 2];
  }
  for (double& v : vals) v /= mass;
  return StepSpectrum(bp, vals);
}

/// Quantile by linear scan of the cumulative sums.
inline double brute_quantile(const DiscreteDistribution& d, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d.probs()[i];
    if (acc >= u - 1e-12) return d.atoms()[i];
  }
  return d.max();
}

/// Midpoint rule for the spectral integral on n cells.
inline double brute_spectral(const DiscreteDistribution& d, const StepSpectrum& spec, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    acc += brute_quantile(d, u) * spec(u);
  }
  return acc / static_cast<double>(n);
}

/// One-state model: action a has cost atoms costs[a] with probabilities probs.
inline mdp::MDPModel single_state_model(const std::vector<std::vector<double>>& costs,
                                        const std::vector<double>& probs, int horizon, double beta) {
  mdp::MDPModel m;
  m.states = {0.0};
  for (std::size_t a = 0; a < costs.size(); ++a) m.actions.push_back("a" + std::to_string(a + 1));
  m.horizon = horizon;
  m.discount = beta;
  m.terminal_cost = {0.0};
  mdp::StageData st;
  st.probs = probs;
  st.admissible = {{}};
  for (std::size_t a = 0; a < costs.size(); ++a) {
    st.admissible[0].push_back(static_cast<int>(a));
    for (double c : costs[a]) {
      st.next.push_back(0);
      st.cost.push_back(c);
    }
  }
  m.stages = {st};
  m.cost_cap = m.max_cost();
  return m;
}

/// The two-action instance {a1: cost 1 surely; a2: cost 0 or 2.2 with probability 1/2}.
inline mdp::MDPModel micro_model(int horizon = 1) {
  return single_state_model({{1.0, 1.0}, {0.0, 2.2}}, {0.5, 0.5}, horizon, 1.0);
}

struct MicroShape {
  int max_states = 3;
  int max_actions = 3;
  int max_atoms = 3;
  int max_horizon = 3;
  double cost_lattice = 0.25;  ///< costs are multiples of this in [0, 2]
};

/// Random finite model with possibly non-stationary data and sparse admissible sets.
inline mdp::MDPModel random_micro(Rng& rng, const MicroShape& shape) {
  mdp::MDPModel m;
  const int X = rng.integer(1, shape.max_states);
  const int A = rng.integer(1, shape.max_actions);
  const int N = rng.integer(1, shape.max_horizon);
  for (int x = 0; x < X; ++x) m.states.push_back(x);
  for (int a = 0; a < A; ++a) m.actions.push_back("a" + std::to_string(a));
  m.horizon = N;
  m.discount = rng.coin() ? 1.0 : rng.uniform(0.5, 1.0);
  const bool stationary = rng.coin();
  const int stages = stationary ? 1 : N;
  for (int n = 0; n < stages; ++n) {
    mdp::StageData st;
    const int Z = rng.integer(1, shape.max_atoms);
    st.probs = random_probs(rng, static_cast<std::size_t>(Z));
    st.admissible.resize(static_cast<std::size_t>(X));
    for (int x = 0; x < X; ++x) {
      for (int a = 0; a < A; ++a) {
        if (rng.coin(0.8)) st.admissible[static_cast<std::size_t>(x)].push_back(a);
      }
      if (st.admissible[static_cast<std::size_t>(x)].empty()) st.admissible[static_cast<std::size_t>(x)].push_back(rng.integer(0, A - 1));
      for (int a = 0; a < A; ++a) {
        for (int z = 0; z < Z; ++z) {
          st.next.push_back(rng.integer(0, X - 1));
          st.cost.push_back(shape.cost_lattice * rng.integer(0, static_cast<int>(2.0 / shape.cost_lattice)));
        }
      }
    }
    m.stages.push_back(std::move(st));
  }
  m.terminal_cost.resize(static_cast<std::size_t>(X));
  for (double& c : m.terminal_cost) c = shape.cost_lattice * rng.integer(0, static_cast<int>(1.0 / shape.cost_lattice));
  m.cost_cap = m.max_cost();
  return m;
}

}  // namespace srm::test
