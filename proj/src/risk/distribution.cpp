#include "srm/risk/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srm/errors.hpp"

namespace srm {

namespace {
constexpr double kDropBelow = 1e-15;
constexpr double kMassTolerance = 1e-9;
}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw ConfigError("distribution needs equally many (>0) atoms and probabilities");
  }
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i])) throw ConfigError("distribution atom is not finite");
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      throw ConfigError("distribution probability must be finite and >= 0");
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ConfigError("distribution probabilities must sum to 1");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  for (std::size_t i : order) {
    if (probs[i] < kDropBelow) continue;
    if (!atoms_.empty() && atoms_.back() == atoms[i]) {
      probs_.back() += probs[i];
    } else {
      atoms_.push_back(atoms[i]);
      probs_.push_back(probs[i]);
    }
  }
  if (atoms_.empty()) throw ConfigError("distribution has no mass");

  const double kept = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  for (double& p : probs_) p /= kept;

  cumulative_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
  return DiscreteDistribution({value}, {1.0});
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) m += atoms_[i] * probs_[i];
  return m;
}

double DiscreteDistribution::cdf(double x) const {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteDistribution::expectation(const std::function<double(double)>& f) const {
  double e = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) e += f(atoms_[i]) * probs_[i];
  return e;
}

DiscreteDistribution DiscreteDistribution::shifted(double m) const {
  return mapped([m](double x) { return x + m; });
}

DiscreteDistribution DiscreteDistribution::scaled(double lambda) const {
  return mapped([lambda](double x) { return lambda * x; });
}

DiscreteDistribution DiscreteDistribution::mapped(const std::function<double(double)>& f) const {
  std::vector<double> a(atoms_.size());
  std::transform(atoms_.begin(), atoms_.end(), a.begin(), f);
  return DiscreteDistribution(std::move(a), probs_);
}

DiscreteDistribution DiscreteDistribution::sum_independent(const DiscreteDistribution& x,
                                                           const DiscreteDistribution& y) {
  std::vector<double> a;
  std::vector<double> p;
  a.reserve(x.size() * y.size());
  p.reserve(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      a.push_back(x.atoms_[i] + y.atoms_[j]);
      p.push_back(x.probs_[i] * y.probs_[j]);
    }
  }
  return DiscreteDistribution(std::move(a), std::move(p));
}

}  // namespace srm
