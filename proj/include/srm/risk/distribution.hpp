#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace srm {

/// Finite discrete law. Atoms are strictly increasing; duplicate atoms are
/// merged and probabilities below 1e-15 dropped at construction, after which
/// the probabilities are renormalized.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> atoms, std::vector<double> probs);

  static DiscreteDistribution point_mass(double value);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> probs() const { return probs_; }
  /// Cumulative probabilities F(atom_i); the last entry is exactly 1.
  std::span<const double> cumulative() const { return cumulative_; }
  std::size_t size() const { return atoms_.size(); }

  double min() const { return atoms_.front(); }
  double max() const { return atoms_.back(); }
  double mean() const;
  double cdf(double x) const;
  double expectation(const std::function<double(double)>& f) const;

  DiscreteDistribution shifted(double m) const;
  DiscreteDistribution scaled(double lambda) const;
  DiscreteDistribution mapped(const std::function<double(double)>& f) const;

  /// Law of X + Y for independent X, Y (exact convolution).
  static DiscreteDistribution sum_independent(const DiscreteDistribution& x,
                                              const DiscreteDistribution& y);

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace srm
