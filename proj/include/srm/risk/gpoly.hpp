#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace srm {

/// Increasing convex piecewise-linear disutility on [0, cap].
///
/// Below 0 the function is constant (value at the first knot); above the cap
/// it continues linearly with slope `max_slope` (phi(1)). Slopes between knots
/// are nondecreasing and lie in [0, max_slope]. On an equidistant grid this is
/// an element of the knot-value polytope Gamma_m; `in_gamma` additionally
/// checks 0 <= g(0) <= cap.
class GPoly {
 public:
  /// Equidistant knots s_k = k * cap / (m - 1), k = 0..m-1.
  static GPoly on_grid(double cap, std::vector<double> values, double max_slope);
  /// Arbitrary strictly increasing knots starting at 0.
  static GPoly from_knots(std::vector<double> knots, std::vector<double> values,
                          double max_slope);

  double operator()(double s) const;

  double cap() const { return knots_.back(); }
  double max_slope() const { return max_slope_; }
  std::size_t size() const { return knots_.size(); }
  std::span<const double> knots() const { return knots_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slopes() const { return slopes_; }
  bool equidistant() const { return equidistant_; }
  bool in_gamma(double tol = 1e-9) const;

  /// g + kappa.
  GPoly shifted(double kappa) const;

 private:
  GPoly(std::vector<double> knots, std::vector<double> values, double max_slope,
        bool equidistant);

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  double max_slope_;
  bool equidistant_;
};

}  // namespace srm
