#include "srm/risk/gpoly.hpp"

#include <algorithm>
#include <cmath>

#include "srm/errors.hpp"

namespace srm {

namespace {
constexpr double kShapeTolerance = 1e-9;
}

GPoly::GPoly(std::vector<double> knots, std::vector<double> values, double max_slope,
             bool equidistant)
    : knots_(std::move(knots)),
      values_(std::move(values)),
      max_slope_(max_slope),
      equidistant_(equidistant) {
  if (knots_.size() < 2 || knots_.size() != values_.size()) {
    throw ConfigError("piecewise-linear g needs at least two knots and one value per knot");
  }
  if (!(max_slope_ >= 0.0) || !std::isfinite(max_slope_)) {
    throw ConfigError("maximal slope must be finite and >= 0");
  }
  if (knots_.front() != 0.0) throw ConfigError("first knot must be 0");
  slopes_.resize(knots_.size() - 1);
  const double scale = std::max(1.0, max_slope_);
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    if (!(knots_[k] < knots_[k + 1])) throw ConfigError("knots must be strictly increasing");
    if (!std::isfinite(values_[k]) || !std::isfinite(values_[k + 1])) {
      throw ConfigError("knot values must be finite");
    }
    slopes_[k] = (values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k]);
    if (slopes_[k] < -kShapeTolerance * scale || slopes_[k] > max_slope_ + kShapeTolerance * scale) {
      throw DomainError("slope of g outside [0, phi(1)]");
    }
    if (k > 0 && slopes_[k] < slopes_[k - 1] - kShapeTolerance * scale) {
      throw DomainError("g is not convex (decreasing slopes)");
    }
  }
}

GPoly GPoly::on_grid(double cap, std::vector<double> values, double max_slope) {
  if (!(cap > 0.0) || !std::isfinite(cap)) throw ConfigError("cap must be positive");
  const std::size_t m = values.size();
  if (m < 2) throw ConfigError("grid needs m >= 2");
  std::vector<double> knots(m);
  const double h = cap / static_cast<double>(m - 1);
  for (std::size_t k = 0; k < m; ++k) knots[k] = static_cast<double>(k) * h;
  knots.back() = cap;
  return GPoly(std::move(knots), std::move(values), max_slope, true);
}

GPoly GPoly::from_knots(std::vector<double> knots, std::vector<double> values, double max_slope) {
  return GPoly(std::move(knots), std::move(values), max_slope, false);
}

double GPoly::operator()(double s) const {
  if (s <= 0.0) return values_.front();
  if (s >= knots_.back()) return values_.back() + max_slope_ * (s - knots_.back());
  std::size_t k;
  if (equidistant_) {
    const double h = knots_.back() / static_cast<double>(knots_.size() - 1);
    k = std::min(static_cast<std::size_t>(s / h), knots_.size() - 2);
    // guard against the rounding of s / h at knot boundaries
    while (k > 0 && s < knots_[k]) --k;
    while (k + 2 < knots_.size() && s >= knots_[k + 1]) ++k;
  } else {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  }
  return values_[k] + slopes_[k] * (s - knots_[k]);
}

bool GPoly::in_gamma(double tol) const {
  const double c = cap();
  if (values_.front() < -tol * std::max(1.0, c) || values_.front() > c * (1.0 + tol)) return false;
  const double scale = std::max(1.0, max_slope_);
  for (std::size_t k = 0; k < slopes_.size(); ++k) {
    if (slopes_[k] < -tol * scale || slopes_[k] > max_slope_ + tol * scale) return false;
    if (k > 0 && slopes_[k] < slopes_[k - 1] - tol * scale) return false;
  }
  return true;
}

GPoly GPoly::shifted(double kappa) const {
  std::vector<double> v(values_);
  for (double& x : v) x += kappa;
  return GPoly(knots_, std::move(v), max_slope_, equidistant_);
}

}  // namespace srm
