#include "srm/risk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "srm/errors.hpp"

namespace srm {

namespace {
constexpr double kNormTolerance = 1e-9;
}

StepSpectrum::StepSpectrum(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty() || breakpoints_.size() != values_.size() + 1) {
    throw ConfigError("spectrum needs J values and J+1 breakpoints");
  }
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
    throw ConfigError("spectrum breakpoints must start at 0 and end at 1");
  }
  for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
    if (!(breakpoints_[j] < breakpoints_[j + 1])) {
      throw ConfigError("spectrum breakpoints must be strictly increasing");
    }
  }
  double mass = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j]) || values_[j] < 0.0) {
      throw ConfigError("spectrum values must be finite and >= 0");
    }
    if (j > 0 && values_[j] < values_[j - 1]) {
      throw ConfigError("spectrum values must be increasing");
    }
    mass += values_[j] * width(j);
  }
  if (std::abs(mass - 1.0) > kNormTolerance) {
    throw ConfigError("spectrum must integrate to 1");
  }
  for (double& v : values_) v /= mass;
}

StepSpectrum StepSpectrum::expectation() { return StepSpectrum({0.0, 1.0}, {1.0}); }

StepSpectrum StepSpectrum::expected_shortfall(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("ES level must lie in [0, 1)");
  if (alpha == 0.0) return expectation();
  return StepSpectrum({0.0, alpha, 1.0}, {0.0, 1.0 / (1.0 - alpha)});
}

StepSpectrum StepSpectrum::es_mixture(std::span<const EsComponent> components) {
  if (components.empty()) throw ConfigError("ES mixture needs at least one component");
  std::map<double, double> jumps;  // level -> sum of w / (1 - alpha)
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.alpha >= 0.0 && c.alpha < 1.0)) throw DomainError("ES level must lie in [0, 1)");
    if (!(c.weight >= 0.0)) throw ConfigError("ES mixture weights must be >= 0");
    total += c.weight;
    if (c.weight > 0.0) jumps[c.alpha] += c.weight / (1.0 - c.alpha);
  }
  if (std::abs(total - 1.0) > kNormTolerance) throw ConfigError("ES mixture weights must sum to 1");

  std::vector<double> bp{0.0};
  std::vector<double> vals;
  double level = 0.0;
  for (const auto& [alpha, jump] : jumps) {
    if (alpha > 0.0) {
      vals.push_back(level);
      bp.push_back(alpha);
    }
    level += jump;
  }
  vals.push_back(level);
  bp.push_back(1.0);
  return StepSpectrum(std::move(bp), std::move(vals));
}

double StepSpectrum::operator()(double u) const {
  if (u >= 1.0) return values_.back();
  if (u < 0.0) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

}  // namespace srm
