#pragma once

#include <span>
#include <vector>

namespace srm {

/// One Expected Shortfall component of a spectral mixture.
struct EsComponent {
  double alpha;
  double weight;
};

/// Right-continuous increasing step spectrum
///   phi(u) = values[j] on [breakpoints[j], breakpoints[j+1]),  phi(1) = values.back().
/// Breakpoints run from 0 to 1; the spectrum integrates to one.
class StepSpectrum {
 public:
  StepSpectrum(std::vector<double> breakpoints, std::vector<double> values);

  static StepSpectrum expectation();
  static StepSpectrum expected_shortfall(double alpha);
  static StepSpectrum es_mixture(std::span<const EsComponent> components);

  double operator()(double u) const;
  /// phi(1), the largest value and the Lipschitz bound of the optimal disutility.
  double max_value() const { return values_.back(); }

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t steps() const { return values_.size(); }
  double width(std::size_t j) const { return breakpoints_[j + 1] - breakpoints_[j]; }

  friend bool operator==(const StepSpectrum&, const StepSpectrum&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Probability measure mu over ES levels: rho_phi = sum_j weights[j] * ES_{levels[j]}.
struct MixtureMeasure {
  std::vector<double> levels;
  std::vector<double> weights;
};

}  // namespace srm
