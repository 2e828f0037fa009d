#pragma once

#include <optional>

#include "srm/risk/distribution.hpp"
#include "srm/risk/gpoly.hpp"
#include "srm/risk/spectrum.hpp"

namespace srm {

/// Left-continuous quantile inf{x : F(x) >= u}, 0 < u <= 1.
double quantile(const DiscreteDistribution& dist, double u);

/// ES_alpha by exact integration over quantile plateaus, 0 <= alpha < 1.
double expected_shortfall(const DiscreteDistribution& dist, double alpha);

/// Integral of F^{-1}(u) phi(u) du over the merged breakpoint partition.
double spectral_risk(const DiscreteDistribution& dist, const StepSpectrum& spec);

/// Jumps of the spectrum reweighted by (1 - u): the ES mixture measure.
MixtureMeasure mixture_measure(const StepSpectrum& spec);

double spectral_risk_via_mixture(const DiscreteDistribution& dist, const StepSpectrum& spec);

/// q + E[(X - q)^+] / (1 - alpha).
double ru_objective(const DiscreteDistribution& dist, double alpha, double q);

/// Integral of phi over [0, u].
double distortion(const StepSpectrum& spec, double u);

/// Optimal disutility for a fixed cost law:
///   g(x) = sum_j w_j (q_j + (x - q_j)^+ / (1 - alpha_j)),  q_j = F^{-1}(alpha_j),
/// with F^{-1}(0) taken as the smallest atom. The returned GPoly has a knot at
/// every kink; its cap is max(max atom, `cap`) and, when `grid_points` >= 2,
/// the equidistant grid over [0, cap] is merged in. Atoms must be >= 0.
GPoly minimizer_g(const StepSpectrum& spec, const DiscreteDistribution& dist,
                  std::optional<double> cap = std::nullopt, std::size_t grid_points = 0);

}  // namespace srm
