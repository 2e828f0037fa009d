#include "srm/risk/risk.hpp"

#include <algorithm>
#include <cmath>

#include "srm/errors.hpp"

namespace srm {

namespace {

// Cumulative probabilities carry rounding from the running sum.
constexpr double kLevelTolerance = 1e-12;

// F^{-1}(alpha) with the convention F^{-1}(0) = smallest atom.
double level_quantile(const DiscreteDistribution& dist, double alpha) {
  if (alpha <= 0.0) return dist.min();
  return quantile(dist, alpha);
}

}  // namespace

double quantile(const DiscreteDistribution& dist, double u) {
  if (!(u > 0.0 && u <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
  const auto cum = dist.cumulative();
  for (std::size_t i = 0; i < cum.size(); ++i) {
    if (cum[i] >= u - kLevelTolerance) return dist.atoms()[i];
  }
  return dist.max();
}

double expected_shortfall(const DiscreteDistribution& dist, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("ES level must lie in [0, 1)");
  const auto atoms = dist.atoms();
  const auto cum = dist.cumulative();
  double acc = 0.0;
  double lo = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double hi = cum[i];
    const double overlap = hi - std::max(lo, alpha);
    if (overlap > 0.0) acc += atoms[i] * overlap;
    lo = hi;
  }
  return acc / (1.0 - alpha);
}

double spectral_risk(const DiscreteDistribution& dist, const StepSpectrum& spec) {
  const auto atoms = dist.atoms();
  const auto cum = dist.cumulative();
  const auto bp = spec.breakpoints();
  const auto phi = spec.values();

  // Walk the merged partition of the quantile plateaus and spectrum steps.
  double acc = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double lo = 0.0;
  while (i < atoms.size() && j < phi.size()) {
    const double hi = std::min(cum[i], bp[j + 1]);
    if (hi > lo) acc += atoms[i] * phi[j] * (hi - lo);
    lo = std::max(lo, hi);
    if (cum[i] <= hi) ++i;
    if (bp[j + 1] <= hi) ++j;
  }
  return acc;
}

MixtureMeasure mixture_measure(const StepSpectrum& spec) {
  MixtureMeasure mu;
  const auto bp = spec.breakpoints();
  const auto phi = spec.values();
  double previous = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const double jump = phi[j] - previous;
    if (jump > 0.0) {
      mu.levels.push_back(bp[j]);
      mu.weights.push_back((1.0 - bp[j]) * jump);
    }
    previous = phi[j];
  }
  return mu;
}

double spectral_risk_via_mixture(const DiscreteDistribution& dist, const StepSpectrum& spec) {
  const MixtureMeasure mu = mixture_measure(spec);
  double acc = 0.0;
  for (std::size_t j = 0; j < mu.levels.size(); ++j) {
    acc += mu.weights[j] * expected_shortfall(dist, mu.levels[j]);
  }
  return acc;
}

double ru_objective(const DiscreteDistribution& dist, double alpha, double q) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("ES level must lie in [0, 1)");
  double excess = 0.0;
  const auto atoms = dist.atoms();
  const auto probs = dist.probs();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i] > q) excess += (atoms[i] - q) * probs[i];
  }
  return q + excess / (1.0 - alpha);
}

double distortion(const StepSpectrum& spec, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("distortion argument must lie in [0, 1]");
  const auto bp = spec.breakpoints();
  const auto phi = spec.values();
  double acc = 0.0;
  for (std::size_t j = 0; j < phi.size() && bp[j] < u; ++j) {
    acc += phi[j] * (std::min(u, bp[j + 1]) - bp[j]);
  }
  return acc;
}

GPoly minimizer_g(const StepSpectrum& spec, const DiscreteDistribution& dist,
                  std::optional<double> cap, std::size_t grid_points) {
  if (dist.min() < 0.0) throw DomainError("minimizer_g needs nonnegative atoms");
  const MixtureMeasure mu = mixture_measure(spec);

  std::vector<double> q(mu.levels.size());
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = level_quantile(dist, mu.levels[j]);

  double top = std::max(dist.max(), cap.value_or(0.0));
  if (!(top > 0.0)) top = 1.0;

  std::vector<double> knots{0.0, top};
  for (double k : q) {
    if (k > 0.0 && k < top) knots.push_back(k);
  }
  if (grid_points >= 2) {
    const double h = top / static_cast<double>(grid_points - 1);
    for (std::size_t k = 1; k + 1 < grid_points; ++k) knots.push_back(static_cast<double>(k) * h);
  }
  std::sort(knots.begin(), knots.end());
  const double merge = 1e-12 * top;
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [merge](double a, double b) { return b - a <= merge; }),
              knots.end());
  knots.back() = top;

  auto g = [&](double x) {
    double acc = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      acc += mu.weights[j] * (q[j] + std::max(0.0, x - q[j]) / (1.0 - mu.levels[j]));
    }
    return acc;
  };
  std::vector<double> values(knots.size());
  std::transform(knots.begin(), knots.end(), values.begin(), g);
  return GPoly::from_knots(std::move(knots), std::move(values), spec.max_value());
}

}  // namespace srm
