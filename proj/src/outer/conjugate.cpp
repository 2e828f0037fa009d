#include "srm/outer/conjugate.hpp"

#include <algorithm>
#include <cmath>

#include "srm/errors.hpp"

namespace srm::outer {

double cost_cap(const mdp::MDPModel& model) {
  if (!std::isfinite(model.cost_cap) || model.cost_cap < 0.0) {
    throw DomainError("cost cap must be finite and nonnegative");
  }
  return mdp::total_cost_bound(model);
}

std::size_t grid_size_from_epsilon(double phi1, double c_hat, double epsilon) {
  if (!(phi1 > 0.0) || !(c_hat > 0.0) || !(epsilon > 0.0)) {
    throw DomainError("grid size needs positive phi1, c_hat and epsilon");
  }
  const double total = 2.0 * phi1 * c_hat;
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(total / epsilon)));
  // the quotient is rounded, so settle k on the exact condition total / k <= epsilon
  while (total / static_cast<double>(k) > epsilon) ++k;
  while (k > 1 && total / static_cast<double>(k - 1) <= epsilon) --k;
  return k + 1;
}

double error_bound(std::size_t m, double phi1, double c_hat) {
  if (m < 2) throw DomainError("error bound needs m >= 2");
  return 2.0 * phi1 * c_hat / static_cast<double>(m - 1);
}

Projection project_pm(const std::function<double(double)>& g, std::size_t m, double c_hat,
                      double phi1) {
  if (m < 2) throw DomainError("projection needs m >= 2");
  const double h = c_hat / static_cast<double>(m - 1);
  std::vector<double> y(m);
  for (std::size_t k = 0; k < m; ++k) y[k] = g(k + 1 == m ? c_hat : static_cast<double>(k) * h);
  bool clipped = false;
  std::vector<double> z(m);
  z[0] = y[0];
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double slope = (y[k + 1] - y[k]) / h;
    const double c = std::clamp(slope, 0.0, phi1);
    if (c != slope) clipped = true;
    z[k + 1] = clipped ? z[k] + c * h : y[k + 1];
  }
  // Build only after clipping: the raw samples may be steeper than phi1.
  return Projection{GPoly::on_grid(c_hat, std::move(z), phi1), clipped};
}

double conjugate_closed_form(const GPoly& g, double xi) {
  const double phi1 = g.max_slope();
  if (xi < -1e-12 || xi > phi1 + 1e-12 * std::max(1.0, phi1)) {
    throw DomainError("conjugate argument outside [0, phi(1)]");
  }
  const auto slopes = g.slopes();
  const auto k = static_cast<std::size_t>(std::upper_bound(slopes.begin(), slopes.end(), xi) -
                                          slopes.begin());
  return g.knots()[k] * xi - g.values()[k];
}

double conjugate_integral(const GPoly& g, const StepSpectrum& spec) {
  double acc = 0.0;
  for (std::size_t j = 0; j < spec.steps(); ++j) {
    acc += spec.width(j) * conjugate_closed_form(g, spec.values()[j]);
  }
  return acc;
}

std::vector<double> isotonic_project(const std::vector<double>& y, double c_hat, double phi1) {
  const std::size_t m = y.size();
  if (m < 2) throw DomainError("projection needs m >= 2");
  const double h = c_hat / static_cast<double>(m - 1);
  std::vector<double> d(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) d[k] = (y[k + 1] - y[k]) / h;

  // Rounding in a rebuilt point must not trigger a second projection.
  const double tol = 1e-12 * std::max(1.0, phi1);
  bool feasible = y[0] >= 0.0 && y[0] <= c_hat;
  for (std::size_t k = 0; k < d.size() && feasible; ++k) {
    feasible = d[k] >= -tol && d[k] <= phi1 + tol && (k == 0 || d[k] >= d[k - 1] - tol);
  }
  if (feasible) return y;

  // pool adjacent violators with unit weights
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double v : d) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const std::size_t n = count.back() + count[count.size() - 2];
      const double merged = (level.back() * static_cast<double>(count.back()) +
                             level[level.size() - 2] * static_cast<double>(count[count.size() - 2])) /
                            static_cast<double>(n);
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = n;
    }
  }
  std::vector<double> out(m);
  out[0] = std::clamp(y[0], 0.0, c_hat);
  std::size_t k = 0;
  for (std::size_t b = 0; b < level.size(); ++b) {
    const double slope = std::clamp(level[b], 0.0, phi1);
    for (std::size_t i = 0; i < count[b]; ++i, ++k) out[k + 1] = out[k] + slope * h;
  }
  return out;
}

}  // namespace srm::outer
