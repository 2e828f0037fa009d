#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "srm/mdp/model.hpp"
#include "srm/risk/gpoly.hpp"
#include "srm/risk/spectrum.hpp"

namespace srm::outer {

/// Uniform bound c_hat on the total discounted cost of the model.
double cost_cap(const mdp::MDPModel& model);

/// Smallest m >= 2 with 2 phi1 c_hat / (m - 1) <= epsilon.
std::size_t grid_size_from_epsilon(double phi1, double c_hat, double epsilon);

/// 2 phi1 c_hat / (m - 1): restriction error of the knot-value polytope.
double error_bound(std::size_t m, double phi1, double c_hat);

struct Projection {
  GPoly g;
  bool clipped = false;  ///< some slope had to be moved into [0, phi1]
};

/// Interpolation of g at m equidistant knots on [0, c_hat], slopes clipped into [0, phi1].
Projection project_pm(const std::function<double(double)>& g, std::size_t m, double c_hat,
                      double phi1);

/// g*(xi) = max_k (s_k xi - y_k) for 0 <= xi <= phi1.
double conjugate_closed_form(const GPoly& g, double xi);

/// Integral over u of g*(phi(u)), exact for step spectra.
double conjugate_integral(const GPoly& g, const StepSpectrum& spec);

/// Nearest point of the knot-value polytope in slope coordinates: isotonic
/// regression of the slopes (pool adjacent violators), clipped into [0, phi1],
/// with y_1 clamped into [0, c_hat]. Feasible input is returned unchanged.
std::vector<double> isotonic_project(const std::vector<double>& y, double c_hat, double phi1);

}  // namespace srm::outer
