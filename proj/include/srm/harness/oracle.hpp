#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "srm/mdp/model.hpp"
#include "srm/mdp/solver.hpp"
#include "srm/risk/spectrum.hpp"

namespace srm::harness {

struct OracleResult {
  double value = 0.0;
  std::string policy;         ///< decisions of the argmin, one per history node
  double policies = 0.0;      ///< number of deterministic history-dependent policies
};

/// Number of deterministic history-dependent policies of a finite-horizon
/// model started in x0 (branches with equal successor and cost merged).
/// Saturates at +inf.
double count_policies(const mdp::MDPModel& model, int x0);

/// Minimum of rho_phi(total discounted cost) over every deterministic
/// history-dependent policy, by full enumeration. Throws CapExceeded when the
/// policy count exceeds `policy_cap`.
OracleResult oracle_exact_optimum(const mdp::MDPModel& model, const StepSpectrum& spec, int x0,
                                  double policy_cap);

/// min over history-dependent policies of E[g(total cost)], by backward
/// induction on the unmerged scenario tree. Throws CapExceeded when the tree
/// has more than `node_cap` nodes.
double oracle_min_expected(const mdp::MDPModel& model, const mdp::Disutility& g, int x0,
                           double node_cap = 1e7);

struct GapRow {
  std::size_t m = 0;
  double lattice_points = 0.0;
  double best = 0.0;     ///< smallest K_m on the lattice
  double oracle = 0.0;
  double gap = 0.0;      ///< best - oracle
  double bound = 0.0;    ///< 2 phi1 c_hat / (m - 1)
  std::vector<double> best_y;
};

/// Exhaustive scan of K_m over a lattice in the knot-value polytope: g(0) on
/// multiples of `pitch` in [0, c_hat], slopes on multiples of pitch / h in
/// [0, phi1] (h the knot spacing). Throws CapExceeded when a lattice has more
/// than `lattice_cap` points.
std::vector<GapRow> oracle_outer_gap(const mdp::MDPModel& model, const StepSpectrum& spec, int x0,
                                     const std::vector<std::size_t>& m_list, double pitch,
                                     double oracle_value, double lattice_cap = 2e5,
                                     const mdp::InnerOptions& inner = {});

}  // namespace srm::harness
