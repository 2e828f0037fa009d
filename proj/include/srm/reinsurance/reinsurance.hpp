#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srm/mdp/model.hpp"
#include "srm/mdp/solver.hpp"
#include "srm/outer/outer.hpp"
#include "srm/risk/distribution.hpp"
#include "srm/risk/spectrum.hpp"

namespace srm::reinsurance {

enum class TreatyKind { stop_loss, proportional, identity };

/// Retained-loss function f: stop-loss min(y, a), proportional b y, or the identity.
struct Treaty {
  TreatyKind kind = TreatyKind::identity;
  double parameter = 0.0;

  static Treaty stop_loss(double a);
  static Treaty proportional(double b);
  static Treaty identity();

  double retained(double y) const;
  std::string kind_name() const;
  std::string label() const;
  /// Throws ConfigError for a < 0 or b outside [0, 1].
  void validate() const;

  friend bool operator==(const Treaty&, const Treaty&) = default;
};

TreatyKind parse_treaty_kind(const std::string& name);

class PremiumPrinciple {
 public:
  virtual ~PremiumPrinciple() = default;
  virtual double premium(const Treaty& treaty, const DiscreteDistribution& claims) const = 0;
};

/// (1 + theta) E[Y - f(Y)].
class ExpectedPremium final : public PremiumPrinciple {
 public:
  explicit ExpectedPremium(double theta);
  double premium(const Treaty& treaty, const DiscreteDistribution& claims) const override;

 private:
  double theta_;
};

double premium(const Treaty& treaty, const DiscreteDistribution& claims, double theta);

/// Equidistant surplus axis; states outside are clamped to its ends.
struct SurplusGrid {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;
};

struct ReinsuranceConfig {
  DiscreteDistribution claims = DiscreteDistribution::point_mass(0.0);
  DiscreteDistribution income = DiscreteDistribution::point_mass(0.0);
  double theta = 0.1;
  double discount = 1.0;
  int horizon = 1;
  double initial_surplus = 0.0;
  std::vector<Treaty> treaties;
  bool budget_constrained = false;
  double coc_rate = 1.0;
  /// nullopt: the surplus axis is the exact set of surpluses reachable within the horizon,
  /// so no transition before the horizon is snapped.
  std::optional<SurplusGrid> surplus_grid;

  void validate() const;
};

struct BuiltModel {
  mdp::MDPModel model;
  std::vector<Treaty> treaties;    ///< action list, identity included
  std::vector<double> premiums;    ///< per action
  int initial_state = 0;
  double z_hat = 0.0;              ///< largest premium-income atom
  double max_snap_error = 0.0;     ///< largest |x' - snapped x'| over states reachable within the horizon
  std::vector<double> claim_atom;  ///< claim value of each disturbance atom
  std::vector<double> income_atom; ///< income value of each disturbance atom
};

/// Surplus MDP with shifted one-stage cost f(y) + pi(f) + z_hat - z.
BuiltModel build_mdp(const ReinsuranceConfig& cfg, const PremiumPrinciple& principle);
BuiltModel build_mdp(const ReinsuranceConfig& cfg);

/// Copy of `cfg` whose treaty list keeps only the given kinds.
ReinsuranceConfig restrict_treaties(const ReinsuranceConfig& cfg, std::vector<TreatyKind> kinds);

struct PolicyRow {
  int stage;
  double surplus;
  double s;
  double t;
  std::string treaty_kind;
  double parameter;
};

struct CocReport {
  double value = 0.0;            ///< r_CoC times the risk of the shifted total cost
  double unshifted_value = 0.0;  ///< r_CoC times the risk of the discounted loss
  double scaled_bound = 0.0;     ///< r_CoC times the restriction error bound
  double max_snap_error = 0.0;
  outer::OuterResult outer;
  std::vector<PolicyRow> policy;
};

CocReport solve_cost_of_capital(const ReinsuranceConfig& cfg, const StepSpectrum& spec,
                                const outer::OuterConfig& outer_cfg);

/// Decision rules of a solved model as CSV-ready rows.
std::vector<PolicyRow> policy_rows(const BuiltModel& built, const mdp::MarkovPolicy& policy);

struct ConvexOrderResult {
  double a_f = 0.0;             ///< stop-loss level with E[min(Y, a_f)] = E[f(Y)]
  bool verified = false;
  double max_violation = 0.0;   ///< largest excess of the stop-loss transform of min(Y, a_f)
  double mean_gap = 0.0;
};

/// Checks min(Y, a_f) <=_cx f(Y) through stop-loss transforms on the merged atoms.
ConvexOrderResult convex_order_check(const DiscreteDistribution& claims, const Treaty& treaty);

/// Largest gap between neighbouring stop-loss levels of the one-step objective
///   a -> sum_z p_z V_{n+1}(T(x, a, z), s + t c(x, a, z)),
/// maximized over grid points and summed over stages. Bounds how much the
/// value may move when the stop-loss grid is refined.
double stop_loss_resolution(const BuiltModel& built, const mdp::SolveReport& report,
                            const mdp::Disutility& g);

}  // namespace srm::reinsurance
