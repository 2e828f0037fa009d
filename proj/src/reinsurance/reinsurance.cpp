#include "srm/reinsurance/reinsurance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "srm/errors.hpp"

namespace srm::reinsurance {

Treaty Treaty::stop_loss(double a) { return {TreatyKind::stop_loss, a}; }
Treaty Treaty::proportional(double b) { return {TreatyKind::proportional, b}; }
Treaty Treaty::identity() { return {TreatyKind::identity, 0.0}; }

double Treaty::retained(double y) const {
  switch (kind) {
    case TreatyKind::stop_loss: return std::min(y, parameter);
    case TreatyKind::proportional: return parameter * y;
    case TreatyKind::identity: return y;
  }
  return y;
}

std::string Treaty::kind_name() const {
  switch (kind) {
    case TreatyKind::stop_loss: return "stop_loss";
    case TreatyKind::proportional: return "proportional";
    case TreatyKind::identity: return "identity";
  }
  return "identity";
}

std::string Treaty::label() const {
  if (kind == TreatyKind::identity) return "identity";
  return kind_name() + "(" + std::to_string(parameter) + ")";
}

void Treaty::validate() const {
  if (kind == TreatyKind::stop_loss && !(parameter >= 0.0)) {
    throw ConfigError("stop-loss level must be nonnegative");
  }
  if (kind == TreatyKind::proportional && !(parameter >= 0.0 && parameter <= 1.0)) {
    throw ConfigError("proportional share must lie in [0, 1]");
  }
}

TreatyKind parse_treaty_kind(const std::string& name) {
  if (name == "stop_loss") return TreatyKind::stop_loss;
  if (name == "proportional") return TreatyKind::proportional;
  if (name == "identity") return TreatyKind::identity;
  throw ConfigError("unknown treaty kind '" + name + "'");
}

ExpectedPremium::ExpectedPremium(double theta) : theta_(theta) {
  if (!(theta > 0.0)) throw ConfigError("safety loading must be positive");
}

double ExpectedPremium::premium(const Treaty& treaty, const DiscreteDistribution& claims) const {
  const double ceded = claims.expectation([&](double y) { return y - treaty.retained(y); });
  return (1.0 + theta_) * ceded;
}

double premium(const Treaty& treaty, const DiscreteDistribution& claims, double theta) {
  return ExpectedPremium(theta).premium(treaty, claims);
}

void ReinsuranceConfig::validate() const {
  if (claims.min() < 0.0) throw ConfigError("claim atoms must be nonnegative");
  if (income.min() < 0.0) throw ConfigError("premium income atoms must be nonnegative");
  if (!(theta > 0.0)) throw ConfigError("safety loading must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!(coc_rate > 0.0 && coc_rate <= 1.0)) throw ConfigError("cost-of-capital rate must lie in (0, 1]");
  if (treaties.empty()) throw ConfigError("treaty grid is empty");
  for (const auto& t : treaties) t.validate();
  if (surplus_grid) {
    if (surplus_grid->points < 2 || !(surplus_grid->max > surplus_grid->min)) {
      throw ConfigError("surplus grid needs max > min and at least two points");
    }
  }
}

namespace {

bool acts_as_identity(const Treaty& t, double y_max) {
  return t.kind == TreatyKind::identity ||
         (t.kind == TreatyKind::stop_loss && t.parameter >= y_max) ||
         (t.kind == TreatyKind::proportional && t.parameter == 1.0);
}

std::size_t nearest(const std::vector<double>& axis, double x) {
  auto it = std::lower_bound(axis.begin(), axis.end(), x);
  if (it == axis.begin()) return 0;
  if (it == axis.end()) return axis.size() - 1;
  const auto hi = static_cast<std::size_t>(it - axis.begin());
  return (x - axis[hi - 1] <= axis[hi] - x) ? hi - 1 : hi;
}

void merge_close(std::vector<double>& v, double tol) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [&](double a, double b) { return b - a <= tol; }),
          v.end());
}

}  // namespace

BuiltModel build_mdp(const ReinsuranceConfig& cfg) { return build_mdp(cfg, ExpectedPremium(cfg.theta)); }

BuiltModel build_mdp(const ReinsuranceConfig& cfg, const PremiumPrinciple& principle) {
  cfg.validate();
  BuiltModel out;
  const double y_max = cfg.claims.max();
  out.treaties = cfg.treaties;
  if (std::none_of(out.treaties.begin(), out.treaties.end(),
                   [&](const Treaty& t) { return acts_as_identity(t, y_max); })) {
    out.treaties.push_back(Treaty::identity());
  }
  for (const auto& t : out.treaties) out.premiums.push_back(principle.premium(t, cfg.claims));
  out.z_hat = cfg.income.max();

  for (std::size_t i = 0; i < cfg.claims.size(); ++i) {
    for (std::size_t j = 0; j < cfg.income.size(); ++j) {
      out.claim_atom.push_back(cfg.claims.atoms()[i]);
      out.income_atom.push_back(cfg.income.atoms()[j]);
    }
  }
  std::vector<double> probs;
  for (std::size_t i = 0; i < cfg.claims.size(); ++i) {
    for (std::size_t j = 0; j < cfg.income.size(); ++j) {
      probs.push_back(cfg.claims.probs()[i] * cfg.income.probs()[j]);
    }
  }
  const std::size_t A = out.treaties.size();
  const std::size_t Z = probs.size();

  auto successor = [&](double x, std::size_t a, std::size_t z) {
    return x + out.income_atom[z] - out.treaties[a].retained(out.claim_atom[z]) - out.premiums[a];
  };
  auto admissible = [&](double x) {
    std::vector<int> d;
    for (std::size_t a = 0; a < A; ++a) {
      if (!cfg.budget_constrained || out.premiums[a] <= std::max(x, 0.0)) d.push_back(static_cast<int>(a));
    }
    return d;
  };

  std::vector<double> axis;
  const double scale = std::max({1.0, std::abs(cfg.initial_surplus), y_max, out.z_hat});
  if (cfg.surplus_grid) {
    const auto& sg = *cfg.surplus_grid;
    axis.resize(sg.points);
    const double h = (sg.max - sg.min) / static_cast<double>(sg.points - 1);
    for (std::size_t k = 0; k < sg.points; ++k) axis[k] = sg.min + static_cast<double>(k) * h;
    axis.back() = sg.max;
  } else {
    std::vector<double> layer{cfg.initial_surplus};
    axis = layer;
    for (int n = 0; n < cfg.horizon; ++n) {
      std::vector<double> next;
      for (double x : layer) {
        for (int a : admissible(x)) {
          for (std::size_t z = 0; z < Z; ++z) next.push_back(successor(x, static_cast<std::size_t>(a), z));
        }
      }
      merge_close(next, 1e-12 * scale);
      axis.insert(axis.end(), next.begin(), next.end());
      layer = std::move(next);
    }
    merge_close(axis, 1e-12 * scale);
  }

  auto& model = out.model;
  model.states = axis;
  model.actions.reserve(A);
  for (const auto& t : out.treaties) model.actions.push_back(t.label());
  model.discount = cfg.discount;
  model.horizon = cfg.horizon;
  model.terminal_cost.assign(axis.size(), 0.0);
  mdp::StageData st;
  st.probs = probs;
  st.admissible.resize(axis.size());
  st.next.resize(axis.size() * A * Z);
  st.cost.resize(axis.size() * A * Z);
  for (std::size_t x = 0; x < axis.size(); ++x) {
    st.admissible[x] = admissible(axis[x]);
    if (st.admissible[x].empty()) {
      throw ConfigError("no treaty is affordable at surplus " + std::to_string(axis[x]));
    }
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t z = 0; z < Z; ++z) {
        const std::size_t i = (x * A + a) * Z + z;
        const double target = successor(axis[x], a, z);
        const std::size_t k = nearest(axis, target);
        st.next[i] = static_cast<int>(k);
        st.cost[i] = out.treaties[a].retained(out.claim_atom[z]) + out.premiums[a] + out.z_hat -
                     out.income_atom[z];
      }
    }
  }
  // Snap error over the states the process can visit before the horizon.
  if (cfg.surplus_grid) {
    std::vector<char> seen(axis.size(), 0);
    std::vector<int> frontier{static_cast<int>(nearest(axis, cfg.initial_surplus))};
    seen[static_cast<std::size_t>(frontier.front())] = 1;
    for (int n = 0; n < cfg.horizon && !frontier.empty(); ++n) {
      std::vector<int> next;
      for (int x : frontier) {
        const auto xi = static_cast<std::size_t>(x);
        for (int a : st.admissible[xi]) {
          const auto ai = static_cast<std::size_t>(a);
          for (std::size_t z = 0; z < Z; ++z) {
            const int k = st.next[(xi * A + ai) * Z + z];
            const auto ki = static_cast<std::size_t>(k);
            out.max_snap_error = std::max(out.max_snap_error, std::abs(axis[ki] - successor(axis[xi], ai, z)));
            if (!seen[ki]) {
              seen[ki] = 1;
              next.push_back(k);
            }
          }
        }
      }
      frontier = std::move(next);
    }
  }
  double c_bar = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    c_bar = std::max(c_bar, out.treaties[a].retained(y_max) + out.premiums[a]);
  }
  model.cost_cap = c_bar + out.z_hat;
  model.stages.push_back(std::move(st));
  out.initial_state = static_cast<int>(nearest(axis, cfg.initial_surplus));
  model.validate();
  return out;
}

ReinsuranceConfig restrict_treaties(const ReinsuranceConfig& cfg, std::vector<TreatyKind> kinds) {
  ReinsuranceConfig out = cfg;
  out.treaties.clear();
  for (const auto& t : cfg.treaties) {
    if (std::find(kinds.begin(), kinds.end(), t.kind) != kinds.end()) out.treaties.push_back(t);
  }
  return out;
}

std::vector<PolicyRow> policy_rows(const BuiltModel& built, const mdp::MarkovPolicy& policy) {
  std::vector<PolicyRow> rows;
  for (std::size_t n = 0; n < policy.stages.size(); ++n) {
    for (const auto& layer : policy.stages[n].layers) {
      for (std::size_t x = 0; x < layer.states.size(); ++x) {
        const auto& slice = layer.states[x];
        for (std::size_t k = 0; k < slice.s.size(); ++k) {
          const Treaty& t = built.treaties[static_cast<std::size_t>(slice.action[k])];
          rows.push_back({static_cast<int>(n), built.model.states[x], slice.s[k], layer.t,
                          t.kind_name(), t.kind == TreatyKind::identity ? 0.0 : t.parameter});
        }
      }
    }
  }
  return rows;
}

CocReport solve_cost_of_capital(const ReinsuranceConfig& cfg, const StepSpectrum& spec,
                                const outer::OuterConfig& outer_cfg) {
  const BuiltModel built = build_mdp(cfg);
  CocReport report;
  report.outer = outer::anneal(built.model, spec, built.initial_state, outer_cfg);
  report.value = cfg.coc_rate * report.outer.best_value;
  double shift = 0.0;
  double w = 1.0;
  for (int k = 0; k < cfg.horizon; ++k) {
    shift += w * built.z_hat;
    w *= cfg.discount;
  }
  report.unshifted_value = cfg.coc_rate * (report.outer.best_value - shift);
  report.scaled_bound = cfg.coc_rate * report.outer.error_bound;
  report.max_snap_error = built.max_snap_error;
  report.policy = policy_rows(built, report.outer.inner_report.policy);
  return report;
}

ConvexOrderResult convex_order_check(const DiscreteDistribution& claims, const Treaty& treaty) {
  treaty.validate();
  if (claims.min() < 0.0) throw ConfigError("claim atoms must be nonnegative");
  const auto atoms = claims.atoms();
  const auto cum = claims.cumulative();
  const double target = claims.expectation([&](double y) { return treaty.retained(y); });
  const double scale = std::max(1.0, claims.max());

  // a -> E[min(Y, a)] is piecewise linear with slope P(Y > a); walk its segments.
  ConvexOrderResult r;
  r.a_f = claims.max();
  double left = 0.0;
  double value = 0.0;
  double tail = 1.0;
  for (std::size_t i = 0; i <= atoms.size(); ++i) {
    const double right = i < atoms.size() ? atoms[i] : left;
    const double next_value = value + tail * (right - left);
    if (tail > 0.0 && target <= next_value) {
      r.a_f = std::clamp(left + (target - value) / tail, left, right);
      break;
    }
    if (i == atoms.size()) break;
    value = next_value;
    left = right;
    tail = 1.0 - cum[i];
  }

  const Treaty stop = Treaty::stop_loss(r.a_f);
  std::vector<double> points{r.a_f};
  for (double y : atoms) {
    points.push_back(y);
    points.push_back(treaty.retained(y));
    points.push_back(stop.retained(y));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (double d : points) {
    const double lhs = claims.expectation([&](double y) { return std::max(stop.retained(y) - d, 0.0); });
    const double rhs = claims.expectation([&](double y) { return std::max(treaty.retained(y) - d, 0.0); });
    r.max_violation = std::max(r.max_violation, lhs - rhs);
  }
  r.mean_gap = std::abs(claims.expectation([&](double y) { return stop.retained(y); }) - target);
  const double tol = 1e-12 * scale;
  r.verified = r.max_violation <= tol && r.mean_gap <= tol;
  return r;
}

double stop_loss_resolution(const BuiltModel& built, const mdp::SolveReport& report,
                            const mdp::Disutility& g) {
  const auto& model = built.model;
  std::vector<int> stops;
  for (std::size_t a = 0; a < built.treaties.size(); ++a) {
    if (built.treaties[a].kind == TreatyKind::stop_loss) stops.push_back(static_cast<int>(a));
  }
  std::sort(stops.begin(), stops.end(), [&](int a, int b) {
    return built.treaties[static_cast<std::size_t>(a)].parameter <
           built.treaties[static_cast<std::size_t>(b)].parameter;
  });
  const auto& table = report.values;
  const std::size_t N = table.stages.size();
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const mdp::ValueStage* later = n + 1 < N ? &table.stages[n + 1] : nullptr;
    double worst = 0.0;
    const auto& stage = table.stages[n];
    for (std::size_t l = 0; l < stage.layers.size(); ++l) {
      const double t = stage.layers[l].t;
      auto next = [&](const mdp::ExtendedState& es) {
        if (!later) return g(es.s + es.t * model.terminal_cost[static_cast<std::size_t>(es.x)]);
        const auto& slice = later->layers[l].states[static_cast<std::size_t>(es.x)];
        return table.mode == mdp::AxisMode::exact ? slice.exact_at(es.s) : slice.at(es.s, g.tail_slope);
      };
      for (std::size_t x = 0; x < stage.layers[l].states.size(); ++x) {
        for (double s : stage.layers[l].states[x].s) {
          double prev = std::numeric_limits<double>::quiet_NaN();
          for (int a : stops) {
            if (!model.is_admissible(static_cast<int>(n), static_cast<int>(x), a)) continue;
            const double v = mdp::apply_L(model, static_cast<int>(n), next,
                                          {static_cast<int>(x), s, t}, a);
            if (!std::isnan(prev)) worst = std::max(worst, std::abs(v - prev));
            prev = v;
          }
        }
      }
    }
    total += worst;
  }
  return total;
}

}  // namespace srm::reinsurance
