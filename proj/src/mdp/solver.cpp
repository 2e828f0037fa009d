#include "srm/mdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "srm/errors.hpp"

namespace srm::mdp {

Disutility::Disutility(const GPoly& g)
    : eval([g](double s) { return g(s); }), tail_slope(g.max_slope()) {}

namespace {

constexpr int kMinimize = -1;

/// One Bellman (or policy-evaluation) sweep over `grid`. `next(layer, es)`
/// returns the successor value; `choose(layer, x, s, t)` returns a fixed action
/// or kMinimize.
template <class Next, class Choose>
std::pair<ValueStage, RuleStage> sweep(const MDPModel& model, int n, const StageGrid& grid,
                                       Next&& next, Choose&& choose) {
  const StageData& st = model.stage(n);
  const std::size_t Z = st.probs.size();
  const std::size_t A = model.action_count();
  ValueStage values;
  RuleStage rules;
  values.layers.resize(grid.t.size());
  rules.layers.resize(grid.t.size());
  for (std::size_t l = 0; l < grid.t.size(); ++l) {
    const double t = grid.t[l];
    const double t_next = model.discount * t;
    ValueLayer& vl = values.layers[l];
    RuleLayer& rl = rules.layers[l];
    vl.t = t;
    rl.t = t;
    vl.states.resize(model.state_count());
    rl.states.resize(model.state_count());
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      const auto& points = grid.s[l][x];
      ValueSlice& vs = vl.states[x];
      RuleSlice& rs = rl.states[x];
      vs.s = points;
      rs.s = points;
      vs.value.resize(points.size());
      rs.action.resize(points.size());
      const auto& admissible = st.admissible[x];
      for (std::size_t k = 0; k < points.size(); ++k) {
        const double s = points[k];
        const int fixed = choose(l, static_cast<int>(x), s, t);
        double best = std::numeric_limits<double>::infinity();
        int best_a = -1;
        for (int a : admissible) {
          if (fixed != kMinimize && a != fixed) continue;
          const std::size_t base = (x * A + static_cast<std::size_t>(a)) * Z;
          double v = 0.0;
          for (std::size_t z = 0; z < Z; ++z) {
            const double p = st.probs[z];
            if (p == 0.0) continue;
            const ExtendedState succ{st.next[base + z], s + t * st.cost[base + z], t_next};
            v += p * next(l, succ);
          }
          if (v < best) {
            best = v;
            best_a = a;
          }
        }
        if (best_a < 0) {
          throw ContractViolation("policy action " + std::to_string(fixed) +
                                  " is not admissible in state " + std::to_string(x));
        }
        vs.value[k] = best;
        rs.action[k] = best_a;
      }
    }
  }
  return {std::move(values), std::move(rules)};
}

std::vector<double> equidistant(double top, std::size_t points) {
  if (points < 2) throw ConfigError("grid needs at least two points");
  std::vector<double> s(points);
  const double h = top / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) s[k] = static_cast<double>(k) * h;
  s.back() = top;
  return s;
}

void clamp_below(ValueStage& stage, const Disutility& g) {
  for (auto& layer : stage.layers) {
    for (auto& slice : layer.states) {
      for (std::size_t k = 0; k < slice.s.size(); ++k) {
        slice.value[k] = std::max(slice.value[k], g(slice.s[k]));
      }
    }
  }
}

double stage_scale(const ValueStage& stage) {
  double m = 1.0;
  for (const auto& layer : stage.layers) {
    for (const auto& slice : layer.states) {
      for (double v : slice.value) m = std::max(m, std::abs(v));
    }
  }
  return m;
}

void assert_invariants(const ValueStage& stage, const Disutility& g, int n) {
  const InvariantReport r = check_value_stage(stage, g.eval);
  const double tol = 1e-9 * stage_scale(stage);
  if (!r.holds(tol)) {
    throw std::logic_error("value-space invariant broken at stage " + std::to_string(n) +
                           " (s-decrease " + std::to_string(r.max_s_decrease) + ", t-decrease " +
                           std::to_string(r.max_t_decrease) + ", below g " +
                           std::to_string(r.max_below_g) + ")");
  }
}

std::vector<double> stage_weights(const MDPModel& model, int horizon) {
  std::vector<double> t(static_cast<std::size_t>(horizon) + 1);
  t[0] = 1.0;
  for (int n = 0; n < horizon; ++n) t[n + 1] = model.discount * t[n];
  return t;
}

using Fixed = const MarkovPolicy*;

// Forward-reachable accumulated costs per stage and state. Returns false when
// the total number of points exceeds `cap`.
bool reachable_sets(const MDPModel& model, int x0, const std::vector<double>& t, std::size_t cap,
                    Fixed fixed, std::vector<std::vector<std::vector<double>>>& reach) {
  const int N = *model.horizon;
  reach.assign(static_cast<std::size_t>(N),
               std::vector<std::vector<double>>(model.state_count()));
  reach[0][static_cast<std::size_t>(x0)].push_back(0.0);
  std::size_t total = 1;
  for (int n = 0; n + 1 < N; ++n) {
    const StageData& st = model.stage(n);
    auto& out = reach[static_cast<std::size_t>(n) + 1];
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      for (double s : reach[static_cast<std::size_t>(n)][x]) {
        for (int a : st.admissible[x]) {
          if (fixed && fixed->action(n, static_cast<int>(x), s, t[n]) != a) continue;
          for (std::size_t z = 0; z < st.probs.size(); ++z) {
            if (st.probs[z] == 0.0) continue;
            const ExtendedState succ =
                extend_transition(model, n, {static_cast<int>(x), s, t[n]}, a, static_cast<int>(z));
            out[static_cast<std::size_t>(succ.x)].push_back(succ.s);
          }
        }
      }
    }
    for (auto& v : out) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      total += v.size();
    }
    if (total > cap) return false;
  }
  return true;
}

SolveReport finite_impl(const MDPModel& model, const Disutility& g, int x0, const InnerOptions& opts,
                        Fixed fixed) {
  model.validate();
  if (model.infinite()) throw DomainError("finite-horizon solver called on an infinite-horizon model");
  if (x0 < 0 || static_cast<std::size_t>(x0) >= model.state_count()) {
    throw ConfigError("initial state out of range");
  }
  const int N = *model.horizon;
  const std::vector<double> t = stage_weights(model, N);

  SolveReport report;
  report.values.tail_slope = g.tail_slope;
  report.values.stages.resize(static_cast<std::size_t>(N));
  report.policy.stages.resize(static_cast<std::size_t>(N));

  auto terminal = [&](const ExtendedState& es) {
    return g(es.s + es.t * model.terminal_cost[static_cast<std::size_t>(es.x)]);
  };

  std::vector<std::vector<std::vector<double>>> reach;
  bool exact = opts.mode == AxisMode::exact;
  if (exact && !reachable_sets(model, x0, t, opts.exact_cap, fixed, reach)) {
    exact = false;
    report.fell_back_to_grid = true;
  }
  report.values.mode = exact ? AxisMode::exact : AxisMode::grid;
  report.note = exact ? DiscretizationNote::exact : DiscretizationNote::interpolated;

  std::vector<double> scales{1.0};
  std::vector<double> s_grid;
  if (!exact) {
    scales = opts.t_scales;
    if (std::find(scales.begin(), scales.end(), 1.0) == scales.end()) {
      throw ConfigError("t_scales must contain 1");
    }
    double top = opts.grid_top > 0.0 ? opts.grid_top : total_cost_bound(model);
    if (!(top > 0.0)) top = 1.0;
    s_grid = equidistant(top, opts.grid_points);
  }

  for (int n = N - 1; n >= 0; --n) {
    StageGrid grid;
    for (double scale : scales) {
      grid.t.push_back(scale * t[static_cast<std::size_t>(n)]);
      if (exact) {
        grid.s.push_back(reach[static_cast<std::size_t>(n)]);
      } else {
        grid.s.emplace_back(model.state_count(), s_grid);
      }
    }
    const ValueStage* later =
        n + 1 < N ? &report.values.stages[static_cast<std::size_t>(n) + 1] : nullptr;
    auto next = [&](std::size_t l, const ExtendedState& es) {
      if (!later) return terminal(es);
      const ValueSlice& slice = later->layers[l].states[static_cast<std::size_t>(es.x)];
      return exact ? slice.exact_at(es.s) : slice.at(es.s, g.tail_slope);
    };
    auto choose = [&](std::size_t, int x, double s, double tt) {
      return fixed ? fixed->action(n, x, s, tt) : kMinimize;
    };
    auto [values, rules] = sweep(model, n, grid, next, choose);
    if (!exact) clamp_below(values, g);
    if (opts.check_invariants && !fixed) assert_invariants(values, g, n);
    for (const auto& layer : values.layers) {
      for (const auto& slice : layer.states) report.points += slice.s.size();
    }
    report.values.stages[static_cast<std::size_t>(n)] = std::move(values);
    report.policy.stages[static_cast<std::size_t>(n)] = std::move(rules);
    ++report.iterations;
  }

  const ValueStage& first = report.values.stages.front();
  std::size_t origin_layer = 0;
  if (!exact) {
    origin_layer = static_cast<std::size_t>(
        std::find(scales.begin(), scales.end(), 1.0) - scales.begin());
  }
  const ValueSlice& origin = first.layers[origin_layer].states[static_cast<std::size_t>(x0)];
  report.value_at_origin = exact ? origin.exact_at(0.0) : origin.at(0.0, g.tail_slope);
  return report;
}

struct InfiniteGrid {
  std::vector<double> s;
  std::vector<double> t;
  double c_hat;
};

InfiniteGrid infinite_grid(const MDPModel& model, double tail_slope, const InnerOptions& opts) {
  InfiniteGrid grid;
  grid.c_hat = total_cost_bound(model);
  const double beta = model.discount;
  // Layers beta^0..beta^jmax; below the cutoff J(x, s, t) = g(s) within tolerance.
  std::size_t jmax = 0;
  double w = 1.0;
  while (tail_slope * w * grid.c_hat >= opts.tolerance && jmax < 100000) {
    w *= beta;
    ++jmax;
  }
  grid.t.resize(jmax + 1);
  grid.t[0] = 1.0;
  for (std::size_t j = 1; j <= jmax; ++j) grid.t[j] = beta * grid.t[j - 1];
  double top = grid.c_hat * (1.0 + opts.grid_margin);
  if (!(top > 0.0)) top = 1.0;
  grid.s = equidistant(top, opts.grid_points);
  return grid;
}

SolveReport infinite_impl(const MDPModel& model, const Disutility& g, int x0,
                          const InnerOptions& opts, Fixed fixed) {
  if (!model.stationary()) throw DomainError("infinite horizon requires stationary data");
  if (!(model.discount < 1.0)) throw DomainError("infinite horizon requires discount < 1");
  model.validate();
  if (x0 < 0 || static_cast<std::size_t>(x0) >= model.state_count()) {
    throw ConfigError("initial state out of range");
  }
  const InfiniteGrid ig = infinite_grid(model, g.tail_slope, opts);
  const std::size_t L = ig.t.size();

  StageGrid grid;
  grid.t = ig.t;
  grid.s.assign(L, std::vector<std::vector<double>>(model.state_count(), ig.s));

  ValueStage current;
  current.layers.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    current.layers[l].t = ig.t[l];
    ValueSlice base;
    base.s = ig.s;
    base.value.resize(ig.s.size());
    for (std::size_t k = 0; k < ig.s.size(); ++k) base.value[k] = g(ig.s[k]);
    current.layers[l].states.assign(model.state_count(), base);
  }

  SolveReport report;
  report.note = DiscretizationNote::interpolated;
  report.values.mode = AxisMode::grid;
  report.values.tail_slope = g.tail_slope;
  double min_increment = std::numeric_limits<double>::infinity();

  auto apply = [&](const ValueStage& v) {
    auto next = [&](std::size_t l, const ExtendedState& es) {
      if (l + 1 >= L) return g(es.s);
      return v.layers[l + 1].states[static_cast<std::size_t>(es.x)].at(es.s, g.tail_slope);
    };
    auto choose = [&](std::size_t, int x, double s, double t) {
      return fixed ? fixed->action(0, x, s, t) : kMinimize;
    };
    auto out = sweep(model, 0, grid, next, choose);
    clamp_below(out.first, g);
    return out;
  };
  auto sup_change = [&](const ValueStage& a, const ValueStage& b, double& min_inc) {
    double r = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t x = 0; x < model.state_count(); ++x) {
        const auto& va = a.layers[l].states[x].value;
        const auto& vb = b.layers[l].states[x].value;
        for (std::size_t k = 0; k < va.size(); ++k) {
          r = std::max(r, std::abs(vb[k] - va[k]));
          min_inc = std::min(min_inc, vb[k] - va[k]);
        }
      }
    }
    return r;
  };

  RuleStage rules;
  double tail = g.tail_slope * ig.c_hat;
  for (;;) {
    auto [next_values, next_rules] = apply(current);
    const double residual = sup_change(current, next_values, min_increment);
    const double scale = stage_scale(next_values);
    if (min_increment < -1e-9 * scale && !fixed) {
      throw std::logic_error("value iteration lost monotonicity");
    }
    if (opts.check_invariants && !fixed) assert_invariants(next_values, g, report.iterations);
    current = std::move(next_values);
    rules = std::move(next_rules);
    ++report.iterations;
    tail *= model.discount;
    report.residual = residual;
    if (residual <= opts.tolerance || tail <= opts.tolerance) break;
    if (report.iterations >= opts.max_iterations) {
      throw std::runtime_error("value iteration did not reach tolerance within max_iterations");
    }
  }
  // One more application certifies the fixed-point residual and yields the
  // stationary argmin.
  {
    auto [final_values, final_rules] = apply(current);
    report.residual = sup_change(current, final_values, min_increment);
    current = std::move(final_values);
    rules = std::move(final_rules);
    ++report.iterations;
  }
  report.min_increment = min_increment;
  report.values.stages.push_back(std::move(current));
  report.policy.stages.push_back(std::move(rules));
  report.points = L * model.state_count() * ig.s.size();
  report.value_at_origin =
      report.values.stages[0].layers[0].states[static_cast<std::size_t>(x0)].at(0.0, g.tail_slope);
  return report;
}

}  // namespace

double apply_L(const MDPModel& model, int n, const NextValue& v_next, const ExtendedState& es, int a) {
  if (!model.is_admissible(n, es.x, a)) {
    throw ContractViolation("action " + std::to_string(a) + " is not admissible in state " +
                            std::to_string(es.x));
  }
  const StageData& st = model.stage(n);
  double v = 0.0;
  for (std::size_t z = 0; z < st.probs.size(); ++z) {
    if (st.probs[z] == 0.0) continue;
    v += st.probs[z] * v_next(extend_transition(model, n, es, a, static_cast<int>(z)));
  }
  return v;
}

std::pair<ValueStage, RuleStage> bellman_step(const MDPModel& model, int n, const NextValue& v_next,
                                              const StageGrid& grid) {
  return sweep(
      model, n, grid, [&](std::size_t, const ExtendedState& es) { return v_next(es); },
      [](std::size_t, int, double, double) { return kMinimize; });
}

SolveReport solve_finite(const MDPModel& model, const Disutility& g, int x0, const InnerOptions& opts) {
  return finite_impl(model, g, x0, opts, nullptr);
}

SolveReport solve_infinite(const MDPModel& model, const Disutility& g, int x0,
                           const InnerOptions& opts) {
  return infinite_impl(model, g, x0, opts, nullptr);
}

SolveReport solve_inner(const MDPModel& model, const Disutility& g, int x0, const InnerOptions& opts) {
  return model.infinite() ? solve_infinite(model, g, x0, opts) : solve_finite(model, g, x0, opts);
}

double evaluate_policy(const MDPModel& model, const MarkovPolicy& policy, const Disutility& g,
                       int x0, const InnerOptions& opts) {
  if (model.infinite()) return infinite_impl(model, g, x0, opts, &policy).value_at_origin;
  return finite_impl(model, g, x0, opts, &policy).value_at_origin;
}

DiscreteDistribution policy_cost_distribution(const MDPModel& model, const MarkovPolicy& policy,
                                              int x0, const InnerOptions& opts) {
  model.validate();
  using Key = std::pair<int, double>;
  std::map<Key, double> frontier{{{x0, 0.0}, 1.0}};
  int depth;
  double pitch = 0.0;
  if (model.infinite()) {
    const double c_hat = total_cost_bound(model);
    depth = 0;
    double w = 1.0;
    while (w * c_hat > opts.tolerance && depth < 100000) {
      w *= model.discount;
      ++depth;
    }
    pitch = c_hat / static_cast<double>(std::max<std::size_t>(opts.grid_points, 2) - 1);
  } else {
    depth = *model.horizon;
  }
  double t = 1.0;
  for (int n = 0; n < depth; ++n) {
    const StageData& st = model.stage(n);
    std::map<Key, double> out;
    for (const auto& [key, p] : frontier) {
      const int a = policy.action(n, key.first, key.second, t);
      for (std::size_t z = 0; z < st.probs.size(); ++z) {
        if (st.probs[z] == 0.0) continue;
        ExtendedState succ = extend_transition(model, n, {key.first, key.second, t}, a,
                                               static_cast<int>(z));
        if (pitch > 0.0) succ.s = std::round(succ.s / pitch) * pitch;
        out[{succ.x, succ.s}] += p * st.probs[z];
      }
    }
    frontier = std::move(out);
    t *= model.discount;
  }
  std::vector<double> atoms;
  std::vector<double> probs;
  for (const auto& [key, p] : frontier) {
    atoms.push_back(key.second + t * model.terminal_cost[static_cast<std::size_t>(key.first)]);
    probs.push_back(p);
  }
  return DiscreteDistribution(std::move(atoms), std::move(probs));
}

MarkovPolicy greedy_policy(const MDPModel& model) {
  MarkovPolicy policy;
  const std::size_t n_stages = model.stationary() ? 1 : model.stages.size();
  for (std::size_t n = 0; n < n_stages; ++n) {
    const StageData& st = model.stages[n];
    RuleLayer layer;
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      double best = std::numeric_limits<double>::infinity();
      int best_a = st.admissible[x].front();
      for (int a : st.admissible[x]) {
        double c = 0.0;
        for (std::size_t z = 0; z < st.probs.size(); ++z) {
          c += st.probs[z] * st.cost[model.index(static_cast<int>(n), static_cast<int>(x), a,
                                                  static_cast<int>(z))];
        }
        if (c < best) {
          best = c;
          best_a = a;
        }
      }
      layer.states.push_back(RuleSlice{{0.0}, {best_a}});
    }
    policy.stages.push_back(RuleStage{{std::move(layer)}});
  }
  return policy;
}

}  // namespace srm::mdp
