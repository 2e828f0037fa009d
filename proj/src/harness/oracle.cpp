#include "srm/harness/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "srm/errors.hpp"
#include "srm/outer/conjugate.hpp"
#include "srm/outer/outer.hpp"
#include "srm/risk/distribution.hpp"
#include "srm/risk/risk.hpp"

namespace srm::harness {
namespace {

struct Branch {
  int next;
  double cost;
  double prob;
};

// Successors of (n, x, a) with equal (next, cost) merged, in first-seen order.
std::vector<Branch> branches(const mdp::MDPModel& model, int n, int x, int a) {
  const auto& st = model.stage(n);
  std::vector<Branch> out;
  for (std::size_t z = 0; z < st.probs.size(); ++z) {
    if (st.probs[z] == 0.0) continue;
    const std::size_t i = model.index(n, x, a, static_cast<int>(z));
    auto it = std::find_if(out.begin(), out.end(), [&](const Branch& b) {
      return b.next == st.next[i] && b.cost == st.cost[i];
    });
    if (it == out.end()) {
      out.push_back({st.next[i], st.cost[i], st.probs[z]});
    } else {
      it->prob += st.probs[z];
    }
  }
  return out;
}

void require_finite(const mdp::MDPModel& model) {
  model.validate();
  if (model.infinite()) throw DomainError("oracles need a finite horizon");
}

double count_from(const mdp::MDPModel& model, int n, int x, std::map<std::pair<int, int>, double>& memo) {
  if (n == *model.horizon) return 1.0;
  if (auto it = memo.find({n, x}); it != memo.end()) return it->second;
  double total = 0.0;
  for (int a : model.admissible(n, x)) {
    double prod = 1.0;
    for (const Branch& b : branches(model, n, x, a)) prod *= count_from(model, n + 1, b.next, memo);
    total += prod;
  }
  if (!std::isfinite(total)) total = std::numeric_limits<double>::infinity();
  memo[{n, x}] = total;
  return total;
}

struct Node {
  int n;
  int x;
  double s;
  double t;
  double prob;
  std::string path;
};

struct Enumerator {
  const mdp::MDPModel& model;
  const StepSpectrum& spec;
  Enumerator(const mdp::MDPModel& m, const StepSpectrum& s) : model(m), spec(s) {}

  std::vector<Node> pending;
  std::vector<double> atoms;
  std::vector<double> probs;
  std::vector<std::string> decisions;
  OracleResult best{std::numeric_limits<double>::infinity(), "", 0.0};

  void run() {
    if (pending.empty()) {
      const double v = spectral_risk(DiscreteDistribution(atoms, probs), spec);
      if (v < best.value) {
        best.value = v;
        std::ostringstream os;
        for (std::size_t i = 0; i < decisions.size(); ++i) os << (i ? "; " : "") << decisions[i];
        best.policy = os.str();
      }
      return;
    }
    const Node node = pending.back();
    pending.pop_back();
    if (node.n == *model.horizon) {
      atoms.push_back(node.s + node.t * model.terminal_cost[static_cast<std::size_t>(node.x)]);
      probs.push_back(node.prob);
      run();
      atoms.pop_back();
      probs.pop_back();
    } else {
      for (int a : model.admissible(node.n, node.x)) {
        const auto succ = branches(model, node.n, node.x, a);
        decisions.push_back("[" + node.path + "] " + model.actions[static_cast<std::size_t>(a)]);
        const std::size_t mark = pending.size();
        for (std::size_t b = succ.size(); b-- > 0;) {
          pending.push_back({node.n + 1, succ[b].next, node.s + node.t * succ[b].cost,
                             node.t * model.discount, node.prob * succ[b].prob,
                             node.path + (node.path.empty() ? "" : ",") + std::to_string(b)});
        }
        run();
        pending.resize(mark);
        decisions.pop_back();
      }
    }
    pending.push_back(node);
  }
};

double tree_value(const mdp::MDPModel& model, const mdp::Disutility& g, int n, int x, double s,
                  double t) {
  if (n == *model.horizon) return g(s + t * model.terminal_cost[static_cast<std::size_t>(x)]);
  const auto& st = model.stage(n);
  double best = std::numeric_limits<double>::infinity();
  for (int a : model.admissible(n, x)) {
    double v = 0.0;
    for (std::size_t z = 0; z < st.probs.size(); ++z) {
      if (st.probs[z] == 0.0) continue;
      const std::size_t i = model.index(n, x, a, static_cast<int>(z));
      v += st.probs[z] * tree_value(model, g, n + 1, st.next[i], s + t * st.cost[i], model.discount * t);
    }
    best = std::min(best, v);
  }
  return best;
}

double binomial(double n, double k) {
  double r = 1.0;
  for (double i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double count_policies(const mdp::MDPModel& model, int x0) {
  require_finite(model);
  std::map<std::pair<int, int>, double> memo;
  return count_from(model, 0, x0, memo);
}

OracleResult oracle_exact_optimum(const mdp::MDPModel& model, const StepSpectrum& spec, int x0,
                                  double policy_cap) {
  const double count = count_policies(model, x0);
  if (count > policy_cap) {
    throw CapExceeded("policy count " + std::to_string(count) + " exceeds the cap " +
                      std::to_string(policy_cap));
  }
  Enumerator e{model, spec};
  e.pending.push_back({0, x0, 0.0, 1.0, 1.0, ""});
  e.run();
  e.best.policies = count;
  return e.best;
}

double oracle_min_expected(const mdp::MDPModel& model, const mdp::Disutility& g, int x0,
                           double node_cap) {
  require_finite(model);
  double nodes = 1.0;
  double width = 1.0;
  for (int n = 0; n < *model.horizon; ++n) {
    width *= static_cast<double>(model.action_count() * model.atom_count(n));
    nodes += width;
  }
  if (nodes > node_cap) {
    throw CapExceeded("scenario tree of " + std::to_string(nodes) + " nodes exceeds the cap");
  }
  return tree_value(model, g, 0, x0, 0.0, 1.0);
}

std::vector<GapRow> oracle_outer_gap(const mdp::MDPModel& model, const StepSpectrum& spec, int x0,
                                     const std::vector<std::size_t>& m_list, double pitch,
                                     double oracle_value, double lattice_cap,
                                     const mdp::InnerOptions& inner) {
  if (!(pitch > 0.0)) throw ConfigError("lattice pitch must be positive");
  const double c_hat = outer::cost_cap(model);
  const double cap = c_hat > 0.0 ? c_hat : 1.0;
  const double phi1 = spec.max_value();
  std::vector<GapRow> rows;
  for (std::size_t m : m_list) {
    if (m < 2) throw ConfigError("lattice needs m >= 2");
    const double h = cap / static_cast<double>(m - 1);
    const auto y_steps = static_cast<std::size_t>(std::floor(cap / pitch + 1e-9));
    const auto slope_steps = static_cast<std::size_t>(std::ceil(phi1 * h / pitch - 1e-9));
    const double dslope = phi1 / static_cast<double>(std::max<std::size_t>(slope_steps, 1));
    // nondecreasing slope sequences of length m-1 over slope_steps+1 values
    const double points = static_cast<double>(y_steps + 1) *
                          binomial(static_cast<double>(slope_steps + m - 1), static_cast<double>(m - 1));
    if (points > lattice_cap) {
      throw CapExceeded("lattice of " + std::to_string(points) + " points for m = " +
                        std::to_string(m) + " exceeds the cap");
    }
    GapRow row;
    row.m = m;
    row.lattice_points = points;
    row.oracle = oracle_value;
    row.bound = outer::error_bound(m, phi1, c_hat);
    row.best = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> idx(m - 1, 0);
    std::vector<double> y(m);
    for (;;) {
      for (std::size_t j = 0; j <= y_steps; ++j) {
        y[0] = std::min(static_cast<double>(j) * pitch, cap);
        for (std::size_t k = 0; k + 1 < m; ++k) {
          y[k + 1] = y[k] + std::min(static_cast<double>(idx[k]) * dslope, phi1) * h;
        }
        const double v = outer::objective_K(model, GPoly::on_grid(cap, y, phi1), spec, x0, inner);
        if (v < row.best) {
          row.best = v;
          row.best_y = y;
        }
      }
      // next nondecreasing index sequence
      std::size_t k = m - 1;
      while (k > 0 && idx[k - 1] == slope_steps) --k;
      if (k == 0) break;
      const std::size_t v = idx[k - 1] + 1;
      for (std::size_t i = k - 1; i < m - 1; ++i) idx[i] = v;
    }
    row.gap = row.best - oracle_value;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace srm::harness
