#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "srm/errors.hpp"
#include "srm/outer/conjugate.hpp"
#include "srm/outer/outer.hpp"
#include "srm/risk/risk.hpp"

namespace srm::outer {
namespace {

std::uint64_t splitmix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Problem {
  const mdp::MDPModel& model;
  const StepSpectrum& spec;
  int x0;
  const OuterConfig& cfg;
  std::size_t m;
  double cap;  // knot grid right end
  double phi1;
};

class Chain {
 public:
  explicit Chain(const Problem& p) : p_(p) {}

  double value(const std::vector<double>& y) {
    std::vector<long long> key(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) key[k] = std::llround(y[k] * 1e9);
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats.cache_hits;
      return it->second;
    }
    ++stats.evaluations;
    const double v = objective_K(p_.model, GPoly::on_grid(p_.cap, y, p_.phi1), p_.spec, p_.x0,
                                 p_.cfg.inner);
    memo_.emplace(std::move(key), v);
    return v;
  }

  /// Knot values of the optimal disutility for the cost law of `policy`.
  std::vector<double> fitted(const mdp::MarkovPolicy& policy) const {
    const DiscreteDistribution law =
        mdp::policy_cost_distribution(p_.model, policy, p_.x0, p_.cfg.inner);
    const GPoly g = minimizer_g(p_.spec, law, p_.cap);
    const Projection proj = project_pm(g, p_.m, p_.cap, p_.phi1);
    return isotonic_project({proj.g.values().begin(), proj.g.values().end()}, p_.cap, p_.phi1);
  }

  RestartStats stats;

 private:
  const Problem& p_;
  std::map<std::vector<long long>, double> memo_;
};

struct ChainResult {
  std::vector<double> y;
  double value;
  RestartStats stats;
};

ChainResult run_chain(const Problem& p, std::size_t r) {
  Chain chain(p);
  std::mt19937_64 rng(splitmix(p.cfg.seed, r));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t m = p.m;
  const double h = p.cap / static_cast<double>(m - 1);

  std::vector<double> y(m);
  if (r == 0) {
    y = chain.fitted(mdp::greedy_policy(p.model));
  } else {
    std::vector<double> d(m - 1);
    for (double& v : d) v = unit(rng) * p.phi1;
    std::sort(d.begin(), d.end());
    y[0] = unit(rng) * p.cap;
    for (std::size_t k = 0; k + 1 < m; ++k) y[k + 1] = y[k] + d[k] * h;
  }

  double current = chain.value(y);
  chain.stats.start_value = current;
  std::vector<double> best_y = y;
  double best = current;

  double cool = 1.0;
  for (std::size_t step = 0; step < p.cfg.anneal_steps; ++step) {
    const double temperature = p.cfg.initial_temperature * p.cap * cool;
    const double delta = p.cfg.move_scale * p.cap * std::sqrt(cool) * normal(rng);
    std::vector<double> proposal = y;
    if (step % 2 == 0 || m == 2) {
      const auto k = static_cast<std::size_t>(unit(rng) * static_cast<double>(m)) % m;
      proposal[k] += delta;
    } else {
      // hinge at knot k: changes every slope from k on by the same amount
      const auto k = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(m - 2)) % (m - 2);
      for (std::size_t j = k + 1; j < m; ++j) {
        proposal[j] += delta * static_cast<double>(j - k) / static_cast<double>(m - 1);
      }
    }
    proposal = isotonic_project(proposal, p.cap, p.phi1);
    const double v = chain.value(proposal);
    const double u = unit(rng);
    if (v <= current || u < std::exp(-(v - current) / temperature)) {
      y = std::move(proposal);
      current = v;
      ++chain.stats.accepted;
      if (v < best) {
        best = v;
        best_y = y;
      }
    }
    cool *= p.cfg.cooling_rate;
  }

  // Alternate between the optimal policy for g and the optimal g for that policy.
  for (std::size_t round = 0; round < p.cfg.refine_rounds; ++round) {
    const mdp::SolveReport inner =
        mdp::solve_inner(p.model, GPoly::on_grid(p.cap, best_y, p.phi1), p.x0, p.cfg.inner);
    std::vector<double> candidate = chain.fitted(inner.policy);
    const double v = chain.value(candidate);
    if (!(v < best)) break;
    best = v;
    best_y = std::move(candidate);
    ++chain.stats.refinements;
  }

  chain.stats.best_value = best;
  return {std::move(best_y), best, chain.stats};
}

}  // namespace

OuterResult anneal(const mdp::MDPModel& model, const StepSpectrum& spec, int x0,
                   const OuterConfig& cfg) {
  cfg.validate();
  OuterResult result;
  result.c_hat = cost_cap(model);
  result.search_cap = result.c_hat > 0.0 ? result.c_hat : 1.0;
  const double phi1 = spec.max_value();
  result.m = cfg.m ? *cfg.m : grid_size_from_epsilon(phi1, result.search_cap, *cfg.epsilon);
  result.error_bound = error_bound(result.m, phi1, result.c_hat);

  const Problem problem{model, spec, x0, cfg, result.m, result.search_cap, phi1};
  std::vector<ChainResult> chains(cfg.restarts);
  const std::size_t workers = std::min(cfg.threads, cfg.restarts);
  if (workers <= 1) {
    for (std::size_t r = 0; r < cfg.restarts; ++r) chains[r] = run_chain(problem, r);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < cfg.restarts; r += workers) chains[r] = run_chain(problem, r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (std::size_t r = 0; r < chains.size(); ++r) {
    result.restarts.push_back(chains[r].stats);
    result.evaluations += chains[r].stats.evaluations;
    if (r == 0 || chains[r].value < chains[result.best_restart].value) result.best_restart = r;
  }
  result.best_y = chains[result.best_restart].y;
  const GPoly g = GPoly::on_grid(result.search_cap, result.best_y, phi1);
  result.inner_report = mdp::solve_inner(model, g, x0, cfg.inner);
  result.conjugate_integral = conjugate_integral(g, spec);
  result.best_value = result.inner_report.value_at_origin + result.conjugate_integral;
  return result;
}

}  // namespace srm::outer
