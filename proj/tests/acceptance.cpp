// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance and time limit is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "srm/harness/oracle.hpp"
#include "srm/harness/report.hpp"
#include "srm/harness/scenario.hpp"
#include "srm/mdp/solver.hpp"
#include "srm/mdp/tables.hpp"
#include "srm/outer/conjugate.hpp"
#include "srm/outer/outer.hpp"
#include "srm/reinsurance/reinsurance.hpp"
#include "srm/risk/risk.hpp"
#include "support.hpp"

using namespace srm;
using test::Rng;

namespace {

constexpr double kTolMixture = 1e-10;
constexpr double kTolRU = 1e-10;
constexpr double kTolDual = 1e-8;
constexpr double kTolMarkov = 1e-12;
constexpr double kTolFixedPoint = 1e-6;
constexpr double kTolMonotone = 1e-12;
constexpr double kTolStructure = 1e-9;
constexpr double kOraclePolicyCap = 1e5;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome timed(double limit, const std::function<Outcome()>& body) {
  Clock c;
  Outcome o = body();
  const double t = c.seconds();
  if (t >= limit) o.pass = false;
  o.detail += fmt(" time=%.2fs", t) + fmt(" limit=%.0fs", limit);
  return o;
}

Outcome mixture_identity() {
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto d = test::random_dist(rng, 20, 0.0, 100.0);
    const auto spec = test::random_spectrum(rng, 6);
    worst = std::max(worst, std::abs(spectral_risk(d, spec) - spectral_risk_via_mixture(d, spec)));
  }
  return {worst <= kTolMixture, fmt("max_err=%.3e", worst)};
}

Outcome rockafellar_uryasev() {
  Rng rng(202);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto d = test::random_dist(rng, 20, -10.0, 50.0);
    for (double alpha : {0.0, 0.5, 0.9, 0.99}) {
      double best = std::numeric_limits<double>::infinity();
      for (double q : d.atoms()) best = std::min(best, ru_objective(d, alpha, q));
      const double es = expected_shortfall(d, alpha);
      // at level 0 the minimizer is the essential infimum
      const double q = alpha > 0.0 ? quantile(d, alpha) : d.min();
      const double at_q = ru_objective(d, alpha, q);
      worst = std::max({worst, std::abs(best - es), std::abs(at_q - es)});
    }
  }
  return {worst <= kTolRU, fmt("max_err=%.3e", worst)};
}

Outcome dual_identity() {
  Rng rng(303);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto d = test::random_dist(rng, 20, 0.0, 30.0);
    const auto spec = test::random_spectrum(rng, 6);
    const GPoly g = minimizer_g(spec, d);
    const double lhs = d.expectation([&](double x) { return g(x); }) + outer::conjugate_integral(g, spec);
    worst = std::max(worst, std::abs(lhs - spectral_risk(d, spec)));
  }
  return {worst <= kTolDual, fmt("max_err=%.3e", worst)};
}

// Knot values on [0, cap] with increasing slopes in [0, phi1].
GPoly random_gpoly(Rng& rng, double cap, double phi1) {
  const int m = rng.integer(2, 30);
  std::vector<double> slopes(static_cast<std::size_t>(m - 1));
  for (double& s : slopes) s = rng.coin(0.15) ? (rng.coin() ? 0.0 : phi1) : rng.uniform(0.0, phi1);
  std::sort(slopes.begin(), slopes.end());
  const double h = cap / (m - 1);
  std::vector<double> y{rng.uniform(0.0, cap)};
  for (double s : slopes) y.push_back(y.back() + s * h);
  return GPoly::on_grid(cap, y, phi1);
}

Outcome conjugate_closed_form() {
  Rng rng(404);
  constexpr int kGrid = 100000;
  double worst_ratio = 0.0;
  bool ok = true;
  for (int i = 0; i < 1000; ++i) {
    const double cap = rng.uniform(0.1, 20.0);
    const double phi1 = rng.uniform(1.0, 10.0);
    const GPoly g = random_gpoly(rng, cap, phi1);
    const double xi = rng.coin(0.1) ? (rng.coin() ? 0.0 : phi1) : rng.uniform(0.0, phi1);
    double brute = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kGrid; ++k) {
      const double s = cap * k / kGrid;
      brute = std::max(brute, s * xi - g(s));
    }
    const double closed = outer::conjugate_closed_form(g, xi);
    const double tol = 10.0 * cap * phi1 / kGrid;
    // the grid maximum can only undershoot the exact supremum
    if (brute > closed + 1e-9 * std::max(1.0, std::abs(closed))) ok = false;
    worst_ratio = std::max(worst_ratio, std::abs(closed - brute) / tol);
  }
  ok = ok && worst_ratio <= 1.0;
  return {ok, fmt("max_err/tol=%.3e", worst_ratio)};
}

// Convex increasing g on [0, c_hat] with a few kinks, built from increasing slopes.
GPoly random_disutility(Rng& rng, double c_hat) {
  const double cap = c_hat > 0.0 ? c_hat : 1.0;
  return random_gpoly(rng, cap, rng.uniform(0.5, 3.0));
}

Outcome markov_sufficiency() {
  Rng rng(505);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto model = test::random_micro(rng, test::MicroShape{});
    const GPoly g = random_disutility(rng, outer::cost_cap(model));
    mdp::InnerOptions opts;
    opts.mode = mdp::AxisMode::exact;
    const double dp = mdp::solve_finite(model, g, 0, opts).value_at_origin;
    const double tree = harness::oracle_min_expected(model, g, 0);
    worst = std::max(worst, std::abs(dp - tree));
  }
  return {worst <= kTolMarkov, fmt("max_err=%.3e", worst)};
}

StepSpectrum three_step() { return StepSpectrum({0.0, 0.3, 0.7, 1.0}, {0.4, 1.0, 1.6}); }

// 2-3 states, 2 actions, 2 disturbance atoms, horizon 2-3, small enough to enumerate.
std::vector<mdp::MDPModel> gap_models() {
  Rng rng(606);
  test::MicroShape shape;
  shape.max_actions = 2;
  shape.max_atoms = 2;
  std::vector<mdp::MDPModel> out;
  while (out.size() < 10) {
    auto m = test::random_micro(rng, shape);
    const bool shape_ok = m.states.size() >= 2 && m.actions.size() == 2 && m.horizon >= 2 &&
                          std::all_of(m.stages.begin(), m.stages.end(),
                                      [](const mdp::StageData& s) { return s.probs.size() == 2; });
    if (!shape_ok || outer::cost_cap(m) <= 0.0) continue;
    if (harness::count_policies(m, 0) > kOraclePolicyCap) continue;
    out.push_back(std::move(m));
  }
  return out;
}

struct GapRun {
  double slack = 0.0;      // max(0, gap - bound)
  double bound = 0.0;
  double gap = 0.0;
  std::string report;      // outer report without timing
};

std::vector<GapRun> run_gap(const std::vector<mdp::MDPModel>& models, std::size_t threads) {
  std::vector<GapRun> runs;
  const std::vector<StepSpectrum> spectra{StepSpectrum::expected_shortfall(0.5), three_step()};
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (const auto& spec : spectra) {
      outer::OuterConfig cfg;  // shipped annealing settings, seed 7
      cfg.m = 17 + 2 * (i % 3);
      cfg.threads = threads;
      cfg.inner.mode = mdp::AxisMode::exact;
      const auto res = outer::anneal(models[i], spec, 0, cfg);
      const double oracle = harness::oracle_exact_optimum(models[i], spec, 0, kOraclePolicyCap).value;
      GapRun r;
      r.gap = res.best_value - oracle;
      r.bound = res.error_bound;
      r.slack = std::max(0.0, r.gap - r.bound);
      r.report = harness::without_timing(harness::outer_json(models[i], res)).dump();
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

std::vector<GapRun> g_gap_runs;

Outcome end_to_end_bound() {
  g_gap_runs = run_gap(gap_models(), 1);
  bool ok = true;
  double worst_slack_ratio = 0.0, worst_gap = 0.0, min_gap = 0.0;
  for (const auto& r : g_gap_runs) {
    if (r.gap < -kTolStructure || r.slack >= r.bound / 10.0) ok = false;
    worst_slack_ratio = std::max(worst_slack_ratio, r.slack / r.bound);
    worst_gap = std::max(worst_gap, r.gap / r.bound);
    min_gap = std::min(min_gap, r.gap);
  }
  return {ok, "runs=" + std::to_string(g_gap_runs.size()) + fmt(" max_gap/bound=%.3e", worst_gap) +
                  fmt(" max_slack/bound=%.3e", worst_slack_ratio) + fmt(" min_gap=%.3e", min_gap)};
}

Outcome infinite_fixed_point() {
  const auto s = harness::load_scenario(std::string(SRM_SCENARIO_DIR) + "/geometric_infinite.json");
  int x0 = 0;
  const auto model = harness::scenario_model(s, &x0);
  const GPoly g = harness::scenario_g(s, model);
  auto opts = s.inner;
  opts.tolerance = kTolFixedPoint;
  const auto r = mdp::solve_infinite(model, g, x0, opts);
  const double expected = model.max_cost() / (1.0 - model.discount);
  const double err = std::abs(r.value_at_origin - expected);
  const bool ok = err <= kTolFixedPoint && r.residual <= kTolFixedPoint && r.min_increment >= -kTolMonotone;
  return {ok, fmt("value=%.9f", r.value_at_origin) + fmt(" err=%.3e", err) + fmt(" residual=%.3e", r.residual) +
                  fmt(" min_increment=%.3e", r.min_increment)};
}

// Largest increase of J along the sorted surplus axis, per shared s-point.
double surplus_increase(const mdp::ValueTable& table, const mdp::MDPModel& model) {
  std::vector<std::size_t> order(model.states.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return model.states[a] < model.states[b]; });
  double worst = 0.0;
  for (const auto& stage : table.stages) {
    for (const auto& layer : stage.layers) {
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto& lo = layer.states[order[i]];
        const auto& hi = layer.states[order[i + 1]];
        if (lo.s != hi.s) continue;
        for (std::size_t k = 0; k < lo.s.size(); ++k) worst = std::max(worst, hi.value[k] - lo.value[k]);
      }
    }
  }
  return worst;
}

Outcome reinsurance_structure() {
  const auto s = harness::load_scenario(std::string(SRM_SCENARIO_DIR) + "/reinsurance.json");
  const auto& cfg = *s.reinsurance;
  const auto full = reinsurance::solve_cost_of_capital(cfg, s.spectrum, s.outer);
  const double phi1 = s.spectrum.max_value();
  const GPoly g = full.outer.best_g(phi1);

  // (a) monotone structure of the value table at the selected g
  const auto built = reinsurance::build_mdp(cfg);
  const auto& report = full.outer.inner_report;
  const auto inv = mdp::check_value_table(report.values, g);
  const double up = surplus_increase(report.values, built.model);
  const bool a_ok = inv.holds(kTolStructure) && up <= kTolStructure;

  // (b) stop-loss-only menu against the full menu, in units of the shifted risk
  const auto sl_cfg = reinsurance::restrict_treaties(cfg, {reinsurance::TreatyKind::stop_loss});
  const auto sl_built = reinsurance::build_mdp(sl_cfg);
  const double conj = outer::conjugate_integral(g, s.spectrum);
  const double sl_at_g =
      mdp::solve_finite(sl_built.model, g, sl_built.initial_state, s.outer.inner).value_at_origin + conj;
  const auto sl = reinsurance::solve_cost_of_capital(sl_cfg, s.spectrum, s.outer);
  const double sl_value = std::min(sl_at_g, sl.outer.best_value);
  const double resolution = reinsurance::stop_loss_resolution(built, report, g);
  const bool b_ok = sl_value <= full.outer.best_value + resolution + kTolStructure;

  // (c) every proportional treaty is dominated in convex order by a stop-loss
  bool c_ok = true;
  int proportional = 0;
  double worst_violation = 0.0;
  for (const auto& t : cfg.treaties) {
    if (t.kind != reinsurance::TreatyKind::proportional) continue;
    ++proportional;
    const auto r = reinsurance::convex_order_check(cfg.claims, t);
    c_ok = c_ok && r.verified;
    worst_violation = std::max(worst_violation, r.max_violation);
  }
  c_ok = c_ok && proportional > 0;

  return {a_ok && b_ok && c_ok,
          std::string("a=") + (a_ok ? "ok" : "fail") + fmt(" s_dec=%.2e", inv.max_s_decrease) +
              fmt(" t_dec=%.2e", inv.max_t_decrease) + fmt(" below_g=%.2e", inv.max_below_g) +
              fmt(" surplus_inc=%.2e", up) + " b=" + (b_ok ? "ok" : "fail") + fmt(" sl=%.6f", sl_value) +
              fmt(" full=%.6f", full.outer.best_value) + fmt(" resolution=%.6f", resolution) +
              " c=" + (c_ok ? "ok" : "fail") + " proportional=" + std::to_string(proportional) +
              fmt(" max_violation=%.2e", worst_violation) + fmt(" snap=%.3f", full.max_snap_error)};
}

Outcome determinism() {
  if (g_gap_runs.empty()) return {false, "criterion 6 did not run"};
  const auto models = gap_models();
  const auto repeat = run_gap(models, 1);
  const auto parallel = run_gap(models, 4);
  std::size_t same_repeat = 0, same_parallel = 0;
  for (std::size_t i = 0; i < g_gap_runs.size(); ++i) {
    same_repeat += repeat[i].report == g_gap_runs[i].report;
    same_parallel += parallel[i].report == g_gap_runs[i].report;
  }
  const std::size_t n = g_gap_runs.size();
  return {same_repeat == n && same_parallel == n,
          "identical_repeat=" + std::to_string(same_repeat) + "/" + std::to_string(n) +
              " identical_threads4=" + std::to_string(same_parallel) + "/" + std::to_string(n)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;
    Outcome (*body)();
  };
  const Criterion criteria[] = {
      {1, "es-mixture identity", 1.0, mixture_identity},
      {2, "rockafellar-uryasev minimum", 1.0, rockafellar_uryasev},
      {3, "dual representation", 5.0, dual_identity},
      {4, "conjugate closed form", 10.0, conjugate_closed_form},
      {5, "markov sufficiency", 30.0, markov_sufficiency},
      {6, "end-to-end error bound", 300.0, end_to_end_bound},
      {7, "infinite-horizon fixed point", 10.0, infinite_fixed_point},
      {8, "reinsurance structure", 300.0, reinsurance_structure},
      {9, "determinism", 600.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = timed(c.limit, c.body);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d %s: %s %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
