#include "srm/harness/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "srm/errors.hpp"
#include "srm/outer/conjugate.hpp"

namespace srm::harness {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

const json& need(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

template <class T>
T get(const json& v, const std::string& what) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type for " + what);
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj.at(key), where + "." + key) : fallback;
}

mdp::StageData parse_stage(const json& j, std::size_t X, std::size_t A, const std::string& where) {
  allow_keys(j, where, {"admissible", "probs", "transition", "cost"});
  mdp::StageData st;
  st.admissible = get<std::vector<std::vector<int>>>(need(j, "admissible", where), where + ".admissible");
  st.probs = get<std::vector<double>>(need(j, "probs", where), where + ".probs");
  const auto next = get<std::vector<std::vector<std::vector<int>>>>(need(j, "transition", where),
                                                                   where + ".transition");
  const auto cost = get<std::vector<std::vector<std::vector<double>>>>(need(j, "cost", where),
                                                                      where + ".cost");
  const std::size_t Z = st.probs.size();
  auto check_shape = [&](const auto& table, const char* name) {
    if (table.size() != X) throw ConfigError(where + "." + name + " needs one entry per state");
    for (const auto& per_a : table) {
      if (per_a.size() != A) throw ConfigError(where + "." + name + " needs one entry per action");
      for (const auto& per_z : per_a) {
        if (per_z.size() != Z) throw ConfigError(where + "." + name + " needs one entry per atom");
      }
    }
  };
  check_shape(next, "transition");
  check_shape(cost, "cost");
  for (auto& d : st.admissible) std::sort(d.begin(), d.end());
  for (std::size_t x = 0; x < X; ++x) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t z = 0; z < Z; ++z) {
        st.next.push_back(next[x][a][z]);
        st.cost.push_back(cost[x][a][z]);
      }
    }
  }
  return st;
}

json emit_stage(const mdp::StageData& st, std::size_t X, std::size_t A) {
  const std::size_t Z = st.probs.size();
  json next = json::array();
  json cost = json::array();
  for (std::size_t x = 0; x < X; ++x) {
    json nx = json::array();
    json cx = json::array();
    for (std::size_t a = 0; a < A; ++a) {
      json na = json::array();
      json ca = json::array();
      for (std::size_t z = 0; z < Z; ++z) {
        na.push_back(st.next[(x * A + a) * Z + z]);
        ca.push_back(st.cost[(x * A + a) * Z + z]);
      }
      nx.push_back(na);
      cx.push_back(ca);
    }
    next.push_back(nx);
    cost.push_back(cx);
  }
  return {{"admissible", st.admissible}, {"probs", st.probs}, {"transition", next}, {"cost", cost}};
}

mdp::MDPModel parse_model(const json& j, int& x0) {
  const std::string w = "model";
  allow_keys(j, w, {"states", "actions", "horizon", "discount", "initial_state", "cost_cap",
                    "terminal_cost", "stages", "admissible", "probs", "transition", "cost"});
  mdp::MDPModel m;
  m.states = get<std::vector<double>>(need(j, "states", w), "model.states");
  m.actions = get<std::vector<std::string>>(need(j, "actions", w), "model.actions");
  const json& h = need(j, "horizon", w);
  if (h.is_string()) {
    if (h.get<std::string>() != "infinite") throw ConfigError("model.horizon must be a number or \"infinite\"");
  } else {
    m.horizon = get<int>(h, "model.horizon");
  }
  m.discount = get<double>(need(j, "discount", w), "model.discount");
  x0 = get_or<int>(j, "initial_state", 0, w);
  m.terminal_cost = get_or<std::vector<double>>(j, "terminal_cost",
                                                std::vector<double>(m.states.size(), 0.0), w);
  if (j.contains("stages")) {
    if (j.contains("admissible") || j.contains("probs") || j.contains("transition") || j.contains("cost")) {
      throw ConfigError("model gives both 'stages' and stationary tables");
    }
    const json& stages = j.at("stages");
    if (!stages.is_array()) throw ConfigError("model.stages must be an array");
    for (std::size_t n = 0; n < stages.size(); ++n) {
      m.stages.push_back(parse_stage(stages[n], m.states.size(), m.actions.size(),
                                     "model.stages[" + std::to_string(n) + "]"));
    }
  } else {
    json st;
    for (const char* k : {"admissible", "probs", "transition", "cost"}) st[k] = need(j, k, w);
    m.stages.push_back(parse_stage(st, m.states.size(), m.actions.size(), w));
  }
  m.cost_cap = j.contains("cost_cap") ? get<double>(j.at("cost_cap"), "model.cost_cap") : m.max_cost();
  if (m.cost_cap < m.max_cost()) throw ConfigError("model.cost_cap is below the largest cost");
  m.validate();
  if (x0 < 0 || static_cast<std::size_t>(x0) >= m.states.size()) {
    throw ConfigError("model.initial_state out of range");
  }
  return m;
}

json emit_model(const mdp::MDPModel& m, int x0) {
  json j;
  j["states"] = m.states;
  j["actions"] = m.actions;
  j["horizon"] = m.horizon ? json(*m.horizon) : json("infinite");
  j["discount"] = m.discount;
  j["initial_state"] = x0;
  j["cost_cap"] = m.cost_cap;
  j["terminal_cost"] = m.terminal_cost;
  json stages = json::array();
  for (const auto& st : m.stages) stages.push_back(emit_stage(st, m.states.size(), m.actions.size()));
  j["stages"] = stages;
  return j;
}

DiscreteDistribution parse_dist(const json& j, const std::string& w) {
  allow_keys(j, w, {"atoms", "probs"});
  return DiscreteDistribution(get<std::vector<double>>(need(j, "atoms", w), w + ".atoms"),
                              get<std::vector<double>>(need(j, "probs", w), w + ".probs"));
}

json emit_dist(const DiscreteDistribution& d) {
  return {{"atoms", std::vector<double>(d.atoms().begin(), d.atoms().end())},
          {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
}

reinsurance::ReinsuranceConfig parse_reinsurance(const json& j) {
  const std::string w = "reinsurance";
  allow_keys(j, w, {"claims", "income", "theta", "discount", "horizon", "initial_surplus", "treaties",
                    "budget_constrained", "coc_rate", "surplus_grid"});
  reinsurance::ReinsuranceConfig c;
  c.claims = parse_dist(need(j, "claims", w), "reinsurance.claims");
  c.income = parse_dist(need(j, "income", w), "reinsurance.income");
  c.theta = get<double>(need(j, "theta", w), "reinsurance.theta");
  c.discount = get<double>(need(j, "discount", w), "reinsurance.discount");
  c.horizon = get<int>(need(j, "horizon", w), "reinsurance.horizon");
  c.initial_surplus = get<double>(need(j, "initial_surplus", w), "reinsurance.initial_surplus");
  c.budget_constrained = get_or<bool>(j, "budget_constrained", false, w);
  c.coc_rate = get_or<double>(j, "coc_rate", 1.0, w);
  const json& treaties = need(j, "treaties", w);
  if (!treaties.is_array()) throw ConfigError("reinsurance.treaties must be an array");
  for (const auto& t : treaties) {
    allow_keys(t, "treaty", {"kind", "parameter"});
    reinsurance::Treaty tr;
    tr.kind = reinsurance::parse_treaty_kind(get<std::string>(need(t, "kind", "treaty"), "treaty.kind"));
    tr.parameter = get_or<double>(t, "parameter", 0.0, "treaty");
    c.treaties.push_back(tr);
  }
  if (j.contains("surplus_grid")) {
    const json& g = j.at("surplus_grid");
    allow_keys(g, "reinsurance.surplus_grid", {"min", "max", "points"});
    c.surplus_grid = reinsurance::SurplusGrid{
        get<double>(need(g, "min", "surplus_grid"), "surplus_grid.min"),
        get<double>(need(g, "max", "surplus_grid"), "surplus_grid.max"),
        get<std::size_t>(need(g, "points", "surplus_grid"), "surplus_grid.points")};
  }
  c.validate();
  return c;
}

json emit_reinsurance(const reinsurance::ReinsuranceConfig& c) {
  json treaties = json::array();
  for (const auto& t : c.treaties) treaties.push_back({{"kind", t.kind_name()}, {"parameter", t.parameter}});
  json j = {{"claims", emit_dist(c.claims)},
            {"income", emit_dist(c.income)},
            {"theta", c.theta},
            {"discount", c.discount},
            {"horizon", c.horizon},
            {"initial_surplus", c.initial_surplus},
            {"treaties", treaties},
            {"budget_constrained", c.budget_constrained},
            {"coc_rate", c.coc_rate}};
  if (c.surplus_grid) {
    j["surplus_grid"] = {{"min", c.surplus_grid->min}, {"max", c.surplus_grid->max},
                         {"points", c.surplus_grid->points}};
  }
  return j;
}

StepSpectrum parse_spectrum(const json& j) {
  const std::string w = "spectrum";
  allow_keys(j, w, {"es", "breakpoints", "values", "mixture"});
  const int forms = static_cast<int>(j.contains("es")) + static_cast<int>(j.contains("breakpoints")) +
                    static_cast<int>(j.contains("mixture"));
  if (forms != 1) throw ConfigError("spectrum needs exactly one of 'es', 'breakpoints', 'mixture'");
  if (j.contains("es")) return StepSpectrum::expected_shortfall(get<double>(j.at("es"), "spectrum.es"));
  if (j.contains("mixture")) {
    std::vector<EsComponent> comps;
    for (const auto& c : j.at("mixture")) {
      allow_keys(c, "spectrum.mixture entry", {"alpha", "weight"});
      comps.push_back({get<double>(need(c, "alpha", "mixture"), "mixture.alpha"),
                       get<double>(need(c, "weight", "mixture"), "mixture.weight")});
    }
    return StepSpectrum::es_mixture(comps);
  }
  return StepSpectrum(get<std::vector<double>>(j.at("breakpoints"), "spectrum.breakpoints"),
                      get<std::vector<double>>(need(j, "values", w), "spectrum.values"));
}

json emit_spectrum(const StepSpectrum& s) {
  return {{"breakpoints", std::vector<double>(s.breakpoints().begin(), s.breakpoints().end())},
          {"values", std::vector<double>(s.values().begin(), s.values().end())}};
}

void parse_outer(const json& j, outer::OuterConfig& o) {
  const std::string w = "outer";
  allow_keys(j, w, {"epsilon", "m", "restarts", "anneal_steps", "initial_temperature", "cooling_rate",
                    "move_scale", "seed", "threads", "refine_rounds"});
  if (j.contains("epsilon")) o.epsilon = get<double>(j.at("epsilon"), "outer.epsilon");
  if (j.contains("m")) o.m = get<std::size_t>(j.at("m"), "outer.m");
  o.restarts = get_or<std::size_t>(j, "restarts", o.restarts, w);
  o.anneal_steps = get_or<std::size_t>(j, "anneal_steps", o.anneal_steps, w);
  o.initial_temperature = get_or<double>(j, "initial_temperature", o.initial_temperature, w);
  o.cooling_rate = get_or<double>(j, "cooling_rate", o.cooling_rate, w);
  o.move_scale = get_or<double>(j, "move_scale", o.move_scale, w);
  o.seed = get_or<std::uint64_t>(j, "seed", o.seed, w);
  o.threads = get_or<std::size_t>(j, "threads", o.threads, w);
  o.refine_rounds = get_or<std::size_t>(j, "refine_rounds", o.refine_rounds, w);
}

json emit_outer(const outer::OuterConfig& o) {
  json j = {{"restarts", o.restarts},
            {"anneal_steps", o.anneal_steps},
            {"initial_temperature", o.initial_temperature},
            {"cooling_rate", o.cooling_rate},
            {"move_scale", o.move_scale},
            {"seed", o.seed},
            {"threads", o.threads},
            {"refine_rounds", o.refine_rounds}};
  if (o.epsilon) j["epsilon"] = *o.epsilon;
  if (o.m) j["m"] = *o.m;
  return j;
}

void parse_inner(const json& j, mdp::InnerOptions& in) {
  const std::string w = "inner";
  allow_keys(j, w, {"mode", "exact_cap", "grid_points", "grid_top", "t_scales", "tolerance", "grid_margin",
                    "max_iterations"});
  if (j.contains("mode")) {
    const auto mode = get<std::string>(j.at("mode"), "inner.mode");
    if (mode == "exact") {
      in.mode = mdp::AxisMode::exact;
    } else if (mode == "grid") {
      in.mode = mdp::AxisMode::grid;
    } else {
      throw ConfigError("inner.mode must be 'exact' or 'grid'");
    }
  }
  in.exact_cap = get_or<std::size_t>(j, "exact_cap", in.exact_cap, w);
  in.grid_points = get_or<std::size_t>(j, "grid_points", in.grid_points, w);
  in.grid_top = get_or<double>(j, "grid_top", in.grid_top, w);
  in.t_scales = get_or<std::vector<double>>(j, "t_scales", in.t_scales, w);
  in.tolerance = get_or<double>(j, "tolerance", in.tolerance, w);
  in.grid_margin = get_or<double>(j, "grid_margin", in.grid_margin, w);
  in.max_iterations = get_or<int>(j, "max_iterations", in.max_iterations, w);
  if (in.grid_points < 2) throw ConfigError("inner.grid_points must be at least 2");
  if (!(in.tolerance > 0.0)) throw ConfigError("inner.tolerance must be positive");
}

json emit_inner(const mdp::InnerOptions& in) {
  return {{"mode", in.mode == mdp::AxisMode::exact ? "exact" : "grid"},
          {"exact_cap", in.exact_cap},
          {"grid_points", in.grid_points},
          {"grid_top", in.grid_top},
          {"t_scales", in.t_scales},
          {"tolerance", in.tolerance},
          {"grid_margin", in.grid_margin},
          {"max_iterations", in.max_iterations}};
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  allow_keys(doc, "scenario", {"kind", "model", "reinsurance", "spectrum", "g", "outer", "inner", "oracle"});
  Scenario s;
  const auto kind = get<std::string>(need(doc, "kind", "scenario"), "kind");
  if (kind == "generic_mdp") {
    s.kind = ScenarioKind::generic_mdp;
    s.model = parse_model(need(doc, "model", "scenario"), s.initial_state);
    if (doc.contains("reinsurance")) throw ConfigError("generic_mdp scenario cannot have a reinsurance section");
  } else if (kind == "reinsurance") {
    s.kind = ScenarioKind::reinsurance;
    s.reinsurance = parse_reinsurance(need(doc, "reinsurance", "scenario"));
    if (doc.contains("model")) throw ConfigError("reinsurance scenario cannot have a model section");
  } else {
    throw ConfigError("kind must be 'generic_mdp' or 'reinsurance'");
  }
  s.spectrum = parse_spectrum(need(doc, "spectrum", "scenario"));
  if (doc.contains("g")) {
    const json& g = doc.at("g");
    allow_keys(g, "g", {"type", "q", "knots", "values", "max_slope"});
    GSpec gs;
    gs.type = get_or<std::string>(g, "type", "identity", "g");
    if (gs.type != "identity" && gs.type != "hinge" && gs.type != "piecewise") {
      throw ConfigError("g.type must be identity, hinge or piecewise");
    }
    gs.q = get_or<double>(g, "q", 0.0, "g");
    gs.knots = get_or<std::vector<double>>(g, "knots", {}, "g");
    gs.values = get_or<std::vector<double>>(g, "values", {}, "g");
    if (g.contains("max_slope")) gs.max_slope = get<double>(g.at("max_slope"), "g.max_slope");
    if (gs.type == "piecewise" && (gs.knots.size() < 2 || gs.knots.size() != gs.values.size())) {
      throw ConfigError("piecewise g needs matching knots and values (at least two)");
    }
    s.g = gs;
  }
  if (doc.contains("outer")) parse_outer(doc.at("outer"), s.outer);
  if (!s.outer.epsilon && !s.outer.m) s.outer.epsilon = 0.1;
  s.outer.validate();
  if (doc.contains("inner")) parse_inner(doc.at("inner"), s.inner);
  s.outer.inner = s.inner;
  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    allow_keys(o, "oracle", {"enabled", "policy_cap", "lattice_pitch", "lattice_cap", "m_list"});
    s.oracle.enabled = get_or<bool>(o, "enabled", false, "oracle");
    s.oracle.policy_cap = get_or<double>(o, "policy_cap", s.oracle.policy_cap, "oracle");
    s.oracle.lattice_pitch = get_or<double>(o, "lattice_pitch", 0.0, "oracle");
    s.oracle.lattice_cap = get_or<double>(o, "lattice_cap", s.oracle.lattice_cap, "oracle");
    s.oracle.m_list = get_or<std::vector<std::size_t>>(o, "m_list", s.oracle.m_list, "oracle");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

json emit_scenario(const Scenario& s) {
  json j;
  if (s.kind == ScenarioKind::generic_mdp) {
    j["kind"] = "generic_mdp";
    j["model"] = emit_model(*s.model, s.initial_state);
  } else {
    j["kind"] = "reinsurance";
    j["reinsurance"] = emit_reinsurance(*s.reinsurance);
  }
  j["spectrum"] = emit_spectrum(s.spectrum);
  if (s.g) {
    json g = {{"type", s.g->type}, {"q", s.g->q}, {"knots", s.g->knots}, {"values", s.g->values}};
    if (s.g->max_slope) g["max_slope"] = *s.g->max_slope;
    j["g"] = g;
  }
  j["outer"] = emit_outer(s.outer);
  j["inner"] = emit_inner(s.inner);
  j["oracle"] = {{"enabled", s.oracle.enabled},
                 {"policy_cap", s.oracle.policy_cap},
                 {"lattice_pitch", s.oracle.lattice_pitch},
                 {"lattice_cap", s.oracle.lattice_cap},
                 {"m_list", s.oracle.m_list}};
  return j;
}

mdp::MDPModel scenario_model(const Scenario& s, int* x0) {
  if (s.kind == ScenarioKind::generic_mdp) {
    if (x0) *x0 = s.initial_state;
    return *s.model;
  }
  auto built = reinsurance::build_mdp(*s.reinsurance);
  if (x0) *x0 = built.initial_state;
  return std::move(built.model);
}

GPoly scenario_g(const Scenario& s, const mdp::MDPModel& model) {
  const GSpec gs = s.g.value_or(GSpec{});
  double cap = outer::cost_cap(model);
  if (!(cap > 0.0)) cap = 1.0;
  if (gs.type == "identity") return GPoly::from_knots({0.0, cap}, {0.0, cap}, gs.max_slope.value_or(1.0));
  if (gs.type == "hinge") {
    if (gs.q <= 0.0 || gs.q >= cap) {
      return gs.q <= 0.0 ? GPoly::from_knots({0.0, cap}, {-gs.q, cap - gs.q}, gs.max_slope.value_or(1.0))
                         : GPoly::from_knots({0.0, cap}, {0.0, 0.0}, gs.max_slope.value_or(1.0));
    }
    return GPoly::from_knots({0.0, gs.q, cap}, {0.0, 0.0, cap - gs.q}, gs.max_slope.value_or(1.0));
  }
  return GPoly::from_knots(gs.knots, gs.values, gs.max_slope.value_or(s.spectrum.max_value()));
}

}  // namespace srm::harness
