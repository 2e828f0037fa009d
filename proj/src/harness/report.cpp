#include "srm/harness/report.hpp"

#include <sstream>

namespace srm::harness {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

json version_stamp() { return {{"name", "srm"}, {"version", SRM_VERSION}}; }

json policy_json(const mdp::MDPModel& model, const mdp::MarkovPolicy& policy) {
  json rows = json::array();
  for (std::size_t n = 0; n < policy.stages.size(); ++n) {
    for (const auto& layer : policy.stages[n].layers) {
      for (std::size_t x = 0; x < layer.states.size(); ++x) {
        const auto& slice = layer.states[x];
        for (std::size_t k = 0; k < slice.s.size(); ++k) {
          rows.push_back({{"stage", n},
                          {"state", model.states[x]},
                          {"s", slice.s[k]},
                          {"t", layer.t},
                          {"action", model.actions[static_cast<std::size_t>(slice.action[k])]}});
        }
      }
    }
  }
  return rows;
}

std::string policy_csv(const mdp::MDPModel& model, const mdp::MarkovPolicy& policy) {
  std::ostringstream os;
  os << "stage,state,s,t,action\n";
  for (const auto& row : policy_json(model, policy)) {
    os << row["stage"].get<std::size_t>() << ',' << fmt(row["state"].get<double>()) << ','
       << fmt(row["s"].get<double>()) << ',' << fmt(row["t"].get<double>()) << ','
       << row["action"].get<std::string>() << '\n';
  }
  return os.str();
}

json inner_json(const mdp::MDPModel& model, const mdp::SolveReport& r, bool with_policy) {
  json j = {{"value", r.value_at_origin},
            {"iterations", r.iterations},
            {"residual", r.residual},
            {"points", r.points},
            {"mode", r.values.mode == mdp::AxisMode::exact ? "exact" : "grid"},
            {"discretization", r.note == mdp::DiscretizationNote::exact ? "exact" : "interpolated"},
            {"fell_back_to_grid", r.fell_back_to_grid}};
  if (with_policy) j["policy"] = policy_json(model, r.policy);
  return j;
}

json outer_json(const mdp::MDPModel& model, const outer::OuterResult& r, bool with_policy) {
  json restarts = json::array();
  for (const auto& s : r.restarts) {
    restarts.push_back({{"start_value", s.start_value},
                        {"best_value", s.best_value},
                        {"accepted", s.accepted},
                        {"evaluations", s.evaluations},
                        {"cache_hits", s.cache_hits},
                        {"refinements", s.refinements}});
  }
  return {{"best_value", r.best_value},
          {"inner_value", r.inner_report.value_at_origin},
          {"conjugate_integral", r.conjugate_integral},
          {"error_bound", r.error_bound},
          {"m", r.m},
          {"c_hat", r.c_hat},
          {"best_y", r.best_y},
          {"evaluations", r.evaluations},
          {"best_restart", r.best_restart},
          {"restarts", restarts},
          {"inner", inner_json(model, r.inner_report, with_policy)}};
}

json gap_json(const std::vector<GapRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"m", r.m},
                   {"lattice_points", r.lattice_points},
                   {"best", r.best},
                   {"oracle", r.oracle},
                   {"gap", r.gap},
                   {"bound", r.bound},
                   {"best_y", r.best_y}});
  }
  return out;
}

std::string gap_csv(const std::vector<GapRow>& rows) {
  std::ostringstream os;
  os << "m,lattice_points,best,oracle,gap,bound\n";
  for (const auto& r : rows) {
    os << r.m << ',' << fmt(r.lattice_points) << ',' << fmt(r.best) << ',' << fmt(r.oracle) << ','
       << fmt(r.gap) << ',' << fmt(r.bound) << '\n';
  }
  return os.str();
}

std::string reinsurance_policy_csv(const std::vector<reinsurance::PolicyRow>& rows) {
  std::ostringstream os;
  os << "stage,surplus,s,t,treaty_kind,parameter\n";
  for (const auto& r : rows) {
    os << r.stage << ',' << fmt(r.surplus) << ',' << fmt(r.s) << ',' << fmt(r.t) << ',' << r.treaty_kind
       << ',' << fmt(r.parameter) << '\n';
  }
  return os.str();
}

json reinsurance_policy_json(const std::vector<reinsurance::PolicyRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"stage", r.stage},
                   {"surplus", r.surplus},
                   {"s", r.s},
                   {"t", r.t},
                   {"treaty_kind", r.treaty_kind},
                   {"parameter", r.parameter}});
  }
  return out;
}

json without_timing(json report) {
  if (report.is_object()) {
    report.erase(kTimingField);
    for (auto& [k, v] : report.items()) v = without_timing(v);
  } else if (report.is_array()) {
    for (auto& v : report) v = without_timing(v);
  }
  return report;
}

}  // namespace srm::harness
