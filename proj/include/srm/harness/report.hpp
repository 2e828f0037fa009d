#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "srm/harness/oracle.hpp"
#include "srm/mdp/model.hpp"
#include "srm/mdp/solver.hpp"
#include "srm/outer/outer.hpp"
#include "srm/reinsurance/reinsurance.hpp"

namespace srm::harness {

/// Name of the field carrying elapsed time; everything else in a report is deterministic.
inline constexpr const char* kTimingField = "wall_clock_seconds";

nlohmann::json version_stamp();

/// Policy rows (stage, state, s, t, action) of a Markov policy.
nlohmann::json policy_json(const mdp::MDPModel& model, const mdp::MarkovPolicy& policy);
std::string policy_csv(const mdp::MDPModel& model, const mdp::MarkovPolicy& policy);

nlohmann::json inner_json(const mdp::MDPModel& model, const mdp::SolveReport& report,
                          bool with_policy = true);
nlohmann::json outer_json(const mdp::MDPModel& model, const outer::OuterResult& result,
                          bool with_policy = true);
nlohmann::json gap_json(const std::vector<GapRow>& rows);
std::string gap_csv(const std::vector<GapRow>& rows);
std::string reinsurance_policy_csv(const std::vector<reinsurance::PolicyRow>& rows);
nlohmann::json reinsurance_policy_json(const std::vector<reinsurance::PolicyRow>& rows);

/// Copy with every timing field removed, for byte comparisons.
nlohmann::json without_timing(nlohmann::json report);

}  // namespace srm::harness
