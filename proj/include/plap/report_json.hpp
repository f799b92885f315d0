#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "plap/constants.hpp"
#include "plap/continuation.hpp"
#include "plap/fixed_point.hpp"
#include "plap/plap_core.hpp"
#include "plap/run_config.hpp"
#include "plap/verification.hpp"

namespace plap {

using Json = nlohmann::ordered_json;

/// Finite numbers as-is, everything else as null.
Json json_number(double v);

Json to_json(const SolveReport& r);
Json to_json(const ProblemSpec& s);
Json to_json(const ConstantsReport& r);
Json to_json(const GradientCalibration& c);
Json to_json(const CheckResult& c);
Json to_json(const std::vector<CheckResult>& checks);
Json to_json(const std::vector<StageRecord>& stages);
Json to_json(const Membership& m);
Json to_json(const SweepRow& r);
Json to_json(const RunConfig& cfg);

ProblemSpec problem_from_json(const Json& j);

}  // namespace plap
