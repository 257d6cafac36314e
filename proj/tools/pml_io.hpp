#pragma once

#include <istream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pml/multipml.hpp"

namespace pml::io {

using nlohmann::json;

// One token per line; blank lines are skipped. Errors name the line.
std::vector<std::string> read_tokens(std::istream& in, const std::string& name);

Profile profile_from_json(const json& j);
json profile_to_json(const Profile& phi);

DProfile d_profile_from_json(const json& j);
json d_profile_to_json(const DProfile& dp);

// {"probs": [...]} or {"levels": [[value, count], ...]}.
DenseDistribution distribution_from_json(const json& j);

json levels_to_json(const LevelSetDistribution& p);
json levels_to_json(const TupleLevelSetDistribution& p);
json diagnostics_to_json(const PmlDiagnostics& d);

// Rounds to 15 significant digits; -inf and nan become null.
json number15(double v);

json read_json_file(const std::string& path);

}  // namespace pml::io
