#include "pml_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pml/errors.hpp"

namespace pml::io {

namespace {

bool valid_utf8(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    const int extra = c < 0x80 ? 0 : (c >> 5) == 0x6 ? 1 : (c >> 4) == 0xE ? 2 : (c >> 3) == 0x1E ? 3 : -1;
    if (extra < 0 || i + static_cast<std::size_t>(extra) >= s.size() + 1) return false;
    for (int k = 1; k <= extra; ++k)
      if ((static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) >> 6) != 0x2) return false;
    i += static_cast<std::size_t>(extra) + 1;
  }
  return true;
}

std::int64_t as_count(const json& v, const char* what) {
  if (!v.is_number_integer()) throw InvalidInput(std::string(what) + " must be an integer");
  return v.get<std::int64_t>();
}

}  // namespace

std::vector<std::string> read_tokens(std::istream& in, const std::string& name) {
  std::vector<std::string> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!valid_utf8(line)) throw InvalidInput(name + ":" + std::to_string(lineno) + ": invalid UTF-8");
    if (line.empty()) continue;
    out.push_back(line);
  }
  if (in.bad()) throw InvalidInput(name + ": read error");
  if (out.empty()) throw InvalidInput(name + ": no samples");
  return out;
}

Profile profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array()) throw InvalidInput("profile JSON needs a \"pairs\" array");
  std::vector<ProfileEntry> pairs;
  for (const json& p : j["pairs"]) {
    if (!p.is_array() || p.size() != 2) throw InvalidInput("each profile pair is [frequency, count]");
    pairs.push_back({as_count(p[0], "frequency"), as_count(p[1], "count")});
  }
  return Profile::from_pairs(std::move(pairs));
}

json profile_to_json(const Profile& phi) {
  json pairs = json::array();
  for (const ProfileEntry& e : phi.pairs()) pairs.push_back({e.frequency, e.count});
  return {{"pairs", pairs}};
}

DProfile d_profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("entries") || !j["entries"].is_array())
    throw InvalidInput("d-profile JSON needs \"d\" and an \"entries\" array");
  const int d = static_cast<int>(as_count(j["d"], "d"));
  std::map<std::vector<std::int64_t>, std::int64_t> entries;
  for (const json& e : j["entries"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_array()) throw InvalidInput("each d-profile entry is [[f1, ..., fd], count]");
    std::vector<std::int64_t> t;
    for (const json& f : e[0]) t.push_back(as_count(f, "frequency"));
    if (entries.count(t)) throw InvalidInput("repeated frequency tuple in d-profile");
    entries[t] = as_count(e[1], "count");
  }
  return DProfile::from_entries(d, std::move(entries));
}

json d_profile_to_json(const DProfile& dp) {
  json entries = json::array();
  // Descending by tuple, matching the 1-d convention.
  for (auto it = dp.entries.rbegin(); it != dp.entries.rend(); ++it) entries.push_back({it->first, it->second});
  return {{"d", dp.d}, {"entries", entries}};
}

DenseDistribution distribution_from_json(const json& j) {
  DenseDistribution p;
  if (j.is_object() && j.contains("probs") && j["probs"].is_array()) {
    for (const json& v : j["probs"]) {
      if (!v.is_number()) throw InvalidInput("probabilities must be numbers");
      p.probs.push_back(v.get<double>());
    }
  } else if (j.is_object() && j.contains("levels") && j["levels"].is_array()) {
    for (const json& l : j["levels"]) {
      if (!l.is_array() || l.size() != 2 || !l[0].is_number()) throw InvalidInput("each level is [value, count]");
      const std::int64_t c = as_count(l[1], "count");
      if (c < 0 || c > 1'000'000) throw InvalidInput("level count out of range");
      p.probs.insert(p.probs.end(), static_cast<std::size_t>(c), l[0].get<double>());
    }
  } else {
    throw InvalidInput("distribution JSON needs \"probs\" or \"levels\"");
  }
  for (double v : p.probs)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("probabilities must be finite and nonnegative");
  return p;
}

json levels_to_json(const LevelSetDistribution& p) {
  json out = json::array();
  for (const Level& l : p.levels) out.push_back({l.value, l.count});
  return out;
}

json levels_to_json(const TupleLevelSetDistribution& p) {
  json out = json::array();
  for (const TupleLevel& l : p.levels) out.push_back({l.values, l.count});
  return out;
}

json diagnostics_to_json(const PmlDiagnostics& d) {
  const SlackTerms& s = d.slack;
  return {
      {"dims", d.dims},
      {"n", d.n},
      {"n_prime", d.n_prime},
      {"eps1", d.eps},
      {"eps2", d.gamma},
      {"base_rows", d.base_rows},
      {"columns", d.columns},
      {"active_columns", d.active_columns},
      {"log_c_phi_prime", d.log_c_phi_prime},
      {"log_g_fractional", d.log_g_fractional},
      {"log_g_rounded", d.log_g_rounded},
      {"log_w_rounded", d.log_w_rounded},
      {"rounding_loss", d.rounding_loss},
      {"rounding_bound", d.rounding_bound},
      {"solver_delta", d.solver_delta},
      {"certified_gap", d.certified_gap},
      {"certified", d.certified},
      {"iterations", d.iterations},
      {"pseudo_mass", d.pseudo_mass},
      {"slack",
       {{"min_probability", s.min_probability},
        {"probability_discretization", s.probability_discretization},
        {"profile_discretization", s.profile_discretization},
        {"log_k_bound", s.log_k_bound},
        {"stirling_upper", s.stirling_upper},
        {"solver_gap", s.solver_gap},
        {"rounding", s.rounding},
        {"stirling_lower", s.stirling_lower}}},
      {"delta_total", d.delta_total},
      {"logprob_lower_bound", d.logprob_lower_bound},
  };
}

json number15(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput(path + ": cannot open");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace pml::io
