#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pml/errors.hpp"
#include "pml_io.hpp"

using namespace pml;
using io::json;

namespace {

enum Exit { kOk = 0, kBadInput = 1, kNotCertified = 2, kGuard = 3 };

struct Config {
  std::vector<std::string> inputs;
  std::optional<double> eps1, eps2, delta;
  std::vector<std::string> properties;
  std::optional<int> d;
  std::string output;
  std::string format = "json";
};

void check_eps(const std::optional<double>& e, const char* name) {
  if (e && !(*e > 0.0 && *e <= 1.0)) throw InvalidInput(std::string(name) + " must lie in (0, 1]");
}

struct PropertySpec {
  std::string name;
  std::int64_t arg = 0;
};

PropertySpec parse_property(const std::string& s) {
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  if (name == "entropy" || name == "support" || name == "kl") {
    if (colon != std::string::npos) throw InvalidInput("property " + name + " takes no argument");
    return {name, 0};
  }
  if (name == "coverage" || name == "uniformity") {
    if (colon == std::string::npos) throw InvalidInput("property " + name + " needs an integer argument, e.g. " + name + ":10");
    const std::string arg = s.substr(colon + 1);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || arg.empty() || v < 0) throw InvalidInput("bad argument in property " + s);
    return {name, v};
  }
  throw InvalidInput("unknown property " + s);
}

json estimate_one(const LevelSetDistribution& p, const PropertySpec& prop) {
  if (prop.name == "entropy") return entropy(p);
  if (prop.name == "support") return support_size(p);
  if (prop.name == "coverage") return support_coverage(p, prop.arg);
  if (prop.name == "uniformity") return distance_to_uniformity(p, prop.arg);
  throw InvalidInput("property " + prop.name + " needs two coordinates");
}

class Emitter {
 public:
  explicit Emitter(const Config& c) : cfg_(c) {}
  void emit(const std::string& text) const {
    if (cfg_.output.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream f(cfg_.output, std::ios::binary);
    if (!f) throw InvalidInput(cfg_.output + ": cannot write");
    f << text;
  }

 private:
  const Config& cfg_;
};

// Flattens nested objects into "a.b value" lines.
void plain_lines(const json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) plain_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  out << prefix << ' ' << j.dump() << '\n';
}

std::string render(const json& j, const std::string& format) {
  if (format == "json") return j.dump() + "\n";
  std::ostringstream out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) plain_lines(j[i], "[" + std::to_string(i) + "]", out);
  } else {
    plain_lines(j, "", out);
  }
  return out.str();
}

std::string format_log(double v) {
  if (v == -INFINITY) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

int threads_for(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PML_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(hw, jobs));
}

// Runs job(i) for every input, in parallel, keeping result order.
template <class Job>
std::vector<json> run_batch(std::size_t count, Job job, bool& all_certified) {
  std::vector<json> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::vector<char> certified(count, 1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        bool ok = true;
        results[i] = job(i, ok);
        certified[i] = ok;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int t = threads_for(count);
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
  all_certified = true;
  for (char c : certified) all_certified = all_certified && c;
  return results;
}

PmlOptions options_of(const Config& c) {
  PmlOptions o;
  if (c.delta) {
    if (!(*c.delta > 0.0)) throw InvalidInput("delta must be positive");
    o.delta = c.delta;
  }
  return o;
}

int cmd_profile(const Config& c) {
  if (c.inputs.empty()) throw InvalidInput("profile needs a samples file");
  std::vector<std::vector<std::string>> seqs;
  for (const std::string& path : c.inputs) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput(path + ": cannot open");
    seqs.push_back(io::read_tokens(f, path));
  }
  const int d = c.d.value_or(static_cast<int>(seqs.size()));
  if (d != static_cast<int>(seqs.size())) throw InvalidInput("--d must match the number of samples files");
  json out;
  if (!c.d && seqs.size() == 1) {
    out = io::profile_to_json(d_profile_of(seqs).to_profile());
  } else {
    out = io::d_profile_to_json(d_profile_of(seqs));
  }
  Emitter(c).emit(render(out, c.format));
  return kOk;
}

int cmd_estimate(const Config& c) {
  if (c.inputs.empty()) throw InvalidInput("estimate needs a profile file");
  check_eps(c.eps1, "eps1");
  check_eps(c.eps2, "eps2");
  std::vector<PropertySpec> props;
  for (const std::string& s : c.properties) props.push_back(parse_property(s));
  if (props.empty()) props.push_back({"entropy", 0});
  const PmlOptions opts = options_of(c);
  std::vector<Profile> profiles;
  for (const std::string& path : c.inputs) profiles.push_back(io::profile_from_json(io::read_json_file(path)));

  bool certified = true;
  auto results = run_batch(profiles.size(), [&](std::size_t i, bool& ok) {
    const Profile& phi = profiles[i];
    const double e1 = c.eps1.value_or(default_eps(phi.n())), e2 = c.eps2.value_or(default_eps(phi.n()));
    const PmlResult r = approximate_pml(phi, e1, e2, opts);
    ok = r.diagnostics.certified;
    json properties = json::object();
    for (const PropertySpec& p : props) {
      const std::string key = p.name == "coverage" || p.name == "uniformity" ? p.name + ":" + std::to_string(p.arg) : p.name;
      properties[key] = estimate_one(r.distribution, p);
    }
    return json{{"levels", io::levels_to_json(r.distribution)},
                {"mass", r.distribution.total_mass()},
                {"properties", properties},
                {"diagnostics", io::diagnostics_to_json(r.diagnostics)}};
  }, certified);

  const json out = results.size() == 1 ? results[0] : json(results);
  Emitter(c).emit(render(out, c.format));
  return certified ? kOk : kNotCertified;
}

int cmd_estimate_d(const Config& c) {
  if (c.inputs.empty()) throw InvalidInput("estimate-d needs a d-profile file");
  check_eps(c.eps1, "eps1");
  check_eps(c.eps2, "eps2");
  std::vector<PropertySpec> props;
  for (const std::string& s : c.properties) props.push_back(parse_property(s));
  const PmlOptions opts = options_of(c);
  std::vector<DProfile> dps;
  for (const std::string& path : c.inputs) {
    dps.push_back(io::d_profile_from_json(io::read_json_file(path)));
    if (c.d && *c.d != dps.back().d) throw InvalidInput(path + ": d-profile dimension differs from --d");
  }
  if (props.empty()) props.push_back({dps.front().d == 2 ? "kl" : "entropy", 0});

  bool certified = true;
  auto results = run_batch(dps.size(), [&](std::size_t i, bool& ok) {
    const DProfile& dp = dps[i];
    std::vector<double> e1 = default_eps_d(dp), e2 = e1;
    if (c.eps1) e1.assign(e1.size(), *c.eps1);
    if (c.eps2) e2.assign(e2.size(), *c.eps2);
    const PmlResultD r = approximate_pml_d(dp, e1, e2, opts);
    ok = r.diagnostics.certified;
    json properties = json::object();
    for (const PropertySpec& p : props) {
      if (p.name == "kl") {
        properties["kl"] = kl_plugin(r.distribution);
        continue;
      }
      const std::string key = p.name == "coverage" || p.name == "uniformity" ? p.name + ":" + std::to_string(p.arg) : p.name;
      json per = json::array();
      for (int k = 0; k < dp.d; ++k) per.push_back(estimate_one(r.distribution.coordinate(k), p));
      properties[key] = per;
    }
    json mass = json::array();
    for (int k = 0; k < dp.d; ++k) mass.push_back(r.distribution.total_mass(k));
    return json{{"d", dp.d},
                {"levels", io::levels_to_json(r.distribution)},
                {"mass", mass},
                {"properties", properties},
                {"diagnostics", io::diagnostics_to_json(r.diagnostics)}};
  }, certified);

  const json out = results.size() == 1 ? results[0] : json(results);
  Emitter(c).emit(render(out, c.format));
  return certified ? kOk : kNotCertified;
}

int cmd_exact(const Config& c) {
  if (c.inputs.size() != 2) throw InvalidInput("exact needs a profile file and a distribution file");
  const Profile phi = io::profile_from_json(io::read_json_file(c.inputs[0]));
  const DenseDistribution p = io::distribution_from_json(io::read_json_file(c.inputs[1]));
  const LogProb lp = exact_profile_logprob(p, phi);
  const std::string text = c.format == "json" ? json{{"logprob", io::number15(lp.value)}}.dump() + "\n" : format_log(lp.value) + "\n";
  Emitter(c).emit(text);
  return kOk;
}

int cmd_bruteforce(const Config& c) {
  if (c.inputs.size() != 1) throw InvalidInput("bruteforce needs one profile file");
  const Profile phi = io::profile_from_json(io::read_json_file(c.inputs[0]));
  if (phi.n() > kOracleMaxN) throw GuardExceeded("brute force is limited to n <= 12");
  const BruteForceResult r = brute_force_pml(phi, GridSearchConfig::defaults(phi));
  json probs = json::array();
  for (double v : r.distribution.probs) probs.push_back(io::number15(v));
  std::string text;
  if (c.format == "json") {
    text = json{{"logprob", io::number15(r.logprob.value)}, {"probs", probs}}.dump() + "\n";
  } else {
    text = "logprob " + format_log(r.logprob.value) + "\nprobs";
    for (double v : r.distribution.probs) text += " " + format_log(v);
    text += "\n";
  }
  Emitter(c).emit(text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate profile maximum likelihood"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output", cfg.output, "Write the result to this file");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "plain"}));
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--eps1", cfg.eps1, "Probability grid parameter in (0, 1]");
    sub->add_option("--eps2", cfg.eps2, "Frequency grid parameter in (0, 1]");
    sub->add_option("--delta", cfg.delta, "Solver optimality tolerance");
    sub->add_option("--property", cfg.properties,
                    "entropy, support, coverage:m, uniformity:k or kl (repeatable)");
    sub->add_option("--d", cfg.d, "Number of sample sequences")->check(CLI::Range(1, 3));
  };

  auto* profile = app.add_subcommand("profile", "Profile (or d-profile) of samples files, one token per line");
  profile->add_option("samples", cfg.inputs, "Samples files")->required();
  profile->add_option("--d", cfg.d, "Number of sample sequences")->check(CLI::Range(1, 3));
  add_common(profile);

  auto* estimate = app.add_subcommand("estimate", "Approximate PML distribution and property estimates");
  estimate->add_option("profiles", cfg.inputs, "Profile JSON files (several run in parallel)")->required();
  add_solver(estimate);
  add_common(estimate);

  auto* estimate_d = app.add_subcommand("estimate-d", "Approximate PML for a d-profile");
  estimate_d->add_option("profiles", cfg.inputs, "d-profile JSON files")->required();
  add_solver(estimate_d);
  add_common(estimate_d);

  auto* exact = app.add_subcommand("exact", "Exact log profile probability of a small distribution");
  exact->add_option("files", cfg.inputs, "Profile JSON then distribution JSON")->required()->expected(2);
  add_common(exact);

  auto* brute = app.add_subcommand("bruteforce", "Grid-search PML for a small profile");
  brute->add_option("profile", cfg.inputs, "Profile JSON")->required()->expected(1);
  add_common(brute);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*profile) return cmd_profile(cfg);
    if (*estimate) return cmd_estimate(cfg);
    if (*estimate_d) return cmd_estimate_d(cfg);
    if (*exact) return cmd_exact(cfg);
    if (*brute) return cmd_bruteforce(cfg);
  } catch (const GuardExceeded& e) {
    std::cerr << "pml: " << e.what() << '\n';
    return kGuard;
  } catch (const std::exception& e) {
    std::cerr << "pml: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}
