#include "pml/multipml.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "pipeline_core.hpp"
#include "pml/errors.hpp"

namespace pml {

namespace {

void check_dims(int d) {
  if (d < 1 || d > kMaxDims) throw InvalidInput("dimension must be between 1 and 3");
}

void check_grid_params(const std::vector<double>& v, int d, const char* what) {
  if (static_cast<int>(v.size()) != d) throw InvalidInput(std::string(what) + " needs one value per coordinate");
  for (double x : v)
    if (!(x > 0.0 && x <= 1.0)) throw InvalidInput(std::string(what) + " values must lie in (0, 1]");
}

}  // namespace

DProfile DProfile::from_entries(int d, std::map<std::vector<std::int64_t>, std::int64_t> entries) {
  check_dims(d);
  DProfile dp;
  dp.d = d;
  dp.n.assign(static_cast<std::size_t>(d), 0);
  for (auto& [tuple, count] : entries) {
    if (static_cast<int>(tuple.size()) != d) throw InvalidInput("frequency tuple has the wrong length");
    if (count <= 0) throw InvalidInput("d-profile counts must be positive");
    bool any = false;
    for (std::int64_t f : tuple) {
      if (f < 0) throw InvalidInput("frequencies must be nonnegative");
      any = any || f > 0;
    }
    if (!any) throw InvalidInput("the all-zero frequency tuple is not part of a d-profile");
    for (int k = 0; k < d; ++k) dp.n[static_cast<std::size_t>(k)] += tuple[static_cast<std::size_t>(k)] * count;
  }
  for (std::int64_t v : dp.n)
    if (v <= 0) throw InvalidInput("every coordinate needs at least one sample");
  dp.entries = std::move(entries);
  return dp;
}

std::vector<FrequencyClass> DProfile::classes() const {
  std::vector<FrequencyClass> out;
  for (const auto& [tuple, count] : entries) out.push_back({tuple, count});
  return out;
}

std::int64_t DProfile::distinct() const {
  std::int64_t s = 0;
  for (const auto& e : entries) s += e.second;
  return s;
}

Profile DProfile::to_profile() const {
  if (d != 1) throw InvalidInput("only a one-coordinate d-profile is an ordinary profile");
  std::vector<ProfileEntry> pairs;
  for (const auto& [tuple, count] : entries) pairs.push_back({tuple[0], count});
  return Profile::from_pairs(std::move(pairs));
}

DProfile d_profile_of(const std::vector<std::vector<std::string>>& seqs) {
  const int d = static_cast<int>(seqs.size());
  check_dims(d);
  std::unordered_map<std::string, std::vector<std::int64_t>> freq;
  for (int k = 0; k < d; ++k) {
    if (seqs[static_cast<std::size_t>(k)].empty()) throw InvalidInput("sequences must be nonempty");
    for (const std::string& tok : seqs[static_cast<std::size_t>(k)]) {
      auto& f = freq[tok];
      f.resize(static_cast<std::size_t>(d), 0);
      ++f[static_cast<std::size_t>(k)];
    }
  }
  std::map<std::vector<std::int64_t>, std::int64_t> entries;
  for (const auto& kv : freq) ++entries[kv.second];
  return DProfile::from_entries(d, std::move(entries));
}

DProfile d_profile_of_chars(const std::vector<std::string>& seqs) {
  std::vector<std::vector<std::string>> tokens;
  for (const std::string& s : seqs) {
    std::vector<std::string> t;
    for (char c : s) t.emplace_back(1, c);
    tokens.push_back(std::move(t));
  }
  return d_profile_of(tokens);
}

DGrids DGrids::build(const std::vector<std::int64_t>& n, const std::vector<double>& eps,
                     const std::vector<double>& gamma, std::int64_t distinct) {
  const int d = static_cast<int>(n.size());
  check_dims(d);
  check_grid_params(eps, d, "eps");
  check_grid_params(gamma, d, "gamma");
  DGrids g;
  for (int k = 0; k < d; ++k) {
    const std::int64_t depth = std::max(n[static_cast<std::size_t>(k)], distinct);
    g.plevel.push_back(ProbabilityGrid::build(depth, eps[static_cast<std::size_t>(k)]));
    g.mlevel.push_back(FrequencyGrid::build(n[static_cast<std::size_t>(k)], gamma[static_cast<std::size_t>(k)]));
  }
  return g;
}

int DGrids::rows() const {
  long long r = 1;
  for (const auto& p : plevel) r *= p.size();
  if (r > 50'000'000) throw GuardExceeded("product probability grid is too large");
  return static_cast<int>(r);
}

std::vector<double> DGrids::level(int i) const {
  const int d = static_cast<int>(plevel.size());
  std::vector<double> v(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    const int b = plevel[static_cast<std::size_t>(k)].size();
    v[static_cast<std::size_t>(k)] = plevel[static_cast<std::size_t>(k)].value(i % b);
    i /= b;
  }
  return v;
}

DProfile discretize_d_profile(const DProfile& dp, const DGrids& grids) {
  if (static_cast<int>(grids.mlevel.size()) != dp.d) throw InvalidInput("grids and d-profile differ in dimension");
  std::map<std::vector<std::int64_t>, std::int64_t> out;
  for (const auto& [tuple, count] : dp.entries) {
    std::vector<std::int64_t> t = tuple;
    for (int k = 0; k < dp.d; ++k) {
      const auto& g = grids.mlevel[static_cast<std::size_t>(k)];
      if (t[static_cast<std::size_t>(k)] > 0) t[static_cast<std::size_t>(k)] = g.value(g.ceil_index(t[static_cast<std::size_t>(k)]));
    }
    out[t] += count;
  }
  return DProfile::from_entries(dp.d, std::move(out));
}

FeasibleSetSpec product_spec(const DProfile& dp_prime, const DGrids& grids) {
  const int d = dp_prime.d;
  if (static_cast<int>(grids.plevel.size()) != d) throw InvalidInput("grids and d-profile differ in dimension");
  const int R = grids.rows();

  std::vector<std::vector<std::int64_t>> cols;
  std::vector<std::int64_t> counts;
  if (d == 1) {
    for (std::int64_t f : grids.mlevel[0].values()) {
      cols.push_back({f});
      auto it = dp_prime.entries.find({f});
      counts.push_back(it == dp_prime.entries.end() ? 0 : it->second);
    }
  } else {
    for (const auto& [tuple, count] : dp_prime.entries) {
      cols.push_back(tuple);
      counts.push_back(count);
    }
  }
  const int C = static_cast<int>(cols.size()) + 1;

  Eigen::MatrixXd levels(R, d), logs(R, d);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < R; ++i) {
    int rem = i;
    for (int k = d - 1; k >= 0; --k) {
      const auto& p = grids.plevel[static_cast<std::size_t>(k)];
      const int t = rem % p.size();
      rem /= p.size();
      levels(i, k) = p.value(t);
      logs(i, k) = p.log_value(t);
    }
  }
  Eigen::MatrixXd freqs = Eigen::MatrixXd::Zero(C, d);
  Eigen::VectorXd targets = Eigen::VectorXd::Zero(C);
  for (int j = 1; j < C; ++j) {
    for (int k = 0; k < d; ++k) freqs(j, k) = static_cast<double>(cols[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)]);
    targets(j) = static_cast<double>(counts[static_cast<std::size_t>(j - 1)]);
  }

  FeasibleSetSpec s = FeasibleSetSpec::make(levels, freqs, targets, SetVariant::kFractional);
  // Exact ladder logs rather than log(exp(.)).
  s.level_logs = logs;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) {
      double c = freqs(j, 0) * logs(i, 0);
      for (int k = 1; k < d; ++k)
        if (freqs(j, k) != 0.0) c += freqs(j, k) * logs(i, k);
      s.coef(i, j) = c;
    }
  s.ladder.clear();
  for (const auto& p : grids.plevel) s.ladder.push_back(p.size());
  return s;
}

std::vector<double> default_eps_d(const DProfile& dp) {
  std::vector<double> out;
  for (std::int64_t v : dp.n) out.push_back(std::pow(static_cast<double>(v), -1.0 / (2.0 * dp.d + 1.0)));
  return out;
}

PmlResultD approximate_pml_d(const DProfile& dp, const std::vector<double>& eps, const std::vector<double>& gamma,
                             const PmlOptions& opts) {
  check_dims(dp.d);
  if (dp.entries.empty()) throw InvalidInput("d-profile is empty");
  const DGrids grids = DGrids::build(dp.n, eps, gamma, dp.distinct());
  const DProfile dp_prime = discretize_d_profile(dp, grids);

  detail::CoreInput in;
  in.spec = product_spec(dp_prime, grids);
  in.n = dp.n;
  in.eps = eps;
  in.gamma = gamma;
  in.opts = opts;
  detail::CoreOutput core = detail::run_pipeline(in);
  return {std::move(core.distribution), std::move(core.pseudo), std::move(core.diagnostics)};
}

LogProb exact_d_profile_logprob(const std::vector<DenseDistribution>& p, const DProfile& dp) {
  check_dims(dp.d);
  if (static_cast<int>(p.size()) != dp.d) throw InvalidInput("one distribution per coordinate");
  const std::size_t S = p[0].probs.size();
  for (const auto& q : p) {
    if (q.probs.size() != S) throw InvalidInput("coordinates must share one domain");
    for (double v : q.probs)
      if (!(v >= 0.0)) throw InvalidInput("probabilities must be nonnegative");
  }
  if (S > kDOracleMaxSupport) throw GuardExceeded("d-oracle support is limited to 5");
  for (std::int64_t v : dp.n)
    if (v > kDOracleMaxN) throw GuardExceeded("d-oracle sample length is limited to 6");

  const std::vector<FrequencyClass> classes = dp.classes();
  std::vector<std::int64_t> left;
  for (const auto& c : classes) left.push_back(c.count);
  std::int64_t unseen = static_cast<std::int64_t>(S) - dp.distinct();
  if (unseen < 0) return {};

  // Each distinct assignment of classes to domain elements is one d-type.
  LogSumExp acc;
  std::function<void(std::size_t, double)> walk = [&](std::size_t x, double logv) {
    if (x == S) {
      acc.add(logv);
      return;
    }
    if (unseen > 0) {
      --unseen;
      walk(x + 1, logv);
      ++unseen;
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (left[c] == 0) continue;
      double term = 0.0;
      for (int k = 0; k < dp.d; ++k) {
        const std::int64_t f = classes[c].freqs[static_cast<std::size_t>(k)];
        if (f == 0) continue;
        const double v = p[static_cast<std::size_t>(k)].probs[x];
        if (v == 0.0) {
          term = kNegInf;
          break;
        }
        term += static_cast<double>(f) * std::log(v) - log_factorial(static_cast<double>(f));
      }
      if (term == kNegInf) continue;
      --left[c];
      walk(x + 1, logv + term);
      ++left[c];
    }
  };
  walk(0, 0.0);
  if (acc.empty()) return {};
  double lead = 0.0;
  for (std::int64_t v : dp.n) lead += log_factorial(static_cast<double>(v));
  return {lead + acc.value()};
}

LogProb d_profile_logprob_of(const TupleLevelSetDistribution& p, const DProfile& dp) {
  if (p.dims != dp.d) throw InvalidInput("distribution and d-profile differ in dimension");
  std::vector<LevelGroup> groups;
  for (const TupleLevel& l : p.levels) groups.push_back({l.values, l.count});
  return exact_grouped_logprob(groups, dp.classes());
}

BruteForceResultD brute_force_pml_d(const DProfile& dp, int support, int resolution) {
  check_dims(dp.d);
  if (support < 1 || resolution < 1) throw InvalidInput("support and resolution must be positive");
  // Rough count of candidates: sorted parts for coordinate 0 times free parts for the rest.
  double candidates = 1.0;
  for (int k = 1; k < dp.d; ++k) candidates *= std::exp(std::lgamma(resolution + support) - std::lgamma(resolution + 1.0) - std::lgamma(support));
  if (candidates > 5e6) throw GuardExceeded("2-d brute force grid is too large");

  const double step = 1.0 / resolution;
  std::vector<std::vector<int>> parts(static_cast<std::size_t>(dp.d), std::vector<int>(static_cast<std::size_t>(support), 0));
  BruteForceResultD best;
  best.logprob = {};
  auto evaluate = [&] {
    std::vector<DenseDistribution> p(static_cast<std::size_t>(dp.d));
    for (int k = 0; k < dp.d; ++k)
      for (int v : parts[static_cast<std::size_t>(k)]) p[static_cast<std::size_t>(k)].probs.push_back(v * step);
    const LogProb lp = exact_d_profile_logprob(p, dp);
    if (lp.value > best.logprob.value) best = {std::move(p), lp};
  };
  std::function<void(int, int, int)> fill = [&](int k, int x, int left) {
    auto& row = parts[static_cast<std::size_t>(k)];
    if (x == support - 1) {
      if (k == 0 && x > 0 && left > row[static_cast<std::size_t>(x - 1)]) return;
      row[static_cast<std::size_t>(x)] = left;
      if (k + 1 == dp.d) evaluate();
      else fill(k + 1, 0, resolution);
      return;
    }
    const int hi = (k == 0 && x > 0) ? std::min(left, row[static_cast<std::size_t>(x - 1)]) : left;
    for (int v = hi; v >= 0; --v) {
      row[static_cast<std::size_t>(x)] = v;
      fill(k, x + 1, left - v);
    }
  };
  fill(0, 0, resolution);
  return best;
}

}  // namespace pml
