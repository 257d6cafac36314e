#include "pml/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pml/errors.hpp"

namespace pml {

double DenseDistribution::mass() const {
  double s = 0.0;
  for (double v : probs) s += v;
  return s;
}

std::size_t DenseDistribution::support() const {
  return static_cast<std::size_t>(std::count_if(probs.begin(), probs.end(), [](double v) { return v > 0.0; }));
}

GridSearchConfig GridSearchConfig::defaults(const Profile& phi) {
  GridSearchConfig cfg;
  cfg.n = phi.n();
  cfg.support_cap = static_cast<int>(std::min<std::int64_t>(2 * phi.n() * phi.n(), 10));
  cfg.resolution = 24;
  return cfg;
}

namespace {

void check_distribution(const DenseDistribution& p) {
  for (double v : p.probs)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("probabilities must be finite and nonnegative");
}

std::vector<double> support_logs(const DenseDistribution& p) {
  std::vector<double> logs;
  for (double v : p.probs)
    if (v > 0.0) logs.push_back(std::log(v));
  return logs;
}

}  // namespace

LogProb exact_sequence_logprob(const DenseDistribution& p, const TypeVector& t) {
  check_distribution(p);
  double v = 0.0;
  for (const auto& [sym, f] : t.counts) {
    if (sym < 0 || static_cast<std::size_t>(sym) >= p.probs.size())
      throw InvalidInput("symbol index out of range of the distribution");
    if (f == 0) continue;
    if (p.probs[sym] == 0.0) return {};
    v += static_cast<double>(f) * std::log(p.probs[sym]);
  }
  return {v};
}

LogProb exact_profile_logprob(const DenseDistribution& p, const Profile& phi) {
  check_distribution(p);
  if (phi.n() > kOracleMaxN) throw GuardExceeded("exact oracle limited to n <= 12");
  if (p.support() > kOracleMaxSupport) throw GuardExceeded("exact oracle limited to support <= 10");
  const std::vector<double> logs = support_logs(p);
  const auto& pairs = phi.pairs();
  std::vector<std::int64_t> remaining;
  for (const auto& e : pairs) remaining.push_back(e.count);
  std::int64_t distinct_left = phi.distinct();
  if (distinct_left > static_cast<std::int64_t>(logs.size())) return {};

  // Stars-and-bars over the support, keeping only parts that are 0 or a
  // frequency still owed by the profile.
  LogSumExp acc;
  std::function<void(std::size_t, std::int64_t, double)> rec = [&](std::size_t x, std::int64_t n_left,
                                                                   double logw) {
    if (n_left == 0) {
      if (distinct_left == 0) acc.add(logw);
      return;
    }
    if (x == logs.size()) return;
    if (static_cast<std::int64_t>(logs.size() - x) < distinct_left) return;
    rec(x + 1, n_left, logw);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (remaining[k] == 0 || pairs[k].frequency > n_left) continue;
      --remaining[k];
      --distinct_left;
      rec(x + 1, n_left - pairs[k].frequency, logw + static_cast<double>(pairs[k].frequency) * logs[x]);
      ++remaining[k];
      ++distinct_left;
    }
  };
  rec(0, phi.n(), 0.0);
  if (acc.empty()) return {};
  return {log_c_phi(phi) + acc.value()};
}

LogProb exact_profile_logprob_by_sequences(const DenseDistribution& p, const Profile& phi) {
  check_distribution(p);
  const std::vector<double> logs = support_logs(p);
  const std::size_t k = logs.size();
  const std::int64_t n = phi.n();
  double total = std::pow(static_cast<double>(k), static_cast<double>(n));
  if (total > 2e7) throw GuardExceeded("sequence enumeration limited to support^n <= 2e7");
  if (k == 0) return {};

  std::vector<std::size_t> seq(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> freq(k, 0);
  LogSumExp acc;
  while (true) {
    std::fill(freq.begin(), freq.end(), 0);
    double logw = 0.0;
    for (std::size_t s : seq) {
      ++freq[s];
      logw += logs[s];
    }
    TypeVector t;
    for (std::size_t x = 0; x < k; ++x)
      if (freq[x] > 0) t.counts[static_cast<SymbolId>(x)] = freq[x];
    t.n = n;
    if (profile_of_type(t) == phi) acc.add(logw);

    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == k) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  if (acc.empty()) return {};
  return {acc.value()};
}

BruteForceResult brute_force_pml(const Profile& phi, const GridSearchConfig& cfg) {
  if (cfg.support_cap < 1 || cfg.resolution < 1) throw InvalidInput("grid search needs positive cap and resolution");
  if (cfg.support_cap > static_cast<int>(kOracleMaxSupport)) throw GuardExceeded("support_cap must be <= 10");
  if (phi.n() > kOracleMaxN) throw GuardExceeded("exact oracle limited to n <= 12");

  BruteForceResult best;
  std::vector<int> parts;
  const double res = static_cast<double>(cfg.resolution);
  const auto min_parts = static_cast<std::size_t>(phi.distinct());

  // Partitions of `resolution` into at most support_cap nonincreasing parts.
  std::function<void(int, int)> rec = [&](int left, int max_part) {
    if (left == 0) {
      if (parts.size() < min_parts) return;
      DenseDistribution p;
      for (int v : parts) p.probs.push_back(static_cast<double>(v) / res);
      LogProb lp = exact_profile_logprob(p, phi);
      if (best.distribution.probs.empty() || lp.value > best.logprob.value) {
        best.distribution = std::move(p);
        best.logprob = lp;
      }
      return;
    }
    if (static_cast<int>(parts.size()) == cfg.support_cap) return;
    for (int v = std::min(left, max_part); v >= 1; --v) {
      parts.push_back(v);
      rec(left - v, v);
      parts.pop_back();
    }
  };
  rec(cfg.resolution, cfg.resolution);
  return best;
}

double log_c_classes(const std::vector<FrequencyClass>& classes) {
  if (classes.empty()) return 0.0;
  const std::size_t d = classes.front().freqs.size();
  double v = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    std::int64_t n = 0;
    for (const auto& c : classes) {
      n += c.freqs[k] * c.count;
      v -= static_cast<double>(c.count) * log_factorial(static_cast<double>(c.freqs[k]));
    }
    v += log_factorial(static_cast<double>(n));
  }
  return v;
}

LogProb exact_grouped_logprob(const std::vector<LevelGroup>& groups, const std::vector<FrequencyClass>& classes,
                              std::uint64_t max_terms) {
  if (classes.empty()) return {0.0};
  const std::size_t d = classes.front().freqs.size();
  for (const auto& c : classes)
    if (c.freqs.size() != d || c.count < 0) throw InvalidInput("frequency classes must share one dimension");
  for (const auto& g : groups) {
    if (g.probs.size() != d || g.count < 0) throw InvalidInput("level groups must match the profile dimension");
    for (double v : g.probs)
      if (!(v >= 0.0)) throw InvalidInput("level probabilities must be nonnegative");
  }

  const std::size_t L = groups.size(), J = classes.size();
  // gain[l][j] = sum_k freq_j(k) log v_l(k), -inf when a needed coordinate is 0.
  std::vector<double> gain(L * J);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t j = 0; j < J; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        if (classes[j].freqs[k] == 0) continue;
        if (groups[l].probs[k] == 0.0) {
          s = kNegInf;
          break;
        }
        s += static_cast<double>(classes[j].freqs[k]) * std::log(groups[l].probs[k]);
      }
      gain[l * J + j] = s;
    }

  std::vector<std::int64_t> capacity(L);
  for (std::size_t l = 0; l < L; ++l) capacity[l] = groups[l].count;
  std::uint64_t leaves = 0;
  LogSumExp acc;

  auto log_binom = [](std::int64_t r, std::int64_t y) {
    return log_factorial(static_cast<double>(r)) - log_factorial(static_cast<double>(y)) -
           log_factorial(static_cast<double>(r - y));
  };

  // Place the elements of class j into groups l, l+1, ...; `left` still to place.
  std::function<void(std::size_t, std::size_t, std::int64_t, double)> rec = [&](std::size_t j, std::size_t l,
                                                                                std::int64_t left, double logw) {
    if (j == J) {
      if (++leaves > max_terms) throw GuardExceeded("grouped enumeration exceeded its term limit");
      acc.add(logw);
      return;
    }
    if (l == L) {
      if (left == 0) rec(j + 1, 0, j + 1 < J ? classes[j + 1].count : 0, logw);
      return;
    }
    const std::int64_t top = std::min(left, capacity[l]);
    const double g = gain[l * J + j];
    // The last group must take whatever is left.
    const std::int64_t bottom = l + 1 == L ? left : 0;
    for (std::int64_t y = bottom; y <= top; ++y) {
      if (y > 0 && g == kNegInf) break;
      capacity[l] -= y;
      rec(j, l + 1, left - y, logw + (y > 0 ? log_binom(capacity[l] + y, y) + static_cast<double>(y) * g : 0.0));
      capacity[l] += y;
    }
  };
  rec(0, 0, classes[0].count, 0.0);
  if (acc.empty()) return {};
  return {log_c_classes(classes) + acc.value()};
}

}  // namespace pml
