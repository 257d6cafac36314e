#include "pml/profile.hpp"

#include <algorithm>
#include <unordered_map>

#include "pml/errors.hpp"

namespace pml {

Sequence Sequence::from_tokens(const std::vector<std::string>& tokens) {
  Sequence seq;
  std::unordered_map<std::string, SymbolId> ids;
  seq.symbols.reserve(tokens.size());
  for (const auto& tok : tokens) {
    auto [it, inserted] = ids.try_emplace(tok, static_cast<SymbolId>(ids.size()));
    seq.symbols.push_back(it->second);
  }
  return seq;
}

Sequence Sequence::from_chars(std::string_view chars) {
  std::vector<std::string> tokens;
  for (char c : chars) tokens.emplace_back(1, c);
  return from_tokens(tokens);
}

Profile Profile::from_pairs(std::vector<ProfileEntry> pairs) {
  if (pairs.empty()) throw InvalidInput("profile must contain at least one pair");
  std::sort(pairs.begin(), pairs.end(),
            [](const ProfileEntry& a, const ProfileEntry& b) { return a.frequency > b.frequency; });
  Profile p;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& e = pairs[k];
    if (e.frequency <= 0 || e.count <= 0)
      throw InvalidInput("profile frequencies and counts must be positive");
    if (k > 0 && pairs[k - 1].frequency == e.frequency)
      throw InvalidInput("duplicate frequency " + std::to_string(e.frequency) + " in profile");
    p.n_ += e.frequency * e.count;
  }
  p.pairs_ = std::move(pairs);
  return p;
}

std::int64_t Profile::distinct() const {
  std::int64_t s = 0;
  for (const auto& e : pairs_) s += e.count;
  return s;
}

TypeVector type_of_sequence(const Sequence& seq) {
  if (seq.symbols.empty()) throw InvalidInput("empty sequence");
  TypeVector t;
  for (SymbolId s : seq.symbols) ++t.counts[s];
  t.n = static_cast<std::int64_t>(seq.symbols.size());
  return t;
}

Profile profile_of_type(const TypeVector& t) {
  std::map<std::int64_t, std::int64_t> by_freq;
  for (const auto& [sym, f] : t.counts) {
    if (f <= 0) throw InvalidInput("type frequencies must be positive");
    ++by_freq[f];
  }
  std::vector<ProfileEntry> pairs;
  for (const auto& [f, c] : by_freq) pairs.push_back({f, c});
  return Profile::from_pairs(std::move(pairs));
}

Profile profile_of_sequence(const Sequence& seq) { return profile_of_type(type_of_sequence(seq)); }

double log_c_phi(const Profile& phi) {
  double v = log_factorial(static_cast<double>(phi.n()));
  for (const auto& e : phi.pairs())
    v -= static_cast<double>(e.count) * log_factorial(static_cast<double>(e.frequency));
  return v;
}

std::uint64_t c_phi_exact(const Profile& phi) {
  if (phi.n() > 20) throw GuardExceeded("exact C_phi needs n <= 20");
  auto fact = [](std::int64_t k) {
    std::uint64_t r = 1;
    for (std::int64_t i = 2; i <= k; ++i) r *= static_cast<std::uint64_t>(i);
    return r;
  };
  std::uint64_t v = fact(phi.n());
  // Each division is exact: dividing the multinomial numerator by one block factorial at a time.
  for (const auto& e : phi.pairs())
    for (std::int64_t c = 0; c < e.count; ++c) v /= fact(e.frequency);
  return v;
}

}  // namespace pml
