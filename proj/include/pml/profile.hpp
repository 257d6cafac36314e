#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pml/log_math.hpp"

namespace pml {

using SymbolId = std::int32_t;

// Samples with symbols already mapped to dense ids.
struct Sequence {
  std::vector<SymbolId> symbols;

  std::size_t n() const { return symbols.size(); }

  // Ids are assigned in order of first appearance.
  static Sequence from_tokens(const std::vector<std::string>& tokens);
  // One symbol per character, handy for "ababc"-style literals.
  static Sequence from_chars(std::string_view chars);
};

struct TypeVector {
  std::map<SymbolId, std::int64_t> counts;
  std::int64_t n = 0;
};

struct ProfileEntry {
  std::int64_t frequency = 0;
  std::int64_t count = 0;
  bool operator==(const ProfileEntry&) const = default;
};

// Frequency-of-frequencies, kept sorted strictly descending by frequency.
class Profile {
 public:
  Profile() = default;

  // Validates (positive values, distinct frequencies, nonempty) and sorts.
  static Profile from_pairs(std::vector<ProfileEntry> pairs);

  const std::vector<ProfileEntry>& pairs() const { return pairs_; }
  std::int64_t n() const { return n_; }
  std::int64_t distinct() const;
  std::int64_t max_frequency() const { return pairs_.empty() ? 0 : pairs_.front().frequency; }

  bool operator==(const Profile&) const = default;

 private:
  std::vector<ProfileEntry> pairs_;
  std::int64_t n_ = 0;
};

// Natural-log probability; -inf encodes probability zero.
struct LogProb {
  double value = kNegInf;
  bool is_zero() const { return value == kNegInf; }
};

Profile profile_of_sequence(const Sequence& seq);
TypeVector type_of_sequence(const Sequence& seq);
Profile profile_of_type(const TypeVector& t);

// log( n! / prod_j (freq_j!)^{count_j} )
double log_c_phi(const Profile& phi);
// Exact integer value; requires n <= 20 so that n! fits in 64 bits.
std::uint64_t c_phi_exact(const Profile& phi);

}  // namespace pml
