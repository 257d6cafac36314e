#pragma once

#include "pml/sdpml.hpp"

namespace pml {

struct RoundedSolution {
  AssignmentMatrix X;            // (base rows + columns - 1) x columns, integral
  Eigen::MatrixXd extra_levels;  // (columns - 1) x dims; a zero row marks an unused level
  FeasibleSetSpec spec_ext;
};

// Floors every entry and gives each seen column with a leftover count one new
// level: the fractional mass of that column averaged over the leftover count,
// coordinate by coordinate. Column sums are restored exactly; fractional
// unseen entries are dropped.
RoundedSolution round_assignment(const AssignmentMatrix& Xf, const FeasibleSetSpec& spec);

}  // namespace pml
