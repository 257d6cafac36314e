#pragma once

#include <cstdint>
#include <vector>

#include "pml/pipeline.hpp"
#include "pml/rounding.hpp"

namespace pml::detail {

struct CoreInput {
  FeasibleSetSpec spec;
  std::vector<std::int64_t> n;
  std::vector<double> eps;
  std::vector<double> gamma;
  PmlOptions opts;
};

struct CoreOutput {
  TupleLevelSetDistribution pseudo;
  TupleLevelSetDistribution distribution;
  PmlDiagnostics diagnostics;
};

CoreOutput run_pipeline(const CoreInput& in);

}  // namespace pml::detail
