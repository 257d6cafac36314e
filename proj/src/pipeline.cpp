#include "pml/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pipeline_core.hpp"
#include "pml/errors.hpp"

namespace pml {

double SlackTerms::total() const {
  return min_probability + probability_discretization + profile_discretization + log_k_bound + stirling_upper +
         solver_gap + rounding + stirling_lower;
}

double default_eps(std::int64_t n) {
  if (n < 1) throw InvalidInput("sample length must be positive");
  return std::pow(static_cast<double>(n), -1.0 / 3.0);
}

namespace detail {

namespace {

// Below-grid elements of a PML distribution are dropped before discretizing;
// the cost is a constant per coordinate.
constexpr double kMinProbabilitySlack = 6.0;

double nlogn(double n) { return n > 1.0 ? n * std::log(n) : 0.0; }

// One direction of the phi <-> phi' bound.
double profile_slack_one_side(const CoreInput& in) {
  if (in.spec.dims == 1) return 7.0 * in.gamma[0] * nlogn(static_cast<double>(in.n[0]));
  double weighted = 0.0, shift = 0.0;
  for (std::size_t k = 0; k < in.n.size(); ++k) {
    weighted += in.gamma[k] * nlogn(static_cast<double>(in.n[k]));
    shift += in.gamma[k] * static_cast<double>(in.n[k]);
  }
  return 3.0 * weighted + 2.0 * weighted + std::max(0.0, nlogn(shift));
}

// Largest number of elements a base row can hold under every budget.
double row_capacity(const FeasibleSetSpec& spec, int i) {
  double cap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec.dims; ++k) cap = std::min(cap, std::floor(1.0 / spec.level_values(i, k)));
  return cap;
}

}  // namespace

CoreOutput run_pipeline(const CoreInput& in) {
  const FeasibleSetSpec& spec = in.spec;
  const int d = spec.dims;
  if (static_cast<int>(in.n.size()) != d || static_cast<int>(in.eps.size()) != d || static_cast<int>(in.gamma.size()) != d)
    throw InvalidInput("one length and one grid parameter per coordinate");

  SolverConfig cfg = SolverConfig::defaults(spec);
  if (in.opts.delta) {
    if (!(*in.opts.delta > 0.0)) throw InvalidInput("delta must be positive");
    cfg.delta = *in.opts.delta;
  }
  if (in.opts.max_iters) cfg.max_iters = *in.opts.max_iters;
  const SolveResult sol = maximize_g(spec, cfg);
  const RoundedSolution rounded = round_assignment(sol.X, spec);

  CoreOutput out;
  PmlDiagnostics& dg = out.diagnostics;
  dg.dims = d;
  dg.n = in.n;
  dg.eps = in.eps;
  dg.gamma = in.gamma;
  for (int k = 0; k < d; ++k) dg.n_prime.push_back(std::llround(spec.length(k)));
  dg.base_rows = spec.base_rows;
  dg.columns = spec.cols();
  dg.active_columns = static_cast<int>(spec.active_columns().size());
  dg.log_c_phi_prime = log_c_targets(spec);
  dg.log_g_fractional = sol.objective;
  dg.log_g_rounded = log_g(rounded.X, rounded.spec_ext);
  dg.log_w_rounded = log_w_sdpml(rounded.X, rounded.spec_ext);
  dg.rounding_loss = dg.log_g_fractional - dg.log_g_rounded;
  std::int64_t n_min = in.n[0];
  for (std::int64_t v : in.n) n_min = std::min(n_min, v);
  const double nm = static_cast<double>(n_min);
  dg.rounding_bound = static_cast<double>(spec.base_rows) * static_cast<double>(spec.cols()) * std::log(2.0 * nm * nm);
  dg.solver_delta = cfg.delta;
  dg.certified_gap = sol.certified_gap;
  dg.certified = sol.certified;
  dg.iterations = sol.iterations;

  SlackTerms& s = dg.slack;
  s.min_probability = kMinProbabilitySlack * d;
  for (int k = 0; k < d; ++k) s.probability_discretization += in.eps[static_cast<std::size_t>(k)] * static_cast<double>(in.n[static_cast<std::size_t>(k)]);
  const double one_side = profile_slack_one_side(in);
  s.profile_discretization = 2.0 * one_side;
  const double entries_per_row = static_cast<double>(dg.active_columns + 1);
  for (int i = 0; i < spec.base_rows; ++i) {
    const double cap = row_capacity(spec, i);
    s.log_k_bound += entries_per_row * std::log(cap + 1.0);
    s.stirling_upper += 1.0 + 0.5 * std::log(cap + 1.0);
  }
  s.solver_gap = sol.certified_gap;
  s.rounding = std::max(dg.rounding_bound, dg.rounding_loss);
  s.stirling_lower = -stirling_bounds(rounded.X, rounded.spec_ext).lower;
  dg.delta_total = s.total();
  dg.logprob_lower_bound = dg.log_c_phi_prime + dg.log_w_rounded - one_side;

  out.pseudo = tuple_pseudo_from_assignment(rounded);
  for (int k = 0; k < d; ++k) dg.pseudo_mass.push_back(out.pseudo.total_mass(k));
  out.distribution = normalize(out.pseudo);
  return out;
}

}  // namespace detail

PmlResult approximate_pml(const Profile& phi, double eps1, double eps2, const PmlOptions& opts) {
  if (phi.pairs().empty()) throw InvalidInput("profile is empty");
  if (!(eps1 > 0.0 && eps1 <= 1.0) || !(eps2 > 0.0 && eps2 <= 1.0)) throw InvalidInput("eps1 and eps2 must lie in (0, 1]");
  const ProbabilityGrid pgrid = ProbabilityGrid::build(phi.n(), eps1);
  const DiscreteProfile phi_prime = discretize_profile(phi, FrequencyGrid::build(phi.n(), eps2));

  detail::CoreInput in;
  in.spec = FeasibleSetSpec::from_grids(phi_prime, pgrid);
  in.n = {phi.n()};
  in.eps = {eps1};
  in.gamma = {eps2};
  in.opts = opts;
  detail::CoreOutput core = detail::run_pipeline(in);

  PmlResult r;
  r.pseudo = core.pseudo.coordinate(0);
  r.distribution = core.distribution.coordinate(0);
  r.diagnostics = std::move(core.diagnostics);
  return r;
}

}  // namespace pml
