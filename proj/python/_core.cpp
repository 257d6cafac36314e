#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pml/errors.hpp"
#include "pml/multipml.hpp"

namespace py = pybind11;
using namespace pml;

namespace {

using Pairs = std::vector<std::pair<std::int64_t, std::int64_t>>;

Profile profile_of_pairs(const Pairs& pairs) {
  std::vector<ProfileEntry> e;
  for (const auto& [f, c] : pairs) e.push_back({f, c});
  return Profile::from_pairs(std::move(e));
}

Pairs pairs_of(const Profile& phi) {
  Pairs out;
  for (const ProfileEntry& e : phi.pairs()) out.emplace_back(e.frequency, e.count);
  return out;
}

LevelSetDistribution levels_of(const std::vector<std::pair<double, std::int64_t>>& levels) {
  std::vector<Level> v;
  for (const auto& [value, count] : levels) v.push_back({value, count});
  return LevelSetDistribution::from_levels(std::move(v));
}

std::vector<std::pair<double, std::int64_t>> to_pairs(const LevelSetDistribution& p) {
  std::vector<std::pair<double, std::int64_t>> out;
  for (const Level& l : p.levels) out.emplace_back(l.value, l.count);
  return out;
}

std::vector<std::pair<std::vector<double>, std::int64_t>> to_pairs(const TupleLevelSetDistribution& p) {
  std::vector<std::pair<std::vector<double>, std::int64_t>> out;
  for (const TupleLevel& l : p.levels) out.emplace_back(l.values, l.count);
  return out;
}

PmlOptions options(std::optional<double> delta) {
  PmlOptions o;
  o.delta = delta;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Approximate profile maximum likelihood";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<GuardExceeded>(m, "GuardExceeded", PyExc_RuntimeError);
  py::register_exception<Infeasible>(m, "Infeasible", PyExc_RuntimeError);

  py::class_<SlackTerms>(m, "SlackTerms")
      .def_readonly("min_probability", &SlackTerms::min_probability)
      .def_readonly("probability_discretization", &SlackTerms::probability_discretization)
      .def_readonly("profile_discretization", &SlackTerms::profile_discretization)
      .def_readonly("log_k_bound", &SlackTerms::log_k_bound)
      .def_readonly("stirling_upper", &SlackTerms::stirling_upper)
      .def_readonly("solver_gap", &SlackTerms::solver_gap)
      .def_readonly("rounding", &SlackTerms::rounding)
      .def_readonly("stirling_lower", &SlackTerms::stirling_lower)
      .def("total", &SlackTerms::total);

  py::class_<PmlDiagnostics>(m, "Diagnostics")
      .def_readonly("dims", &PmlDiagnostics::dims)
      .def_readonly("n", &PmlDiagnostics::n)
      .def_readonly("n_prime", &PmlDiagnostics::n_prime)
      .def_readonly("eps1", &PmlDiagnostics::eps)
      .def_readonly("eps2", &PmlDiagnostics::gamma)
      .def_readonly("log_c_phi_prime", &PmlDiagnostics::log_c_phi_prime)
      .def_readonly("log_w_rounded", &PmlDiagnostics::log_w_rounded)
      .def_readonly("certified_gap", &PmlDiagnostics::certified_gap)
      .def_readonly("certified", &PmlDiagnostics::certified)
      .def_readonly("iterations", &PmlDiagnostics::iterations)
      .def_readonly("pseudo_mass", &PmlDiagnostics::pseudo_mass)
      .def_readonly("slack", &PmlDiagnostics::slack)
      .def_readonly("delta_total", &PmlDiagnostics::delta_total)
      .def_readonly("logprob_lower_bound", &PmlDiagnostics::logprob_lower_bound);

  m.def("profile_of", [](const std::vector<std::string>& tokens) {
    return pairs_of(profile_of_sequence(Sequence::from_tokens(tokens)));
  }, py::arg("tokens"));

  m.def("approximate_pml", [](const Pairs& pairs, std::optional<double> eps1, std::optional<double> eps2,
                               std::optional<double> delta) {
    const Profile phi = profile_of_pairs(pairs);
    const PmlResult r = approximate_pml(phi, eps1.value_or(default_eps(phi.n())), eps2.value_or(default_eps(phi.n())),
                                        options(delta));
    return py::make_tuple(to_pairs(r.distribution), r.diagnostics);
  }, py::arg("pairs"), py::arg("eps1") = py::none(), py::arg("eps2") = py::none(), py::arg("delta") = py::none());

  m.def("approximate_pml_d", [](const std::vector<std::vector<std::string>>& seqs, std::optional<double> delta) {
    const DProfile dp = d_profile_of(seqs);
    const std::vector<double> e = default_eps_d(dp);
    const PmlResultD r = approximate_pml_d(dp, e, e, options(delta));
    return py::make_tuple(to_pairs(r.distribution), r.diagnostics);
  }, py::arg("sequences"), py::arg("delta") = py::none());

  m.def("exact_profile_logprob", [](const std::vector<double>& probs, const Pairs& pairs) {
    return exact_profile_logprob(DenseDistribution{probs}, profile_of_pairs(pairs)).value;
  }, py::arg("probs"), py::arg("pairs"));

  m.def("brute_force_pml", [](const Pairs& pairs) {
    const Profile phi = profile_of_pairs(pairs);
    const BruteForceResult r = brute_force_pml(phi, GridSearchConfig::defaults(phi));
    return py::make_tuple(r.distribution.probs, r.logprob.value);
  }, py::arg("pairs"));

  using LevelPairs = std::vector<std::pair<double, std::int64_t>>;
  m.def("entropy", [](const LevelPairs& l) { return entropy(levels_of(l)); }, py::arg("levels"));
  m.def("support_size", [](const LevelPairs& l) { return support_size(levels_of(l)); }, py::arg("levels"));
  m.def("support_coverage", [](const LevelPairs& l, std::int64_t m) { return support_coverage(levels_of(l), m); },
        py::arg("levels"), py::arg("m"));
  m.def("distance_to_uniformity", [](const LevelPairs& l, std::int64_t k) { return distance_to_uniformity(levels_of(l), k); },
        py::arg("levels"), py::arg("k"));
  m.def("kl_plugin", [](const std::vector<std::pair<std::pair<double, double>, std::int64_t>>& l) {
    std::vector<TupleLevel> v;
    for (const auto& [vals, count] : l) v.push_back({{vals.first, vals.second}, count});
    return kl_plugin(TupleLevelSetDistribution::from_levels(2, std::move(v)));
  }, py::arg("levels"));
}
