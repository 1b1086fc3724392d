#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixlearn/errors.hpp"
#include "mixlearn/lifter.hpp"
#include "mixlearn/metrics.hpp"
#include "mixlearn/select.hpp"
#include "mixlearn/serialize.hpp"
#include "mixlearn/theory.hpp"

namespace py = pybind11;

namespace {

using namespace mixlearn;

SampleSet to_sample_set(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw_input("sample must hold at least one point");
    SampleSet s;
    s.dim = static_cast<int>(rows.front().size());
    if (s.dim < 1) throw_input("sample points must have at least one coordinate");
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != s.dim)
            throw_input("sample points must share one dimension");
        Point p(s.dim);
        for (int i = 0; i < s.dim; ++i) p[i] = row[static_cast<std::size_t>(i)];
        s.points.push_back(std::move(p));
    }
    return s;
}

Learner named_learner(const std::string& name) {
    if (name == "gaussian") return make_gaussian_mle_learner();
    if (name == "axis_aligned") return make_axis_aligned_mle_learner();
    throw_input("learner must be \"gaussian\" or \"axis_aligned\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mixture density estimation: base-learner lifting and tournament selection";

    py::register_exception<Error>(m, "MixlearnError");

    m.def("sample",
          [](const std::string& density_json, std::size_t n, std::uint64_t seed) {
              const Density d = deserialize(density_json);
              const SampleSet s = draw_sample(d, n, seed);
              std::vector<std::vector<double>> rows;
              rows.reserve(s.points.size());
              for (const auto& p : s.points)
                  rows.emplace_back(p.data(), p.data() + p.size());
              return rows;
          },
          py::arg("density"), py::arg("n"), py::arg("seed") = 0,
          "Draw n points from a density given as JSON; reproducible in the seed.");

    m.def("pdf",
          [](const std::string& density_json, const std::vector<double>& point) {
              const Density d = deserialize(density_json);
              Point p(static_cast<int>(point.size()));
              for (std::size_t i = 0; i < point.size(); ++i)
                  p[static_cast<int>(i)] = point[i];
              return d.pdf(p);
          },
          py::arg("density"), py::arg("point"), "Density value at a point.");

    m.def("roundtrip",
          [](const std::string& density_json) { return serialize(deserialize(density_json)); },
          py::arg("density"), "Parse and re-serialize a density document.");

    m.def("l1_quadrature",
          [](const std::string& a, const std::string& b, std::size_t cells) {
              const Density da = deserialize(a);
              const Density db = deserialize(b);
              return l1_quadrature(da, db, default_grid1d(da, db, cells));
          },
          py::arg("a"), py::arg("b"), py::arg("cells") = 4096,
          "Trapezoid L1 distance between two one-dimensional densities.");

    m.def("l1_monte_carlo",
          [](const std::string& a, const std::string& b, std::size_t n, std::uint64_t seed) {
              const MonteCarloEstimate e =
                  l1_monte_carlo(deserialize(a), deserialize(b), n, seed);
              return py::make_tuple(e.value, e.std_error);
          },
          py::arg("a"), py::arg("b"), py::arg("n"), py::arg("seed") = 0,
          "Importance-sampled L1 distance; returns (value, std_error).");

    m.def("build_weight_cover",
          [](int k, double eps) {
              const WeightCover cover = build_weight_cover(k, eps);
              std::vector<std::vector<double>> rows;
              for (const auto& w : cover.vectors)
                  rows.emplace_back(w.data(), w.data() + w.size());
              return rows;
          },
          py::arg("k"), py::arg("eps"), "Deterministic (eps/k)-grid cover of the weight simplex.");

    m.def("mixture_sample_size",
          [](int k, double eps, double delta, const std::string& learner, int d) {
              return mixture_sample_size(k, eps, delta, named_learner(learner).spec, d);
          },
          py::arg("k"), py::arg("eps"), py::arg("delta"), py::arg("learner") = "gaussian",
          py::arg("d") = 1, "Generation-phase sample size for the k-mixture learner.");

    m.def("selection_sample_size", &selection_sample_size, py::arg("candidates"), py::arg("eps"),
          py::arg("delta"), "Evaluation-phase sample size for the pairwise tournament.");

    m.def("negligible_threshold", &negligible_threshold, py::arg("k"), py::arg("delta"),
          py::arg("s"), "Mixture weight below which a component may be ignored.");

    m.def("chernoff_half_bound", &chernoff_half_bound, py::arg("mean"),
          "Upper bound on the probability a sum falls below half its mean.");

    m.def("learn_mixture",
          [](const std::string& target_json, int k, double eps, double delta,
             const std::string& learner, std::uint64_t seed,
             std::optional<std::int64_t> s_override, std::optional<double> cover_eps,
             std::optional<double> select_eps, std::optional<std::int64_t> max_assignments,
             std::optional<std::int64_t> max_candidates, int workers) {
              BudgetPolicy budget = BudgetPolicy::exhaustive();
              if (max_assignments || max_candidates) {
                  budget.mode = BudgetPolicy::Mode::capped;
                  budget.max_assignments = max_assignments;
                  budget.max_candidates = max_candidates;
              }
              MixtureLearnOptions options;
              options.s_override = s_override;
              options.cover_eps = cover_eps;
              options.select_eps = select_eps;
              options.workers = workers;
              auto [model, report] = learn_mixture(deserialize(target_json), k, eps, delta,
                                                   named_learner(learner), budget, seed, options);
              py::dict result;
              result["model"] = serialize(model);
              result["s"] = report.s;
              result["m"] = report.m;
              result["M"] = report.M;
              result["dedup"] = report.dedup;
              result["selected_index"] = report.selected_index;
              result["truncated"] = report.truncated;
              return result;
          },
          py::arg("target"), py::arg("k"), py::arg("eps"), py::arg("delta"),
          py::arg("learner") = "gaussian", py::arg("seed") = 0,
          py::arg("s_override") = std::nullopt, py::arg("cover_eps") = std::nullopt,
          py::arg("select_eps") = std::nullopt, py::arg("max_assignments") = std::nullopt,
          py::arg("max_candidates") = std::nullopt, py::arg("workers") = 1,
          "End-to-end k-mixture learner; returns the model JSON plus run counters.");

    m.def("select",
          [](const std::vector<std::string>& candidate_jsons,
             const std::vector<std::vector<double>>& points, double eps,
             const std::string& oracle_name, std::size_t cells, std::size_t mc_points,
             std::uint64_t mc_seed) {
              std::vector<Density> candidates;
              for (const auto& text : candidate_jsons) candidates.push_back(deserialize(text));
              MeasureOracle oracle;
              if (oracle_name == "exact")
                  oracle = MeasureOracle::exact_gaussian_1d();
              else if (oracle_name == "quadrature")
                  oracle = MeasureOracle::quadrature(shared_grid(candidates, cells));
              else if (oracle_name == "monte_carlo")
                  oracle = MeasureOracle::monte_carlo(mc_points, mc_seed);
              else
                  throw_input("oracle must be \"exact\", \"quadrature\" or \"monte_carlo\"");
              const TournamentResult r = select(candidates, to_sample_set(points), eps, oracle);
              py::dict result;
              result["winner"] = r.winner;
              result["wins"] = r.wins;
              return result;
          },
          py::arg("candidates"), py::arg("points"), py::arg("eps"),
          py::arg("oracle") = "quadrature", py::arg("cells") = 4096, py::arg("mc_points") = 4096,
          py::arg("mc_seed") = 0, "Pairwise tournament over candidate densities.");

    m.def("project_residuals",
          [](const std::string& g_json, const std::vector<std::string>& component_jsons,
             const std::vector<double>& weights) {
              std::vector<Density> components;
              for (const auto& text : component_jsons) components.push_back(deserialize(text));
              const ProjectionWitness w =
                  project_to_mixture(deserialize(g_json), components, weights);
              return py::make_tuple(w.identity_residual, w.l1_residual);
          },
          py::arg("g"), py::arg("components"), py::arg("weights"),
          "Residuals of the exact mixture projection on a shared histogram grid.");
}
