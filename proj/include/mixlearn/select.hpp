#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixlearn/lifter.hpp"
#include "mixlearn/metrics.hpp"

namespace mixlearn {

// How candidate masses on pairwise comparison sets are computed.
//  * exact_gaussian_1d: closed-form sets + normal CDF; candidates must be
//    plain 1-D gaussians.
//  * quadrature: every candidate reduced once to per-cell masses on one
//    shared grid (CDF differences, so components narrower than a cell keep
//    their mass); set masses by masked summation. For 1-D candidates of any
//    kind.
//  * monte_carlo: shared evaluation points drawn from the uniform mixture of
//    all candidates, masses by importance weighting. Any dimension.
struct MeasureOracle {
    enum class Strategy { exact_gaussian_1d, quadrature, monte_carlo };

    Strategy strategy = Strategy::quadrature;
    Grid1D grid;
    std::size_t points = 0;
    std::uint64_t seed = 0;

    static MeasureOracle exact_gaussian_1d();
    static MeasureOracle quadrature(Grid1D grid);
    static MeasureOracle monte_carlo(std::size_t points, std::uint64_t seed);
};

// Outcome of the pairwise-contest selection. contests(i,j) is candidate i's
// deviation |f_i(A) - empirical(A)| on the comparison set A of the unordered
// pair {i,j} (oriented {f_min >= f_max}); the diagonal is NaN and never read.
struct TournamentResult {
    std::int64_t winner = 0;
    std::vector<std::int64_t> wins;
    Eigen::MatrixXd contests;
};

// Fresh-sample count for selecting among M candidates:
// ceil(log(3 M^2 / delta) / (2 eps^2)).
std::int64_t selection_sample_size(std::int64_t M, double eps, double delta);

// One grid spanning the support hints of every candidate.
Grid1D shared_grid(const std::vector<Density>& candidates, std::size_t cells = 4096);

// M x M table: entry (a,b) is candidate a's mass on the comparison set of the
// unordered pair {a,b}; diagonal NaN.
Eigen::MatrixXd candidate_set_measures(const std::vector<Density>& candidates,
                                       const MeasureOracle& oracle);

// Pairwise contests over all candidate pairs: on each pair's comparison set,
// the candidate whose mass is closer to the empirical measure of the fresh
// sample wins (ties to the lower index); the overall winner has the most wins
// (ties to the lowest index again). eps only documents the accuracy target
// that sized the eval sample; the contests themselves do not use it.
TournamentResult select(const std::vector<Density>& candidates, const SampleSet& eval_sample,
                        double eps, const MeasureOracle& oracle);
TournamentResult select(const CandidatePool& pool, const SampleSet& eval_sample, double eps,
                        const MeasureOracle& oracle);

std::string tournament_to_json(const TournamentResult& result);

}  // namespace mixlearn
