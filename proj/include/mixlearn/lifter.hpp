#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixlearn/density.hpp"
#include "mixlearn/learners.hpp"

namespace mixlearn {

// Finite cover of the weight simplex: every weight vector is within
// eps/k in sup norm of some member.
struct WeightCover {
    int k = 1;
    double eps = 1.0;
    std::vector<Eigen::VectorXd> vectors;

    std::size_t size() const noexcept { return vectors.size(); }
};

// A labeling of s sample points by component index in [0, k).
struct Assignment {
    std::vector<int> labels;
};

// Caps for the exponential enumeration. Exhaustive mode insists on the full
// k^s sweep and errors when that cannot fit a 64-bit count; capped mode takes
// the first max_assignments / max_candidates in canonical order and flags the
// pool as truncated.
struct BudgetPolicy {
    enum class Mode { exhaustive, capped };
    Mode mode = Mode::exhaustive;
    std::optional<std::int64_t> max_assignments;
    std::optional<std::int64_t> max_candidates;

    static BudgetPolicy exhaustive() { return {}; }
    static BudgetPolicy capped(std::int64_t assignments, std::int64_t candidates);
};

// Generated candidate mixtures with their provenance: candidate c came from
// assignment provenance[c].first and cover vector provenance[c].second
// (indices into the canonical enumeration orders). dedup_count is how many
// near-duplicates were dropped; truncated marks a budget cut.
struct CandidatePool {
    std::vector<Density> candidates;
    std::vector<std::pair<std::int64_t, std::int64_t>> provenance;
    std::int64_t dedup_count = 0;
    bool truncated = false;

    std::size_t size() const noexcept { return candidates.size(); }
};

// Euclidean projection onto the probability simplex (sort-and-threshold).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

// Builds the cover by projecting the uniform grid with step eps/k in [0,1]^k
// onto the simplex and deduplicating within sup-norm 1e-12.
WeightCover build_weight_cover(int k, double eps);

// Lexicographic stream over the k^s assignments, restartable at any index
// (assignment #id has the base-k digits of id as labels, most significant
// first), so workers can enumerate disjoint ranges independently.
class AssignmentStream {
public:
    AssignmentStream(std::int64_t s, int k, std::int64_t start = 0);

    std::optional<Assignment> next();
    std::int64_t index() const noexcept { return index_; }

private:
    std::int64_t s_;
    int k_;
    std::int64_t index_;
    std::optional<std::int64_t> total_;  // k^s when it fits 64 bits
    std::vector<int> digits_;
    bool exhausted_ = false;
};

// All assignments under the budget, in lexicographic order.
// Returns the stream's yield plus a truncation flag.
std::pair<std::vector<Assignment>, bool> enumerate_assignments(std::int64_t s, int k,
                                                               const BudgetPolicy& budget);

// Exact k^s * |cover| in exhaustive mode; errors on 64-bit overflow.
std::int64_t candidate_count(std::int64_t s, int k, double eps);

// Sample size for the lifted learner:
// max{ 2 k lambda(delta/3k) / eps^alpha, 16 k log(3k/delta) / eps }.
std::int64_t mixture_sample_size(int k, double eps, double delta, const LearnerSpec& spec, int d);
// Same with the lambda value pinned directly (constants fixed by the caller).
std::int64_t mixture_sample_size_from_lambda(int k, double eps, double delta, double lambda_val,
                                             double alpha);

// Weight below which a component is negligible: 8 log(3k/delta) / s.
double negligible_threshold(int k, double delta, std::int64_t s);

// Figure-of-merit core: for every assignment and every cover vector, fit one
// component per label group (index order) and emit the weighted mixture.
// Deterministic given inputs; `workers` only splits the assignment range.
CandidatePool generate_candidates(const SampleSet& sample, int k, double eps,
                                  const Learner& learner, const BudgetPolicy& budget,
                                  int workers = 1);

struct MixtureLearnOptions {
    std::optional<std::int64_t> s_override;  // generation sample size, else the formula value
    std::optional<double> cover_eps;         // cover resolution, defaults to eps
    std::optional<double> select_eps;        // selection accuracy, defaults to eps
    int workers = 1;
    std::size_t quadrature_cells = 4096;  // selection oracle grid in d = 1
    std::size_t mc_factor = 20;           // selection oracle points per sample point in d >= 2
};

struct MixtureLearnReport {
    std::int64_t s = 0;      // generation sample size
    std::int64_t m = 0;      // selection sample size
    std::int64_t M = 0;      // pool size after dedup
    std::int64_t dedup = 0;  // removed duplicates
    double runtime_ms = 0;   // measured wall time (writers pin this to 0 for reproducible files)
    std::int64_t selected_index = 0;
    bool truncated = false;
};

// End-to-end lifted learner: draws s generation samples (stream child 0 of
// seed), builds the candidate pool, draws m fresh selection samples (stream
// child 1), and returns the tournament winner. Selection measures use a
// shared quadrature grid in d = 1 and shared Monte-Carlo points (stream
// child 2) in higher dimension.
std::pair<Density, MixtureLearnReport> learn_mixture(const Density& target, int k, double eps,
                                                     double delta, const Learner& learner,
                                                     const BudgetPolicy& budget,
                                                     std::uint64_t seed,
                                                     const MixtureLearnOptions& options = {});

}  // namespace mixlearn
