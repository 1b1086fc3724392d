#include "mixlearn/learners.hpp"

#include <cmath>

#include "mixlearn/counts.hpp"
#include "mixlearn/errors.hpp"
#include "mixlearn/metrics.hpp"

namespace mixlearn {

LearnerSpec LearnerSpec::gaussian() { return {2.0, 1.0, 1.0, 2.0}; }
LearnerSpec LearnerSpec::axis_aligned() { return {2.0, 1.0, 1.0, 1.0}; }

double LearnerSpec::lambda(int d, double delta) const {
    if (d < 1) throw_input("dimension must be >= 1");
    if (!(delta > 0 && delta < 1)) throw_input("delta must lie in (0,1)");
    if (alpha < 1) throw_input("learner exponent alpha must be >= 1");
    if (!(c_log > 0)) throw_input("c_log must be positive");
    return c_dim * std::pow(static_cast<double>(d), dim_power) + c_log * std::log(1.0 / delta);
}

Density Learner::learn(const SampleSet& sample) const {
    if (!sample.points.empty()) return fit(sample);
    if (sample.dim < 1) throw_input("empty sample carries no dimension to learn in");
    const Eigen::Index d = sample.dim;
    return Density::gaussian(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d));
}

Density mle_gaussian(const SampleSet& sample, double ridge, bool axis_aligned) {
    if (sample.points.empty()) throw_input("maximum-likelihood fit needs a nonempty sample");
    const Eigen::Index d = sample.points.front().size();
    const auto n = static_cast<double>(sample.size());

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const Point& p : sample.points) {
        if (p.size() != d) throw_input("sample points must share one dimension");
        mean += p;
    }
    mean /= n;

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const Point& p : sample.points) {
        const Eigen::VectorXd c = p - mean;
        cov.noalias() += c * c.transpose();
    }
    cov /= n;

    if (ridge < 0) ridge = 1e-9 * (cov.trace() + 1.0);
    cov.diagonal().array() += ridge;

    if (axis_aligned) return Density::axis_aligned_gaussian(std::move(mean), cov.diagonal());
    return Density::gaussian(std::move(mean), std::move(cov));
}

Density min_distance_grid_learner_1d(const SampleSet& sample, const std::vector<Density>& grid) {
    if (grid.empty()) throw_input("grid learner needs a nonempty candidate grid");
    if (sample.points.empty()) throw_input("grid learner needs a nonempty sample");

    const std::size_t g = grid.size();
    if (g == 1) return grid.front();

    // All pairwise comparison sets of the grid, and each member's mass on them.
    std::vector<IntervalUnion> sets;
    sets.reserve(g * (g - 1));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j)
            if (i != j) sets.push_back(scheffe_set_gaussian_1d(grid[i], grid[j]));

    EmpiricalDistribution emp{sample};
    std::vector<double> emp_mass(sets.size());
    for (std::size_t a = 0; a < sets.size(); ++a) emp_mass[a] = empirical_measure(emp, sets[a]);

    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g; ++c) {
        double score = 0;
        for (std::size_t a = 0; a < sets.size(); ++a)
            score = std::max(score, std::abs(measure(grid[c], sets[a]) - emp_mass[a]));
        if (score < best_score) {
            best_score = score;
            best = c;
        }
    }
    return grid[best];
}

std::int64_t sample_size(const LearnerSpec& spec, int d, double eps, double delta) {
    if (!(eps > 0 && eps <= 2)) throw_input("eps must lie in (0,2]");
    return count_ceil(spec.lambda(d, delta) / std::pow(eps, spec.alpha));
}

Learner make_gaussian_mle_learner(double ridge) {
    return {"gaussian-mle", LearnerSpec::gaussian(),
            [ridge](const SampleSet& s) { return mle_gaussian(s, ridge, false); }};
}

Learner make_axis_aligned_mle_learner(double ridge) {
    return {"axis-aligned-mle", LearnerSpec::axis_aligned(),
            [ridge](const SampleSet& s) { return mle_gaussian(s, ridge, true); }};
}

Learner make_grid_learner_1d(std::vector<Density> grid) {
    if (grid.empty()) throw_input("grid learner needs a nonempty candidate grid");

    // The comparison sets and each member's masses on them depend only on the
    // grid, so hoist them out of the per-sample fit. The fit then matches
    // min_distance_grid_learner_1d exactly (same set order, same tie rule) at
    // the cost of the empirical measures alone.
    struct GridTables {
        std::vector<IntervalUnion> sets;
        std::vector<std::vector<double>> member_mass;  // [member][set]
    };
    auto tables = std::make_shared<GridTables>();
    const std::size_t g = grid.size();
    tables->sets.reserve(g * (g - 1));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j)
            if (i != j) tables->sets.push_back(scheffe_set_gaussian_1d(grid[i], grid[j]));
    tables->member_mass.resize(g);
    for (std::size_t c = 0; c < g; ++c) {
        tables->member_mass[c].resize(tables->sets.size());
        for (std::size_t a = 0; a < tables->sets.size(); ++a)
            tables->member_mass[c][a] = measure(grid[c], tables->sets[a]);
    }

    return {"grid-min-distance", LearnerSpec::gaussian(),
            [grid = std::move(grid), tables](const SampleSet& s) {
                if (s.points.empty()) throw_input("grid learner needs a nonempty sample");
                if (grid.size() == 1) return grid.front();
                EmpiricalDistribution emp{s};
                std::vector<double> emp_mass(tables->sets.size());
                for (std::size_t a = 0; a < tables->sets.size(); ++a)
                    emp_mass[a] = empirical_measure(emp, tables->sets[a]);
                std::size_t best = 0;
                double best_score = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < grid.size(); ++c) {
                    double score = 0;
                    for (std::size_t a = 0; a < tables->sets.size(); ++a)
                        score = std::max(score,
                                         std::abs(tables->member_mass[c][a] - emp_mass[a]));
                    if (score < best_score) {
                        best_score = score;
                        best = c;
                    }
                }
                return grid[best];
            }};
}

}  // namespace mixlearn
