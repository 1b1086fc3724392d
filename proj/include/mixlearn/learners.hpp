#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mixlearn/density.hpp"

namespace mixlearn {

// Sample-size calculus of a base learner: m(eps, delta) = lambda(delta)/eps^alpha
// with lambda(delta) = c_dim * d^dim_power + c_log * log(1/delta). The
// coefficients default to 1 because the guarantees behind them fix only the
// asymptotic shape; they stay configurable so experiments can pin constants.
struct LearnerSpec {
    double alpha = 2.0;
    double c_dim = 1.0;
    double c_log = 1.0;
    double dim_power = 2.0;

    // Full-covariance gaussian learner: quadratic dimension dependence.
    static LearnerSpec gaussian();
    // Axis-aligned gaussian learner: linear dimension dependence.
    static LearnerSpec axis_aligned();

    double lambda(int d, double delta) const;
};

// A named base learning procedure plus its sample-size spec. `fit` must accept
// any nonempty sample of the learner's dimension; `learn` additionally maps an
// empty sample to the standard gaussian N(0, I_d), which keeps candidate
// generation total when an assignment leaves a group empty.
struct Learner {
    std::string name;
    LearnerSpec spec;
    std::function<Density(const SampleSet&)> fit;

    Density learn(const SampleSet& sample) const;
};

// Sentinel asking mle_gaussian for a scale-aware default ridge,
// 1e-9 * (trace of the sample covariance + 1).
inline constexpr double kAutoRidge = -1.0;

// Maximum-likelihood gaussian: sample mean, biased sample covariance plus
// ridge * I. The axis-aligned variant keeps only the diagonal.
Density mle_gaussian(const SampleSet& sample, double ridge, bool axis_aligned = false);

// Minimum-distance selection over a finite grid of 1-D gaussians: returns the
// grid member minimizing the worst per-set gap to the empirical measure over
// all pairwise comparison sets of the grid (ties to the lowest index).
Density min_distance_grid_learner_1d(const SampleSet& sample, const std::vector<Density>& grid);

// ceil(lambda(delta) / eps^alpha) for the given learner spec in dimension d.
std::int64_t sample_size(const LearnerSpec& spec, int d, double eps, double delta);

Learner make_gaussian_mle_learner(double ridge = kAutoRidge);
Learner make_axis_aligned_mle_learner(double ridge = kAutoRidge);
Learner make_grid_learner_1d(std::vector<Density> grid);

}  // namespace mixlearn
