#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixlearn/density.hpp"
#include "mixlearn/learners.hpp"

namespace mixlearn {

// Output of projecting a density g onto the span of a fixed mixture
// f = sum w_i f_i: per-component densities G_i with sum w_i G_i = g and
// sum w_i |f_i - G_i|_1 = |g - f|_1, plus the numerically realized residuals
// of those two identities.
struct ProjectionWitness {
    std::vector<Density> components;     // the G_i, piecewise-constant
    std::vector<double> weights;         // the w_i of the input mixture
    double identity_residual = 0;        // max_x |sum w_i G_i(x) - g(x)|
    double l1_residual = 0;              // | sum w_i |f_i-G_i|_1  -  |g-f|_1 |
};

// Bin-exact construction of the G_i for piecewise-constant g and f_i on one
// common grid. On X = {g < f}: G_i = f_i g / f; elsewhere G_i = f_i plus the
// correction (g - f) * N_i / D with N_i = integral over X of f_i (f-g)/f and
// D = integral over X of (f-g).
ProjectionWitness project_to_mixture(const Density& g, const std::vector<Density>& f_components,
                                     const std::vector<double>& w);

// Per-component accuracy budget (2 lambda / (w_i s))^(1/alpha).
double component_error_budget(double w_i, std::int64_t s, double lambda_val, double alpha);

// Indices i with w_i <= 8 log(3k/delta) / s.
std::vector<int> negligible_components(const std::vector<double>& w, int k, double delta,
                                       std::int64_t s);

// Binomial lower-tail bound: Pr{X < EX/2} <= exp(-EX/8).
double chernoff_half_bound(double mean);

// Sample budget of the lifted learner, end to end. m_bound is the candidate
// count bound k^s (1 + k/eps)^k, carried in arbitrary precision because k^s
// overflows ordinary integers at tiny s.
struct SampleBudget {
    std::int64_t s = 0;
    std::string m_bound;      // decimal text of the candidate-count bound
    double ln_m_bound = 0;    // its natural log
    std::int64_t m = 0;       // selection sample size against the bound
    std::int64_t total = 0;   // s + m
};

SampleBudget total_sample_budget(int k, double eps, double delta, const LearnerSpec& spec,
                                  int d);

}  // namespace mixlearn
