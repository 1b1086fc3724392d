#pragma once

#include <cstdint>
#include <vector>

#include "mixlearn/density.hpp"

namespace mixlearn {

// Uniform 1-D quadrature support.
struct Grid1D {
    double left = 0;
    double right = 1;
    std::size_t cells = 4096;

    Grid1D() = default;
    Grid1D(double left, double right, std::size_t cells);

    double step() const noexcept { return (right - left) / static_cast<double>(cells); }
    double node(std::size_t i) const noexcept { return left + static_cast<double>(i) * step(); }
};

// Closed interval; endpoints may be +/-infinity.
struct Interval {
    double lo = 0;
    double hi = 0;
};

// Finite union of disjoint closed intervals, kept sorted. Normalization merges
// overlapping or touching intervals and drops single points (they carry no
// mass for the continuous densities measured here).
class IntervalUnion {
public:
    IntervalUnion() = default;
    static IntervalUnion all();
    static IntervalUnion of(std::vector<Interval> intervals);

    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    bool empty() const noexcept { return intervals_.empty(); }
    bool contains(double x) const noexcept;

private:
    std::vector<Interval> intervals_;
};

struct EmpiricalDistribution {
    SampleSet sample;
};

// Standard normal CDF, accurate in both tails.
double normal_cdf(double z);

// Grid spanning the supports of both densities (means +/- 10 sigma for
// gaussian parts, histogram bounds included).
Grid1D default_grid1d(const Density& f, const Density& g, std::size_t cells = 4096);

// Trapezoidal estimate of the L1 distance between two 1-D densities.
double l1_quadrature(const Density& f, const Density& g, const Grid1D& grid);
double l1_quadrature(const Density& f, const Density& g);  // on default_grid1d

struct MonteCarloEstimate {
    double value = 0;
    double std_error = 0;
};

// Importance-sampled L1 distance in any dimension: draws from h = (f+g)/2 and
// averages |f-g|/h, an integrand bounded by 2, so std_error <= 1/sqrt(n).
MonteCarloEstimate l1_monte_carlo(const Density& f, const Density& g, std::size_t n,
                                  std::uint64_t seed);

// The set {x : f1(x) >= f2(x)} for two 1-D gaussians, solved exactly from the
// quadratic log-density ratio (ties included, hence closed intervals).
IntervalUnion scheffe_set_gaussian_1d(const Density& f1, const Density& f2);

// Probability a 1-D density assigns to a closed-interval union. Gaussians use
// the normal CDF, histograms exact bin overlap, mixtures the weighted sum.
double measure(const Density& density, const IntervalUnion& set);

// Fraction of sample points lying in the set (closed membership).
double empirical_measure(const EmpiricalDistribution& emp, const IntervalUnion& set);

// max_i |p_sets[i] - q_sets[i]| over matched per-set probabilities.
double a_distance(const std::vector<double>& p_sets, const std::vector<double>& q_sets);

// Total variation from an L1 distance (exactly half).
double tv_from_l1(double l1);

}  // namespace mixlearn
