#include "mixlearn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixlearn/errors.hpp"

namespace mixlearn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Grid1D::Grid1D(double left_, double right_, std::size_t cells_)
    : left(left_), right(right_), cells(cells_) {
    if (!(left < right)) throw_input("grid needs left < right");
    if (cells < 2) throw_input("grid needs at least 2 cells");
}

IntervalUnion IntervalUnion::all() {
    IntervalUnion u;
    u.intervals_.push_back({-kInf, kInf});
    return u;
}

IntervalUnion IntervalUnion::of(std::vector<Interval> intervals) {
    for (const Interval& iv : intervals) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi)
            throw_input("interval endpoints must satisfy lo <= hi");
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    IntervalUnion u;
    for (const Interval& iv : intervals) {
        if (!u.intervals_.empty() && iv.lo <= u.intervals_.back().hi) {
            u.intervals_.back().hi = std::max(u.intervals_.back().hi, iv.hi);
        } else {
            u.intervals_.push_back(iv);
        }
    }
    // Single points carry no mass here; dropping them keeps the union
    // non-degenerate.
    std::erase_if(u.intervals_, [](const Interval& iv) { return iv.lo == iv.hi; });
    return u;
}

bool IntervalUnion::contains(double x) const noexcept {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    --it;
    return x <= it->hi;
}

double normal_cdf(double z) {
    if (z == kInf) return 1.0;
    if (z == -kInf) return 0.0;
    return 0.5 * std::erfc(-z * 0.7071067811865475244);  // 1/sqrt(2)
}

Grid1D default_grid1d(const Density& f, const Density& g, std::size_t cells) {
    if (f.dim() != 1 || g.dim() != 1) throw_input("1-D quadrature needs one-dimensional densities");
    Eigen::VectorXd flo, fhi, glo, ghi;
    f.support_hint(flo, fhi);
    g.support_hint(glo, ghi);
    return Grid1D(std::min(flo[0], glo[0]), std::max(fhi[0], ghi[0]), cells);
}

double l1_quadrature(const Density& f, const Density& g, const Grid1D& grid) {
    if (f.dim() != 1 || g.dim() != 1) throw_input("1-D quadrature needs one-dimensional densities");
    const double h = grid.step();
    double acc = 0;
    for (std::size_t i = 0; i <= grid.cells; ++i) {
        const double x = grid.node(i);
        const double v = std::abs(f.pdf1(x) - g.pdf1(x));
        acc += (i == 0 || i == grid.cells) ? 0.5 * v : v;
    }
    return acc * h;
}

double l1_quadrature(const Density& f, const Density& g) {
    return l1_quadrature(f, g, default_grid1d(f, g));
}

MonteCarloEstimate l1_monte_carlo(const Density& f, const Density& g, std::size_t n,
                                  std::uint64_t seed) {
    if (f.dim() != g.dim()) throw_input("densities must share one dimension");
    if (n < 2) throw_input("Monte Carlo needs n >= 2");
    Density h = Density::mixture({0.5, 0.5}, {f, g});
    Sampler sampler(h, seed);
    double sum = 0, sumsq = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point x = sampler.next();
        const double hx = 0.5 * (f.pdf(x) + g.pdf(x));
        // |f-g|/h is bounded by 2; the clamp only absorbs rounding at points
        // where h underflows.
        const double r = hx > 0 ? std::min(std::abs(f.pdf(x) - g.pdf(x)) / hx, 2.0) : 0.0;
        sum += r;
        sumsq += r * r;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

IntervalUnion scheffe_set_gaussian_1d(const Density& f1, const Density& f2) {
    const bool gaussian1 = f1.kind() == Density::Kind::gaussian ||
                           f1.kind() == Density::Kind::axis_aligned_gaussian;
    const bool gaussian2 = f2.kind() == Density::Kind::gaussian ||
                           f2.kind() == Density::Kind::axis_aligned_gaussian;
    if (!gaussian1 || !gaussian2 || f1.dim() != 1 || f2.dim() != 1)
        throw_input("exact comparison sets require two 1-D gaussians");

    const double m1 = f1.mean()[0], v1 = f1.cov()(0, 0);
    const double m2 = f2.mean()[0], v2 = f2.cov()(0, 0);

    // log f1(x) - log f2(x) = a x^2 + b x + c; the set is {x : that >= 0}.
    const double a = 0.5 / v2 - 0.5 / v1;
    const double b = m1 / v1 - m2 / v2;
    const double c = 0.5 * m2 * m2 / v2 - 0.5 * m1 * m1 / v1 + 0.5 * std::log(v2 / v1);

    if (std::abs(a) < 1e-14) {  // (near-)equal variances: linear ratio
        if (std::abs(b) < 1e-14) return c >= 0 ? IntervalUnion::all() : IntervalUnion();
        const double root = -c / b;
        return IntervalUnion::of({b > 0 ? Interval{root, kInf} : Interval{-kInf, root}});
    }

    const double disc = b * b - 4.0 * a * c;
    if (a > 0) {  // opens upward: nonnegative outside the roots (if any)
        if (disc <= 0) return IntervalUnion::all();
        const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        const double r1 = std::min(q / a, c / q);
        const double r2 = std::max(q / a, c / q);
        return IntervalUnion::of({{-kInf, r1}, {r2, kInf}});
    }
    // opens downward: nonnegative between the roots
    if (disc < 0) return IntervalUnion();
    if (disc == 0) return IntervalUnion();  // single tangent point, mass 0
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b == 0 ? 1.0 : b));
    const double r1 = std::min(q / a, c / q);
    const double r2 = std::max(q / a, c / q);
    return IntervalUnion::of({{r1, r2}});
}

namespace {

double gaussian_interval_mass(double mean, double sd, const Interval& iv) {
    return normal_cdf((iv.hi - mean) / sd) - normal_cdf((iv.lo - mean) / sd);
}

double histogram_interval_mass(const Density& h, const Interval& iv) {
    const double left = h.left();
    const double right = h.right();
    const auto& masses = h.masses();
    const double width = (right - left) / static_cast<double>(masses.size());
    double acc = 0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double blo = left + static_cast<double>(i) * width;
        const double bhi = blo + width;
        const double overlap = std::min(bhi, iv.hi) - std::max(blo, iv.lo);
        if (overlap > 0) acc += masses[i] * std::min(overlap / width, 1.0);
    }
    return acc;
}

}  // namespace

double measure(const Density& density, const IntervalUnion& set) {
    if (density.dim() != 1) throw_input("set measures are supported in one dimension only");
    double acc = 0;
    switch (density.kind()) {
        case Density::Kind::gaussian:
        case Density::Kind::axis_aligned_gaussian: {
            const double mean = density.mean()[0];
            const double sd = std::sqrt(density.cov()(0, 0));
            for (const Interval& iv : set.intervals())
                acc += gaussian_interval_mass(mean, sd, iv);
            break;
        }
        case Density::Kind::histogram1d:
            for (const Interval& iv : set.intervals())
                acc += histogram_interval_mass(density, iv);
            break;
        case Density::Kind::mixture: {
            const auto& w = density.weights();
            const auto& comps = density.components();
            for (std::size_t i = 0; i < comps.size(); ++i)
                acc += w[i] * measure(comps[i], set);
            break;
        }
    }
    return std::clamp(acc, 0.0, 1.0);
}

double empirical_measure(const EmpiricalDistribution& emp, const IntervalUnion& set) {
    if (emp.sample.points.empty()) throw_input("empirical measure needs a nonempty sample");
    if (emp.sample.dim != 1) throw_input("empirical interval measures need 1-D samples");
    std::size_t hits = 0;
    for (const Point& p : emp.sample.points)
        if (set.contains(p[0])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(emp.sample.size());
}

double a_distance(const std::vector<double>& p_sets, const std::vector<double>& q_sets) {
    if (p_sets.size() != q_sets.size())
        throw_input("per-set probability lists must have equal length");
    double best = 0;
    for (std::size_t i = 0; i < p_sets.size(); ++i) {
        if (p_sets[i] < 0 || p_sets[i] > 1 || q_sets[i] < 0 || q_sets[i] > 1)
            throw_input("per-set probabilities must lie in [0,1]");
        best = std::max(best, std::abs(p_sets[i] - q_sets[i]));
    }
    return best;
}

double tv_from_l1(double l1) {
    // Quadrature can overshoot 2 by discretization error; tolerate a hair.
    if (!(l1 >= 0 && l1 <= 2 + 1e-6)) throw_input("an L1 distance must lie in [0, 2]");
    return std::min(l1, 2.0) / 2.0;
}

}  // namespace mixlearn
