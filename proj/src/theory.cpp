#include "mixlearn/theory.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "mixlearn/counts.hpp"
#include "mixlearn/errors.hpp"
#include "mixlearn/lifter.hpp"

namespace mixlearn {

namespace {

struct HistGrid {
    double left = 0;
    double right = 0;
    std::size_t bins = 0;
};

HistGrid common_grid(const Density& g, const std::vector<Density>& f_components) {
    if (g.kind() != Density::Kind::histogram1d)
        throw_input("projection needs a piecewise-constant target");
    HistGrid grid{g.left(), g.right(), g.masses().size()};
    for (const Density& f : f_components) {
        if (f.kind() != Density::Kind::histogram1d)
            throw_input("projection needs piecewise-constant components");
        if (f.left() != grid.left || f.right() != grid.right || f.masses().size() != grid.bins)
            throw_input("projection needs all densities on one common grid");
    }
    return grid;
}

}  // namespace

ProjectionWitness project_to_mixture(const Density& g, const std::vector<Density>& f_components,
                                     const std::vector<double>& w) {
    if (f_components.empty()) throw_input("projection needs at least one component");
    if (w.size() != f_components.size()) throw_input("projection needs one weight per component");
    const HistGrid grid = common_grid(g, f_components);
    const std::size_t k = f_components.size();
    const std::size_t bins = grid.bins;
    const double width = (grid.right - grid.left) / static_cast<double>(bins);

    double wsum = 0;
    for (double wi : w) {
        if (!(wi >= 0)) throw_input("projection weights must be >= 0");
        wsum += wi;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw_input("projection weights must sum to 1");

    // Everything below works on bin masses; densities are masses / width,
    // and the width cancels in every ratio, so the arithmetic is exact in
    // the masses.
    const std::vector<double>& gm = g.masses();
    std::vector<double> fm(bins, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& m = f_components[i].masses();
        for (std::size_t b = 0; b < bins; ++b) fm[b] += w[i] * m[b];
    }

    for (std::size_t b = 0; b < bins; ++b)
        if (gm[b] > 0 && fm[b] == 0)
            throw_numeric("mixture density vanishes on bin " + std::to_string(b) +
                          " where the target is positive");

    std::vector<bool> in_x(bins);
    double d_total = 0;  // integral over X of (f - g)
    for (std::size_t b = 0; b < bins; ++b) {
        in_x[b] = gm[b] < fm[b];
        if (in_x[b]) d_total += fm[b] - gm[b];
    }

    std::vector<double> n_i(k, 0.0);  // integral over X of f_i (f - g) / f
    for (std::size_t i = 0; i < k; ++i) {
        const auto& m = f_components[i].masses();
        for (std::size_t b = 0; b < bins; ++b)
            if (in_x[b]) n_i[i] += m[b] * (fm[b] - gm[b]) / fm[b];
    }

    if (d_total == 0) {
        for (double v : n_i)
            if (v != 0)
                throw_numeric("correction is degenerate: zero excess mass on {g < f} with a "
                              "nonzero component numerator");
    }

    ProjectionWitness witness;
    witness.weights = w;
    double l1_mix = 0;  // |g - f|_1 in mass units
    for (std::size_t b = 0; b < bins; ++b) l1_mix += std::abs(gm[b] - fm[b]);

    std::vector<std::vector<double>> g_masses(k, std::vector<double>(bins, 0.0));
    double weighted_l1 = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& m = f_components[i].masses();
        double l1_i = 0;
        for (std::size_t b = 0; b < bins; ++b) {
            const double gib = in_x[b]
                ? m[b] * gm[b] / fm[b]
                : m[b] + (d_total > 0 ? (gm[b] - fm[b]) * n_i[i] / d_total : 0.0);
            g_masses[i][b] = gib;
            l1_i += std::abs(m[b] - gib);
        }
        weighted_l1 += w[i] * l1_i;
    }

    double identity_residual = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        double mixed = 0;
        for (std::size_t i = 0; i < k; ++i) mixed += w[i] * g_masses[i][b];
        identity_residual = std::max(identity_residual, std::abs(mixed - gm[b]));
    }
    witness.identity_residual = identity_residual / width;  // mass -> density units
    witness.l1_residual = std::abs(weighted_l1 - l1_mix);

    for (std::size_t i = 0; i < k; ++i) {
        for (double& v : g_masses[i]) {
            if (v < -1e-12) throw_numeric("projected component has a negative bin mass");
            if (v < 0) v = 0;
        }
        witness.components.push_back(
            Density::histogram1d(grid.left, grid.right, std::move(g_masses[i])));
    }
    return witness;
}

double component_error_budget(double w_i, std::int64_t s, double lambda_val, double alpha) {
    if (!(w_i > 0)) throw_input("the error budget is undefined for weight-0 components");
    if (w_i > 1) throw_input("component weights cannot exceed 1");
    if (s < 1) throw_input("s must be >= 1");
    if (!(lambda_val > 0)) throw_input("lambda must be positive");
    if (alpha < 1) throw_input("alpha must be >= 1");
    return std::pow(2.0 * lambda_val / (w_i * static_cast<double>(s)), 1.0 / alpha);
}

std::vector<int> negligible_components(const std::vector<double>& w, int k, double delta,
                                       std::int64_t s) {
    if (static_cast<int>(w.size()) != k) throw_input("weight vector must have length k");
    const double threshold = negligible_threshold(k, delta, s);
    std::vector<int> out;
    for (int i = 0; i < k; ++i)
        if (w[static_cast<std::size_t>(i)] <= threshold) out.push_back(i);
    return out;
}

double chernoff_half_bound(double mean) {
    if (!(mean >= 0)) throw_input("a binomial mean must be >= 0");
    return std::exp(-mean / 8.0);
}

SampleBudget total_sample_budget(int k, double eps, double delta, const LearnerSpec& spec,
                                  int d) {
    using BigInt = boost::multiprecision::cpp_int;
    using BigFloat = boost::multiprecision::cpp_bin_float_50;

    if (k < 1) throw_input("k must be >= 1");
    if (!(eps > 0 && eps <= 2)) throw_input("eps must lie in (0,2]");
    if (!(delta > 0 && delta < 1)) throw_input("delta must lie in (0,1)");

    SampleBudget out;
    out.s = mixture_sample_size(k, eps, delta, spec, d);

    const BigInt assignments = boost::multiprecision::pow(BigInt(k), static_cast<unsigned>(out.s));
    const BigFloat cover_bound =
        boost::multiprecision::pow(BigFloat(1.0 + static_cast<double>(k) / eps), k);
    const BigFloat m_bound = BigFloat(assignments) * cover_bound;

    out.m_bound = m_bound.str(30);
    out.ln_m_bound = static_cast<double>(boost::multiprecision::log(m_bound));
    out.m = count_ceil((std::log(3.0) + 2.0 * out.ln_m_bound + std::log(1.0 / delta)) /
                       (2.0 * eps * eps));
    out.total = out.s + out.m;
    return out;
}

}  // namespace mixlearn
