#include "mixlearn/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixlearn/counts.hpp"
#include "mixlearn/errors.hpp"
#include "mixlearn/serialize.hpp"

namespace mixlearn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_plain_gaussian_1d(const Density& d) {
    return d.dim() == 1 && (d.kind() == Density::Kind::gaussian ||
                            d.kind() == Density::Kind::axis_aligned_gaussian);
}

}  // namespace

MeasureOracle MeasureOracle::exact_gaussian_1d() {
    MeasureOracle o;
    o.strategy = Strategy::exact_gaussian_1d;
    return o;
}

MeasureOracle MeasureOracle::quadrature(Grid1D grid) {
    MeasureOracle o;
    o.strategy = Strategy::quadrature;
    o.grid = grid;
    return o;
}

MeasureOracle MeasureOracle::monte_carlo(std::size_t points, std::uint64_t seed) {
    if (points < 2) throw_input("Monte Carlo measures need at least 2 points");
    MeasureOracle o;
    o.strategy = Strategy::monte_carlo;
    o.points = points;
    o.seed = seed;
    return o;
}

std::int64_t selection_sample_size(std::int64_t M, double eps, double delta) {
    if (M < 1) throw_input("candidate count must be >= 1");
    if (!(eps > 0 && eps <= 2)) throw_input("eps must lie in (0,2]");
    if (!(delta > 0 && delta < 1)) throw_input("delta must lie in (0,1)");
    const double log_arg = std::log(3.0) + 2.0 * std::log(static_cast<double>(M)) +
                           std::log(1.0 / delta);
    return count_ceil(log_arg / (2.0 * eps * eps));
}

Grid1D shared_grid(const std::vector<Density>& candidates, std::size_t cells) {
    if (candidates.empty()) throw_input("cannot build a grid over zero candidates");
    double left = std::numeric_limits<double>::infinity();
    double right = -left;
    Eigen::VectorXd lo, hi;
    for (const Density& c : candidates) {
        if (c.dim() != 1) throw_input("shared quadrature grids need 1-D candidates");
        c.support_hint(lo, hi);
        left = std::min(left, lo[0]);
        right = std::max(right, hi[0]);
    }
    return Grid1D(left, right, cells);
}

namespace {

// Per-cell candidate masses on the shared grid, one row per candidate, by
// CDF differencing. Differencing (rather than sampling pdf values at nodes)
// keeps the mass of components narrower than a cell: a near-degenerate
// component lands in its home cell instead of evaluating to zero everywhere,
// so its contests reflect its true set masses.
Eigen::MatrixXd grid_cell_masses(const std::vector<Density>& candidates, const Grid1D& grid) {
    const auto M = static_cast<Eigen::Index>(candidates.size());
    const auto cells = static_cast<Eigen::Index>(grid.cells);
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd masses(M, cells);
    for (Eigen::Index c = 0; c < M; ++c) {
        const Density& cand = candidates[static_cast<std::size_t>(c)];
        if (cand.dim() != 1) throw_input("the quadrature strategy needs 1-D candidates");
        double prev = measure(cand, IntervalUnion::of({{-inf, grid.node(0)}}));
        for (Eigen::Index t = 0; t < cells; ++t) {
            const double next =
                measure(cand, IntervalUnion::of({{-inf, grid.node(static_cast<std::size_t>(t) + 1)}}));
            masses(c, t) = std::max(next - prev, 0.0);
            prev = next;
        }
    }
    return masses;
}

// Cell index of each 1-D sample point; -1 when the point falls off the grid
// (then it belongs to no comparison set the grid can express).
std::vector<std::ptrdiff_t> grid_cell_of(const SampleSet& sample, const Grid1D& grid) {
    std::vector<std::ptrdiff_t> cell(sample.points.size(), -1);
    for (std::size_t t = 0; t < sample.points.size(); ++t) {
        if (sample.points[t].size() != 1)
            throw_input("the quadrature strategy needs a 1-D evaluation sample");
        const double x = sample.points[t][0];
        if (x < grid.left || x > grid.right) continue;
        const auto idx = static_cast<std::ptrdiff_t>((x - grid.left) / grid.step());
        cell[t] = std::min<std::ptrdiff_t>(idx, static_cast<std::ptrdiff_t>(grid.cells) - 1);
    }
    return cell;
}

Eigen::MatrixXd measures_exact(const std::vector<Density>& candidates) {
    const std::size_t M = candidates.size();
    for (const Density& c : candidates)
        if (!is_plain_gaussian_1d(c))
            throw_input("the exact measure strategy requires plain 1-D gaussian candidates");
    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(M),
                                                      static_cast<Eigen::Index>(M), kNaN);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i + 1; j < M; ++j) {
            const IntervalUnion set = scheffe_set_gaussian_1d(candidates[i], candidates[j]);
            table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                measure(candidates[i], set);
            table(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                measure(candidates[j], set);
        }
    }
    return table;
}

Eigen::MatrixXd measures_quadrature(const std::vector<Density>& candidates, const Grid1D& grid) {
    const auto M = static_cast<Eigen::Index>(candidates.size());
    const Eigen::MatrixXd masses = grid_cell_masses(candidates, grid);
    const auto cells = masses.cols();
    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(M, M, kNaN);
    for (Eigen::Index i = 0; i < M; ++i) {
        for (Eigen::Index j = i + 1; j < M; ++j) {
            double mass_i = 0, mass_j = 0;
            for (Eigen::Index t = 0; t < cells; ++t) {
                if (masses(i, t) < masses(j, t)) continue;
                mass_i += masses(i, t);
                mass_j += masses(j, t);
            }
            table(i, j) = std::clamp(mass_i, 0.0, 1.0);
            table(j, i) = std::clamp(mass_j, 0.0, 1.0);
        }
    }
    return table;
}

Eigen::MatrixXd measures_monte_carlo(const std::vector<Density>& candidates, std::size_t n,
                                     std::uint64_t seed) {
    const auto M = static_cast<Eigen::Index>(candidates.size());
    // Shared evaluation points from the uniform mixture of all candidates.
    Density proposal = M == 1
        ? candidates.front()
        : Density::mixture(std::vector<double>(static_cast<std::size_t>(M),
                                               1.0 / static_cast<double>(M)),
                           candidates);
    Sampler sampler(proposal, seed);
    Eigen::MatrixXd values(M, static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const Point x = sampler.next();
        for (Eigen::Index c = 0; c < M; ++c)
            values(c, static_cast<Eigen::Index>(t)) =
                candidates[static_cast<std::size_t>(c)].pdf(x);
    }
    // Importance weights f_a(x)/h(x) with h the uniform candidate mixture.
    const Eigen::VectorXd h = values.colwise().mean();
    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(M, M, kNaN);
    for (Eigen::Index i = 0; i < M; ++i) {
        for (Eigen::Index j = i + 1; j < M; ++j) {
            double mass_i = 0, mass_j = 0;
            for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(n); ++t) {
                if (values(i, t) < values(j, t) || h[t] <= 0) continue;
                mass_i += values(i, t) / h[t];
                mass_j += values(j, t) / h[t];
            }
            table(i, j) = std::clamp(mass_i / static_cast<double>(n), 0.0, 1.0);
            table(j, i) = std::clamp(mass_j / static_cast<double>(n), 0.0, 1.0);
        }
    }
    return table;
}

}  // namespace

Eigen::MatrixXd candidate_set_measures(const std::vector<Density>& candidates,
                                       const MeasureOracle& oracle) {
    if (candidates.empty()) throw_input("need at least one candidate");
    switch (oracle.strategy) {
        case MeasureOracle::Strategy::exact_gaussian_1d:
            return measures_exact(candidates);
        case MeasureOracle::Strategy::quadrature:
            return measures_quadrature(candidates, oracle.grid);
        case MeasureOracle::Strategy::monte_carlo:
            return measures_monte_carlo(candidates, oracle.points, oracle.seed);
    }
    throw_numeric("unreachable oracle strategy");
}

TournamentResult select(const std::vector<Density>& candidates, const SampleSet& eval_sample,
                        double eps, const MeasureOracle& oracle) {
    if (candidates.empty()) throw_input("selection needs at least one candidate");
    if (eval_sample.points.empty()) throw_input("selection needs a nonempty evaluation sample");
    if (!(eps > 0 && eps <= 2)) throw_input("eps must lie in (0,2]");
    const std::size_t M = candidates.size();
    const std::size_t n = eval_sample.points.size();

    TournamentResult result;
    result.wins.assign(M, 0);
    result.contests = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(M),
                                                static_cast<Eigen::Index>(M), kNaN);
    if (M == 1) {
        result.winner = 0;
        return result;
    }

    if (oracle.strategy == MeasureOracle::Strategy::quadrature) {
        // One pass per pair over the shared cells yields the pair's comparison
        // set, both candidates' masses on it, and the empirical measure (the
        // fraction of sample points whose cell the set contains), so all three
        // see the identical set.
        const Eigen::MatrixXd cell_masses = grid_cell_masses(candidates, oracle.grid);
        const auto cells = cell_masses.cols();
        const std::vector<std::ptrdiff_t> point_cell = grid_cell_of(eval_sample, oracle.grid);
        Eigen::VectorXd cell_count = Eigen::VectorXd::Zero(cells);
        for (const std::ptrdiff_t c : point_cell)
            if (c >= 0) cell_count[static_cast<Eigen::Index>(c)] += 1.0;

        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t j = i + 1; j < M; ++j) {
                const auto ei = static_cast<Eigen::Index>(i);
                const auto ej = static_cast<Eigen::Index>(j);
                double mass_i = 0, mass_j = 0, hits = 0;
                for (Eigen::Index t = 0; t < cells; ++t) {
                    if (cell_masses(ei, t) < cell_masses(ej, t)) continue;
                    mass_i += cell_masses(ei, t);
                    mass_j += cell_masses(ej, t);
                    hits += cell_count[t];
                }
                const double emp = hits / static_cast<double>(n);
                result.contests(ei, ej) = std::abs(std::clamp(mass_i, 0.0, 1.0) - emp);
                result.contests(ej, ei) = std::abs(std::clamp(mass_j, 0.0, 1.0) - emp);
                if (result.contests(ei, ej) <= result.contests(ej, ei))
                    ++result.wins[i];
                else
                    ++result.wins[j];
            }
        }
    } else {
        const Eigen::MatrixXd masses = candidate_set_measures(candidates, oracle);

        // Empirical membership. The exact strategy tests interval membership;
        // the Monte-Carlo strategy compares the candidates' pdf values at the
        // sample points, the comparison set's defining predicate evaluated
        // exactly.
        const bool exact = oracle.strategy == MeasureOracle::Strategy::exact_gaussian_1d;
        Eigen::MatrixXd sample_values;
        if (!exact) {
            sample_values.resize(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(n));
            for (std::size_t c = 0; c < M; ++c)
                for (std::size_t t = 0; t < n; ++t)
                    sample_values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) =
                        candidates[c].pdf(eval_sample.points[t]);
        }

        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t j = i + 1; j < M; ++j) {
                double emp;
                if (exact) {
                    const IntervalUnion set =
                        scheffe_set_gaussian_1d(candidates[i], candidates[j]);
                    emp = empirical_measure(EmpiricalDistribution{eval_sample}, set);
                } else {
                    std::size_t hits = 0;
                    for (std::size_t t = 0; t < n; ++t)
                        if (sample_values(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(t)) >=
                            sample_values(static_cast<Eigen::Index>(j),
                                          static_cast<Eigen::Index>(t)))
                            ++hits;
                    emp = static_cast<double>(hits) / static_cast<double>(n);
                }
                const auto ei = static_cast<Eigen::Index>(i);
                const auto ej = static_cast<Eigen::Index>(j);
                result.contests(ei, ej) = std::abs(masses(ei, ej) - emp);
                result.contests(ej, ei) = std::abs(masses(ej, ei) - emp);
                if (result.contests(ei, ej) <= result.contests(ej, ei))
                    ++result.wins[i];
                else
                    ++result.wins[j];
            }
        }
    }

    result.winner = static_cast<std::int64_t>(
        std::max_element(result.wins.begin(), result.wins.end()) - result.wins.begin());
    return result;
}

TournamentResult select(const CandidatePool& pool, const SampleSet& eval_sample, double eps,
                        const MeasureOracle& oracle) {
    return select(pool.candidates, eval_sample, eps, oracle);
}

std::string tournament_to_json(const TournamentResult& result) {
    std::string out = "{\"winner\":" + std::to_string(result.winner) + ",\"wins\":[";
    for (std::size_t i = 0; i < result.wins.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(result.wins[i]);
    }
    out += "],\"contests\":[";
    for (Eigen::Index r = 0; r < result.contests.rows(); ++r) {
        if (r) out += ',';
        out += '[';
        for (Eigen::Index c = 0; c < result.contests.cols(); ++c) {
            if (c) out += ',';
            const double v = result.contests(r, c);
            out += std::isnan(v) ? "null" : format_double(v);
        }
        out += ']';
    }
    out += "]}";
    return out;
}

}  // namespace mixlearn
