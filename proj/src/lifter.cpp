#include "mixlearn/lifter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <unordered_map>

#include "mixlearn/counts.hpp"
#include "mixlearn/errors.hpp"
#include "mixlearn/select.hpp"
#include "mixlearn/serialize.hpp"

namespace mixlearn {

namespace {

constexpr std::int64_t kInt64Max = std::numeric_limits<std::int64_t>::max();

std::optional<std::int64_t> pow_checked(std::int64_t base, std::int64_t exp) {
    std::int64_t out = 1;
    for (std::int64_t i = 0; i < exp; ++i) {
        if (out > kInt64Max / base) return std::nullopt;
        out *= base;
    }
    return out;
}

std::optional<std::int64_t> mul_checked(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kInt64Max / b) return std::nullopt;
    return a * b;
}

// Parameter fingerprint with every number rounded to the 1e-9 grid, so
// candidates that differ only by float noise collapse to one pool entry.
double quantize(double x) {
    if (std::abs(x) > 1e15) return x;  // beyond the grid's resolution anyway
    return std::round(x * 1e9) / 1e9;
}

void append_quantized(std::string& out, double x) {
    out += format_double(quantize(x));
    out += ',';
}

void append_key(std::string& out, const Density& d) {
    switch (d.kind()) {
        case Density::Kind::gaussian: {
            out += "g(";
            for (double v : d.mean()) append_quantized(out, v);
            out += ';';
            const auto& cov = d.cov();
            for (Eigen::Index r = 0; r < cov.rows(); ++r)
                for (Eigen::Index c = 0; c < cov.cols(); ++c) append_quantized(out, cov(r, c));
            out += ')';
            return;
        }
        case Density::Kind::axis_aligned_gaussian: {
            out += "a(";
            for (double v : d.mean()) append_quantized(out, v);
            out += ';';
            for (double v : d.var()) append_quantized(out, v);
            out += ')';
            return;
        }
        case Density::Kind::histogram1d: {
            out += "h(";
            append_quantized(out, d.left());
            append_quantized(out, d.right());
            out += ';';
            for (double v : d.masses()) append_quantized(out, v);
            out += ')';
            return;
        }
        case Density::Kind::mixture: {
            out += "m[";
            const auto& w = d.weights();
            const auto& comps = d.components();
            for (std::size_t i = 0; i < comps.size(); ++i) {
                append_quantized(out, w[i]);
                out += ':';
                append_key(out, comps[i]);
                out += '|';
            }
            out += ']';
            return;
        }
    }
}

std::string dedup_key(const Density& d) {
    std::string out;
    append_key(out, d);
    return out;
}

}  // namespace

BudgetPolicy BudgetPolicy::capped(std::int64_t assignments, std::int64_t candidates) {
    if (assignments < 1 || candidates < 1) throw_input("budget caps must be >= 1");
    return {Mode::capped, assignments, candidates};
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index k = v.size();
    if (k < 1) throw_input("cannot project an empty vector");
    std::vector<double> u(v.data(), v.data() + k);
    std::sort(u.begin(), u.end(), std::greater<>());
    double running = 0;
    double theta = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
        running += u[static_cast<std::size_t>(j)];
        const double t = (running - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - t > 0) theta = t;
    }
    return v.unaryExpr([theta](double x) { return std::max(x - theta, 0.0); });
}

WeightCover build_weight_cover(int k, double eps) {
    if (k < 1) throw_input("k must be >= 1");
    if (!(eps > 0 && eps <= 2)) throw_input("eps must lie in (0,2]");

    // Axis values 0, eps/k, 2 eps/k, ..., with 1 appended when the last
    // multiple falls short of it.
    const double step = eps / static_cast<double>(k);
    std::vector<double> axis;
    const auto steps = static_cast<std::int64_t>(std::floor(1.0 / step + 1e-9));
    for (std::int64_t m = 0; m <= steps; ++m) axis.push_back(static_cast<double>(m) * step);
    if (axis.back() < 1.0 - 1e-12) axis.push_back(1.0);

    // Grid size (axis count)^k; guard the enumeration before starting it.
    std::int64_t grid_points = 1;
    for (int i = 0; i < k; ++i) {
        auto next = mul_checked(grid_points, static_cast<std::int64_t>(axis.size()));
        if (!next || *next > 50'000'000)
            throw_budget("weight cover of (" + std::to_string(axis.size()) + ")^" +
                         std::to_string(k) + " grid points is beyond the enumeration budget");
        grid_points = *next;
    }

    WeightCover cover;
    cover.k = k;
    cover.eps = eps;

    std::vector<std::size_t> odo(static_cast<std::size_t>(k), 0);
    Eigen::VectorXd point(k);
    std::vector<Eigen::VectorXd> projected;
    projected.reserve(static_cast<std::size_t>(grid_points));
    for (;;) {
        for (int i = 0; i < k; ++i) point[i] = axis[odo[static_cast<std::size_t>(i)]];
        projected.push_back(project_to_simplex(point));
        int pos = k - 1;
        while (pos >= 0 && ++odo[static_cast<std::size_t>(pos)] == axis.size()) {
            odo[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    // Sup-norm dedup at 1e-12: after a lexicographic sort, any two vectors
    // that close also have first coordinates that close, so scanning the
    // window of kept vectors whose first coordinate is within tolerance
    // finds every near-duplicate.
    std::sort(projected.begin(), projected.end(),
              [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                                      b.data() + b.size());
              });
    for (const Eigen::VectorXd& p : projected) {
        bool duplicate = false;
        for (auto it = cover.vectors.rbegin(); it != cover.vectors.rend(); ++it) {
            if (p[0] - (*it)[0] > 1e-12) break;
            if ((p - *it).cwiseAbs().maxCoeff() <= 1e-12) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) cover.vectors.push_back(p);
    }
    return cover;
}

AssignmentStream::AssignmentStream(std::int64_t s, int k, std::int64_t start)
    : s_(s), k_(k), index_(start), total_(pow_checked(k, s)),
      digits_(static_cast<std::size_t>(s), 0) {
    if (s < 0) throw_input("assignment length must be >= 0");
    if (k < 1) throw_input("k must be >= 1");
    if (start < 0) throw_input("assignment start index must be >= 0");
    if (total_ && start >= *total_) {
        exhausted_ = true;
        return;
    }
    std::int64_t rest = start;
    for (std::int64_t pos = s - 1; pos >= 0 && rest > 0; --pos) {
        digits_[static_cast<std::size_t>(pos)] = static_cast<int>(rest % k);
        rest /= k;
    }
    if (rest > 0) exhausted_ = true;  // start beyond k^s in the non-computable regime
}

std::optional<Assignment> AssignmentStream::next() {
    if (exhausted_) return std::nullopt;
    Assignment out{digits_};
    ++index_;
    std::int64_t pos = s_ - 1;
    while (pos >= 0 && ++digits_[static_cast<std::size_t>(pos)] == k_) {
        digits_[static_cast<std::size_t>(pos)] = 0;
        --pos;
    }
    if (pos < 0) exhausted_ = true;
    return out;
}

std::pair<std::vector<Assignment>, bool> enumerate_assignments(std::int64_t s, int k,
                                                               const BudgetPolicy& budget) {
    auto total = pow_checked(k, s);
    std::int64_t limit;
    if (budget.mode == BudgetPolicy::Mode::exhaustive) {
        if (!total)
            throw_budget("exhaustive enumeration of k^s = " + std::to_string(k) + "^" +
                         std::to_string(s) + " assignments exceeds a 64-bit count");
        limit = *total;
    } else {
        limit = total.value_or(kInt64Max);
        if (budget.max_assignments) limit = std::min(limit, *budget.max_assignments);
        if (limit == kInt64Max)
            throw_budget("capped enumeration needs max_assignments when k^s overflows");
    }

    std::vector<Assignment> out;
    AssignmentStream stream(s, k);
    for (std::int64_t i = 0; i < limit; ++i) {
        auto a = stream.next();
        if (!a) break;
        out.push_back(std::move(*a));
    }
    const bool truncated = !total || static_cast<std::int64_t>(out.size()) < *total;
    return {std::move(out), truncated};
}

std::int64_t candidate_count(std::int64_t s, int k, double eps) {
    auto assignments = pow_checked(k, s);
    if (!assignments)
        throw_budget("k^s = " + std::to_string(k) + "^" + std::to_string(s) +
                     " exceeds a 64-bit candidate count");
    const auto cover = static_cast<std::int64_t>(build_weight_cover(k, eps).size());
    auto total = mul_checked(*assignments, cover);
    if (!total)
        throw_budget("candidate count k^s x |cover| exceeds a 64-bit count");
    return *total;
}

std::int64_t mixture_sample_size(int k, double eps, double delta, const LearnerSpec& spec,
                                 int d) {
    if (k < 1) throw_input("k must be >= 1");
    return mixture_sample_size_from_lambda(
        k, eps, delta, spec.lambda(d, delta / (3.0 * static_cast<double>(k))), spec.alpha);
}

std::int64_t mixture_sample_size_from_lambda(int k, double eps, double delta, double lambda_val,
                                             double alpha) {
    if (k < 1) throw_input("k must be >= 1");
    if (!(eps > 0 && eps <= 2)) throw_input("eps must lie in (0,2]");
    if (!(delta > 0 && delta < 1)) throw_input("delta must lie in (0,1)");
    if (!(lambda_val > 0)) throw_input("lambda must be positive");
    const double kk = static_cast<double>(k);
    const double learner_term = 2.0 * kk * lambda_val / std::pow(eps, alpha);
    const double weight_term = 16.0 * kk * std::log(3.0 * kk / delta) / eps;
    return count_ceil(std::max(learner_term, weight_term));
}

double negligible_threshold(int k, double delta, std::int64_t s) {
    if (k < 1) throw_input("k must be >= 1");
    if (!(delta > 0 && delta < 1)) throw_input("delta must lie in (0,1)");
    if (s < 1) throw_input("s must be >= 1");
    return 8.0 * std::log(3.0 * static_cast<double>(k) / delta) / static_cast<double>(s);
}

namespace {

struct RawCandidate {
    Density density;
    std::pair<std::int64_t, std::int64_t> provenance;
};

std::vector<RawCandidate> emit_range(const SampleSet& sample, int k, const WeightCover& cover,
                                     const Learner& learner, std::int64_t a0, std::int64_t a1,
                                     std::int64_t pair_limit) {
    const auto s = static_cast<std::int64_t>(sample.size());
    const auto W = static_cast<std::int64_t>(cover.size());
    std::vector<RawCandidate> out;
    AssignmentStream stream(s, k, a0);
    for (std::int64_t a = a0; a < a1; ++a) {
        auto assignment = stream.next();
        if (!assignment) break;

        std::vector<SampleSet> groups(static_cast<std::size_t>(k));
        for (auto& g : groups) g.dim = sample.dim;
        for (std::size_t t = 0; t < sample.points.size(); ++t)
            groups[static_cast<std::size_t>(assignment->labels[t])].points.push_back(
                sample.points[t]);

        std::vector<Density> components;
        components.reserve(static_cast<std::size_t>(k));
        for (const SampleSet& g : groups) components.push_back(learner.learn(g));

        for (std::int64_t w = 0; w < W; ++w) {
            if (a * W + w >= pair_limit) return out;
            const Eigen::VectorXd& wv = cover.vectors[static_cast<std::size_t>(w)];
            std::vector<double> weights(wv.data(), wv.data() + wv.size());
            out.push_back({Density::mixture(std::move(weights), components), {a, w}});
        }
    }
    return out;
}

}  // namespace

CandidatePool generate_candidates(const SampleSet& sample, int k, double eps,
                                  const Learner& learner, const BudgetPolicy& budget,
                                  int workers) {
    if (k < 1) throw_input("k must be >= 1");
    SampleSet input = sample;
    if (input.dim == 0 && !input.points.empty())
        input.dim = static_cast<int>(input.points.front().size());
    if (input.dim < 1) throw_input("sample carries no dimension");
    for (const Point& p : input.points)
        if (p.size() != input.dim) throw_input("sample points must share one dimension");

    const auto s = static_cast<std::int64_t>(input.size());
    const WeightCover cover = build_weight_cover(k, eps);
    const auto W = static_cast<std::int64_t>(cover.size());

    const auto total_assignments = pow_checked(k, s);
    std::int64_t n_assign;
    std::int64_t pair_limit;
    bool truncated = false;
    if (budget.mode == BudgetPolicy::Mode::exhaustive) {
        if (!total_assignments)
            throw_budget("exhaustive enumeration of k^s = " + std::to_string(k) + "^" +
                         std::to_string(s) + " assignments exceeds a 64-bit count");
        n_assign = *total_assignments;
        auto pairs = mul_checked(n_assign, W);
        if (!pairs)
            throw_budget("exhaustive candidate count k^s x |cover| exceeds a 64-bit count");
        pair_limit = *pairs;
    } else {
        n_assign = total_assignments.value_or(kInt64Max);
        if (budget.max_assignments) n_assign = std::min(n_assign, *budget.max_assignments);
        pair_limit = mul_checked(n_assign, W).value_or(kInt64Max);
        if (budget.max_candidates) pair_limit = std::min(pair_limit, *budget.max_candidates);
        if (pair_limit == kInt64Max)
            throw_budget("capped enumeration needs max_assignments or max_candidates here");
        n_assign = std::min(n_assign, (pair_limit + W - 1) / W);
        truncated = !total_assignments || n_assign < *total_assignments ||
                    pair_limit < mul_checked(*total_assignments, W).value_or(kInt64Max);
    }

    // Workers split the assignment range; chunks are concatenated in range
    // order, so the pool is identical for any worker count.
    workers = std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(n_assign, 1));
    std::vector<RawCandidate> raw;
    if (workers == 1) {
        raw = emit_range(input, k, cover, learner, 0, n_assign, pair_limit);
    } else {
        const std::int64_t chunk = (n_assign + workers - 1) / workers;
        std::vector<std::future<std::vector<RawCandidate>>> futures;
        for (std::int64_t w = 0; w < workers; ++w) {
            const std::int64_t a0 = w * chunk;
            const std::int64_t a1 = std::min(a0 + chunk, n_assign);
            if (a0 >= a1) break;
            futures.push_back(std::async(std::launch::async, [&, a0, a1] {
                return emit_range(input, k, cover, learner, a0, a1, pair_limit);
            }));
        }
        for (auto& f : futures) {
            auto part = f.get();
            raw.insert(raw.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
        }
    }

    CandidatePool pool;
    pool.truncated = truncated;
    std::unordered_map<std::string, std::size_t> seen;
    seen.reserve(raw.size());
    for (RawCandidate& rc : raw) {
        auto [it, fresh] = seen.emplace(dedup_key(rc.density), pool.candidates.size());
        if (!fresh) {
            ++pool.dedup_count;
            continue;
        }
        pool.candidates.push_back(std::move(rc.density));
        pool.provenance.push_back(rc.provenance);
    }
    return pool;
}

std::pair<Density, MixtureLearnReport> learn_mixture(const Density& target, int k, double eps,
                                                     double delta, const Learner& learner,
                                                     const BudgetPolicy& budget,
                                                     std::uint64_t seed,
                                                     const MixtureLearnOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (k < 1) throw_input("k must be >= 1");
    if (!(eps > 0 && eps <= 2)) throw_input("eps must lie in (0,2]");
    if (!(delta > 0 && delta < 1)) throw_input("delta must lie in (0,1)");

    const int d = target.dim();
    const std::int64_t s =
        options.s_override ? *options.s_override
                           : mixture_sample_size(k, eps, delta, learner.spec, d);
    if (s < 0) throw_input("sample size override must be >= 0");

    const double cover_eps = options.cover_eps.value_or(eps);
    const double select_eps = options.select_eps.value_or(eps);

    const SampleSet generation = draw_sample(target, static_cast<std::size_t>(s),
                                             child_seed(seed, 0));
    CandidatePool pool =
        generate_candidates(generation, k, cover_eps, learner, budget, options.workers);

    const auto M = static_cast<std::int64_t>(pool.size());
    const std::int64_t m = selection_sample_size(M, select_eps, delta);
    const SampleSet selection = draw_sample(target, static_cast<std::size_t>(m),
                                            child_seed(seed, 1));

    const MeasureOracle oracle =
        d == 1 ? MeasureOracle::quadrature(shared_grid(pool.candidates, options.quadrature_cells))
               : MeasureOracle::monte_carlo(options.mc_factor * static_cast<std::size_t>(m),
                                            child_seed(seed, 2));
    const TournamentResult result = select(pool, selection, select_eps, oracle);

    MixtureLearnReport report;
    report.s = s;
    report.m = m;
    report.M = M;
    report.dedup = pool.dedup_count;
    report.selected_index = result.winner;
    report.truncated = pool.truncated;
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {pool.candidates[static_cast<std::size_t>(result.winner)], report};
}

}  // namespace mixlearn
