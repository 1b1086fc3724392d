#include "mixlearn/density.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "mixlearn/errors.hpp"

namespace mixlearn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// Covariances whose Cholesky diagonal drops below this are treated as
// singular; the squared value (1e-10) is the effective eigenvalue floor.
constexpr double kMinCholDiag = 1e-5;

void require_finite(const Eigen::VectorXd& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i])) throw_input(std::string(what) + " has a non-finite entry");
}

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j))) throw_input(std::string(what) + " has a non-finite entry");
}

}  // namespace

struct GaussianData {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd chol;  // lower Cholesky factor of cov
    double log_norm = 0;   // log of the density peak scale: -(d/2)log(2pi) - sum(log L_ii)
};

struct Histogram1DData {
    double left = 0;
    double right = 1;
    std::vector<double> masses;
    double width = 0;  // bin width
    double total = 0;  // sum of masses (kept as given; validated close to 1)
};

struct MixtureData {
    std::vector<double> weights;
    std::vector<Density> components;
    double total = 0;  // sum of weights
};

struct Density::Node {
    Kind kind = Kind::gaussian;
    int dim = 0;
    std::string label;
    std::variant<GaussianData, Histogram1DData, MixtureData> data;
};

namespace {

GaussianData make_gaussian_data(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    const Eigen::Index d = mean.size();
    if (d < 1) throw_input("gaussian mean must have at least one coordinate");
    if (cov.rows() != d || cov.cols() != d)
        throw_input("gaussian covariance must be " + std::to_string(d) + "x" + std::to_string(d));
    require_finite(mean, "gaussian mean");
    require_finite(cov, "gaussian covariance");

    const double scale = 1.0 + cov.cwiseAbs().maxCoeff();
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw_input("gaussian covariance is not symmetric");

    Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success)
        throw_input("gaussian covariance is not positive definite");
    Eigen::MatrixXd chol = llt.matrixL();
    if (chol.diagonal().minCoeff() < kMinCholDiag)
        throw_input("gaussian covariance is numerically singular");

    GaussianData g;
    g.mean = std::move(mean);
    g.cov = std::move(cov);
    g.chol = std::move(chol);
    g.log_norm = -0.5 * static_cast<double>(d) * std::log(kTwoPi) -
                 g.chol.diagonal().array().log().sum();
    return g;
}

}  // namespace

Density Density::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::gaussian;
    node->dim = static_cast<int>(mean.size());
    node->data = make_gaussian_data(std::move(mean), std::move(cov));
    return Density(std::move(node));
}

Density Density::axis_aligned_gaussian(Eigen::VectorXd mean, Eigen::VectorXd var) {
    if (var.size() != mean.size())
        throw_input("axis-aligned gaussian needs one variance per coordinate");
    require_finite(var, "axis-aligned gaussian variance");
    auto node = std::make_shared<Node>();
    node->kind = Kind::axis_aligned_gaussian;
    node->dim = static_cast<int>(mean.size());
    node->data = make_gaussian_data(std::move(mean), Eigen::MatrixXd(var.asDiagonal()));
    return Density(std::move(node));
}

Density Density::mixture(std::vector<double> weights, std::vector<Density> components) {
    if (components.empty()) throw_input("mixture needs at least one component");
    if (weights.size() != components.size())
        throw_input("mixture needs one weight per component");
    double total = 0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0) throw_input("mixture weights must be finite and >= 0");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw_input("mixture weights must sum to 1");
    const int d = components.front().dim();
    for (const Density& c : components)
        if (c.dim() != d) throw_input("mixture components must share one dimension");

    auto node = std::make_shared<Node>();
    node->kind = Kind::mixture;
    node->dim = d;
    MixtureData m;
    m.weights = std::move(weights);
    m.components = std::move(components);
    m.total = total;
    node->data = std::move(m);
    return Density(std::move(node));
}

Density Density::histogram1d(double left, double right, std::vector<double> masses) {
    if (!std::isfinite(left) || !std::isfinite(right) || !(left < right))
        throw_input("histogram needs finite bounds with left < right");
    if (masses.empty()) throw_input("histogram needs at least one bin");
    double total = 0;
    for (double m : masses) {
        if (!std::isfinite(m) || m < 0) throw_input("histogram masses must be finite and >= 0");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) throw_input("histogram masses must sum to 1");

    auto node = std::make_shared<Node>();
    node->kind = Kind::histogram1d;
    node->dim = 1;
    Histogram1DData h;
    h.left = left;
    h.right = right;
    h.width = (right - left) / static_cast<double>(masses.size());
    h.masses = std::move(masses);
    h.total = total;
    node->data = std::move(h);
    return Density(std::move(node));
}

Density::Kind Density::kind() const noexcept { return node_->kind; }
int Density::dim() const noexcept { return node_->dim; }
const std::string& Density::label() const noexcept { return node_->label; }

Density Density::with_label(std::string label) const {
    auto node = std::make_shared<Node>(*node_);
    node->label = std::move(label);
    return Density(std::move(node));
}

namespace {

double gaussian_pdf(const GaussianData& g, const Point& x) {
    Eigen::VectorXd y = g.chol.triangularView<Eigen::Lower>().solve(x - g.mean);
    return std::exp(g.log_norm - 0.5 * y.squaredNorm());
}

double histogram_pdf(const Histogram1DData& h, double x) {
    if (x < h.left || x > h.right) return 0.0;
    auto bin = static_cast<std::ptrdiff_t>((x - h.left) / h.width);
    const auto last = static_cast<std::ptrdiff_t>(h.masses.size()) - 1;
    if (bin > last) bin = last;  // right endpoint belongs to the last bin
    return h.masses[static_cast<std::size_t>(bin)] / h.width;
}

}  // namespace

double Density::pdf(const Point& x) const {
    if (x.size() != node_->dim)
        throw_input("point dimension does not match the density");
    switch (node_->kind) {
        case Kind::gaussian:
        case Kind::axis_aligned_gaussian:
            return gaussian_pdf(std::get<GaussianData>(node_->data), x);
        case Kind::histogram1d:
            return histogram_pdf(std::get<Histogram1DData>(node_->data), x[0]);
        case Kind::mixture: {
            const auto& m = std::get<MixtureData>(node_->data);
            double acc = 0;
            for (std::size_t i = 0; i < m.components.size(); ++i)
                acc += m.weights[i] * m.components[i].pdf(x);
            return acc;
        }
    }
    throw_numeric("unreachable density kind");
}

double Density::pdf1(double x) const {
    if (node_->dim != 1) throw_input("pdf1 requires a one-dimensional density");
    switch (node_->kind) {
        case Kind::gaussian:
        case Kind::axis_aligned_gaussian: {
            const auto& g = std::get<GaussianData>(node_->data);
            const double y = (x - g.mean[0]) / g.chol(0, 0);
            return std::exp(g.log_norm - 0.5 * y * y);
        }
        case Kind::histogram1d:
            return histogram_pdf(std::get<Histogram1DData>(node_->data), x);
        case Kind::mixture: {
            const auto& m = std::get<MixtureData>(node_->data);
            double acc = 0;
            for (std::size_t i = 0; i < m.components.size(); ++i)
                acc += m.weights[i] * m.components[i].pdf1(x);
            return acc;
        }
    }
    throw_numeric("unreachable density kind");
}

const Eigen::VectorXd& Density::mean() const {
    if (const auto* g = std::get_if<GaussianData>(&node_->data)) return g->mean;
    throw_input("density has no mean parameter");
}

const Eigen::MatrixXd& Density::cov() const {
    if (const auto* g = std::get_if<GaussianData>(&node_->data)) return g->cov;
    throw_input("density has no covariance parameter");
}

Eigen::VectorXd Density::var() const { return cov().diagonal(); }

const std::vector<double>& Density::weights() const {
    if (const auto* m = std::get_if<MixtureData>(&node_->data)) return m->weights;
    throw_input("density is not a mixture");
}

const std::vector<Density>& Density::components() const {
    if (const auto* m = std::get_if<MixtureData>(&node_->data)) return m->components;
    throw_input("density is not a mixture");
}

double Density::left() const {
    if (const auto* h = std::get_if<Histogram1DData>(&node_->data)) return h->left;
    throw_input("density is not a histogram");
}

double Density::right() const {
    if (const auto* h = std::get_if<Histogram1DData>(&node_->data)) return h->right;
    throw_input("density is not a histogram");
}

const std::vector<double>& Density::masses() const {
    if (const auto* h = std::get_if<Histogram1DData>(&node_->data)) return h->masses;
    throw_input("density is not a histogram");
}

void Density::support_hint(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    switch (node_->kind) {
        case Kind::gaussian:
        case Kind::axis_aligned_gaussian: {
            const auto& g = std::get<GaussianData>(node_->data);
            Eigen::VectorXd spread = g.cov.diagonal().cwiseSqrt() * 10.0;
            lo = g.mean - spread;
            hi = g.mean + spread;
            return;
        }
        case Kind::histogram1d: {
            const auto& h = std::get<Histogram1DData>(node_->data);
            lo = Eigen::VectorXd::Constant(1, h.left);
            hi = Eigen::VectorXd::Constant(1, h.right);
            return;
        }
        case Kind::mixture: {
            const auto& m = std::get<MixtureData>(node_->data);
            m.components.front().support_hint(lo, hi);
            Eigen::VectorXd clo, chi;
            for (std::size_t i = 1; i < m.components.size(); ++i) {
                m.components[i].support_hint(clo, chi);
                lo = lo.cwiseMin(clo);
                hi = hi.cwiseMax(chi);
            }
            return;
        }
    }
    throw_numeric("unreachable density kind");
}

Sampler::Sampler(const Density& density, std::uint64_t seed)
    : density_(density), rng_(seed) {
    if (density.kind() == Density::Kind::mixture) {
        const auto& comps = density.components();
        children_.reserve(comps.size());
        for (std::size_t i = 0; i < comps.size(); ++i)
            children_.push_back(std::make_unique<Sampler>(comps[i], child_seed(seed, i)));
    }
}

Point Sampler::next() {
    const auto& node = *density_.node_;
    switch (node.kind) {
        case Density::Kind::gaussian:
        case Density::Kind::axis_aligned_gaussian: {
            const auto& g = std::get<GaussianData>(node.data);
            Eigen::VectorXd z(node.dim);
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng_.next_normal();
            return g.mean + g.chol * z;
        }
        case Density::Kind::histogram1d: {
            const auto& h = std::get<Histogram1DData>(node.data);
            const double u = rng_.next_double() * h.total;
            std::size_t bin = h.masses.size() - 1;
            double cum = 0;
            for (std::size_t i = 0; i < h.masses.size(); ++i) {
                cum += h.masses[i];
                if (u < cum) {
                    bin = i;
                    break;
                }
            }
            const double v = rng_.next_double();
            Point x(1);
            x[0] = h.left + (static_cast<double>(bin) + v) * h.width;
            return x;
        }
        case Density::Kind::mixture: {
            const auto& m = std::get<MixtureData>(node.data);
            const double u = rng_.next_double() * m.total;
            std::size_t pick = m.weights.size() - 1;
            double cum = 0;
            for (std::size_t i = 0; i < m.weights.size(); ++i) {
                cum += m.weights[i];
                if (u < cum) {
                    pick = i;
                    break;
                }
            }
            return children_[pick]->next();
        }
    }
    throw_numeric("unreachable density kind");
}

SampleSet draw_sample(const Density& density, std::size_t n, std::uint64_t seed) {
    Sampler sampler(density, seed);
    SampleSet out;
    out.dim = density.dim();
    out.seed = seed;
    out.source_label = density.label();
    out.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.points.push_back(sampler.next());
    return out;
}

}  // namespace mixlearn
