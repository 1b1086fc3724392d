#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mixlearn/rng.hpp"

namespace mixlearn {

using Point = Eigen::VectorXd;

// A drawn sample plus the context needed to reuse it. The dimension is kept
// explicitly so an empty sample still knows the space it lives in.
struct SampleSet {
    std::vector<Point> points;
    int dim = 0;
    std::uint64_t seed = 0;
    std::string source_label;

    std::size_t size() const noexcept { return points.size(); }
};

// Immutable probability density with value semantics (copies share the node).
// Four kinds: full-covariance gaussian, axis-aligned gaussian, finite mixture
// (components may themselves be mixtures), and a piecewise-constant density
// on an interval.
class Density {
public:
    enum class Kind { gaussian, axis_aligned_gaussian, mixture, histogram1d };

    static Density gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
    static Density axis_aligned_gaussian(Eigen::VectorXd mean, Eigen::VectorXd var);
    static Density mixture(std::vector<double> weights, std::vector<Density> components);
    static Density histogram1d(double left, double right, std::vector<double> masses);

    Kind kind() const noexcept;
    int dim() const noexcept;

    double pdf(const Point& x) const;
    // Scalar fast path for one-dimensional densities.
    double pdf1(double x) const;

    // Parameter access; throws an input error when the kind does not match.
    const Eigen::VectorXd& mean() const;
    const Eigen::MatrixXd& cov() const;
    Eigen::VectorXd var() const;
    const std::vector<double>& weights() const;
    const std::vector<Density>& components() const;
    double left() const;
    double right() const;
    const std::vector<double>& masses() const;

    // Axis-aligned box holding all but a negligible fraction of the mass
    // (gaussians: mean +/- 10 sigma per axis). Used to place quadrature grids.
    void support_hint(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const;

    const std::string& label() const noexcept;
    Density with_label(std::string label) const;

private:
    struct Node;
    explicit Density(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;

    friend class Sampler;
};

// Deterministic sampler for a density. A mixture node consumes one uniform
// from its own stream to pick the component, then delegates to a per-component
// child sampler seeded with child_seed(seed, component_index); the draw
// sequence of one component is therefore unaffected by how often the others
// are hit. Gaussians consume d normals per point, histograms two uniforms.
class Sampler {
public:
    Sampler(const Density& density, std::uint64_t seed);

    Point next();

private:
    Density density_;
    Rng rng_;
    std::vector<std::unique_ptr<Sampler>> children_;
};

SampleSet draw_sample(const Density& density, std::size_t n, std::uint64_t seed);

}  // namespace mixlearn
