#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "mixlearn/density.hpp"
#include "mixlearn/errors.hpp"
#include "mixlearn/rng.hpp"

using namespace mixlearn;

namespace {

Point pt1(double x) {
    Point p(1);
    p[0] = x;
    return p;
}

Point pt2(double x, double y) {
    Point p(2);
    p[0] = x;
    p[1] = y;
    return p;
}

Density std_normal_1d() {
    return Density::gaussian(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
}

bool same_points_bitwise(const SampleSet& a, const SampleSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.points[i].size() != b.points[i].size()) return false;
        if (std::memcmp(a.points[i].data(), b.points[i].data(),
                        sizeof(double) * static_cast<std::size_t>(a.points[i].size())) != 0)
            return false;
    }
    return true;
}

// Trapezoid integral of the pdf over [lo, hi].
double integrate_pdf(const Density& d, double lo, double hi, std::size_t cells) {
    const double h = (hi - lo) / static_cast<double>(cells);
    double sum = 0.5 * (d.pdf1(lo) + d.pdf1(hi));
    for (std::size_t i = 1; i < cells; ++i) sum += d.pdf1(lo + static_cast<double>(i) * h);
    return sum * h;
}

}  // namespace

TEST_CASE("rng streams are deterministic and child seeds are distinct") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
    }
    CHECK(Rng(43).next_u64() == c.next_u64());

    std::vector<std::uint64_t> seeds{7};
    for (std::uint64_t i = 0; i < 8; ++i) seeds.push_back(child_seed(7, i));
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j) CHECK(seeds[i] != seeds[j]);
}

TEST_CASE("rng uniform doubles live in [0,1) and normals have standard moments") {
    Rng r(1);
    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
    CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);

    Rng g(2);
    double m = 0, v = 0;
    for (int i = 0; i < n; ++i) {
        const double z = g.next_normal();
        m += z;
        v += z * z;
    }
    CHECK(std::abs(m / n) < 0.02);
    CHECK(std::abs(v / n - 1.0) < 0.05);
}

TEST_CASE("gaussian pdf matches the closed form") {
    const Density f = std_normal_1d();
    CHECK(f.pdf1(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(f.pdf(pt1(0.0)) == f.pdf1(0.0));
    CHECK(f.pdf1(1.5) ==
          doctest::Approx(std::exp(-1.125) / std::sqrt(2 * M_PI)).epsilon(1e-12));

    // 2-D with correlation, checked against the explicit inverse.
    Eigen::VectorXd mean(2);
    mean << 1.0, -1.0;
    Eigen::MatrixXd cov(2, 2);
    cov << 2.0, 0.5, 0.5, 1.0;
    const Density g = Density::gaussian(mean, cov);
    const Eigen::MatrixXd inv = cov.inverse();
    const double det = cov.determinant();
    for (const Point& x : {pt2(0, 0), pt2(1, -1), pt2(2.5, 0.25)}) {
        const Eigen::VectorXd d = x - mean;
        const double expected =
            std::exp(-0.5 * d.dot(inv * d)) / (2 * M_PI * std::sqrt(det));
        CHECK(g.pdf(x) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)g.pdf(pt1(0)), Error);
}

TEST_CASE("axis-aligned gaussian: exact zero off-diagonals, product pdf, var round-trip") {
    Eigen::VectorXd mean(3), var(3);
    mean << 0.25, -1.5, 3.0;
    var << 0.5, 1.0, 2.25;
    const Density f = Density::axis_aligned_gaussian(mean, var);
    CHECK(f.kind() == Density::Kind::axis_aligned_gaussian);
    CHECK(f.var() == var);  // bit-exact round trip
    const Eigen::MatrixXd& cov = f.cov();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(cov(i, j) == 0.0);

    Point x(3);
    x << 0.0, -1.0, 4.0;
    double expected = 1.0;
    for (int i = 0; i < 3; ++i)
        expected *= std::exp(-0.5 * (x[i] - mean[i]) * (x[i] - mean[i]) / var[i]) /
                    std::sqrt(2 * M_PI * var[i]);
    CHECK(f.pdf(x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("histogram pdf: uniform case, bin lookup, edges") {
    const Density u = Density::histogram1d(0.0, 1.0, {1.0});
    CHECK(u.pdf1(0.5) == 1.0);

    const Density h = Density::histogram1d(0.0, 2.0, {0.25, 0.75});
    CHECK(h.pdf1(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(h.pdf1(1.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(h.pdf1(2.0) == doctest::Approx(0.75).epsilon(1e-15));  // right edge: last bin
    CHECK(h.pdf1(-0.001) == 0.0);
    CHECK(h.pdf1(2.001) == 0.0);
    CHECK(h.left() == 0.0);
    CHECK(h.right() == 2.0);
    CHECK(h.masses() == std::vector<double>{0.25, 0.75});
}

TEST_CASE("mixture pdf equals the weighted component sum pointwise") {
    const Density a = std_normal_1d();
    const Density b = Density::gaussian(pt1(2.0), Eigen::MatrixXd::Identity(1, 1) * 0.25);
    const Density mix = Density::mixture({0.25, 0.75}, {a, b});
    for (double x = -4; x <= 5; x += 0.37) {
        const double expected = 0.25 * a.pdf1(x) + 0.75 * b.pdf1(x);
        CHECK(std::abs(mix.pdf1(x) - expected) <= 1e-12);
    }
    // k=1 identity case.
    const Density one = Density::mixture({1.0}, {a});
    CHECK(one.pdf1(0.3) == a.pdf1(0.3));
    CHECK(mix.weights() == std::vector<double>{0.25, 0.75});
    CHECK(mix.components().size() == 2);
}

TEST_CASE("1-D densities integrate to 1 under trapezoid quadrature") {
    const Density g = Density::gaussian(pt1(3.0), Eigen::MatrixXd::Identity(1, 1) * 0.25);
    CHECK(integrate_pdf(g, 3 - 10 * 0.5, 3 + 10 * 0.5, 8192) == doctest::Approx(1.0).epsilon(1e-6));
    const Density h = Density::histogram1d(0.0, 4.0, {0.25, 0.25, 0.25, 0.25});
    CHECK(integrate_pdf(h, 0, 4, 8192) == doctest::Approx(1.0).epsilon(1e-6));
    const Density mix = Density::mixture({0.5, 0.5}, {std_normal_1d(), g});
    CHECK(integrate_pdf(mix, -10, 8, 16384) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("construction rejects invalid parameters") {
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.3, 0.0, 1.0;
    CHECK_THROWS_AS(Density::gaussian(Eigen::VectorXd::Zero(2), asym), Error);

    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
    CHECK_THROWS_AS(Density::gaussian(Eigen::VectorXd::Zero(2), indef), Error);

    // Degenerate covariance (non-PD within tolerance 1e-10) is rejected.
    CHECK_THROWS_AS(
        Density::gaussian(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1) * 1e-12),
        Error);

    Eigen::VectorXd nan_mean(1);
    nan_mean << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Density::gaussian(nan_mean, Eigen::MatrixXd::Identity(1, 1)), Error);

    Eigen::VectorXd bad_var(2);
    bad_var << 1.0, 0.0;
    CHECK_THROWS_AS(Density::axis_aligned_gaussian(Eigen::VectorXd::Zero(2), bad_var), Error);

    const Density f = std_normal_1d();
    CHECK_THROWS_AS(Density::mixture({0.45, 0.45}, {f, f}), Error);   // sums to 0.9
    CHECK_THROWS_AS(Density::mixture({-0.5, 1.5}, {f, f}), Error);    // negative weight
    CHECK_THROWS_AS(Density::mixture({1.0}, {}), Error);              // count mismatch
    const Density f2 = Density::gaussian(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS(Density::mixture({0.5, 0.5}, {f, f2}), Error);    // dimension mismatch

    CHECK_THROWS_AS(Density::histogram1d(1.0, 0.0, {1.0}), Error);    // left >= right
    CHECK_THROWS_AS(Density::histogram1d(0.0, 1.0, {0.5, 0.6}), Error);
    CHECK_THROWS_AS(Density::histogram1d(0.0, 1.0, {-0.5, 1.5}), Error);

    // Kind-mismatched accessors throw input errors.
    CHECK_THROWS_AS((void)f.masses(), Error);
    CHECK_THROWS_AS((void)Density::histogram1d(0, 1, {1.0}).mean(), Error);
}

TEST_CASE("pdf is nonnegative everywhere sampled") {
    const Density mix = Density::mixture(
        {0.5, 0.5},
        {std_normal_1d(), Density::histogram1d(-1.0, 1.0, {0.5, 0.5})});
    Rng r(11);
    for (int i = 0; i < 1000; ++i) {
        const double x = 20 * r.next_double() - 10;
        CHECK(mix.pdf1(x) >= 0.0);
    }
}

TEST_CASE("sampling: n=0, bitwise reproducibility, seed sensitivity") {
    const Density f = std_normal_1d();
    const SampleSet empty = draw_sample(f, 0, 5);
    CHECK(empty.size() == 0);
    CHECK(empty.dim == 1);
    CHECK(empty.seed == 5);

    const SampleSet a = draw_sample(f, 257, 123);
    const SampleSet b = draw_sample(f, 257, 123);
    const SampleSet c = draw_sample(f, 257, 124);
    CHECK(same_points_bitwise(a, b));
    CHECK_FALSE(same_points_bitwise(a, c));
}

TEST_CASE("sampling statistics at scale") {
    // 1e5 standard-normal draws: mean within +/- 0.02 (CLT bound ~4/sqrt(n)).
    const SampleSet s = draw_sample(std_normal_1d(), 100000, 42);
    double mean = 0;
    for (const Point& p : s.points) mean += p[0];
    mean /= static_cast<double>(s.size());
    CHECK(std::abs(mean) < 0.02);

    // 2-D correlated gaussian: sample covariance near the model covariance.
    Eigen::VectorXd mu(2);
    mu << 1.0, -2.0;
    Eigen::MatrixXd cov(2, 2);
    cov << 2.0, 0.5, 0.5, 1.0;
    const SampleSet t = draw_sample(Density::gaussian(mu, cov), 20000, 7);
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (const Point& p : t.points) m += p;
    m /= static_cast<double>(t.size());
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    for (const Point& p : t.points) c += (p - m) * (p - m).transpose();
    c /= static_cast<double>(t.size());
    CHECK((m - mu).cwiseAbs().maxCoeff() < 0.05);
    CHECK((c - cov).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("mixture sampling: one-hot weights reproduce the component's child stream") {
    const Density a = Density::gaussian(pt1(-3.0), Eigen::MatrixXd::Identity(1, 1));
    const Density b = Density::gaussian(pt1(3.0), Eigen::MatrixXd::Identity(1, 1));
    const Density mix = Density::mixture({1.0, 0.0}, {a, b});
    const SampleSet from_mix = draw_sample(mix, 64, 99);
    const SampleSet from_comp = draw_sample(a, 64, child_seed(99, 0));
    CHECK(same_points_bitwise(from_mix, from_comp));
}

TEST_CASE("mixture and histogram sampling hit components in proportion") {
    const Density a = Density::gaussian(pt1(-10.0), Eigen::MatrixXd::Identity(1, 1));
    const Density b = Density::gaussian(pt1(10.0), Eigen::MatrixXd::Identity(1, 1));
    const SampleSet s = draw_sample(Density::mixture({0.25, 0.75}, {a, b}), 20000, 3);
    double right = 0;
    for (const Point& p : s.points) right += p[0] > 0 ? 1.0 : 0.0;
    CHECK(std::abs(right / static_cast<double>(s.size()) - 0.75) < 0.02);

    const SampleSet h = draw_sample(Density::histogram1d(0.0, 2.0, {0.25, 0.75}), 20000, 4);
    double upper = 0;
    for (const Point& p : h.points) {
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 2.0);
        upper += p[0] >= 1.0 ? 1.0 : 0.0;
    }
    CHECK(std::abs(upper / static_cast<double>(h.size()) - 0.75) < 0.02);
}

TEST_CASE("support hints cover the bulk of the mass") {
    Eigen::VectorXd lo, hi;
    std_normal_1d().support_hint(lo, hi);
    CHECK(lo[0] == doctest::Approx(-10.0));
    CHECK(hi[0] == doctest::Approx(10.0));

    Density::histogram1d(-1.0, 3.0, {0.5, 0.5}).support_hint(lo, hi);
    CHECK(lo[0] == -1.0);
    CHECK(hi[0] == 3.0);

    const Density mix = Density::mixture(
        {0.5, 0.5},
        {std_normal_1d(), Density::gaussian(pt1(20.0), Eigen::MatrixXd::Identity(1, 1) * 4.0)});
    mix.support_hint(lo, hi);
    CHECK(lo[0] == doctest::Approx(-10.0));
    CHECK(hi[0] == doctest::Approx(40.0));
}

TEST_CASE("labels survive with_label and propagate to samples") {
    const Density f = std_normal_1d().with_label("target-a");
    CHECK(f.label() == "target-a");
    const SampleSet s = draw_sample(f, 3, 1);
    CHECK(s.source_label == "target-a");
    CHECK(s.dim == 1);
}
