#pragma once

#include "pfoco/geometry.hpp"
#include "pfoco/lp.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace pfoco {

/// Euclidean ball of radius R centred at the origin.
class Ball final : public FeasibleSet {
  public:
    Ball(std::size_t n, double radius) : n_(n), radius_(radius) {
        if (n_ == 0) {
            throw InvalidArgument("Ball: dimension must be positive");
        }
        if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
            throw InvalidArgument("Ball: radius must be positive and finite");
        }
    }

    std::string kind() const override { return "ball"; }
    std::size_t dimension() const override { return n_; }
    double outer_radius() const override { return radius_; }
    double inner_radius() const override { return radius_; }

    /// -R d/||d||; the zero direction returns R e_1.
    Vector linear_minimizer(const Vector& direction) const override {
        const double norm = direction.norm();
        if (norm == 0.0) {
            return radius_ * unit_vector(n_, 0);
        }
        return (-radius_ / norm) * direction;
    }
    double violation(const Vector& point) const override { return std::max(0.0, point.norm() - radius_); }
    Vector separator(const Vector& point) const override { return point; }
    ProjectionResult project(const Vector& point) const override { return {clip_to_ball(point, radius_), 0.0, true}; }

  private:
    std::size_t n_;
    double radius_;
};

/// Axis-aligned box [lo, hi] with lo <= 0 <= hi coordinatewise.
class Box final : public FeasibleSet {
  public:
    Box(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.size() == 0 || lo_.size() != hi_.size()) {
            throw InvalidArgument("Box: bounds must be nonempty and of equal length");
        }
        require_finite(lo_, "Box lower bound");
        require_finite(hi_, "Box upper bound");
        if ((lo_.array() > 0.0).any() || (hi_.array() < 0.0).any()) {
            throw InvalidArgument("Box: bounds must bracket the origin (lo <= 0 <= hi)");
        }
        outer_ = lo_.cwiseAbs().cwiseMax(hi_.cwiseAbs()).norm();
        if (!(outer_ > 0.0)) {
            throw InvalidArgument("Box: degenerate box {0}");
        }
        inner_ = std::min((-lo_).minCoeff(), hi_.minCoeff());
    }

    static Box cube(std::size_t n, double half_width) {
        return Box(Vector::Constant(static_cast<Eigen::Index>(n), -half_width),
                   Vector::Constant(static_cast<Eigen::Index>(n), half_width));
    }

    const Vector& lower() const { return lo_; }
    const Vector& upper() const { return hi_; }

    std::string kind() const override { return "box"; }
    std::size_t dimension() const override { return static_cast<std::size_t>(lo_.size()); }
    double outer_radius() const override { return outer_; }
    double inner_radius() const override { return inner_; }

    /// Coordinatewise: lo where d_i >= 0, hi where d_i < 0.
    Vector linear_minimizer(const Vector& direction) const override {
        Vector v(lo_.size());
        for (Eigen::Index i = 0; i < lo_.size(); ++i) {
            v(i) = direction(i) < 0.0 ? hi_(i) : lo_(i);
        }
        return v;
    }
    double violation(const Vector& point) const override {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < lo_.size(); ++i) {
            worst = std::max({worst, point(i) - hi_(i), lo_(i) - point(i)});
        }
        return worst;
    }
    /// Normal of the most violated face; lowest index on ties.
    Vector separator(const Vector& point) const override {
        Eigen::Index best = 0;
        double worst = -std::numeric_limits<double>::infinity();
        double sign = 1.0;
        for (Eigen::Index i = 0; i < lo_.size(); ++i) {
            const double up = point(i) - hi_(i);
            const double down = lo_(i) - point(i);
            if (up > worst) {
                worst = up;
                best = i;
                sign = 1.0;
            }
            if (down > worst) {
                worst = down;
                best = i;
                sign = -1.0;
            }
        }
        return sign * unit_vector(dimension(), static_cast<std::size_t>(best));
    }
    ProjectionResult project(const Vector& point) const override {
        return {point.cwiseMax(lo_).cwiseMin(hi_), 0.0, true};
    }

  private:
    Vector lo_;
    Vector hi_;
    double outer_ = 0.0;
    double inner_ = 0.0;
};

/// Sort-based Euclidean projection onto {x >= 0, sum x = scale}.
inline Vector project_onto_simplex(const Vector& y, double scale) {
    std::vector<double> u(y.data(), y.data() + y.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double candidate = (cumulative - scale) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) {
            theta = candidate;
        }
    }
    return (y.array() - theta).cwiseMax(0.0).matrix();
}

/// Probability simplex scaled by s: {x >= 0, sum x = s}.
///
/// Does not contain the origin, so it exposes no inner ball (r = 0) and its
/// reference point is the centroid. Suitable for the LOO-driven learners only.
class Simplex final : public FeasibleSet {
  public:
    Simplex(std::size_t n, double scale = 1.0) : n_(n), scale_(scale) {
        if (n_ == 0) {
            throw InvalidArgument("Simplex: dimension must be positive");
        }
        if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
            throw InvalidArgument("Simplex: scale must be positive and finite");
        }
    }

    double scale() const { return scale_; }

    std::string kind() const override { return "simplex"; }
    std::size_t dimension() const override { return n_; }
    double outer_radius() const override { return scale_; }
    double inner_radius() const override { return 0.0; }

    Vector linear_minimizer(const Vector& direction) const override {
        Eigen::Index best = 0;
        direction.minCoeff(&best);
        return scale_ * unit_vector(n_, static_cast<std::size_t>(best));
    }
    double violation(const Vector& point) const override {
        const double sum_gap = std::abs(point.sum() - scale_) / std::sqrt(static_cast<double>(n_));
        return std::max({0.0, -point.minCoeff(), sum_gap});
    }
    Vector separator(const Vector& point) const override {
        Eigen::Index best = 0;
        const double neg = -point.minCoeff(&best);
        const double excess = point.sum() - scale_;
        const double sum_gap = std::abs(excess) / std::sqrt(static_cast<double>(n_));
        if (neg >= sum_gap) {
            return -unit_vector(n_, static_cast<std::size_t>(best));
        }
        return Vector::Constant(static_cast<Eigen::Index>(n_), excess > 0.0 ? 1.0 : -1.0);
    }
    ProjectionResult project(const Vector& point) const override {
        return {project_onto_simplex(point, scale_), 0.0, true};
    }
    Vector reference_point() const override {
        return Vector::Constant(static_cast<Eigen::Index>(n_), scale_ / static_cast<double>(n_));
    }

  private:
    std::size_t n_;
    double scale_;
};

/// Cross-polytope {||x||_1 <= rho}.
class L1Ball final : public FeasibleSet {
  public:
    L1Ball(std::size_t n, double radius) : n_(n), radius_(radius) {
        if (n_ == 0) {
            throw InvalidArgument("L1Ball: dimension must be positive");
        }
        if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
            throw InvalidArgument("L1Ball: radius must be positive and finite");
        }
    }

    std::string kind() const override { return "l1_ball"; }
    std::size_t dimension() const override { return n_; }
    double outer_radius() const override { return radius_; }
    double inner_radius() const override { return radius_ / std::sqrt(static_cast<double>(n_)); }

    /// Vertex -rho sign(d_i) e_i at the lowest index of max |d_i|; zero direction gives +rho e_1.
    Vector linear_minimizer(const Vector& direction) const override {
        Eigen::Index best = 0;
        direction.cwiseAbs().maxCoeff(&best);
        const double sign = direction(best) > 0.0 ? -1.0 : 1.0;
        return sign * radius_ * unit_vector(n_, static_cast<std::size_t>(best));
    }
    double violation(const Vector& point) const override {
        return std::max(0.0, (point.lpNorm<1>() - radius_) / std::sqrt(static_cast<double>(n_)));
    }
    Vector separator(const Vector& point) const override { return point.cwiseSign(); }
    /// Sort-based: project |y| onto the rho-simplex and restore signs.
    ProjectionResult project(const Vector& point) const override {
        if (point.lpNorm<1>() <= radius_) {
            return {point, 0.0, true};
        }
        const Vector magnitude = project_onto_simplex(point.cwiseAbs(), radius_);
        return {magnitude.cwiseProduct(point.cwiseSign()), 0.0, true};
    }

  private:
    std::size_t n_;
    double radius_;
};

/// Bounded polytope {x : a_i^T x <= b_i} with every b_i >= 0.
///
/// The LOO is an exact dense simplex solve. The projection runs Hildreth's dual
/// coordinate ascent, pulls the result into the set, then polishes with Frank-Wolfe
/// until the dual gap certificate is at most 1e-10; it is reported as approximate.
class Polytope final : public FeasibleSet {
  public:
    Polytope(Eigen::MatrixXd A, Vector b) : A_(std::move(A)), b_(std::move(b)), lp_(A_, b_) {
        if (A_.rows() == 0 || A_.cols() == 0) {
            throw InvalidArgument("Polytope: need at least one halfspace and positive dimension");
        }
        if (!A_.allFinite() || !b_.allFinite()) {
            throw InvalidArgument("Polytope: non-finite halfspace data");
        }
        row_norms_ = A_.rowwise().norm();
        if ((row_norms_.array() == 0.0).any()) {
            throw InvalidArgument("Polytope: halfspace with zero normal");
        }
        inner_ = (b_.array() / row_norms_.array()).minCoeff();
        Vector extent = Vector::Zero(A_.cols());
        for (Eigen::Index j = 0; j < A_.cols(); ++j) {
            const Vector e = unit_vector(static_cast<std::size_t>(A_.cols()), static_cast<std::size_t>(j));
            const double lo = lp_.minimize(e)(j);
            const double hi = lp_.minimize(-e)(j);
            extent(j) = std::max(std::abs(lo), std::abs(hi));
        }
        outer_ = extent.norm();
        if (!(outer_ > 0.0)) {
            throw InvalidArgument("Polytope: set is the single point {0}");
        }
    }

    /// The cube [-h, h]^n written as 2n halfspaces.
    static Polytope cube(std::size_t n, double half_width) {
        const auto N = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd A(2 * N, N);
        A << Eigen::MatrixXd::Identity(N, N), -Eigen::MatrixXd::Identity(N, N);
        return Polytope(A, Vector::Constant(2 * N, half_width));
    }

    const Eigen::MatrixXd& normals() const { return A_; }
    const Vector& offsets() const { return b_; }

    std::string kind() const override { return "polytope"; }
    std::size_t dimension() const override { return static_cast<std::size_t>(A_.cols()); }
    double outer_radius() const override { return outer_; }
    double inner_radius() const override { return inner_; }

    Vector linear_minimizer(const Vector& direction) const override { return lp_.minimize(direction); }
    double violation(const Vector& point) const override {
        const Vector slack = ((A_ * point - b_).array() / row_norms_.array()).matrix();
        return std::max(0.0, slack.maxCoeff());
    }
    /// Normal a_i of the halfspace with the largest a_i^T x - b_i.
    Vector separator(const Vector& point) const override {
        Eigen::Index best = 0;
        (A_ * point - b_).maxCoeff(&best);
        return A_.row(best).transpose();
    }
    ProjectionResult project(const Vector& point) const override {
        Vector x = hildreth(point);
        const double excess = violation(x);
        if (excess > 0.0) {
            const Vector ax = A_ * x;
            double theta = 1.0;
            for (Eigen::Index i = 0; i < A_.rows(); ++i) {
                if (ax(i) > b_(i)) {
                    theta = std::min(theta, b_(i) / ax(i));
                }
            }
            x *= theta;
        }
        return fw_polish(std::move(x), point);
    }

  private:
    Vector hildreth(const Vector& y) const {
        const Eigen::Index m = A_.rows();
        Vector lambda = Vector::Zero(m);
        Vector x = y;
        const Vector norms2 = row_norms_.cwiseAbs2();
        const double stop = 1e-15 * (1.0 + outer_ + y.norm());
        for (int sweep = 0; sweep < 100000; ++sweep) {
            double largest = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double t = (A_.row(i).dot(x) - b_(i)) / norms2(i);
                const double delta = std::max(-lambda(i), t);
                if (delta != 0.0) {
                    lambda(i) += delta;
                    x -= delta * A_.row(i).transpose();
                    largest = std::max(largest, std::abs(delta) * row_norms_(i));
                }
            }
            if (largest <= stop) {
                break;
            }
        }
        return x;
    }

    ProjectionResult fw_polish(Vector x, const Vector& y) const {
        double gap = 0.0;
        for (int it = 0; it < 20000; ++it) {
            const Vector grad = x - y;
            const Vector v = lp_.minimize(grad);
            gap = grad.dot(x - v);
            if (gap <= 1e-10) {
                break;
            }
            const Vector dir = v - x;
            const double denom = dir.squaredNorm();
            if (denom == 0.0) {
                break;
            }
            const double sigma = std::clamp(-grad.dot(dir) / denom, 0.0, 1.0);
            x += sigma * dir;
        }
        return {std::move(x), std::max(gap, 0.0), false};
    }

    Eigen::MatrixXd A_;
    Vector b_;
    DenseSimplex lp_;
    Vector row_norms_;
    double inner_ = 0.0;
    double outer_ = 0.0;
};

}  // namespace pfoco
