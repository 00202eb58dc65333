#pragma once

#include "pfoco/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfoco {

enum class LossKind { Linear, Quadratic, AbsoluteDeviation };

inline std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::Linear:
            return "linear";
        case LossKind::Quadratic:
            return "quadratic";
        case LossKind::AbsoluteDeviation:
            return "absdev";
    }
    return "unknown";
}

struct LossEval {
    double value = 0.0;
    Vector subgradient;
};

/// One convex loss: linear c^T x, quadratic 1/2 alpha ||x - b||^2 + c^T x, or |a^T x - b|.
class Loss {
  public:
    static Loss linear(Vector c) {
        require_finite(c, "Loss::linear c");
        Loss f(LossKind::Linear, c.size());
        f.c_ = std::move(c);
        return f;
    }

    static Loss quadratic(double alpha, Vector b, Vector c) {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
            throw InvalidArgument("Loss::quadratic: alpha must be nonnegative and finite");
        }
        require_finite(b, "Loss::quadratic b");
        require_finite(c, "Loss::quadratic c");
        if (b.size() != c.size()) {
            throw InvalidArgument("Loss::quadratic: b and c dimensions differ");
        }
        Loss f(LossKind::Quadratic, b.size());
        f.alpha_ = alpha;
        f.b_ = std::move(b);
        f.c_ = std::move(c);
        return f;
    }

    static Loss absolute_deviation(Vector a, double b) {
        require_finite(a, "Loss::absolute_deviation a");
        if (!std::isfinite(b)) {
            throw InvalidArgument("Loss::absolute_deviation: offset must be finite");
        }
        Loss f(LossKind::AbsoluteDeviation, a.size());
        f.a_ = std::move(a);
        f.offset_ = b;
        return f;
    }

    LossKind kind() const { return kind_; }
    std::size_t dimension() const { return static_cast<std::size_t>(n_); }
    double alpha() const { return alpha_; }
    /// Linear coefficient c (linear and quadratic kinds).
    const Vector& linear_term() const { return c_; }
    /// Centre b of the quadratic kind.
    const Vector& center() const { return b_; }
    /// Row a of the absolute-deviation kind.
    const Vector& row() const { return a_; }
    double offset() const { return offset_; }

    double value(const Vector& x) const {
        check(x);
        switch (kind_) {
            case LossKind::Linear:
                return c_.dot(x);
            case LossKind::Quadratic:
                return 0.5 * alpha_ * (x - b_).squaredNorm() + c_.dot(x);
            case LossKind::AbsoluteDeviation:
                return std::abs(a_.dot(x) - offset_);
        }
        return 0.0;
    }

    /// Value and one subgradient. At the kink of |a^T x - b| the subgradient is 0.
    LossEval eval(const Vector& x) const {
        check(x);
        switch (kind_) {
            case LossKind::Linear:
                return {c_.dot(x), c_};
            case LossKind::Quadratic:
                return {0.5 * alpha_ * (x - b_).squaredNorm() + c_.dot(x), alpha_ * (x - b_) + c_};
            case LossKind::AbsoluteDeviation: {
                const double residual = a_.dot(x) - offset_;
                const double sign = residual > 0.0 ? 1.0 : (residual < 0.0 ? -1.0 : 0.0);
                return {std::abs(residual), sign * a_};
            }
        }
        return {};
    }

    /// Lipschitz constant over the ball of radius R.
    double lipschitz_bound(double R) const {
        switch (kind_) {
            case LossKind::Linear:
                return c_.norm();
            case LossKind::Quadratic:
                return alpha_ * (R + b_.norm()) + c_.norm();
            case LossKind::AbsoluteDeviation:
                return a_.norm();
        }
        return 0.0;
    }

    /// Bound on |f| over the ball of radius R.
    double value_bound(double R) const {
        switch (kind_) {
            case LossKind::Linear:
                return R * c_.norm();
            case LossKind::Quadratic: {
                const double reach = R + b_.norm();
                return 0.5 * alpha_ * reach * reach + R * c_.norm();
            }
            case LossKind::AbsoluteDeviation:
                return R * a_.norm() + std::abs(offset_);
        }
        return 0.0;
    }

  private:
    Loss(LossKind kind, Eigen::Index n) : kind_(kind), n_(n) {
        if (n_ == 0) {
            throw InvalidArgument("Loss: dimension must be positive");
        }
        c_ = Vector::Zero(n_);
        b_ = Vector::Zero(n_);
        a_ = Vector::Zero(n_);
    }

    void check(const Vector& x) const {
        require_dimension(x, static_cast<std::size_t>(n_), "Loss");
        require_finite(x, "Loss");
    }

    LossKind kind_;
    Eigen::Index n_;
    double alpha_ = 0.0;
    Vector c_;
    Vector b_;
    Vector a_;
    double offset_ = 0.0;
};

}  // namespace pfoco
