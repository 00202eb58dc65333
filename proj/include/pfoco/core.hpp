#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pfoco {

using Vector = Eigen::VectorXd;

/// Raised when an input violates a documented precondition (dimension, range, finiteness).
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an oracle answer contradicts its contract, or a loop blows through its
/// hard iteration ceiling.
class OracleContractError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised by the regret evaluator when an interval comparator cannot be certified.
class ComparatorError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) {
        throw InvalidArgument(std::string(what) + ": non-finite coordinate");
    }
}

inline void require_dimension(const Vector& v, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(v.size()) != n) {
        throw InvalidArgument(std::string(what) + ": dimension " + std::to_string(v.size()) +
                              " does not match " + std::to_string(n));
    }
}

inline Vector unit_vector(std::size_t n, std::size_t i) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    return e;
}

/// Projection onto the Euclidean ball of radius `radius` centred at the origin.
inline Vector clip_to_ball(const Vector& y, double radius) {
    const double norm = y.norm();
    if (norm <= radius) {
        return y;
    }
    return y / (norm / radius);
}

}  // namespace pfoco
