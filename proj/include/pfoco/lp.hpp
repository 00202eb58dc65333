#pragma once

#include "pfoco/core.hpp"

#include <limits>
#include <vector>

namespace pfoco {

/// Dense primal simplex for   min c^T x  s.t.  A x <= b,  x free,  with b >= 0.
///
/// The origin is feasible (b >= 0), so the slack basis starts the method without a
/// phase one. Free variables are split as x = x+ - x-. Bland's rule picks both the
/// entering and leaving variable, which rules out cycling and makes the answer a
/// deterministic function of (A, b, c). The returned vertex is re-solved from its
/// defining active constraints to shed tableau round-off.
class DenseSimplex {
  public:
    DenseSimplex(Eigen::MatrixXd A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
        if (A_.rows() != b_.size()) {
            throw InvalidArgument("DenseSimplex: A and b row counts differ");
        }
        if ((b_.array() < 0.0).any()) {
            throw InvalidArgument("DenseSimplex: b must be nonnegative (origin feasible)");
        }
    }

    /// Throws InvalidArgument when the objective is unbounded below over the polyhedron.
    Vector minimize(const Vector& c) const {
        const Eigen::Index m = A_.rows();
        const Eigen::Index n = A_.cols();
        const Eigen::Index cols = 2 * n + m;  // x+, x-, slack
        const double tol = 1e-12;

        // Row i < m: constraint i. Row m: reduced costs. Column `cols`: right-hand side.
        Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, cols + 1);
        tab.block(0, 0, m, n) = A_;
        tab.block(0, n, m, n) = -A_;
        tab.block(0, 2 * n, m, m) = Eigen::MatrixXd::Identity(m, m);
        tab.block(0, cols, m, 1) = b_;
        tab.block(m, 0, 1, n) = c.transpose();
        tab.block(m, n, 1, n) = -c.transpose();

        std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) {
            basis[static_cast<std::size_t>(i)] = 2 * n + i;
        }

        const std::size_t max_pivots = 50 * static_cast<std::size_t>(cols + m) + 1000;
        for (std::size_t pivots = 0;; ++pivots) {
            if (pivots > max_pivots) {
                throw OracleContractError("DenseSimplex: pivot limit exceeded");
            }
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < cols; ++j) {
                if (tab(m, j) < -tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) {
                break;
            }
            Eigen::Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i) {
                const double a = tab(i, enter);
                if (a > tol) {
                    const double ratio = tab(i, cols) / a;
                    const bool better = ratio < best_ratio - tol;
                    const bool tie = !better && ratio <= best_ratio + tol;
                    if (better || (tie && leave >= 0 &&
                                   basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) {
                throw InvalidArgument("DenseSimplex: objective unbounded below (set is not bounded)");
            }
            pivot(tab, leave, enter);
            basis[static_cast<std::size_t>(leave)] = enter;
        }

        Vector x = Vector::Zero(n);
        std::vector<bool> coord_basic(static_cast<std::size_t>(n), false);
        std::vector<bool> slack_basic(static_cast<std::size_t>(m), false);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::Index var = basis[static_cast<std::size_t>(i)];
            const double value = tab(i, cols);
            if (var < n) {
                x(var) += value;
                coord_basic[static_cast<std::size_t>(var)] = true;
            } else if (var < 2 * n) {
                x(var - n) -= value;
                coord_basic[static_cast<std::size_t>(var - n)] = true;
            } else {
                slack_basic[static_cast<std::size_t>(var - 2 * n)] = true;
            }
        }
        return polish(x, coord_basic, slack_basic);
    }

  private:
    static void pivot(Eigen::MatrixXd& tab, Eigen::Index row, Eigen::Index col) {
        tab.row(row) /= tab(row, col);
        for (Eigen::Index i = 0; i < tab.rows(); ++i) {
            if (i != row && tab(i, col) != 0.0) {
                tab.row(i) -= tab(i, col) * tab.row(row);
            }
        }
    }

    // The vertex is pinned by the tight rows (nonbasic slacks) plus x_j = 0 for every
    // coordinate with no basic part.
    Vector polish(const Vector& x, const std::vector<bool>& coord_basic, const std::vector<bool>& slack_basic) const {
        const Eigen::Index m = A_.rows();
        const Eigen::Index n = A_.cols();
        Eigen::MatrixXd M(n, n);
        Vector rhs(n);
        Eigen::Index row = 0;
        for (Eigen::Index i = 0; i < m && row < n; ++i) {
            if (!slack_basic[static_cast<std::size_t>(i)]) {
                M.row(row) = A_.row(i);
                rhs(row) = b_(i);
                ++row;
            }
        }
        for (Eigen::Index j = 0; j < n && row < n; ++j) {
            if (!coord_basic[static_cast<std::size_t>(j)]) {
                M.row(row) = unit_vector(static_cast<std::size_t>(n), static_cast<std::size_t>(j)).transpose();
                rhs(row) = 0.0;
                ++row;
            }
        }
        if (row != n) {
            return x;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible()) {
            return x;
        }
        Vector refined = lu.solve(rhs);
        if (!refined.allFinite() || (refined - x).norm() > 1e-8 * (1.0 + x.norm())) {
            return x;
        }
        return refined;
    }

    Eigen::MatrixXd A_;
    Vector b_;
};

}  // namespace pfoco
