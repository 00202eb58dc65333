#include "pfoco/sets.hpp"
#include "pfoco/sampling.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <vector>

using namespace pfoco;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v(i++) = x;
    }
    return v;
}

/// Random member as a convex combination of LOO vertices.
Vector random_member(const FeasibleSet& set, Rng& rng) {
    const std::size_t n = set.dimension();
    std::vector<double> w(n + 1);
    double total = 0.0;
    for (double& v : w) {
        v = sample_uniform(rng, 0.0, 1.0);
        total += v;
    }
    Vector z = Vector::Zero(static_cast<Eigen::Index>(n));
    for (double v : w) {
        z += (v / total) * set.linear_minimizer(sample_unit_sphere(rng, n));
    }
    return z;
}

std::vector<SetPtr> zoo() {
    Eigen::MatrixXd A(5, 2);
    A << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
    return {std::make_shared<const Ball>(3, 1.5),
            std::make_shared<const Box>(vec({-1.0, -0.5, -2.0}), vec({0.5, 1.0, 1.0})),
            std::make_shared<const Simplex>(4, 2.0),
            std::make_shared<const L1Ball>(4, 1.0),
            std::make_shared<const Polytope>(A, vec({1.0, 1.0, 1.0, 1.0, 1.5})),
            std::make_shared<const Polytope>(Polytope::cube(3, 0.7))};
}

/// Brute-force polytope minimizer over all vertices of a 2-D polygon: intersect every
/// pair of constraint lines and keep the feasible intersections.
Vector polygon_minimizer(const Eigen::MatrixXd& A, const Vector& b, const Vector& d) {
    double best = 1e300;
    Vector arg = Vector::Zero(2);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < A.rows(); ++j) {
            Eigen::Matrix2d M;
            M.row(0) = A.row(i);
            M.row(1) = A.row(j);
            if (std::abs(M.determinant()) < 1e-12) {
                continue;
            }
            const Vector p = M.inverse() * Eigen::Vector2d(b(i), b(j));
            if (((A * p - b).array() > 1e-9).any()) {
                continue;
            }
            if (d.dot(p) < best) {
                best = d.dot(p);
                arg = p;
            }
        }
    }
    return arg;
}

}  // namespace

TEST(LooQuery, SimplexPicksSmallestCoordinate) {
    Simplex s(3);
    OracleCounters c;
    const Vector v = loo_query(s, vec({3.0, 1.0, 2.0}), c);
    EXPECT_EQ(v, vec({0.0, 1.0, 0.0}));
    EXPECT_EQ(c.loo_calls, 1u);
}

TEST(LooQuery, BallIsNegativeScaledDirection) {
    Ball b(2, 2.0);
    OracleCounters c;
    const Vector v = loo_query(b, vec({3.0, 4.0}), c);
    EXPECT_NEAR(v(0), -1.2, 1e-15);
    EXPECT_NEAR(v(1), -1.6, 1e-15);
}

TEST(LooQuery, L1ZeroDirectionReturnsFirstVertex) {
    L1Ball b(2, 1.0);
    OracleCounters c;
    EXPECT_EQ(loo_query(b, vec({0.0, 0.0}), c), vec({1.0, 0.0}));
}

TEST(LooQuery, TiesResolveToLowestIndex) {
    Simplex s(3);
    EXPECT_EQ(s.linear_minimizer(vec({1.0, 1.0, 1.0})), vec({1.0, 0.0, 0.0}));
    L1Ball l(3, 1.0);
    EXPECT_EQ(l.linear_minimizer(vec({-2.0, 2.0, 1.0})), vec({1.0, 0.0, 0.0}));
    Box box = Box::cube(2, 1.0);
    EXPECT_EQ(box.linear_minimizer(vec({0.0, -1.0})), vec({-1.0, 1.0}));
    Ball ball(3, 2.0);
    EXPECT_EQ(ball.linear_minimizer(Vector::Zero(3)), vec({2.0, 0.0, 0.0}));
}

TEST(LooQuery, RejectsBadInput) {
    Ball b(2, 1.0);
    OracleCounters c;
    EXPECT_THROW(loo_query(b, vec({1.0, 2.0, 3.0}), c), InvalidArgument);
    EXPECT_THROW(loo_query(b, vec({1.0, std::nan("")}), c), InvalidArgument);
    EXPECT_EQ(c.loo_calls, 0u);
}

TEST(LooQuery, PolytopeMatchesVertexEnumeration) {
    Rng rng(3);
    for (int k = 0; k < 30; ++k) {
        Eigen::MatrixXd A(7, 2);
        Vector b(7);
        A.topRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
        b.head(4) << 1.3, 1.1, 0.9, 1.2;
        for (Eigen::Index i = 4; i < 7; ++i) {
            A.row(i) = sample_unit_sphere(rng, 2).transpose();
            b(i) = sample_uniform(rng, 0.4, 1.0);
        }
        const Polytope P(A, b);
        for (int j = 0; j < 20; ++j) {
            const Vector d = sample_unit_sphere(rng, 2);
            const Vector v = P.linear_minimizer(d);
            const Vector w = polygon_minimizer(A, b, d);
            EXPECT_NEAR(d.dot(v), d.dot(w), 1e-9);
            EXPECT_TRUE(P.contains(v));
        }
    }
}

TEST(LooQuery, OptimalAgainstSampledMembers) {
    Rng rng(11);
    for (const SetPtr& set : zoo()) {
        const std::size_t n = set->dimension();
        std::vector<Vector> members;
        for (int k = 0; k < 200; ++k) {
            members.push_back(random_member(*set, rng));
        }
        for (int k = 0; k < 1000; ++k) {
            const Vector d = sample_unit_sphere(rng, n);
            const Vector v = set->linear_minimizer(d);
            ASSERT_TRUE(set->contains(v)) << set->kind();
            const Vector& z = members[static_cast<std::size_t>(k) % members.size()];
            EXPECT_LE(v.dot(d), z.dot(d) + 1e-9) << set->kind();
        }
    }
}

TEST(SoQuery, BallSeparatorIsThePoint) {
    Ball b(2, 1.0);
    OracleCounters c;
    const SeparationAnswer ans = so_query(b, vec({2.0, 0.0}), c);
    ASSERT_FALSE(ans.feasible());
    EXPECT_EQ(*ans.separator, vec({2.0, 0.0}));
    EXPECT_TRUE(so_query(b, vec({0.5, 0.0}), c).feasible());
    EXPECT_EQ(c.so_calls, 2u);
}

TEST(SoQuery, BoxSeparatorIsViolatedFace) {
    Box b = Box::cube(2, 1.0);
    OracleCounters c;
    const SeparationAnswer ans = so_query(b, vec({0.0, 3.0}), c);
    ASSERT_FALSE(ans.feasible());
    EXPECT_EQ(*ans.separator, vec({0.0, 1.0}));
}

TEST(SoQuery, PolytopeSeparatorIsMostViolatedRow) {
    Eigen::MatrixXd A(5, 2);
    A << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
    Polytope P(A, vec({1.0, 1.0, 1.0, 1.0, 1.5}));
    OracleCounters c;
    const SeparationAnswer ans = so_query(P, vec({1.2, 1.2}), c);
    ASSERT_FALSE(ans.feasible());
    EXPECT_EQ(*ans.separator, vec({1.0, 1.0}));
}

TEST(SoQuery, SeparatorsAreSound) {
    Rng rng(5);
    for (const SetPtr& set : zoo()) {
        const std::size_t n = set->dimension();
        int separated = 0;
        for (int k = 0; k < 500; ++k) {
            const Vector y = sample_uniform(rng, 0.0, 3.0) * set->outer_radius() * sample_unit_sphere(rng, n);
            OracleCounters c;
            const SeparationAnswer ans = so_query(*set, y, c);
            if (ans.feasible()) {
                EXPECT_TRUE(set->contains(y));
                continue;
            }
            ++separated;
            const Vector& g = *ans.separator;
            const Vector zmax = set->linear_minimizer(-g);
            EXPECT_GT((y - zmax).dot(g), 0.0) << set->kind();
        }
        EXPECT_GT(separated, 50) << set->kind();
    }
}

TEST(ExactProject, ClosedForms) {
    EXPECT_TRUE(Ball(2, 1.0).project(vec({3.0, 4.0})).point.isApprox(vec({0.6, 0.8})));
    EXPECT_EQ(Box::cube(2, 1.0).project(vec({2.0, 0.5})).point, vec({1.0, 0.5}));
    const Vector s = Simplex(3).project(vec({0.5, 0.5, 0.5})).point;
    EXPECT_NEAR((s - Vector::Constant(3, 1.0 / 3.0)).norm(), 0.0, 1e-15);
}

TEST(ExactProject, SimplexMatchesKktOracle) {
    Rng rng(9);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 6);
        const double scale = sample_uniform(rng, 0.5, 2.0);
        Simplex s(n, scale);
        const Vector y = 2.0 * sample_unit_ball(rng, n);
        const Vector p = s.project(y).point;
        // KKT: p = max(y - tau, 0) with tau found by bisection on sum(p) = scale.
        double lo = y.minCoeff() - scale;
        double hi = y.maxCoeff();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double sum = (y.array() - mid).max(0.0).sum();
            (sum > scale ? lo : hi) = mid;
        }
        const Vector q = (y.array() - 0.5 * (lo + hi)).max(0.0).matrix();
        EXPECT_NEAR((p - q).norm(), 0.0, 1e-9);
    }
}

TEST(ExactProject, L1BallMatchesKktOracle) {
    Rng rng(10);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 6);
        L1Ball l(n, 1.0);
        const Vector y = 3.0 * sample_unit_ball(rng, n);
        const Vector p = l.project(y).point;
        if (y.lpNorm<1>() <= 1.0) {
            EXPECT_EQ(p, y);
            continue;
        }
        double lo = 0.0;
        double hi = y.cwiseAbs().maxCoeff();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double sum = (y.cwiseAbs().array() - mid).max(0.0).sum();
            (sum > 1.0 ? lo : hi) = mid;
        }
        const double tau = 0.5 * (lo + hi);
        Vector q(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            q(i) = (y(i) > 0 ? 1.0 : -1.0) * std::max(std::abs(y(i)) - tau, 0.0);
        }
        EXPECT_NEAR((p - q).norm(), 0.0, 1e-9);
    }
}

TEST(ExactProject, PolytopeIsFlaggedApproximateAndCertified) {
    Eigen::MatrixXd A(5, 2);
    A << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
    Polytope P(A, vec({1.0, 1.0, 1.0, 1.0, 1.5}));
    const ProjectionResult res = P.project(vec({2.0, 2.0}));
    EXPECT_FALSE(res.exact);
    EXPECT_LE(res.certificate_gap, 1e-10);
    EXPECT_NEAR(res.point(0), 0.75, 1e-6);
    EXPECT_NEAR(res.point(1), 0.75, 1e-6);
    EXPECT_TRUE(P.contains(res.point));
}

TEST(ExactProject, IdempotentAndNonexpansive) {
    Rng rng(12);
    for (const SetPtr& set : zoo()) {
        const std::size_t n = set->dimension();
        const double R = set->outer_radius();
        for (int k = 0; k < 100; ++k) {
            const Vector a = 2.0 * R * sample_unit_ball(rng, n);
            const Vector b = 2.0 * R * sample_unit_ball(rng, n);
            const Vector pa = exact_project(*set, a).point;
            const Vector pb = exact_project(*set, b).point;
            EXPECT_TRUE(set->contains(pa, 1e-9)) << set->kind();
            EXPECT_LE((pa - pb).norm(), (a - b).norm() + 1e-7) << set->kind();
            EXPECT_LE((exact_project(*set, pa).point - pa).norm(), 1e-7) << set->kind();
        }
    }
}

TEST(Squeeze, ScalesOracles) {
    const SetPtr ball = std::make_shared<const Ball>(2, 1.0);
    const auto half = squeeze(ball, 0.5);
    EXPECT_EQ(half->linear_minimizer(vec({1.0, 0.0})), vec({-0.5, 0.0}));
    EXPECT_TRUE(half->contains(vec({0.49, 0.0})));
    EXPECT_FALSE(half->contains(vec({0.51, 0.0})));
    EXPECT_DOUBLE_EQ(half->outer_radius(), 0.5);
    EXPECT_DOUBLE_EQ(half->inner_radius(), 0.5);
}

TEST(Squeeze, IdentityFactorKeepsAnswers) {
    Rng rng(1);
    for (const SetPtr& set : zoo()) {
        const auto same = squeeze(set, 1.0);
        for (int k = 0; k < 20; ++k) {
            const Vector d = sample_unit_sphere(rng, set->dimension());
            EXPECT_EQ(same->linear_minimizer(d), set->linear_minimizer(d));
        }
    }
}

TEST(Squeeze, NestedFactorsMultiply) {
    const SetPtr l1 = std::make_shared<const L1Ball>(3, 1.0);
    const auto nested = squeeze(squeeze(l1, 0.9), 0.8);
    EXPECT_NEAR(nested->factor(), 0.72, 1e-15);
    EXPECT_EQ(&nested->base(), l1.get());
    const auto direct = squeeze(l1, 0.72);
    const Vector d = vec({0.3, -1.0, 0.2});
    EXPECT_TRUE(nested->linear_minimizer(d).isApprox(direct->linear_minimizer(d)));
}

TEST(Squeeze, RejectsFactorOutOfRange) {
    const SetPtr ball = std::make_shared<const Ball>(2, 1.0);
    EXPECT_THROW(squeeze(ball, 0.0), InvalidArgument);
    EXPECT_THROW(squeeze(ball, 1.5), InvalidArgument);
}

TEST(Squeeze, ShiftedSqueezedSetStaysInside) {
    Rng rng(21);
    for (const SetPtr& set : zoo()) {
        const double r = set->inner_radius();
        if (r <= 0.0) {
            continue;
        }
        for (int k = 0; k < 50; ++k) {
            const double delta = sample_uniform(rng, 0.01, 0.9);
            const double delta_prime = sample_uniform(rng, 0.0, 0.9 * r);
            const auto inner = squeeze(set, (1.0 - delta) * (1.0 - delta_prime / r));
            const auto outer = squeeze(set, 1.0 - delta_prime / r);
            const Vector z = random_member(*inner, rng);
            for (int j = 0; j < 20; ++j) {
                const Vector u = sample_unit_sphere(rng, set->dimension());
                EXPECT_TRUE(outer->contains(z + delta * (r - delta_prime) * u, 1e-9)) << set->kind();
            }
        }
    }
}

TEST(Squeeze, DistanceToSqueezedCopyIsAtMostRDelta) {
    Rng rng(22);
    for (const SetPtr& set : zoo()) {
        const double R = set->outer_radius();
        for (int k = 0; k < 50; ++k) {
            const double delta = sample_uniform(rng, 0.0, 0.9);
            const auto inner = squeeze(set, 1.0 - delta);
            const Vector y = random_member(*set, rng);
            const Vector p = exact_project(*inner, y).point;
            EXPECT_LE((p - y).norm(), R * delta + 1e-9) << set->kind();
        }
    }
}

TEST(Sets, RadiiAndMembership) {
    for (const SetPtr& set : zoo()) {
        EXPECT_TRUE(set->contains(set->reference_point())) << set->kind();
        EXPECT_LE(set->inner_radius(), set->outer_radius());
        if (set->inner_radius() > 0.0) {
            EXPECT_TRUE(set->contains(Vector::Zero(static_cast<Eigen::Index>(set->dimension()))));
        }
    }
    Eigen::MatrixXd A(5, 2);
    A << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
    Polytope P(A, vec({1.0, 1.0, 1.0, 1.0, 1.5}));
    EXPECT_NEAR(P.inner_radius(), 1.0, 1e-15);
    EXPECT_NEAR(P.outer_radius(), std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(L1Ball(4, 2.0).inner_radius(), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(Simplex(3).inner_radius(), 0.0);
}

TEST(Sets, InnerBallIsContained) {
    Rng rng(23);
    for (const SetPtr& set : zoo()) {
        const double r = set->inner_radius();
        for (int k = 0; k < 200 && r > 0.0; ++k) {
            EXPECT_TRUE(set->contains(r * sample_unit_sphere(rng, set->dimension()))) << set->kind();
        }
    }
}

TEST(Sets, ConstructionErrors) {
    EXPECT_THROW(Ball(0, 1.0), InvalidArgument);
    EXPECT_THROW(Ball(2, -1.0), InvalidArgument);
    EXPECT_THROW(Box(vec({0.5}), vec({1.0})), InvalidArgument);
    EXPECT_THROW(Simplex(2, 0.0), InvalidArgument);
    EXPECT_THROW(L1Ball(2, 0.0), InvalidArgument);
    Eigen::MatrixXd A(1, 2);
    A << 1, 0;
    EXPECT_THROW(Polytope(A, vec({1.0})), InvalidArgument);
}
