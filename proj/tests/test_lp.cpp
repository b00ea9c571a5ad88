#include "evcharge/lp.hpp"
#include "evcharge/random.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>

using namespace evcharge;
using lp::RowType;
using lp::Sense;
using lp::Status;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Brute-force oracle: best objective over all vertices of a small bounded LP,
/// found by making every choice of n constraints (rows or bounds) active.
std::optional<double> vertex_oracle(const lp::Problem<double>& p) {
    const int n = p.num_vars();
    struct Plane {
        Eigen::VectorXd a;
        double b;
    };
    std::vector<Plane> planes;
    for (const auto& r : p.rows()) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        for (const auto& t : r.terms) a[t.var] += t.coef;
        planes.push_back({a, r.rhs});
    }
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
        planes.push_back({e, p.lower(j)});
        if (std::isfinite(p.upper(j))) planes.push_back({e, p.upper(j)});
    }
    std::optional<double> best;
    const int k = static_cast<int>(planes.size());
    std::vector<int> pick(static_cast<std::size_t>(n));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            Eigen::MatrixXd M(n, n);
            Eigen::VectorXd rhs(n);
            for (int i = 0; i < n; ++i) {
                M.row(i) = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])].a.transpose();
                rhs[i] = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])].b;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            if (lu.rank() < n) return;
            Eigen::VectorXd x = lu.solve(rhs);
            if (p.max_violation(x) > 1e-9) return;
            const double v = p.objective(x);
            if (!best || (p.sense() == Sense::Minimize ? v < *best : v > *best)) best = v;
            return;
        }
        for (int i = start; i < k; ++i) {
            pick[static_cast<std::size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST(Lp, SingleBound) {
    lp::Problem<double> p(Sense::Maximize);
    int x = p.add_variable(0, kInf, 1);
    p.add_row({{x, 1}}, RowType::LessEqual, 3);
    auto s = lp::solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    EXPECT_NEAR(s.x[0], 3, 1e-12);
    EXPECT_NEAR(s.objective, 3, 1e-12);
}

TEST(Lp, HandCheckedVertex) {
    lp::Problem<double> p(Sense::Maximize);
    int x = p.add_variable(0, kInf, 1);
    int y = p.add_variable(0, kInf, 1);
    p.add_row({{x, 1}, {y, 1}}, RowType::LessEqual, 4);
    p.add_row({{x, 1}}, RowType::LessEqual, 1);
    auto s = lp::solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    EXPECT_NEAR(s.objective, 4, 1e-12);
}

TEST(Lp, Infeasible) {
    lp::Problem<double> p;
    int x = p.add_variable(0, kInf, 1);
    p.add_row({{x, 1}}, RowType::LessEqual, 1);
    p.add_row({{x, 1}}, RowType::GreaterEqual, 2);
    EXPECT_EQ(lp::solve(p).status, Status::Infeasible);
}

TEST(Lp, Unbounded) {
    lp::Problem<double> p(Sense::Maximize);
    int x = p.add_variable(0, kInf, 1);
    int y = p.add_variable(0, kInf, 0);
    p.add_row({{x, 1}, {y, -1}}, RowType::LessEqual, 1);
    EXPECT_EQ(lp::solve(p).status, Status::Unbounded);
}

TEST(Lp, EqualityAndShiftedBounds) {
    lp::Problem<double> p;
    int x = p.add_variable(-2, 5, 1);
    int y = p.add_variable(1, 3, 2);
    p.add_row({{x, 1}, {y, 1}}, RowType::Equal, 2);
    auto s = lp::solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    EXPECT_NEAR(s.x[0], 1, 1e-12);
    EXPECT_NEAR(s.x[1], 1, 1e-12);
    EXPECT_NEAR(s.objective, 3, 1e-12);
}

TEST(Lp, UpperBoundFlip) {
    lp::Problem<double> p(Sense::Maximize);
    int x = p.add_variable(0, 2, 3);
    int y = p.add_variable(0, 10, 1);
    p.add_row({{x, 1}, {y, 1}}, RowType::LessEqual, 5);
    auto s = lp::solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    EXPECT_NEAR(s.x[0], 2, 1e-12);
    EXPECT_NEAR(s.x[1], 3, 1e-12);
}

TEST(Lp, EmptyProblem) {
    lp::Problem<double> p;
    auto s = lp::solve(p);
    EXPECT_EQ(s.status, Status::Optimal);
    EXPECT_EQ(s.objective, 0.0);
}

TEST(Lp, MatchesVertexEnumerationProperty) {
    Rng rng(31);
    int optimal = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(2));
        const int m = 1 + static_cast<int>(rng.below(4));
        lp::Problem<double> p(rng.uniform() < 0.5 ? Sense::Minimize : Sense::Maximize);
        for (int j = 0; j < n; ++j) {
            const double lo = std::round(rng.uniform(-3, 1));
            p.add_variable(lo, lo + std::round(rng.uniform(1, 6)), std::round(rng.uniform(-5, 5)));
        }
        for (int i = 0; i < m; ++i) {
            std::vector<lp::Problem<double>::Term> terms;
            for (int j = 0; j < n; ++j) terms.push_back({j, std::round(rng.uniform(-4, 4))});
            const auto type = static_cast<RowType>(rng.below(3));
            p.add_row(terms, type, std::round(rng.uniform(-6, 6)));
        }
        const auto oracle = vertex_oracle(p);
        for (auto pricing : {lp::Pricing::Bland, lp::Pricing::Dantzig}) {
            lp::Options opt;
            opt.pricing = pricing;
            const auto s = lp::solve(p, opt);
            if (!oracle) {
                EXPECT_EQ(s.status, Status::Infeasible) << "trial " << trial;
                continue;
            }
            ASSERT_EQ(s.status, Status::Optimal) << "trial " << trial;
            EXPECT_NEAR(s.objective, *oracle, 1e-8) << "trial " << trial;
            EXPECT_LE(p.max_violation(s.x), 1e-7);
            optimal += pricing == lp::Pricing::Bland;
        }
    }
    EXPECT_GT(optimal, 100);
}

TEST(Lp, FloatInstantiationAgrees) {
    lp::Problem<float> pf(Sense::Maximize);
    lp::Problem<double> pd(Sense::Maximize);
    Rng rng(2);
    for (int j = 0; j < 6; ++j) {
        const double c = rng.uniform(0, 3);
        pf.add_variable(0, 4, static_cast<float>(c));
        pd.add_variable(0, 4, c);
    }
    for (int i = 0; i < 4; ++i) {
        std::vector<lp::Problem<float>::Term> tf;
        std::vector<lp::Problem<double>::Term> td;
        for (int j = 0; j < 6; ++j) {
            const double a = rng.uniform(0, 2);
            tf.push_back({j, static_cast<float>(a)});
            td.push_back({j, a});
        }
        pf.add_row(tf, RowType::LessEqual, 5.0f);
        pd.add_row(td, RowType::LessEqual, 5.0);
    }
    lp::Options opt;
    opt.feasibility_tol = 1e-5;
    opt.optimality_tol = 1e-5;
    opt.pivot_tol = 1e-6;
    auto sf = lp::solve(pf, opt);
    auto sd = lp::solve(pd);
    ASSERT_EQ(sf.status, Status::Optimal);
    ASSERT_EQ(sd.status, Status::Optimal);
    EXPECT_NEAR(sf.objective, sd.objective, 1e-4);
}

TEST(Lp, DegenerateProblemTerminates) {
    // Classic cycling example for the largest-coefficient rule.
    lp::Problem<double> p(Sense::Maximize);
    int x1 = p.add_variable(0, kInf, 10);
    int x2 = p.add_variable(0, kInf, -57);
    int x3 = p.add_variable(0, kInf, -9);
    int x4 = p.add_variable(0, kInf, -24);
    p.add_row({{x1, 0.5}, {x2, -5.5}, {x3, -2.5}, {x4, 9}}, RowType::LessEqual, 0);
    p.add_row({{x1, 0.5}, {x2, -1.5}, {x3, -0.5}, {x4, 1}}, RowType::LessEqual, 0);
    p.add_row({{x1, 1}}, RowType::LessEqual, 1);
    for (auto pricing : {lp::Pricing::Bland, lp::Pricing::Dantzig}) {
        lp::Options opt;
        opt.pricing = pricing;
        auto s = lp::solve(p, opt);
        ASSERT_EQ(s.status, Status::Optimal);
        EXPECT_NEAR(s.objective, 1.0, 1e-9);
    }
}

TEST(Lp, Deterministic) {
    lp::Problem<double> p(Sense::Maximize);
    for (int j = 0; j < 10; ++j) p.add_variable(0, 1, 1);
    std::vector<lp::Problem<double>::Term> all;
    for (int j = 0; j < 10; ++j) all.push_back({j, 1});
    p.add_row(all, RowType::LessEqual, 4.5);
    auto a = lp::solve(p);
    auto b = lp::solve(p);
    EXPECT_EQ(a.x, b.x);
}
