#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace evcharge::lp {

enum class Sense { Minimize, Maximize };
enum class RowType { LessEqual, GreaterEqual, Equal };
enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

inline std::string_view to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "Optimal";
        case Status::Infeasible: return "Infeasible";
        case Status::Unbounded: return "Unbounded";
        case Status::IterationLimit: return "IterationLimit";
    }
    return "?";
}

/// Linear program with bounded variables and sparse row input:
///   optimise c'x  s.t.  a_i'x (<=, >=, =) b_i,  lo <= x <= hi.
/// Lower bounds must be finite; upper bounds may be +inf.
template <typename Scalar>
class Problem {
public:
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    struct Term {
        int var;
        Scalar coef;
    };
    struct Row {
        std::vector<Term> terms;
        RowType type;
        Scalar rhs;
    };

    explicit Problem(Sense sense = Sense::Minimize) : sense_(sense) {}

    int add_variable(Scalar lo, Scalar hi, Scalar cost) {
        if (!std::isfinite(static_cast<double>(lo))) throw std::invalid_argument("lp: lower bound must be finite");
        if (hi < lo) throw std::invalid_argument("lp: upper bound below lower bound");
        lo_.push_back(lo);
        hi_.push_back(hi);
        cost_.push_back(cost);
        return static_cast<int>(cost_.size()) - 1;
    }

    int add_row(std::vector<Term> terms, RowType type, Scalar rhs) {
        for (const auto& t : terms) {
            if (t.var < 0 || t.var >= num_vars()) throw std::out_of_range("lp: row references an undeclared variable");
        }
        rows_.push_back({std::move(terms), type, rhs});
        return static_cast<int>(rows_.size()) - 1;
    }

    void set_cost(int var, Scalar cost) { cost_.at(static_cast<std::size_t>(var)) = cost; }

    int num_vars() const { return static_cast<int>(cost_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    Sense sense() const { return sense_; }
    const std::vector<Row>& rows() const { return rows_; }
    Scalar lower(int j) const { return lo_[static_cast<std::size_t>(j)]; }
    Scalar upper(int j) const { return hi_[static_cast<std::size_t>(j)]; }
    Scalar cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }

    Scalar objective(const Vec& x) const {
        Scalar v = 0;
        for (int j = 0; j < num_vars(); ++j) v += cost(j) * x[j];
        return v;
    }

    /// Largest bound or row violation of `x`.
    Scalar max_violation(const Vec& x) const {
        Scalar worst = 0;
        for (int j = 0; j < num_vars(); ++j) {
            worst = std::max(worst, lower(j) - x[j]);
            if (std::isfinite(static_cast<double>(upper(j)))) worst = std::max(worst, x[j] - upper(j));
        }
        for (const auto& r : rows_) {
            Scalar lhs = 0;
            for (const auto& t : r.terms) lhs += t.coef * x[t.var];
            if (r.type != RowType::GreaterEqual) worst = std::max(worst, lhs - r.rhs);
            if (r.type != RowType::LessEqual) worst = std::max(worst, r.rhs - lhs);
        }
        return worst;
    }

private:
    Sense sense_;
    std::vector<Scalar> lo_, hi_, cost_;
    std::vector<Row> rows_;
};

template <typename Scalar>
struct Solution {
    Status status = Status::Infeasible;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    Scalar objective = 0;
    int iterations = 0;
};

enum class Pricing {
    Bland,    ///< lowest eligible index; never cycles
    Dantzig,  ///< most negative reduced cost, lowest index on ties; Bland after a run of degenerate pivots
};

struct Options {
    Pricing pricing = Pricing::Dantzig;
    int max_iterations = 200000;
    int degenerate_run_before_bland = 50;
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-11;
};

namespace detail {

/// Bounded-variable primal simplex on a dense tableau. Every column is
/// shifted so its lower bound is 0; nonbasic columns sit at 0 or at their
/// upper bound.
template <typename Scalar>
class Tableau {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Tableau(const Problem<Scalar>& p, const Options& opt) : opt_(opt) {
        const int n = p.num_vars();
        const int m = p.num_rows();
        int slacks = 0;
        for (const auto& r : p.rows()) slacks += r.type != RowType::Equal;
        n_struct_ = n;
        // Columns: structural, slack, artificial (one per row, unused ones fixed at 0).
        const int cols = n + slacks + m;
        A_ = Mat::Zero(m, cols);
        b_ = Vec::Zero(m);
        upper_ = Vec::Constant(cols, std::numeric_limits<Scalar>::infinity());
        cost_ = Vec::Zero(cols);
        for (int j = 0; j < n; ++j) {
            upper_[j] = p.upper(j) - p.lower(j);
            cost_[j] = p.sense() == Sense::Minimize ? p.cost(j) : -p.cost(j);
        }
        basis_.assign(static_cast<std::size_t>(m), -1);
        at_upper_.assign(static_cast<std::size_t>(cols), false);

        int slack = n;
        for (int i = 0; i < m; ++i) {
            const auto& row = p.rows()[static_cast<std::size_t>(i)];
            Scalar rhs = row.rhs;
            for (const auto& t : row.terms) {
                A_(i, t.var) += t.coef;
                rhs -= t.coef * p.lower(t.var);
            }
            int slack_col = -1;
            if (row.type != RowType::Equal) {
                slack_col = slack++;
                A_(i, slack_col) = row.type == RowType::LessEqual ? Scalar(1) : Scalar(-1);
            }
            if (rhs < 0) {
                A_.row(i) *= Scalar(-1);
                rhs = -rhs;
            }
            b_[i] = rhs;
            const int art = n + slacks + i;
            if (slack_col >= 0 && A_(i, slack_col) > 0) {
                basis_[static_cast<std::size_t>(i)] = slack_col;
                upper_[art] = 0;
            } else {
                A_(i, art) = 1;
                basis_[static_cast<std::size_t>(i)] = art;
            }
        }
        first_art_ = n + slacks;
        T_ = A_;
        xb_ = b_;
    }

    Status solve(Solution<Scalar>& out, const Problem<Scalar>& p) {
        const int m = static_cast<int>(basis_.size());
        const int cols = static_cast<int>(T_.cols());

        // Phase 1: minimise the sum of artificials still in the basis.
        Vec phase1 = Vec::Zero(cols);
        bool need_phase1 = false;
        for (int i = 0; i < m; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= first_art_) {
                phase1[basis_[static_cast<std::size_t>(i)]] = 1;
                need_phase1 = true;
            }
        }
        if (need_phase1) {
            const Status s = iterate(phase1);
            if (s == Status::IterationLimit) return s;
            if (phase1_value() > Scalar(opt_.feasibility_tol) * std::max<Scalar>(1, b_.cwiseAbs().maxCoeff()))
                return Status::Infeasible;
        }
        for (int j = first_art_; j < cols; ++j) upper_[j] = 0;

        const Status s = iterate(cost_);
        if (s != Status::Optimal) return s;

        refine();
        out.x = Vec::Zero(n_struct_);
        const Vec full = column_values();
        for (int j = 0; j < n_struct_; ++j) out.x[j] = full[j] + p.lower(j);
        out.objective = p.objective(out.x);
        return Status::Optimal;
    }

    int iterations() const { return iterations_; }

private:
    Scalar value_of_nonbasic(int j) const { return at_upper_[static_cast<std::size_t>(j)] ? upper_[j] : Scalar(0); }

    Vec column_values() const {
        Vec v = Vec::Zero(T_.cols());
        for (int j = 0; j < T_.cols(); ++j) v[j] = value_of_nonbasic(j);
        for (std::size_t i = 0; i < basis_.size(); ++i) v[basis_[i]] = xb_[static_cast<Eigen::Index>(i)];
        return v;
    }

    Scalar phase1_value() const {
        Scalar v = 0;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (basis_[i] >= first_art_) v += xb_[static_cast<Eigen::Index>(i)];
        }
        return v;
    }

    /// Recomputes basic values from the original rows to shed pivoting drift.
    void refine() {
        const int m = static_cast<int>(basis_.size());
        if (m == 0) return;
        Mat B(m, m);
        for (int i = 0; i < m; ++i) B.col(i) = A_.col(basis_[static_cast<std::size_t>(i)]);
        Vec rhs = b_;
        for (int j = 0; j < A_.cols(); ++j) {
            const Scalar v = value_of_nonbasic(j);
            if (v != 0 && !is_basic(j)) rhs -= A_.col(j) * v;
        }
        Eigen::PartialPivLU<Mat> lu(B);
        Vec xb = lu.solve(rhs);
        if (xb.allFinite()) {
            for (int i = 0; i < m; ++i) {
                const int j = basis_[static_cast<std::size_t>(i)];
                xb_[i] = std::clamp(xb[i], Scalar(0), upper_[j]);
            }
        }
    }

    bool is_basic(int j) const {
        for (int b : basis_) {
            if (b == j) return true;
        }
        return false;
    }

    Status iterate(const Vec& cost) {
        const int m = static_cast<int>(basis_.size());
        const int cols = static_cast<int>(T_.cols());
        std::vector<char> basic(static_cast<std::size_t>(cols), 0);
        for (int b : basis_) basic[static_cast<std::size_t>(b)] = 1;

        Vec cb(m);
        for (int i = 0; i < m; ++i) cb[i] = cost[basis_[static_cast<std::size_t>(i)]];
        Vec d = cost - (cb.transpose() * T_).transpose();

        const Scalar opt_tol = Scalar(opt_.optimality_tol);
        const Scalar piv_tol = Scalar(opt_.pivot_tol);
        const Scalar feas_tol = Scalar(opt_.feasibility_tol);
        int degenerate_run = 0;

        while (true) {
            if (iterations_ >= opt_.max_iterations) return Status::IterationLimit;
            const bool bland = opt_.pricing == Pricing::Bland || degenerate_run >= opt_.degenerate_run_before_bland;

            // Pricing.
            int enter = -1;
            Scalar best = 0;
            for (int j = 0; j < cols; ++j) {
                if (basic[static_cast<std::size_t>(j)] || upper_[j] <= 0) continue;
                const bool up = at_upper_[static_cast<std::size_t>(j)];
                const Scalar gain = up ? d[j] : -d[j];
                if (gain <= opt_tol) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (gain > best) {
                    best = gain;
                    enter = j;
                }
            }
            if (enter < 0) return Status::Optimal;

            // Moving the entering column by +theta (from 0) or -theta (from its upper bound).
            const Scalar dir = at_upper_[static_cast<std::size_t>(enter)] ? Scalar(-1) : Scalar(1);
            Scalar theta = upper_[enter];
            int leave_row = -1;
            bool leave_to_upper = false;
            Scalar leave_alpha = 0;
            for (int i = 0; i < m; ++i) {
                const Scalar alpha = T_(i, enter) * dir;
                if (std::abs(alpha) <= piv_tol) continue;
                const int bj = basis_[static_cast<std::size_t>(i)];
                Scalar limit;
                bool to_upper;
                if (alpha > 0) {
                    limit = std::max(Scalar(0), xb_[i]) / alpha;
                    to_upper = false;
                } else {
                    if (!std::isfinite(static_cast<double>(upper_[bj]))) continue;
                    limit = std::max(Scalar(0), upper_[bj] - xb_[i]) / (-alpha);
                    to_upper = true;
                }
                bool take = limit < theta - feas_tol;
                if (!take && limit <= theta + feas_tol) {
                    if (leave_row < 0) {
                        take = true;
                    } else {
                        // Tie: Bland keeps the lowest basic index, otherwise the larger pivot.
                        const int current = basis_[static_cast<std::size_t>(leave_row)];
                        take = bland ? bj < current : std::abs(alpha) > std::abs(leave_alpha);
                    }
                }
                if (take) {
                    theta = std::min(theta, limit);
                    leave_row = i;
                    leave_to_upper = to_upper;
                    leave_alpha = alpha;
                }
            }
            if (!std::isfinite(static_cast<double>(theta))) return Status::Unbounded;
            ++iterations_;
            degenerate_run = theta <= feas_tol ? degenerate_run + 1 : 0;

            xb_ -= T_.col(enter) * (dir * theta);
            if (leave_row < 0) {
                // Bound flip, basis unchanged.
                at_upper_[static_cast<std::size_t>(enter)] = !at_upper_[static_cast<std::size_t>(enter)];
                continue;
            }

            const int leaving = basis_[static_cast<std::size_t>(leave_row)];
            const Scalar entering_value = at_upper_[static_cast<std::size_t>(enter)] ? upper_[enter] - theta : theta;
            at_upper_[static_cast<std::size_t>(leaving)] = leave_to_upper;
            at_upper_[static_cast<std::size_t>(enter)] = false;
            basic[static_cast<std::size_t>(leaving)] = 0;
            basic[static_cast<std::size_t>(enter)] = 1;
            basis_[static_cast<std::size_t>(leave_row)] = enter;

            const Scalar pivot = T_(leave_row, enter);
            T_.row(leave_row) /= pivot;
            const Vec col = T_.col(enter);
            const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> prow = T_.row(leave_row);
            T_.noalias() -= col * prow;
            T_.row(leave_row) = prow;
            d -= d[enter] * prow.transpose();
            d[enter] = 0;

            xb_[leave_row] = entering_value;
        }
    }

    Options opt_;
    Mat A_;
    Mat T_;
    Vec b_;
    Vec xb_;
    Vec upper_;
    Vec cost_;
    std::vector<int> basis_;
    std::vector<bool> at_upper_;
    int n_struct_ = 0;
    int first_art_ = 0;
    int iterations_ = 0;
};

}  // namespace detail

template <typename Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options& options = {}) {
    Solution<Scalar> out;
    if (problem.num_vars() == 0 && problem.num_rows() == 0) {
        out.status = Status::Optimal;
        out.x.resize(0);
        return out;
    }
    detail::Tableau<Scalar> tableau(problem, options);
    out.status = tableau.solve(out, problem);
    out.iterations = tableau.iterations();
    return out;
}

}  // namespace evcharge::lp
