#pragma once

#include "ivreg/lp.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace ivreg::lp {

struct Term {
    std::size_t var;
    double coef;
};

/// Sparse linear form sum coef * x_var.
using LinearExpr = std::vector<Term>;

/// Contiguous block of variables handed out by LpBuilder.
struct VarRange {
    std::size_t first = 0;
    std::size_t count = 0;

    std::size_t operator[](std::size_t k) const noexcept { return first + k; }
    std::size_t size() const noexcept { return count; }
    /// sum_k coefs[k] * x_{first+k}, skipping zero coefficients.
    LinearExpr dot(const Eigen::VectorXd& coefs) const;
    LinearExpr sum(double coef = 1.0) const;
};

/// Incremental construction of an LpProblem from named variable blocks.
class LpBuilder {
public:
    VarRange add_variables(std::size_t count, double lower = 0.0);

    /// Adds lhs <= rhs; returns the inequality row index.
    std::size_t add_le(const LinearExpr& lhs, double rhs);
    /// Adds lhs >= rhs as -lhs <= -rhs; returns the inequality row index.
    std::size_t add_ge(const LinearExpr& lhs, double rhs);
    /// Adds lhs == rhs; returns the equality row index.
    std::size_t add_eq(const LinearExpr& lhs, double rhs);

    /// Adds the expression to the objective (minimised).
    void add_objective(const LinearExpr& expr);

    std::size_t num_variables() const noexcept { return lower_.size(); }
    std::size_t num_inequalities() const noexcept { return le_rows_.size(); }
    std::size_t num_equalities() const noexcept { return eq_rows_.size(); }

    LpProblem build() const;

private:
    std::vector<double> lower_;
    std::vector<double> cost_;
    std::vector<LinearExpr> le_rows_;
    std::vector<double> le_rhs_;
    std::vector<LinearExpr> eq_rows_;
    std::vector<double> eq_rhs_;
};

/// Brute-force vertex enumeration for small problems. Every basic solution
/// is formed from subsets of active constraints; the best feasible one is
/// returned together with an unboundedness check along extreme rays. Only the
/// status, x and objective are filled in.
LpSolution vertex_oracle(const LpProblem& problem);

/// Upper limit on the number of constraint subsets vertex_oracle will visit.
inline constexpr std::size_t vertex_oracle_subset_cap = 5'000'000;

}  // namespace ivreg::lp
