#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <memory>
#include <string_view>

namespace ivreg::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

std::string_view to_string(Status status) noexcept;

/// Lower bound value marking a free variable.
inline constexpr double unbounded_below = -std::numeric_limits<double>::infinity();

/// minimise c^T x  s.t.  G x <= g,  E x = e,  x_j >= lower_j.
///
/// A lower bound of -inf makes the variable free. Either constraint block may
/// have zero rows.
struct LpProblem {
    Eigen::VectorXd cost;
    Eigen::MatrixXd ineq_matrix;
    Eigen::VectorXd ineq_rhs;
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;
    Eigen::VectorXd lower;

    /// `n` nonnegative variables with zero cost and no constraints.
    static LpProblem with_variables(std::size_t n);

    std::size_t num_variables() const noexcept { return static_cast<std::size_t>(cost.size()); }
    std::size_t num_inequalities() const noexcept { return static_cast<std::size_t>(ineq_rhs.size()); }
    std::size_t num_equalities() const noexcept { return static_cast<std::size_t>(eq_rhs.size()); }

    /// Throws InputError on inconsistent dimensions or non-finite data.
    void validate() const;
};

/// Result of a solve. Multipliers follow the Lagrangian
///   c^T x + y^T (G x - g) + z^T (E x - e) - r^T (x - lower)
/// so at an optimum y >= 0, r = c + G^T y + E^T z >= 0 on bounded variables and
/// r = 0 on free ones.
struct LpSolution {
    Status status = Status::infeasible;
    Eigen::VectorXd x;
    Eigen::VectorXd ineq_duals;
    Eigen::VectorXd eq_duals;
    Eigen::VectorXd reduced_costs;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double dual_objective = std::numeric_limits<double>::quiet_NaN();
    std::size_t iterations = 0;

    bool optimal() const noexcept { return status == Status::optimal; }
};

struct SimplexOptions {
    std::size_t max_iterations = 1'000'000;
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-10;
    double feasibility_tol = 1e-9;
    /// Rebuild the tableau from the original data after this many pivots.
    std::size_t refactor_interval = 400;
};

/// Scaled residuals of an optimal solution.
struct OptimalityReport {
    double primal_infeasibility = 0.0;  ///< max violation / (1 + |g|_inf + |e|_inf)
    double dual_infeasibility = 0.0;    ///< max(-y, -r on bounded vars, |r| on free vars)
    double complementarity = 0.0;       ///< (|y^T (g - G x)| + |r^T (x - lower)|) / (1 + |g|_inf)
    double duality_gap = 0.0;           ///< |c^T x - dual objective| / (1 + |c^T x|)
};

OptimalityReport check_optimality(const LpProblem& problem, const LpSolution& solution);

/// Two-phase dense tableau simplex. Dantzig pricing with a switch to Bland's
/// rule after 5 (rows + cols) iterations without objective progress.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

/// Simplex engine that keeps its final tableau, so the same polyhedron can be
/// re-optimised for a new cost vector starting from the last optimal basis.
/// This is the linear minimisation oracle used by conditional-gradient loops
/// and by the error-bar LPs.
class SimplexSolver {
public:
    explicit SimplexSolver(LpProblem problem, SimplexOptions options = {});
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;

    const LpProblem& problem() const noexcept;

    /// Solve with the problem's own cost vector.
    LpSolution solve();
    /// Re-optimise with a different cost vector; warm-starts from the current basis.
    LpSolution resolve(const Eigen::VectorXd& cost);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ivreg::lp
