#pragma once

#include "ivreg/operators.hpp"
#include "ivreg/regularizer.hpp"
#include "ivreg/signal.hpp"
#include "ivreg/variational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ivreg {

/// eps_n = eps0 * decay^n, eta_n = d0 * eps_n.
struct BoundsSchedule {
    double eps0 = 0.25;
    double decay = 0.5;  ///< 1 gives a constant schedule
    double c0 = 2.0;     ///< data widths lie in [eps_n, c0 eps_n]
    double d0 = 0.5;
    std::size_t steps = 8;

    void validate() const;
    double eps(std::size_t n) const;
    double eta(std::size_t n) const { return d0 * eps(n); }
};

struct BoundsStep {
    IntervalData data;
    IntervalOperator op;
};

/// Nested bounds for steps 0..schedule.steps-1 around the exact data and
/// operator. Data: f^u = f + c, f^l = f - c' with c, c' in [eps_n, c0 eps_n];
/// operator: A^l = max(A - eta_n r, 0), A^u = A + eta_n r' with r, r' in [0, 1].
/// Each step is intersected with the previous one, so the sequence is nested.
std::vector<BoundsStep> generate_bounds_sequence(const BoundsSchedule& schedule, const Signal& f_exact,
                                                 const DenseOperator& a_exact, std::uint64_t seed);

/// Step `n` of generate_bounds_sequence.
BoundsStep generate_bounds(const BoundsSchedule& schedule, const Signal& f_exact, const DenseOperator& a_exact,
                           std::size_t n, std::uint64_t seed);

/// Least-squares slope of log(d) against log(eps) over entries with d > 0.
/// Empty when fewer than two usable points or all eps coincide.
std::optional<double> loglog_slope(const std::vector<double>& eps, const std::vector<double>& d);

struct RateRow {
    std::size_t step = 0;
    double eps = 0.0;
    double bregman = 0.0;  ///< symmetric Bregman distance to the exact solution
    double objective = 0.0;
    std::vector<double> hausdorff;  ///< one per threshold; +inf marks an empty/non-empty mismatch
    Signal u;
    Signal p;
};

struct RateTable {
    std::vector<double> thresholds;
    std::vector<RateRow> rows;
    std::optional<double> slope;

    /// Header n,eps,bregman,objective,hausdorff_t1,...
    std::string to_csv() const;
};

struct RateExperiment {
    MinNormCertificate reference;  ///< supplies the reference subgradient
    RateTable table;

    bool source_condition() const noexcept { return reference.feasible(); }
};

/// Solves the interval problem along the schedule and records the symmetric
/// Bregman distance to u_exact measured with the minimum-norm certificate.
/// Without a feasible certificate the table is left empty. Throws SolveError
/// when a step is not solved to optimality.
RateExperiment rate_experiment(const Regularizer& j, const BoundsSchedule& schedule, const Signal& f_exact,
                               const DenseOperator& a_exact, const Signal& u_exact, std::uint64_t seed,
                               std::vector<double> thresholds = {});

/// {i : u_i >= t}; t must be positive.
IndexSet level_set(const Signal& u, double t);

/// Number of boundary transitions of the indicator of `e` (unit weights).
double perimeter(const IndexSet& e, const Grid& grid);

/// |Per(E) + gamma |E| - sum_{i in E} p_i| <= tol (1 + Per(E)).
bool check_levelset_identity(const IndexSet& e, const Signal& p, double gamma, double tol);

/// Hausdorff distances per threshold; 0 when both sets are empty and
/// +infinity when exactly one is.
std::vector<double> hausdorff_levelsets(const Signal& u_n, const Signal& u_exact, const std::vector<double>& thresholds);

/// Midpoints above zero between consecutive values of `u` that differ by more
/// than merge_tol (1 + |value|).
std::vector<double> default_thresholds(const Signal& u, double merge_tol = 1e-9);

}  // namespace ivreg
