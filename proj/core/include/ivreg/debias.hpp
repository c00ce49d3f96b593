#pragma once

#include "ivreg/lp.hpp"
#include "ivreg/operators.hpp"
#include "ivreg/regularizer.hpp"
#include "ivreg/signal.hpp"
#include "ivreg/variational.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ivreg {

/// M = { v >= 0 : A^l v <= f^u, A^u v >= f^l, J(v) - <p_ref, v> <= eps,
///                <p_ref, v - u_ref> <= c_cap }.
/// An infinite c_cap drops the last condition.
struct ModelManifoldSpec {
    Signal u_ref;
    Signal p_ref;
    double eps;
    double c_cap;
    IntervalOperator op;
    IntervalData data;
    double gamma;

    bool has_cap() const noexcept { return std::isfinite(c_cap); }
};

struct ManifoldMembership {
    bool nonnegative = false;
    bool upper_rows = false;   ///< A^l v <= f^u
    bool lower_rows = false;   ///< A^u v >= f^l
    bool bregman = false;      ///< J(v) - <p, v> <= eps
    bool cap = false;          ///< <p, v - u_ref> <= C
    double max_violation = 0.0;

    bool member() const noexcept { return nonnegative && upper_rows && lower_rows && bregman && cap; }
};

ManifoldMembership check_membership(const ModelManifoldSpec& m, const Signal& v, double tol = 1e-8);

inline constexpr double default_c_cap = 10.0;

/// Builds the manifold around a solved reconstruction. The cap is dropped when
/// u is strictly positive, otherwise `c_cap` is used.
ModelManifoldSpec manifold_from_solve(const PrimalSolveReport& report, const Regularizer& j,
                                      const IntervalOperator& op, const IntervalData& data, double eps,
                                      double c_cap = default_c_cap);

enum class FrankWolfeVariant {
    fully_corrective,  ///< re-optimise over the hull of all active vertices each step
    away_step,         ///< exact line search along the better of the FW and away directions
    classic            ///< exact line search along the FW direction only
};

struct DebiasOptions {
    double gap_tol = 1e-5;
    std::size_t max_iterations = 5000;
    FrankWolfeVariant variant = FrankWolfeVariant::fully_corrective;
};

struct DebiasResult {
    Signal u;
    double objective = 0.0;  ///< 0.5 |A v - f|^2
    double gap = 0.0;        ///< certified suboptimality bound, non-increasing over iterations
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> gap_history;
};

/// Minimises 0.5 |a v - f|^2 over the manifold by conditional gradient with
/// exact line search. The linear subproblems are simplex re-solves on a
/// single tableau. Throws InputError if A^l has a zero column sum (manifold
/// possibly unbounded).
DebiasResult debias(const ModelManifoldSpec& m, const DenseOperator& a, const Signal& f,
                    const DebiasOptions& options = {});
/// Uses the interval midpoints for the operator and data.
DebiasResult debias(const ModelManifoldSpec& m, const DebiasOptions& options = {});

enum class JumpPath {
    tv_pairing,        ///< min |q|_1 s.t. |q| <= 1, <q, Du> = TV(u)
    subgradient_split  ///< y from min |y|_1 s.t. <y,u> = |u|_1, then p = D^T q + gamma y
};

struct JumpDetection {
    lp::Status status = lp::Status::infeasible;
    Eigen::VectorXd q;  ///< length n-1, aligned with sign(Du)
    IndexSet jumps;     ///< slots i with |q_i| > 1 - nu; slot i separates samples i and i+1
};

JumpDetection detect_jumps(const Signal& u, const Signal& p, double gamma, double nu = 1e-6,
                           JumpPath path = JumpPath::tv_pairing);

struct Region {
    std::size_t begin = 0;  ///< first sample
    std::size_t end = 0;    ///< one past the last sample

    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const Region&, const Region&) = default;
};

struct RegionDecomposition {
    std::vector<std::size_t> jumps;
    std::vector<Region> regions;
};

/// Splits [0, n) at the given jump slots.
RegionDecomposition regions_from_jumps(const IndexSet& jumps, std::size_t n);

struct RegionBar {
    Region region;
    double lower = 0.0;
    double upper = 0.0;
    double ref_mean = 0.0;
    lp::Status lower_status = lp::Status::optimal;
    lp::Status upper_status = lp::Status::optimal;

    bool ok() const noexcept { return lower_status == lp::Status::optimal && upper_status == lp::Status::optimal; }
};

struct ErrorBars {
    std::vector<RegionBar> bars;

    /// Columns region_start, region_end, lower, upper, ref_mean[, exact_mean].
    std::string to_csv(const std::optional<Signal>& exact = std::nullopt) const;
    /// Per-sample lower/upper envelopes (NaN outside every region).
    std::pair<Eigen::VectorXd, Eigen::VectorXd> envelopes(std::size_t n) const;
};

/// Region means minimised and maximised over the manifold.
ErrorBars error_bars(const ModelManifoldSpec& m, const RegionDecomposition& regions);

/// Every point the error-bar LPs returned, in region order (lower then upper).
/// Exposed for structural checks of the manifold.
std::vector<Signal> error_bar_vertices(const ModelManifoldSpec& m, const RegionDecomposition& regions);

double region_mean(const Signal& u, const Region& r);

}  // namespace ivreg
