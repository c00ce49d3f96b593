#pragma once

#include "ivreg/lp.hpp"
#include "ivreg/operators.hpp"
#include "ivreg/regularizer.hpp"
#include "ivreg/signal.hpp"
#include "ivreg/variational.hpp"

#include <memory>

namespace ivreg {

/// Interval solve with the noisy operator treated as exact (A^l = A^u = a_noisy).
PrimalSolveReport naive_solve(const Regularizer& j, const DenseOperator& a_noisy, const IntervalData& data);

struct TikhonovResult {
    lp::Status status = lp::Status::infeasible;
    Signal u;
    double residual = 0.0;  ///< |a u - f|_inf
    double alpha = 0.0;

    bool optimal() const noexcept { return status == lp::Status::optimal; }
};

/// min |a u - f|_inf + alpha J(u) over u >= 0, solved as one LP per alpha on a
/// shared tableau so that sweeps over alpha warm-start.
class TikhonovPath {
public:
    TikhonovPath(const Regularizer& j, const DenseOperator& a, const Signal& f);
    ~TikhonovPath();
    TikhonovPath(TikhonovPath&&) noexcept;
    TikhonovPath& operator=(TikhonovPath&&) noexcept;

    TikhonovResult solve(double alpha);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

TikhonovResult tikhonov_linf(const Regularizer& j, const DenseOperator& a, const Signal& f, double alpha);

struct MorozovConfig {
    double c_factor = 1.01;
    double delta = 0.0;  ///< data noise level in the sup norm
    double h_op = 0.0;   ///< operator noise level in the l1 -> linf norm
    double alpha_min = 1e-6;
    double alpha_max = 1e3;
    std::size_t scan_points = 60;
    double rel_tol = 1e-4;  ///< stop when |g| <= rel_tol * target
    std::size_t max_bisections = 80;

    void validate() const;
};

struct MorozovResult {
    double alpha = 0.0;
    TikhonovResult solution;
    double target = 0.0;       ///< C delta, or C (delta + h |u|_1) for the modified rule
    double discrepancy = 0.0;  ///< residual - target at the returned alpha
    std::size_t evaluations = 0;
    bool used_scan = false;
};

/// Picks alpha by bisection on log alpha so that the sup-norm residual matches
/// the target. Falls back to a log-grid scan for a sign change when the
/// bracket endpoints do not straddle the root; throws SolveError if none is found.
/// A residual jump inside the collapsed bracket is resolved by blending the two
/// bracket solutions.
MorozovResult morozov(const Regularizer& j, const DenseOperator& a, const Signal& f, const MorozovConfig& cfg,
                      bool modified);

}  // namespace ivreg
