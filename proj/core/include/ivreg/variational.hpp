#pragma once

#include "ivreg/lp.hpp"
#include "ivreg/operators.hpp"
#include "ivreg/regularizer.hpp"
#include "ivreg/signal.hpp"

#include <string>

namespace ivreg {

/// Dual solution of the interval-constrained problem.
///
/// mu2 multiplies -A^u u <= -f^l, so p = lambda - (A^l)^T mu1 + (A^u)^T mu2.
struct Certificate {
    Signal lambda;
    Signal mu1;
    Signal mu2;
    Signal p;

    double mu_norm() const { return l1_norm(mu1) + l1_norm(mu2); }
};

struct PrimalSolveReport {
    lp::Status status = lp::Status::infeasible;
    Signal u;
    Certificate certificate;
    double objective = 0.0;       ///< J(u)
    double dual_objective = 0.0;  ///< <mu2, f^l> - <mu1, f^u>
    double duality_gap = 0.0;     ///< |J(u) - dual| / (1 + J(u))
    double complementarity_mu = 0.0;      ///< |<mu, Bu - phi>| / (1 + J(u))
    double complementarity_lambda = 0.0;  ///< |<lambda, u>| / (1 + J(u))
    double max_violation = 0.0;  ///< largest violation of u >= 0 and the bound rows
    std::size_t iterations = 0;

    bool optimal() const noexcept { return status == lp::Status::optimal; }
    std::string to_json() const;
};

/// min J(u) s.t. u >= 0, A^l u <= f^u, A^u u >= f^l.
PrimalSolveReport solve_primal(const Regularizer& j, const IntervalOperator& op, const IntervalData& data,
                               const lp::SimplexOptions& options = {});

struct MinNormCertificate {
    lp::Status status = lp::Status::infeasible;
    Signal lambda;
    Signal mu1;
    Signal mu2;
    Signal p;
    double norm = 0.0;  ///< sum(mu1) + sum(mu2)

    bool feasible() const noexcept { return status == lp::Status::optimal; }
};

/// Certificate of smallest l1 norm with p = lambda - A^T mu1 + A^T mu2 in dJ(u_ref)
/// and lambda = 0 wherever u_ref > 0.
/// An infeasible status means the source condition fails numerically.
MinNormCertificate min_norm_certificate(const Regularizer& j, const DenseOperator& a_exact, const Signal& u_ref);

struct L1Bound {
    lp::Status status = lp::Status::infeasible;
    double value = 0.0;       ///< max <u, 1> over the feasible set
    double dual_value = 0.0;  ///< min <f^u, mu1> - <f^l, mu2> s.t. (A^l)^T mu1 - (A^u)^T mu2 >= 1, mu >= 0

    bool bounded() const noexcept { return status == lp::Status::optimal; }
};

L1Bound feasible_l1_bound(const IntervalOperator& op, const IntervalData& data);

}  // namespace ivreg
