#pragma once

#include "ivreg/lp_builder.hpp"
#include "ivreg/signal.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace ivreg {

/// J(u) = TV(u) + gamma * |u|_1, absolutely one-homogeneous.
class Regularizer {
public:
    explicit Regularizer(double gamma = 0.0);

    double gamma() const noexcept { return gamma_; }
    double value(const Signal& u) const;
    double value(const Eigen::VectorXd& u) const;

private:
    double gamma_;
};

/// p = D^T s + gamma y with |s|_inf <= 1, |y|_inf <= 1.
struct SubgradientDecomposition {
    Eigen::VectorXd s;
    Eigen::VectorXd y;

    std::string to_json() const;
};

struct MembershipResult {
    bool member = false;
    /// max_k |D^T s + gamma y - p|_k at the best decomposition found.
    double residual = 0.0;
    std::optional<SubgradientDecomposition> witness;

    explicit operator bool() const noexcept { return member; }
};

/// Decides p in dJ(0) by minimising the decomposition residual with an LP.
/// Membership means residual <= tol * (1 + |p|_inf).
MembershipResult in_subdiff_zero(const Regularizer& j, const Signal& p, double tol = 1e-7);

/// p in dJ(u): p in dJ(0) and |J(u) - <p,u>| <= tol (1 + J(u)).
bool in_subdiff_at(const Regularizer& j, const Signal& p, const Signal& u, double tol = 1e-7);

/// D_J^p(v) = J(v) - <p, v>.
double bregman(const Regularizer& j, const Signal& p, const Signal& v);

/// <p_a - p_b, u_a - u_b>.
double symm_bregman(const Signal& p_a, const Signal& p_b, const Signal& u_a, const Signal& u_b);

struct EpigraphEncoding {
    lp::VarRange t;              ///< t_i >= |u_{i+1} - u_i|
    std::size_t first_row = 0;   ///< rows first_row + 2i and + 2i + 1 bound t_i
    lp::LinearExpr objective;    ///< sum t + gamma sum u
};

/// Adds the TV epigraph variables and rows for `u` to `builder`. The returned
/// objective equals J(u) at optimality provided u >= 0 in the enclosing LP.
EpigraphEncoding epigraph_encode(const Regularizer& j, const lp::VarRange& u, lp::LpBuilder& builder);

}  // namespace ivreg
