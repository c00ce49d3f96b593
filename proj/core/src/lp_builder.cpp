#include "ivreg/lp_builder.hpp"

#include "ivreg/errors.hpp"

#include <cmath>

namespace ivreg::lp {

LinearExpr VarRange::dot(const Eigen::VectorXd& coefs) const {
    if (static_cast<std::size_t>(coefs.size()) != count) throw InputError("VarRange::dot: length mismatch");
    LinearExpr e;
    e.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double c = coefs[static_cast<Eigen::Index>(k)];
        if (c != 0.0) e.push_back({first + k, c});
    }
    return e;
}

LinearExpr VarRange::sum(double coef) const {
    LinearExpr e;
    e.reserve(count);
    for (std::size_t k = 0; k < count; ++k) e.push_back({first + k, coef});
    return e;
}

VarRange LpBuilder::add_variables(std::size_t count, double lower) {
    if (std::isnan(lower) || lower == std::numeric_limits<double>::infinity())
        throw InputError("LpBuilder: invalid lower bound");
    VarRange r{lower_.size(), count};
    lower_.insert(lower_.end(), count, lower);
    cost_.insert(cost_.end(), count, 0.0);
    return r;
}

std::size_t LpBuilder::add_le(const LinearExpr& lhs, double rhs) {
    for (const auto& t : lhs)
        if (t.var >= lower_.size()) throw InputError("LpBuilder: unknown variable in constraint");
    le_rows_.push_back(lhs);
    le_rhs_.push_back(rhs);
    return le_rows_.size() - 1;
}

std::size_t LpBuilder::add_ge(const LinearExpr& lhs, double rhs) {
    LinearExpr neg = lhs;
    for (auto& t : neg) t.coef = -t.coef;
    return add_le(neg, -rhs);
}

std::size_t LpBuilder::add_eq(const LinearExpr& lhs, double rhs) {
    for (const auto& t : lhs)
        if (t.var >= lower_.size()) throw InputError("LpBuilder: unknown variable in constraint");
    eq_rows_.push_back(lhs);
    eq_rhs_.push_back(rhs);
    return eq_rows_.size() - 1;
}

void LpBuilder::add_objective(const LinearExpr& expr) {
    for (const auto& t : expr) {
        if (t.var >= cost_.size()) throw InputError("LpBuilder: unknown variable in objective");
        cost_[t.var] += t.coef;
    }
}

LpProblem LpBuilder::build() const {
    LpProblem p = LpProblem::with_variables(lower_.size());
    const auto n = static_cast<Eigen::Index>(lower_.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        p.cost[j] = cost_[static_cast<std::size_t>(j)];
        p.lower[j] = lower_[static_cast<std::size_t>(j)];
    }
    auto fill = [n](const std::vector<LinearExpr>& rows, const std::vector<double>& rhs, Eigen::MatrixXd& mat,
                    Eigen::VectorXd& vec) {
        mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
        vec.resize(static_cast<Eigen::Index>(rhs.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto& t : rows[i]) mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t.var)) += t.coef;
            vec[static_cast<Eigen::Index>(i)] = rhs[i];
        }
    };
    fill(le_rows_, le_rhs_, p.ineq_matrix, p.ineq_rhs);
    fill(eq_rows_, eq_rhs_, p.eq_matrix, p.eq_rhs);
    return p;
}

}  // namespace ivreg::lp
