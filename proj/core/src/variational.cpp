#include "ivreg/variational.hpp"

#include "ivreg/errors.hpp"
#include "ivreg/lp_builder.hpp"

#include "json.hpp"

#include <cmath>

namespace ivreg {

namespace {

Eigen::VectorXd segment(const Eigen::VectorXd& v, const lp::VarRange& r) {
    return v.segment(static_cast<Eigen::Index>(r.first), static_cast<Eigen::Index>(r.count));
}

std::vector<double> as_vector(const Signal& s) { return s.to_vector(); }

void check_shapes(const IntervalOperator& op, const IntervalData& data) {
    if (op.rows() != data.size())
        throw InputError("operator rows (" + std::to_string(op.rows()) + ") differ from data length (" +
                         std::to_string(data.size()) + ")");
    if (op.cols() < 2) throw InputError("operator must have at least two columns");
}

/// Adds the bound rows A^l u <= f^u and -A^u u <= -f^l; returns the first row index.
std::size_t add_bound_rows(lp::LpBuilder& b, const lp::VarRange& u, const IntervalOperator& op,
                           const IntervalData& data) {
    const std::size_t first = b.num_inequalities();
    const auto& al = op.lower().matrix();
    const auto& au = op.upper().matrix();
    for (Eigen::Index i = 0; i < al.rows(); ++i) b.add_le(u.dot(al.row(i).transpose()), data.upper()[static_cast<std::size_t>(i)]);
    for (Eigen::Index i = 0; i < au.rows(); ++i)
        b.add_le(u.dot(-au.row(i).transpose()), -data.lower()[static_cast<std::size_t>(i)]);
    return first;
}

}  // namespace

std::string PrimalSolveReport::to_json() const {
    nlohmann::json j;
    j["status"] = std::string(lp::to_string(status));
    j["objective"] = objective;
    j["dual_objective"] = dual_objective;
    j["duality_gap"] = duality_gap;
    j["complementarity_mu"] = complementarity_mu;
    j["complementarity_lambda"] = complementarity_lambda;
    j["max_violation"] = max_violation;
    j["iterations"] = iterations;
    j["u"] = as_vector(u);
    j["certificate"] = {{"lambda", as_vector(certificate.lambda)},
                        {"mu1", as_vector(certificate.mu1)},
                        {"mu2", as_vector(certificate.mu2)},
                        {"p", as_vector(certificate.p)}};
    return j.dump(2);
}

PrimalSolveReport solve_primal(const Regularizer& j, const IntervalOperator& op, const IntervalData& data,
                               const lp::SimplexOptions& options) {
    check_shapes(op, data);
    const std::size_t n = op.cols();
    const Grid ugrid(n, data.lower().grid().spacing());
    const Grid dgrid = data.lower().grid();

    lp::LpBuilder b;
    const auto u = b.add_variables(n, 0.0);
    const auto enc = epigraph_encode(j, u, b);
    b.add_objective(enc.objective);
    const std::size_t first = add_bound_rows(b, u, op, data);
    const lp::LpProblem problem = b.build();
    const lp::LpSolution sol = lp::solve_lp(problem, options);

    const auto m = static_cast<Eigen::Index>(op.rows());
    PrimalSolveReport rep{sol.status,
                          Signal::zeros(ugrid),
                          {Signal::zeros(ugrid), Signal::zeros(dgrid), Signal::zeros(dgrid), Signal::zeros(ugrid)}};
    rep.iterations = sol.iterations;
    if (!sol.optimal()) {
        rep.objective = rep.dual_objective = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

    const Eigen::VectorXd uv = segment(sol.x, u);
    const Eigen::VectorXd lambda = segment(sol.reduced_costs, u);
    const Eigen::VectorXd mu1 = sol.ineq_duals.segment(static_cast<Eigen::Index>(first), m);
    const Eigen::VectorXd mu2 = sol.ineq_duals.segment(static_cast<Eigen::Index>(first) + m, m);
    const auto& al = op.lower().matrix();
    const auto& au = op.upper().matrix();
    const Eigen::VectorXd p = lambda - al.transpose() * mu1 + au.transpose() * mu2;

    rep.u = Signal(ugrid, uv);
    rep.certificate = Certificate{Signal(ugrid, lambda), Signal(dgrid, mu1), Signal(dgrid, mu2), Signal(ugrid, p)};
    rep.objective = j.value(uv);
    const Eigen::VectorXd& fu = data.upper().values();
    const Eigen::VectorXd& fl = data.lower().values();
    rep.dual_objective = mu2.dot(fl) - mu1.dot(fu);
    const double scale = 1.0 + rep.objective;
    rep.duality_gap = std::abs(rep.objective - rep.dual_objective) / scale;
    const Eigen::VectorXd r1 = al * uv - fu;
    const Eigen::VectorXd r2 = fl - au * uv;
    rep.complementarity_mu = (std::abs(mu1.dot(r1)) + std::abs(mu2.dot(r2))) / scale;
    rep.complementarity_lambda = std::abs(lambda.dot(uv)) / scale;
    rep.max_violation = std::max({0.0, -uv.minCoeff(), r1.maxCoeff(), r2.maxCoeff()});
    return rep;
}

MinNormCertificate min_norm_certificate(const Regularizer& j, const DenseOperator& a, const Signal& u_ref) {
    const std::size_t n = u_ref.size();
    if (a.cols() != n) throw InputError("min_norm_certificate: operator columns differ from signal length");
    if (u_ref.values().minCoeff() < 0.0) throw InputError("min_norm_certificate: u_ref must be nonnegative");
    const std::size_t m = a.rows();
    const double gamma = j.gamma();
    const Eigen::MatrixXd& am = a.matrix();
    const Eigen::VectorXd& ur = u_ref.values();

    lp::LpBuilder b;
    const auto lam = b.add_variables(n, 0.0);
    const auto mu1 = b.add_variables(m, 0.0);
    const auto mu2 = b.add_variables(m, 0.0);
    const auto s = b.add_variables(n - 1, -1.0);
    const auto y = b.add_variables(gamma > 0.0 ? n : 0, -1.0);
    for (std::size_t i = 0; i < s.size(); ++i) b.add_le({{s[i], 1.0}}, 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) b.add_le({{y[i], 1.0}}, 1.0);
    // lambda is the multiplier of u >= 0 and vanishes on the support of u_ref
    for (std::size_t k = 0; k < n; ++k)
        if (ur[static_cast<Eigen::Index>(k)] > 0.0) b.add_le({{lam[k], 1.0}}, 0.0);

    // lambda - A^T mu1 + A^T mu2 - D^T s - gamma y = 0
    for (std::size_t k = 0; k < n; ++k) {
        lp::LinearExpr e{{lam[k], 1.0}};
        for (std::size_t i = 0; i < m; ++i) {
            const double aik = am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            if (aik == 0.0) continue;
            e.push_back({mu1[i], -aik});
            e.push_back({mu2[i], aik});
        }
        if (k > 0) e.push_back({s[k - 1], -1.0});
        if (k + 1 < n) e.push_back({s[k], 1.0});
        if (gamma > 0.0) e.push_back({y[k], -gamma});
        b.add_eq(e, 0.0);
    }
    // <p, u_ref> = J(u_ref)
    const Eigen::VectorXd au = am * ur;
    lp::LinearExpr pair = lam.dot(ur);
    for (std::size_t i = 0; i < m; ++i) {
        const double v = au[static_cast<Eigen::Index>(i)];
        if (v == 0.0) continue;
        pair.push_back({mu1[i], -v});
        pair.push_back({mu2[i], v});
    }
    b.add_eq(pair, j.value(u_ref));
    b.add_objective(mu1.sum());
    b.add_objective(mu2.sum());

    const lp::LpSolution sol = lp::solve_lp(b.build());
    const Grid ug = u_ref.grid();
    const Grid dg(std::max<std::size_t>(m, 2), ug.spacing());
    MinNormCertificate out{sol.status, Signal::zeros(ug), Signal::zeros(dg), Signal::zeros(dg), Signal::zeros(ug)};
    if (!sol.optimal()) return out;
    const Eigen::VectorXd l = segment(sol.x, lam);
    const Eigen::VectorXd m1 = segment(sol.x, mu1);
    const Eigen::VectorXd m2 = segment(sol.x, mu2);
    out.lambda = Signal(ug, l);
    out.mu1 = Signal(dg, m1);
    out.mu2 = Signal(dg, m2);
    out.p = Signal(ug, l - am.transpose() * m1 + am.transpose() * m2);
    out.norm = m1.sum() + m2.sum();
    return out;
}

L1Bound feasible_l1_bound(const IntervalOperator& op, const IntervalData& data) {
    check_shapes(op, data);
    const std::size_t n = op.cols();
    const std::size_t m = op.rows();

    lp::LpBuilder primal;
    const auto u = primal.add_variables(n, 0.0);
    add_bound_rows(primal, u, op, data);
    primal.add_objective(u.sum(-1.0));
    const lp::LpSolution ps = lp::solve_lp(primal.build());

    L1Bound out;
    out.status = ps.status;
    if (!ps.optimal()) {
        out.value = ps.status == lp::Status::unbounded ? std::numeric_limits<double>::infinity()
                                                       : std::numeric_limits<double>::quiet_NaN();
        out.dual_value = out.value;
        return out;
    }
    out.value = -ps.objective;

    lp::LpBuilder dual;
    const auto mu1 = dual.add_variables(m, 0.0);
    const auto mu2 = dual.add_variables(m, 0.0);
    const auto& al = op.lower().matrix();
    const auto& au = op.upper().matrix();
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        lp::LinearExpr e = mu1.dot(-al.col(kk));
        const auto e2 = mu2.dot(au.col(kk));
        e.insert(e.end(), e2.begin(), e2.end());
        dual.add_le(e, -1.0);
    }
    dual.add_objective(mu1.dot(data.upper().values()));
    dual.add_objective(mu2.dot(-data.lower().values()));
    const lp::LpSolution ds = lp::solve_lp(dual.build());
    out.dual_value = ds.optimal() ? ds.objective : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace ivreg
