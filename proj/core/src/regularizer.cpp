#include "ivreg/regularizer.hpp"

#include "ivreg/errors.hpp"

#include "json.hpp"

#include <cmath>

namespace ivreg {

Regularizer::Regularizer(double gamma) : gamma_(gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("Regularizer: gamma must be finite and >= 0");
}

double Regularizer::value(const Eigen::VectorXd& u) const { return tv(u) + gamma_ * l1_norm(u); }

double Regularizer::value(const Signal& u) const { return value(u.values()); }

std::string SubgradientDecomposition::to_json() const {
    nlohmann::json j;
    j["s"] = std::vector<double>(s.data(), s.data() + s.size());
    j["y"] = std::vector<double>(y.data(), y.data() + y.size());
    return j.dump();
}

MembershipResult in_subdiff_zero(const Regularizer& j, const Signal& p, double tol) {
    if (!(tol > 0.0)) throw InputError("in_subdiff_zero: tol must be positive");
    const std::size_t n = p.size();
    const double gamma = j.gamma();
    const bool use_y = gamma > 0.0;

    lp::LpBuilder b;
    const auto s = b.add_variables(n - 1, -1.0);
    const auto y = b.add_variables(use_y ? n : 0, -1.0);
    const auto r = b.add_variables(1, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) b.add_le({{s[i], 1.0}}, 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) b.add_le({{y[i], 1.0}}, 1.0);

    // (D^T s)_k = s_{k-1} - s_k, with the out-of-range terms absent.
    for (std::size_t k = 0; k < n; ++k) {
        lp::LinearExpr e;
        if (k > 0) e.push_back({s[k - 1], 1.0});
        if (k + 1 < n) e.push_back({s[k], -1.0});
        if (use_y) e.push_back({y[k], gamma});
        lp::LinearExpr hi = e, lo = e;
        hi.push_back({r[0], -1.0});
        for (auto& t : lo) t.coef = -t.coef;
        lo.push_back({r[0], -1.0});
        b.add_le(hi, p[k]);
        b.add_le(lo, -p[k]);
    }
    b.add_objective({{r[0], 1.0}});

    const lp::LpSolution sol = lp::solve_lp(b.build());
    MembershipResult out;
    if (!sol.optimal()) {
        out.residual = std::numeric_limits<double>::infinity();
        return out;
    }
    SubgradientDecomposition w;
    w.s = sol.x.segment(static_cast<Eigen::Index>(s.first), static_cast<Eigen::Index>(s.count));
    w.y = use_y ? Eigen::VectorXd(sol.x.segment(static_cast<Eigen::Index>(y.first), static_cast<Eigen::Index>(n)))
                : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const Eigen::VectorXd recon = forward_difference_adjoint(w.s) + gamma * w.y;
    out.residual = (recon - p.values()).cwiseAbs().maxCoeff();
    out.member = out.residual <= tol * (1.0 + linf_norm(p));
    if (out.member) out.witness = std::move(w);
    return out;
}

bool in_subdiff_at(const Regularizer& j, const Signal& p, const Signal& u, double tol) {
    require_same_grid(p, u, "in_subdiff_at");
    if (!in_subdiff_zero(j, p, tol).member) return false;
    const double ju = j.value(u);
    return std::abs(ju - p.values().dot(u.values())) <= tol * (1.0 + ju);
}

double bregman(const Regularizer& j, const Signal& p, const Signal& v) {
    require_same_grid(p, v, "bregman");
    return j.value(v) - p.values().dot(v.values());
}

double symm_bregman(const Signal& p_a, const Signal& p_b, const Signal& u_a, const Signal& u_b) {
    require_same_grid(p_a, p_b, "symm_bregman");
    require_same_grid(u_a, u_b, "symm_bregman");
    require_same_grid(p_a, u_a, "symm_bregman");
    return (p_a.values() - p_b.values()).dot(u_a.values() - u_b.values());
}

EpigraphEncoding epigraph_encode(const Regularizer& j, const lp::VarRange& u, lp::LpBuilder& builder) {
    if (u.size() < 2) throw InputError("epigraph_encode: need at least two samples");
    EpigraphEncoding enc;
    enc.t = builder.add_variables(u.size() - 1, 0.0);
    enc.first_row = builder.num_inequalities();
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        builder.add_le({{u[i + 1], 1.0}, {u[i], -1.0}, {enc.t[i], -1.0}}, 0.0);
        builder.add_le({{u[i], 1.0}, {u[i + 1], -1.0}, {enc.t[i], -1.0}}, 0.0);
    }
    enc.objective = enc.t.sum();
    if (j.gamma() > 0.0) {
        const auto l1 = u.sum(j.gamma());
        enc.objective.insert(enc.objective.end(), l1.begin(), l1.end());
    }
    return enc;
}

}  // namespace ivreg
