#include "ivreg/baselines.hpp"

#include "ivreg/errors.hpp"
#include "ivreg/lp_builder.hpp"

#include <cmath>
#include <vector>

namespace ivreg {

PrimalSolveReport naive_solve(const Regularizer& j, const DenseOperator& a_noisy, const IntervalData& data) {
    return solve_primal(j, IntervalOperator::exact(a_noisy), data);
}

struct TikhonovPath::Impl {
    Regularizer reg;
    DenseOperator a;
    Signal f;
    lp::VarRange u;
    lp::VarRange r;
    lp::LinearExpr reg_expr;
    lp::SimplexSolver solver;

    static Impl make(const Regularizer& j, const DenseOperator& a, const Signal& f) {
        if (a.rows() != f.size()) throw InputError("tikhonov: operator rows differ from data length");
        lp::LpBuilder b;
        const auto u = b.add_variables(a.cols(), 0.0);
        const auto r = b.add_variables(1, 0.0);
        const auto enc = epigraph_encode(j, u, b);
        const auto& am = a.matrix();
        for (Eigen::Index i = 0; i < am.rows(); ++i) {
            auto hi = u.dot(am.row(i).transpose());
            hi.push_back({r[0], -1.0});
            b.add_le(hi, f[static_cast<std::size_t>(i)]);
            auto lo = u.dot(-am.row(i).transpose());
            lo.push_back({r[0], -1.0});
            b.add_le(lo, -f[static_cast<std::size_t>(i)]);
        }
        b.add_objective({{r[0], 1.0}});
        return Impl{j, a, f, u, r, enc.objective, lp::SimplexSolver(b.build())};
    }
};

TikhonovPath::TikhonovPath(const Regularizer& j, const DenseOperator& a, const Signal& f)
    : impl_(std::make_unique<Impl>(Impl::make(j, a, f))) {}
TikhonovPath::~TikhonovPath() = default;
TikhonovPath::TikhonovPath(TikhonovPath&&) noexcept = default;
TikhonovPath& TikhonovPath::operator=(TikhonovPath&&) noexcept = default;

TikhonovResult TikhonovPath::solve(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("tikhonov: alpha must be positive");
    Impl& s = *impl_;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.solver.problem().num_variables()));
    c[static_cast<Eigen::Index>(s.r[0])] = 1.0;
    for (const auto& t : s.reg_expr) c[static_cast<Eigen::Index>(t.var)] += alpha * t.coef;
    const auto sol = s.solver.resolve(c);
    const Grid g(s.a.cols(), s.f.grid().spacing());
    TikhonovResult out{sol.status, Signal::zeros(g), 0.0, alpha};
    if (!sol.optimal()) return out;
    const Eigen::VectorXd uv =
        sol.x.segment(static_cast<Eigen::Index>(s.u.first), static_cast<Eigen::Index>(s.u.count)).cwiseMax(0.0);
    out.u = Signal(g, uv);
    out.residual = (s.a.matrix() * uv - s.f.values()).cwiseAbs().maxCoeff();
    return out;
}

TikhonovResult tikhonov_linf(const Regularizer& j, const DenseOperator& a, const Signal& f, double alpha) {
    TikhonovPath path(j, a, f);
    return path.solve(alpha);
}

void MorozovConfig::validate() const {
    if (!(c_factor > 1.0)) throw InputError("MorozovConfig: c_factor must exceed 1");
    if (!(delta >= 0.0) || !(h_op >= 0.0)) throw InputError("MorozovConfig: noise levels must be >= 0");
    if (!(alpha_min > 0.0) || !(alpha_max > alpha_min)) throw InputError("MorozovConfig: invalid alpha bracket");
    if (scan_points < 2) throw InputError("MorozovConfig: scan needs at least two points");
    if (!(rel_tol > 0.0)) throw InputError("MorozovConfig: rel_tol must be positive");
}

MorozovResult morozov(const Regularizer& j, const DenseOperator& a, const Signal& f, const MorozovConfig& cfg,
                      bool modified) {
    cfg.validate();
    TikhonovPath path(j, a, f);
    std::size_t evals = 0;

    struct Eval {
        double alpha;
        TikhonovResult sol;
        double target;
        double g;
    };
    auto evaluate = [&](double alpha) {
        ++evals;
        TikhonovResult s = path.solve(alpha);
        if (!s.optimal())
            throw SolveError(std::string("morozov: Tikhonov LP ended with status ") + std::string(lp::to_string(s.status)));
        const double target = cfg.c_factor * (cfg.delta + (modified ? cfg.h_op * l1_norm(s.u) : 0.0));
        const double g = s.residual - target;
        return Eval{alpha, std::move(s), target, g};
    };
    auto finish = [&](Eval e, bool scanned) {
        MorozovResult r{e.alpha, std::move(e.sol), e.target, e.g, evals, scanned};
        return r;
    };

    Eval lo = evaluate(cfg.alpha_min);
    Eval hi = evaluate(cfg.alpha_max);
    bool scanned = false;
    if (!(lo.g <= 0.0 && hi.g >= 0.0)) {
        scanned = true;
        const double l0 = std::log(cfg.alpha_min), l1 = std::log(cfg.alpha_max);
        Eval prev = lo;
        bool found = false;
        for (std::size_t k = 1; k < cfg.scan_points; ++k) {
            const double la = l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(cfg.scan_points - 1);
            Eval cur = k + 1 == cfg.scan_points ? hi : evaluate(std::exp(la));
            if (prev.g <= 0.0 && cur.g >= 0.0) {
                lo = std::move(prev);
                hi = std::move(cur);
                found = true;
                break;
            }
            prev = std::move(cur);
        }
        if (!found) throw SolveError("morozov: discrepancy has no sign change in the alpha bracket");
    }
    if (std::abs(lo.g) <= cfg.rel_tol * lo.target) return finish(std::move(lo), scanned);
    if (std::abs(hi.g) <= cfg.rel_tol * hi.target) return finish(std::move(hi), scanned);

    for (std::size_t it = 0; it < cfg.max_bisections && hi.alpha / lo.alpha >= 1.0 + 1e-9; ++it) {
        const double mid_alpha = std::sqrt(lo.alpha * hi.alpha);
        Eval mid = evaluate(mid_alpha);
        if (std::abs(mid.g) <= cfg.rel_tol * mid.target) return finish(std::move(mid), scanned);
        if (mid.g < 0.0)
            lo = std::move(mid);
        else
            hi = std::move(mid);
    }

    // residual jumps at an LP breakpoint: blend the two bracket solutions
    const Eigen::VectorXd& ul = lo.sol.u.values();
    const Eigen::VectorXd& uh = hi.sol.u.values();
    auto blend = [&](double w) {
        Eval e{std::sqrt(lo.alpha * hi.alpha), lo.sol, 0.0, 0.0};
        e.sol.alpha = e.alpha;
        e.sol.u = lo.sol.u.with_values(w * ul + (1.0 - w) * uh);
        e.sol.residual = (a.matrix() * e.sol.u.values() - f.values()).cwiseAbs().maxCoeff();
        e.target = cfg.c_factor * (cfg.delta + (modified ? cfg.h_op * l1_norm(e.sol.u) : 0.0));
        e.g = e.sol.residual - e.target;
        return e;
    };
    double wl = 1.0, wh = 0.0;  // g <= 0 at wl, g >= 0 at wh
    for (std::size_t it = 0; it < cfg.max_bisections; ++it) {
        const double w = 0.5 * (wl + wh);
        Eval e = blend(w);
        if (std::abs(e.g) <= cfg.rel_tol * e.target) return finish(std::move(e), scanned);
        (e.g < 0.0 ? wl : wh) = w;
    }
    Eval el = blend(wl), eh = blend(wh);
    return std::abs(el.g) <= std::abs(eh.g) ? finish(std::move(el), scanned) : finish(std::move(eh), scanned);
}

}  // namespace ivreg
