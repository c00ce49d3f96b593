#include "ivreg/debias.hpp"

#include "ivreg/errors.hpp"
#include "ivreg/lp_builder.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ivreg {

namespace {

/// LP over (v, t) whose v-projection is the manifold.
struct ManifoldLp {
    std::size_t n;
    lp::VarRange v;
    lp::VarRange t;
    lp::SimplexSolver solver;

    static ManifoldLp build(const ModelManifoldSpec& m) {
        const std::size_t n = m.u_ref.size();
        lp::LpBuilder b;
        const auto v = b.add_variables(n, 0.0);
        const auto enc = epigraph_encode(Regularizer(m.gamma), v, b);
        const auto& al = m.op.lower().matrix();
        const auto& au = m.op.upper().matrix();
        for (Eigen::Index i = 0; i < al.rows(); ++i)
            b.add_le(v.dot(al.row(i).transpose()), m.data.upper()[static_cast<std::size_t>(i)]);
        for (Eigen::Index i = 0; i < au.rows(); ++i)
            b.add_le(v.dot(-au.row(i).transpose()), -m.data.lower()[static_cast<std::size_t>(i)]);
        lp::LinearExpr breg = enc.objective;
        const auto pv = v.dot(-m.p_ref.values());
        breg.insert(breg.end(), pv.begin(), pv.end());
        b.add_le(breg, m.eps);
        if (m.has_cap()) b.add_le(v.dot(m.p_ref.values()), m.c_cap + m.p_ref.values().dot(m.u_ref.values()));
        return ManifoldLp{n, v, enc.t, lp::SimplexSolver(b.build())};
    }

    Eigen::VectorXd lift(const Eigen::VectorXd& cost_v) const {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(v.count + t.count));
        c.head(static_cast<Eigen::Index>(n)) = cost_v;
        return c;
    }

    Eigen::VectorXd point(const Eigen::VectorXd& v_values) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(v.count + t.count));
        x.head(static_cast<Eigen::Index>(n)) = v_values;
        x.tail(static_cast<Eigen::Index>(t.count)) = forward_difference(v_values).cwiseAbs();
        return x;
    }
};

void require_bounded(const ModelManifoldSpec& m) {
    if (!(adjoint_positivity(m.op.lower()) > 0.0))
        throw InputError("model manifold may be unbounded: A^l has a column with zero sum");
}

}  // namespace

ManifoldMembership check_membership(const ModelManifoldSpec& m, const Signal& v, double tol) {
    const Eigen::VectorXd& x = v.values();
    ManifoldMembership r;
    const double dscale = 1.0 + std::max(linf_norm(m.data.upper().values()), linf_norm(m.data.lower().values()));
    const double neg = std::max(0.0, -x.minCoeff());
    const double up = std::max(0.0, (m.op.lower().matrix() * x - m.data.upper().values()).maxCoeff());
    const double lo = std::max(0.0, (m.data.lower().values() - m.op.upper().matrix() * x).maxCoeff());
    const double jv = Regularizer(m.gamma).value(x);
    const double breg = std::max(0.0, jv - m.p_ref.values().dot(x) - m.eps);
    const double pu = m.p_ref.values().dot(x - m.u_ref.values());
    const double cap = m.has_cap() ? std::max(0.0, pu - m.c_cap) : 0.0;
    r.nonnegative = neg <= tol;
    r.upper_rows = up <= tol * dscale;
    r.lower_rows = lo <= tol * dscale;
    r.bregman = breg <= tol * (1.0 + jv);
    r.cap = cap <= tol * (1.0 + std::abs(pu));
    r.max_violation = std::max({neg, up / dscale, lo / dscale, breg / (1.0 + jv), cap / (1.0 + std::abs(pu))});
    return r;
}

ModelManifoldSpec manifold_from_solve(const PrimalSolveReport& report, const Regularizer& j,
                                      const IntervalOperator& op, const IntervalData& data, double eps,
                                      double c_cap) {
    if (!report.optimal()) throw SolveError("manifold_from_solve: reconstruction is not optimal");
    if (!(eps >= 0.0)) throw InputError("manifold_from_solve: eps must be >= 0");
    if (!(c_cap > 0.0)) throw InputError("manifold_from_solve: cap must be positive");
    const bool positive = report.u.values().minCoeff() > 0.0;
    return ModelManifoldSpec{report.u, report.certificate.p, eps,
                             positive ? std::numeric_limits<double>::infinity() : c_cap,
                             op, data, j.gamma()};
}

DebiasResult debias(const ModelManifoldSpec& m, const DebiasOptions& options) {
    return debias(m, m.op.midpoint(), m.data.midpoint(), options);
}

namespace {

/// min 0.5 w^T Q w - c^T w over the unit simplex; primal active-set method
/// started from the feasible point `w`.
Eigen::VectorXd simplex_qp(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, Eigen::VectorXd w) {
    const Eigen::Index k = w.size();
    const double scale = 1.0 + q.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff();
    std::vector<char> passive(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) passive[static_cast<std::size_t>(j)] = w[j] > 0.0;
    for (int iter = 0; iter < 50 * static_cast<int>(k) + 50; ++iter) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < k; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        const auto p = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(p + 1, p + 1);
        Eigen::VectorXd rhs(p + 1);
        for (Eigen::Index a = 0; a < p; ++a) {
            for (Eigen::Index b = 0; b < p; ++b) kkt(a, b) = q(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
            kkt(a, p) = kkt(p, a) = 1.0;
            rhs[a] = c[idx[static_cast<std::size_t>(a)]];
        }
        rhs[p] = 1.0;
        const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
        const Eigen::VectorXd z = sol.head(p);
        if (z.size() == 0 || z.minCoeff() > 0.0) {
            w.setZero();
            for (Eigen::Index a = 0; a < p; ++a) w[idx[static_cast<std::size_t>(a)]] = z[a];
            const Eigen::VectorXd mult = (q * w - c).array() + sol[p];
            Eigen::Index enter = -1;
            double worst = -1e-13 * scale;
            for (Eigen::Index j = 0; j < k; ++j)
                if (!passive[static_cast<std::size_t>(j)] && mult[j] < worst) {
                    worst = mult[j];
                    enter = j;
                }
            if (enter < 0) return w;
            passive[static_cast<std::size_t>(enter)] = 1;
            continue;
        }
        double alpha = 1.0;
        for (Eigen::Index a = 0; a < p; ++a) {
            const double wj = w[idx[static_cast<std::size_t>(a)]];
            if (z[a] <= 0.0 && wj - z[a] > 0.0) alpha = std::min(alpha, wj / (wj - z[a]));
        }
        for (Eigen::Index a = 0; a < p; ++a) {
            const Eigen::Index j = idx[static_cast<std::size_t>(a)];
            w[j] += alpha * (z[a] - w[j]);
            if (w[j] <= 1e-15) {
                w[j] = 0.0;
                passive[static_cast<std::size_t>(j)] = 0;
            }
        }
        w /= w.sum();
    }
    return w;
}

}  // namespace

DebiasResult debias(const ModelManifoldSpec& m, const DenseOperator& a, const Signal& f,
                    const DebiasOptions& options) {
    const std::size_t n = m.u_ref.size();
    if (a.cols() != n || a.rows() != f.size()) throw InputError("debias: operator and data shapes differ");
    require_bounded(m);
    ManifoldLp lpm = ManifoldLp::build(m);
    const Eigen::MatrixXd& am = a.matrix();
    const Eigen::VectorXd& fv = f.values();
    const auto nv = static_cast<Eigen::Index>(n);

    auto objective = [&](const Eigen::VectorXd& x) { return 0.5 * (am * x.head(nv) - fv).squaredNorm(); };

    // The iterate is kept as a convex combination of feasible atoms; u_ref is the first.
    std::vector<Eigen::VectorXd> atoms{lpm.point(m.u_ref.values())};
    std::vector<Eigen::VectorXd> images{am * m.u_ref.values()};
    std::vector<double> weights{1.0};
    Eigen::VectorXd x = atoms.front();

    DebiasResult res{m.u_ref, 0.0, std::numeric_limits<double>::infinity(), 0, false, {}};
    double best_lower = -std::numeric_limits<double>::infinity();
    double fx = objective(x);

    auto find_atom = [&](const Eigen::VectorXd& s) {
        const double tol = 1e-12 * (1.0 + s.lpNorm<Eigen::Infinity>());
        for (std::size_t k = 0; k < atoms.size(); ++k)
            if ((atoms[k] - s).lpNorm<Eigen::Infinity>() <= tol) return k;
        return atoms.size();
    };

    for (std::size_t it = 0;; ++it) {
        const Eigen::VectorXd grad = lpm.lift(am.transpose() * (am * x.head(nv) - fv));
        const lp::LpSolution s = lpm.solver.resolve(grad);
        if (!s.optimal())
            throw SolveError(std::string("debias: linear subproblem ended with status ") +
                             std::string(lp::to_string(s.status)));
        const double fw_gap = std::max(0.0, grad.dot(x - s.x));
        best_lower = std::max(best_lower, fx - fw_gap);
        res.gap = std::max(0.0, fx - best_lower);
        res.gap_history.push_back(res.gap);
        res.iterations = it;
        if (res.gap <= options.gap_tol) {
            res.converged = true;
            break;
        }
        if (it >= options.max_iterations) break;

        std::size_t hit = find_atom(s.x);
        if (hit == atoms.size()) {
            atoms.push_back(s.x);
            images.push_back(am * s.x.head(nv));
            weights.push_back(0.0);
        }

        if (options.variant == FrankWolfeVariant::fully_corrective) {
            const auto k = static_cast<Eigen::Index>(atoms.size());
            Eigen::MatrixXd img(fv.size(), k);
            for (Eigen::Index j = 0; j < k; ++j) img.col(j) = images[static_cast<std::size_t>(j)];
            const Eigen::MatrixXd q = img.transpose() * img;
            const Eigen::VectorXd c = img.transpose() * fv;
            Eigen::VectorXd w0(k);
            for (Eigen::Index j = 0; j < k; ++j) w0[j] = weights[static_cast<std::size_t>(j)];
            const Eigen::VectorXd w = simplex_qp(q, c, w0);
            for (Eigen::Index j = 0; j < k; ++j) weights[static_cast<std::size_t>(j)] = w[j];
            // Guard against an inexact inner solve increasing the objective.
            Eigen::VectorXd trial = Eigen::VectorXd::Zero(x.size());
            for (Eigen::Index j = 0; j < k; ++j) trial += w[j] * atoms[static_cast<std::size_t>(j)];
            if (objective(trial) > fx) {
                for (auto& wj : weights) wj = 0.0;
                // fall back to a line search towards the new vertex
                const Eigen::VectorXd d = s.x - x;
                const double curv = (am * d.head(nv)).squaredNorm();
                const double step = curv > 0.0 ? std::clamp(-grad.dot(d) / curv, 0.0, 1.0) : 1.0;
                Eigen::VectorXd back = Eigen::VectorXd::Zero(k);
                for (Eigen::Index j = 0; j < k; ++j) back[j] = w0[j] * (1.0 - step);
                back[static_cast<Eigen::Index>(find_atom(s.x))] += step;
                for (Eigen::Index j = 0; j < k; ++j) weights[static_cast<std::size_t>(j)] = back[j];
            }
        } else {
            hit = find_atom(s.x);
            Eigen::VectorXd d = s.x - x;
            double step_max = 1.0;
            std::size_t away = atoms.size();
            if (options.variant == FrankWolfeVariant::away_step) {
                double worst = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < atoms.size(); ++k) {
                    if (weights[k] <= 0.0) continue;
                    const double g = grad.dot(atoms[k]);
                    if (g > worst) {
                        worst = g;
                        away = k;
                    }
                }
                if (worst - grad.dot(x) > fw_gap && weights[away] < 1.0) {
                    d = x - atoms[away];
                    step_max = weights[away] / (1.0 - weights[away]);
                } else {
                    away = atoms.size();
                }
            }
            const double slope = grad.dot(d);
            if (slope >= 0.0) break;
            const double curv = (am * d.head(nv)).squaredNorm();
            const double step = std::max(0.0, curv > 0.0 ? std::min(step_max, -slope / curv) : step_max);
            if (away == atoms.size()) {
                for (auto& w : weights) w *= 1.0 - step;
                weights[hit] += step;
            } else {
                for (auto& w : weights) w *= 1.0 + step;
                weights[away] -= step;
            }
        }

        for (std::size_t k = atoms.size(); k-- > 0;) {
            if (weights[k] <= 1e-14) {
                atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(k));
                images.erase(images.begin() + static_cast<std::ptrdiff_t>(k));
                weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(k));
            }
        }
        double total = 0.0;
        for (double w : weights) total += w;
        x.setZero();
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            weights[k] /= total;
            x += weights[k] * atoms[k];
        }
        fx = objective(x);
    }

    res.u = m.u_ref.with_values(x.head(nv));
    res.objective = objective(x);
    return res;
}

JumpDetection detect_jumps(const Signal& u, const Signal& p, double gamma, double nu, JumpPath path) {
    require_same_grid(u, p, "detect_jumps");
    if (!(nu >= 0.0 && nu < 1.0)) throw InputError("detect_jumps: nu must lie in [0, 1)");
    const std::size_t n = u.size();
    const Eigen::VectorXd du = forward_difference(u.values());

    // q = qp - qm with qp, qm in [0, 1]; objective sum(qp + qm).
    lp::LpBuilder b;
    const auto qp = b.add_variables(n - 1, 0.0);
    const auto qm = b.add_variables(n - 1, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        b.add_le({{qp[i], 1.0}}, 1.0);
        b.add_le({{qm[i], 1.0}}, 1.0);
    }
    b.add_objective(qp.sum());
    b.add_objective(qm.sum());

    JumpDetection out;
    if (path == JumpPath::tv_pairing) {
        lp::LinearExpr e = qp.dot(du);
        const auto neg = qm.dot(-du);
        e.insert(e.end(), neg.begin(), neg.end());
        b.add_eq(e, tv(u));
    } else {
        // y: min |y|_1 s.t. |y| <= 1, <y, u> = |u|_1
        lp::LpBuilder yb;
        const auto yp = yb.add_variables(n, 0.0);
        const auto ym = yb.add_variables(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            yb.add_le({{yp[i], 1.0}}, 1.0);
            yb.add_le({{ym[i], 1.0}}, 1.0);
        }
        lp::LinearExpr pair = yp.dot(u.values());
        const auto neg = ym.dot(-u.values());
        pair.insert(pair.end(), neg.begin(), neg.end());
        yb.add_eq(pair, l1_norm(u));
        yb.add_objective(yp.sum());
        yb.add_objective(ym.sum());
        const auto ys = lp::solve_lp(yb.build());
        if (!ys.optimal()) {
            out.status = ys.status;
            return out;
        }
        const Eigen::VectorXd y = ys.x.head(static_cast<Eigen::Index>(n)) - ys.x.tail(static_cast<Eigen::Index>(n));
        // D^T q = p - gamma y
        const Eigen::VectorXd rhs = p.values() - gamma * y;
        for (std::size_t k = 0; k < n; ++k) {
            lp::LinearExpr e;
            if (k > 0) {
                e.push_back({qp[k - 1], 1.0});
                e.push_back({qm[k - 1], -1.0});
            }
            if (k + 1 < n) {
                e.push_back({qp[k], -1.0});
                e.push_back({qm[k], 1.0});
            }
            b.add_eq(e, rhs[static_cast<Eigen::Index>(k)]);
        }
    }
    const auto sol = lp::solve_lp(b.build());
    out.status = sol.status;
    if (!sol.optimal()) return out;
    const auto h = static_cast<Eigen::Index>(n - 1);
    out.q = sol.x.head(h) - sol.x.segment(h, h);
    std::vector<std::size_t> idx;
    for (Eigen::Index i = 0; i < h; ++i)
        if (std::abs(out.q[i]) > 1.0 - nu) idx.push_back(static_cast<std::size_t>(i));
    out.jumps = IndexSet(std::move(idx), n - 1);
    return out;
}

RegionDecomposition regions_from_jumps(const IndexSet& jumps, std::size_t n) {
    if (n < 2) throw InputError("regions_from_jumps: need n >= 2");
    RegionDecomposition r;
    std::size_t start = 0;
    for (auto j : jumps.indices()) {
        if (j + 1 >= n) throw InputError("regions_from_jumps: jump slot outside the domain");
        r.jumps.push_back(j);
        r.regions.push_back({start, j + 1});
        start = j + 1;
    }
    r.regions.push_back({start, n});
    return r;
}

double region_mean(const Signal& u, const Region& r) {
    if (r.end > u.size() || r.begin >= r.end) throw InputError("region_mean: region outside the signal");
    return u.values().segment(static_cast<Eigen::Index>(r.begin), static_cast<Eigen::Index>(r.size())).mean();
}

namespace {

template <class Visit>
void run_region_lps(const ModelManifoldSpec& m, const RegionDecomposition& regions, Visit&& visit) {
    require_bounded(m);
    ManifoldLp lpm = ManifoldLp::build(m);
    for (const auto& r : regions.regions) {
        if (r.end > lpm.n || r.begin >= r.end) throw InputError("error_bars: region outside the signal");
        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lpm.n));
        c.segment(static_cast<Eigen::Index>(r.begin), static_cast<Eigen::Index>(r.size())).setConstant(1.0 / static_cast<double>(r.size()));
        const auto lo = lpm.solver.resolve(lpm.lift(c));
        const auto hi = lpm.solver.resolve(lpm.lift(-c));
        visit(r, lo, hi, static_cast<Eigen::Index>(lpm.n));
    }
}

}  // namespace

ErrorBars error_bars(const ModelManifoldSpec& m, const RegionDecomposition& regions) {
    ErrorBars out;
    run_region_lps(m, regions, [&](const Region& r, const lp::LpSolution& lo, const lp::LpSolution& hi, Eigen::Index) {
        RegionBar bar;
        bar.region = r;
        bar.ref_mean = region_mean(m.u_ref, r);
        bar.lower_status = lo.status;
        bar.upper_status = hi.status;
        bar.lower = lo.optimal() ? lo.objective : std::numeric_limits<double>::quiet_NaN();
        bar.upper = hi.optimal() ? -hi.objective : std::numeric_limits<double>::quiet_NaN();
        out.bars.push_back(bar);
    });
    return out;
}

std::vector<Signal> error_bar_vertices(const ModelManifoldSpec& m, const RegionDecomposition& regions) {
    std::vector<Signal> out;
    run_region_lps(m, regions, [&](const Region&, const lp::LpSolution& lo, const lp::LpSolution& hi, Eigen::Index n) {
        if (lo.optimal()) out.push_back(m.u_ref.with_values(lo.x.head(n).cwiseMax(0.0)));
        if (hi.optimal()) out.push_back(m.u_ref.with_values(hi.x.head(n).cwiseMax(0.0)));
    });
    return out;
}

std::string ErrorBars::to_csv(const std::optional<Signal>& exact) const {
    std::ostringstream os;
    os << "region_start,region_end,lower,upper,ref_mean";
    if (exact) os << ",exact_mean";
    os << '\n';
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& b : bars) {
        os << b.region.begin << ',' << b.region.end - 1 << ',' << num(b.lower) << ',' << num(b.upper) << ','
           << num(b.ref_mean);
        if (exact) os << ',' << num(region_mean(*exact, b.region));
        os << '\n';
    }
    return os.str();
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ErrorBars::envelopes(std::size_t n) const {
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(nn, std::numeric_limits<double>::quiet_NaN());
    Eigen::VectorXd hi = lo;
    for (const auto& b : bars)
        for (std::size_t i = b.region.begin; i < b.region.end && i < n; ++i) {
            lo[static_cast<Eigen::Index>(i)] = b.lower;
            hi[static_cast<Eigen::Index>(i)] = b.upper;
        }
    return {lo, hi};
}

}  // namespace ivreg
